#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "guesr/corpus.hpp"
#include "guesr/encoders.hpp"
#include "guesr/interest.hpp"
#include "guesr/optim.hpp"

namespace guesr {

struct ModelConfig {
    Backbone backbone = Backbone::transformer;
    int window = 16;
    int dim = 32;
    int capsules = 2;
    int routing_iters = 2;
    int graph_layers = 2;
    int heads = 2;
    int tf_blocks = 1;
};

// Learnable state plus the forward wiring for one example. The same item
// table feeds the graph-contrastive side and the sequence side.
class Model {
public:
    ModelConfig config;
    int item_count = 0;
    int user_count = 0;
    ParamStore params;

    static Model init(const ModelConfig& config, int item_count, int user_count, uint64_t seed);

    void save(const std::string& path) const;
    static Model load(const std::string& path);

    // Per-tape leaves for every parameter, plus typed views into them.
    struct Bound {
        std::map<std::string, Var> leaves;
        Var item_table, user_table, alpha;
        TransformerVars transformer;
        GruVars gru;
        std::vector<Var> capsule_proj;
        std::vector<Var> all() const;
    };
    Bound bind(Tape& tape) const;

    // window -> encoder -> capsules -> projected interests (each 1 x d)
    std::vector<Var> interests_for_window(Tape& tape, const Bound& bound,
                                          const Window& win) const;

    Var score_example(Tape& tape, const Bound& bound, const std::vector<Var>& interests, int user,
                      int item, bool squashed) const;
};

}  // namespace guesr
