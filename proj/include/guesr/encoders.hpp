#pragma once

#include <vector>

#include "guesr/tape.hpp"
#include "guesr/views.hpp"

namespace guesr {

enum class Backbone { transformer, gru };

struct SeqEncoderConfig {
    Backbone backbone = Backbone::transformer;
    int dim = 32;
    int heads = 2;
    int blocks = 1;
    int window = 16;  // positional table length for the transformer
};

struct GraphEncoderConfig {
    int layers = 2;  // L; alpha carries L+1 entries
};

struct LightGcnResult {
    Var node_embeddings;  // one row per view node, sorted node order
    int anchor_row = 0;
};

// Layer propagation over the view's unweighted pruned topology with
// within-view degrees; output rows are Σ_l alpha_l E^(l).
LightGcnResult lightgcn_forward(Tape& tape, const ViewSample& view, Var item_table, Var alpha,
                                const GraphEncoderConfig& config);

struct TransformerBlockVars {
    Var wq, wk, wv, wo;
    Var ffn_w1, ffn_b1, ffn_w2, ffn_b2;
};

struct TransformerVars {
    Var pos_table;  // window x d, indexed by distance from the sequence end
    Var wz;
    std::vector<TransformerBlockVars> blocks;
};

// Z = Blocks(S + positions) . Wz + S, with padding keys masked out of the
// attention and padded rows of Z zeroed.
Var transformer_forward(Tape& tape, Var item_rows, const std::vector<char>& valid,
                        const TransformerVars& vars, const SeqEncoderConfig& config);

struct GruVars {
    Var wxr, whr, br;
    Var wxz, whz, bz;
    Var wxn, whn, bn;
    Var wz;
};

// Standard gated recurrence over valid positions (padding copies the previous
// hidden state); Z = H . Wz + S with padded rows zeroed.
Var gru_forward(Tape& tape, Var item_rows, const std::vector<char>& valid, const GruVars& vars);

}  // namespace guesr
