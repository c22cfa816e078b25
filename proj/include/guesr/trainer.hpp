#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "guesr/buckets.hpp"
#include "guesr/corpus.hpp"
#include "guesr/eval.hpp"
#include "guesr/girg.hpp"
#include "guesr/model.hpp"
#include "guesr/objective.hpp"

namespace guesr {

enum class Variant { full, no_gcl, unweighted_graph, random_negatives };

std::string variant_name(Variant v);        // config token, e.g. "no_gcl"
std::string variant_display(Variant v);     // table label, e.g. "GUESR-GCL"
Variant parse_variant(const std::string&);

enum class SplitKind { train, val, test };

struct RunConfig {
    std::string data;
    std::string attributes;

    GirgConfig girg;
    int view_depth = 2;

    int buckets = 4;
    double bucket_lambda = 0.5;
    int contrast_negs = 4;

    ModelConfig model;

    LossWeights loss;
    int pred_negs = 1;

    int epochs = 20;
    int batch_size = 32;
    double lr = 3e-3;
    uint64_t seed = 0;
    bool seed_set = false;

    Variant variant = Variant::full;
    AssignRule assign_rule = AssignRule::nearest;
    bool infonce_literal = false;
    int patience = 0;
    bool deterministic = true;

    std::string checkpoint = "guesr.ckpt";
    std::string log;
    std::string report;
    SplitKind eval_split = SplitKind::test;

    static RunConfig from_file(const std::string& path);
    void set(const std::string& key, const std::string& value);
    void validate() const;
    std::string describe() const;  // JSON of the effective configuration
};

struct EpochLog {
    int epoch = 0;
    double loss_total = 0.0;
    double loss_pred = 0.0;
    double loss_cl = 0.0;
    double reg = 0.0;
    std::vector<int> bucket_census;
    int reseeded_buckets = 0;
    double seconds = 0.0;
    double val_ndcg10 = -1.0;  // filled when patience > 0
};

struct TrainResult {
    std::string checkpoint_path;
    std::vector<EpochLog> epochs;
};

TrainResult train(const RunConfig& config);
TrainResult train(const RunConfig& config, const Corpus& corpus);

RankReport evaluate_model(const Model& model, const Corpus& corpus, const Split& split,
                          SplitKind kind);
RankReport evaluate_cmd(const RunConfig& config);
RankReport evaluate_cmd(const RunConfig& config, const Corpus& corpus);

struct AblationCell {
    Variant variant;
    double recall10 = 0, ndcg10 = 0, recall20 = 0, ndcg20 = 0;  // means over seeds
};

struct AblationTable {
    std::vector<AblationCell> cells;  // cells[0] is the full model
    std::string to_text() const;      // value (+delta%) columns per variant
    std::string to_json() const;
};

AblationTable ablate(const RunConfig& base, const std::vector<Variant>& variants,
                     const std::vector<uint64_t>& seeds, const std::string& workdir);

struct GraphSummary {
    int items = 0;
    int users = 0;
    long long edges_raw = 0;
    long long edges_kept = 0;
    std::vector<long long> degree_histogram;
    std::string to_json() const;
};

GraphSummary build_graph_cmd(const RunConfig& config, const std::string& out_path);

// Planted-block generator: each user draws a home block and a mostly
// within-block sequence (10% cross-block noise); the block id doubles as the
// item attribute.
Corpus synth_corpus(int blocks, int items_per_block, int users, uint64_t seed);

void write_corpus(const Corpus& corpus, const std::string& data_path,
                  const std::string& attributes_path);

std::string corpus_summary_json(const Corpus& corpus);

}  // namespace guesr
