#include "guesr/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "guesr/errors.hpp"
#include "guesr/views.hpp"
#include "json.hpp"

namespace guesr {

namespace {

using nlohmann::json;

int to_int(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        const int v = std::stoi(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected integer, got '" + value + "'");
    }
}

uint64_t to_u64(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        const uint64_t v = std::stoull(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected unsigned integer, got '" + value + "'");
    }
}

double to_double(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected number, got '" + value + "'");
    }
}

bool to_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw ConfigError("key '" + key + "': expected true/false, got '" + value + "'");
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t");
    size_t b = s.find_last_not_of(" \t");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

}  // namespace

std::string variant_name(Variant v) {
    switch (v) {
        case Variant::full: return "full";
        case Variant::no_gcl: return "no_gcl";
        case Variant::unweighted_graph: return "unweighted_graph";
        case Variant::random_negatives: return "random_negatives";
    }
    return "full";
}

std::string variant_display(Variant v) {
    switch (v) {
        case Variant::full: return "GUESR";
        case Variant::no_gcl: return "GUESR-GCL";
        case Variant::unweighted_graph: return "GUESR-W";
        case Variant::random_negatives: return "GUESR-BCS";
    }
    return "GUESR";
}

Variant parse_variant(const std::string& s) {
    if (s == "full") return Variant::full;
    if (s == "no_gcl") return Variant::no_gcl;
    if (s == "unweighted_graph") return Variant::unweighted_graph;
    if (s == "random_negatives") return Variant::random_negatives;
    throw ConfigError("unknown variant '" + s + "'");
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config: " + path);
    RunConfig cfg;
    std::string line;
    long long line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

void RunConfig::set(const std::string& key, const std::string& value) {
    if (key == "data") data = value;
    else if (key == "attributes") attributes = value;
    else if (key == "girg_n") girg.max_interval = to_int(key, value);
    else if (key == "girg_epsilon") girg.epsilon = to_double(key, value);
    else if (key == "view_depth") view_depth = to_int(key, value);
    else if (key == "buckets") buckets = to_int(key, value);
    else if (key == "bucket_lambda") bucket_lambda = to_double(key, value);
    else if (key == "contrast_negs") contrast_negs = to_int(key, value);
    else if (key == "window") model.window = to_int(key, value);
    else if (key == "dim") model.dim = to_int(key, value);
    else if (key == "capsules") model.capsules = to_int(key, value);
    else if (key == "routing_iters") model.routing_iters = to_int(key, value);
    else if (key == "graph_layers") model.graph_layers = to_int(key, value);
    else if (key == "heads") model.heads = to_int(key, value);
    else if (key == "tf_blocks") model.tf_blocks = to_int(key, value);
    else if (key == "backbone") {
        if (value == "transformer") model.backbone = Backbone::transformer;
        else if (value == "gru") model.backbone = Backbone::gru;
        else throw ConfigError("backbone must be transformer or gru, got '" + value + "'");
    }
    else if (key == "theta1") loss.theta1 = to_double(key, value);
    else if (key == "theta2") loss.theta2 = to_double(key, value);
    else if (key == "theta3") loss.theta3 = to_double(key, value);
    else if (key == "tau") loss.tau = to_double(key, value);
    else if (key == "pred_negs") pred_negs = to_int(key, value);
    else if (key == "epochs") epochs = to_int(key, value);
    else if (key == "batch_size") batch_size = to_int(key, value);
    else if (key == "lr") lr = to_double(key, value);
    else if (key == "seed") {
        seed = to_u64(key, value);
        seed_set = true;
    }
    else if (key == "variant") variant = parse_variant(value);
    else if (key == "assign_rule") {
        if (value == "nearest") assign_rule = AssignRule::nearest;
        else if (value == "literal") assign_rule = AssignRule::literal;
        else throw ConfigError("assign_rule must be nearest or literal, got '" + value + "'");
    }
    else if (key == "infonce_denominator") {
        if (value == "standard") infonce_literal = false;
        else if (value == "literal") infonce_literal = true;
        else throw ConfigError("infonce_denominator must be standard or literal");
    }
    else if (key == "patience") patience = to_int(key, value);
    else if (key == "deterministic") deterministic = to_bool(key, value);
    else if (key == "checkpoint") checkpoint = value;
    else if (key == "log") log = value;
    else if (key == "report") report = value;
    else if (key == "eval_split") {
        if (value == "train") eval_split = SplitKind::train;
        else if (value == "val") eval_split = SplitKind::val;
        else if (value == "test") eval_split = SplitKind::test;
        else throw ConfigError("eval_split must be train, val or test");
    }
    else throw ConfigError("unknown config key '" + key + "'");
}

void RunConfig::validate() const {
    if (!seed_set) throw ConfigError("seed is mandatory");
    if (girg.max_interval < 1) throw ConfigError("girg_n must be >= 1");
    if (girg.epsilon < 0.0 || girg.epsilon >= 1.0) throw ConfigError("girg_epsilon must be in [0,1)");
    if (view_depth < 1) throw ConfigError("view_depth must be >= 1");
    if (buckets < 2) throw ConfigError("buckets must be >= 2");
    if (bucket_lambda < 0.0 || bucket_lambda > 1.0) throw ConfigError("bucket_lambda must be in [0,1]");
    if (contrast_negs < 1) throw ConfigError("contrast_negs must be >= 1");
    if (model.window < 1) throw ConfigError("window must be >= 1");
    if (model.dim < 1) throw ConfigError("dim must be >= 1");
    if (model.dim % model.heads != 0) throw ConfigError("dim must be divisible by heads");
    if (model.capsules < 1) throw ConfigError("capsules must be >= 1");
    if (model.routing_iters < 1) throw ConfigError("routing_iters must be >= 1");
    if (model.graph_layers < 1) throw ConfigError("graph_layers must be >= 1");
    if (model.tf_blocks < 1) throw ConfigError("tf_blocks must be >= 1");
    if (loss.tau <= 0.0) throw ConfigError("tau must be > 0");
    if (loss.theta1 < 0.0 || loss.theta2 < 0.0 || loss.theta3 < 0.0)
        throw ConfigError("theta weights must be non-negative");
    if (pred_negs < 1) throw ConfigError("pred_negs must be >= 1");
    if (epochs < 1) throw ConfigError("epochs must be >= 1");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (lr <= 0.0) throw ConfigError("lr must be > 0");
    if (patience < 0) throw ConfigError("patience must be >= 0");
}

std::string RunConfig::describe() const {
    json j;
    j["data"] = data;
    j["attributes"] = attributes;
    j["girg_n"] = girg.max_interval;
    j["girg_epsilon"] = girg.epsilon;
    j["view_depth"] = view_depth;
    j["buckets"] = buckets;
    j["bucket_lambda"] = bucket_lambda;
    j["contrast_negs"] = contrast_negs;
    j["window"] = model.window;
    j["dim"] = model.dim;
    j["capsules"] = model.capsules;
    j["routing_iters"] = model.routing_iters;
    j["graph_layers"] = model.graph_layers;
    j["heads"] = model.heads;
    j["tf_blocks"] = model.tf_blocks;
    j["backbone"] = model.backbone == Backbone::gru ? "gru" : "transformer";
    j["theta1"] = loss.theta1;
    j["theta2"] = loss.theta2;
    j["theta3"] = loss.theta3;
    j["tau"] = loss.tau;
    j["pred_negs"] = pred_negs;
    j["epochs"] = epochs;
    j["batch_size"] = batch_size;
    j["lr"] = lr;
    j["seed"] = seed;
    j["variant"] = variant_name(variant);
    j["assign_rule"] = assign_rule == AssignRule::nearest ? "nearest" : "literal";
    j["infonce_denominator"] = infonce_literal ? "literal" : "standard";
    j["patience"] = patience;
    j["deterministic"] = deterministic;
    j["checkpoint"] = checkpoint;
    j["eval_split"] = eval_split == SplitKind::test ? "test"
                      : eval_split == SplitKind::val ? "val" : "train";
    return j.dump();
}

namespace {

// interests as a plain R x d tensor for the candidate scorer
Tensor interests_tensor(Tape& tape, const std::vector<Var>& interests) {
    Tensor out(int(interests.size()), tape.val(interests[0]).cols);
    for (size_t r = 0; r < interests.size(); ++r) {
        const Tensor& row = tape.val(interests[r]);
        std::copy(row.v.begin(), row.v.end(), out.v.begin() + long(r) * out.cols);
    }
    return out;
}

void mark_items(std::vector<char>& mask, const std::vector<int>& items) {
    for (int i : items) mask[size_t(i)] = 1;
}

}  // namespace

RankReport evaluate_model(const Model& model, const Corpus& corpus, const Split& split,
                          SplitKind kind) {
    RankReport report;
    const Tensor& item_emb = model.params.value("item_emb");
    const Tensor& user_emb = model.params.value("user_emb");
    const int n_items = model.item_count;

    for (int u = 0; u < corpus.user_count(); ++u) {
        std::vector<int> prefix;
        std::vector<int> events;
        std::vector<char> excluded(size_t(n_items) + 1, 0);
        switch (kind) {
            case SplitKind::test:
                prefix = split.train[u];
                prefix.insert(prefix.end(), split.val[u].begin(), split.val[u].end());
                events = split.test[u];
                mark_items(excluded, split.train[u]);
                mark_items(excluded, split.val[u]);
                break;
            case SplitKind::val:
                prefix = split.train[u];
                events = split.val[u];
                mark_items(excluded, split.train[u]);
                break;
            case SplitKind::train:
                if (split.train[u].size() >= 2) {
                    prefix.assign(split.train[u].begin(), split.train[u].begin() + 1);
                    events.assign(split.train[u].begin() + 1, split.train[u].end());
                    excluded[size_t(prefix[0])] = 1;  // seen-so-far masking
                }
                break;
        }
        if (events.empty()) {
            ++report.users_skipped;
            continue;
        }
        std::vector<double> user_vec(size_t(model.config.dim));
        std::copy_n(&user_emb.v[size_t(u) * model.config.dim], model.config.dim, user_vec.begin());
        for (int target : events) {
            const Window win = window(prefix, model.config.window);
            Tape tape;
            const auto bound = model.bind(tape);
            const auto interests = model.interests_for_window(tape, bound, win);
            const Tensor o_tilde = interests_tensor(tape, interests);
            const auto scores = score_all_candidates(o_tilde, user_vec, item_emb);
            std::vector<char> event_excl = excluded;
            event_excl[size_t(target)] = 0;
            report.events.push_back(RankEvent{u, target, full_rank(scores, target, event_excl)});
            if (kind == SplitKind::train) excluded[size_t(target)] = 1;
            prefix.push_back(target);
        }
        ++report.users_evaluated;
    }
    return report;
}

namespace {

struct TrainContext {
    TrainContext(const RunConfig& config, const Corpus& c) : cfg(config), corpus(c) {}

    const RunConfig& cfg;
    const Corpus& corpus;
    Split split;
    WeightedGraph graph;
    Model model;
    BucketState buckets;
    bool use_cl = false;
    LossWeights weights;
};

// Negatives for the prediction loss: uniform over items that are unobserved
// at this step, i.e. anything but the current positive.
int draw_pred_negative(const TrainContext& ctx, int target, Rng& rng) {
    const int n = ctx.corpus.item_count();
    int cand = target;
    while (cand == target) cand = 1 + int(rng.below(uint64_t(n)));
    return cand;
}

Var anchor_embedding(Tape& tape, const TrainContext& ctx, const Model::Bound& bound,
                     const ViewSample& view) {
    GraphEncoderConfig gcfg{ctx.cfg.model.graph_layers};
    const auto res = lightgcn_forward(tape, view, bound.item_table, bound.alpha, gcfg);
    return tape.slice_rows(res.node_embeddings, res.anchor_row, res.anchor_row + 1);
}

}  // namespace

TrainResult train(const RunConfig& config, const Corpus& corpus) {
    config.validate();
    if (corpus.user_count() == 0 || corpus.item_count() == 0) throw Error("empty corpus");

    TrainContext ctx{config, corpus};
    ctx.split = chronological_split(corpus);

    GirgConfig girg_cfg = config.girg;
    EdgeWeightMode mode = EdgeWeightMode::inverse_interval;
    if (config.variant == Variant::unweighted_graph) {
        girg_cfg.max_interval = 1;
        mode = EdgeWeightMode::unit;
    }
    ctx.graph = build_girg(ctx.split.train, corpus.item_count(), girg_cfg, mode);

    ctx.model = Model::init(config.model, corpus.item_count(), corpus.user_count(), config.seed);

    std::vector<int> categories = corpus.attributes;
    int category_count = corpus.attribute_count();
    if (categories.empty()) {
        categories.assign(size_t(corpus.item_count()) + 1, 0);
        category_count = 1;
    }
    ctx.buckets = init_buckets(categories, category_count, config.buckets);
    ctx.buckets.lambda = config.bucket_lambda;
    ctx.buckets.n_neg = config.contrast_negs;

    ctx.weights = config.loss;
    if (config.variant == Variant::no_gcl) ctx.weights.theta2 = 0.0;
    ctx.use_cl = ctx.weights.theta2 > 0.0;

    std::vector<std::pair<int, int>> examples;  // (user, target index in train)
    for (int u = 0; u < corpus.user_count(); ++u)
        for (size_t t = 1; t < ctx.split.train[u].size(); ++t) examples.emplace_back(u, int(t));
    if (examples.empty()) throw Error("no training examples after the split");

    std::ofstream log_stream;
    if (!config.log.empty()) {
        log_stream.open(config.log, std::ios::binary);
        if (!log_stream) throw Error("cannot open log for writing: " + config.log);
    }

    TrainResult result;
    result.checkpoint_path = config.checkpoint;

    double best_val = -1.0;
    int stale_epochs = 0;

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        const auto epoch_start = std::chrono::steady_clock::now();

        Rng center_rng(Rng::derive(config.seed, {0xCE11, uint64_t(epoch)}));
        const int reseeded =
            recompute_centers(ctx.buckets, ctx.model.params.value("item_emb"), center_rng);
        reassign_all(ctx.buckets, ctx.model.params.value("item_emb"), config.assign_rule);

        Rng shuffle_rng(Rng::derive(config.seed, {0x5f1e, uint64_t(epoch)}));
        for (size_t i = examples.size(); i > 1; --i)
            std::swap(examples[i - 1], examples[shuffle_rng.below(i)]);

        double sum_total = 0.0, sum_pred = 0.0, sum_cl = 0.0;
        int batches = 0;

        for (size_t start = 0; start < examples.size(); start += size_t(config.batch_size)) {
            const int batch_index = int(start / size_t(config.batch_size));
            try {
                Tape tape;
                const auto bound = ctx.model.bind(tape);
                Rng neg_rng(Rng::derive(config.seed,
                                        {0xbce0, uint64_t(epoch), uint64_t(batch_index)}));

                std::vector<std::pair<Var, double>> bce_pairs;
                std::vector<int> batch_targets;
                const size_t stop = std::min(examples.size(), start + size_t(config.batch_size));
                for (size_t i = start; i < stop; ++i) {
                    const auto [u, t] = examples[i];
                    const std::vector<int> prefix(ctx.split.train[u].begin(),
                                                  ctx.split.train[u].begin() + t);
                    const Window win = window(prefix, config.model.window);
                    const auto interests = ctx.model.interests_for_window(tape, bound, win);
                    const int positive = ctx.split.train[u][size_t(t)];
                    bce_pairs.emplace_back(
                        ctx.model.score_example(tape, bound, interests, u, positive, true), 1.0);
                    batch_targets.push_back(positive);
                    for (int k = 0; k < config.pred_negs; ++k) {
                        const int negative = draw_pred_negative(ctx, positive, neg_rng);
                        bce_pairs.emplace_back(
                            ctx.model.score_example(tape, bound, interests, u, negative, true),
                            0.0);
                    }
                }
                const Var pred = bce_loss(tape, bce_pairs);

                Var cl{};
                if (ctx.use_cl) {
                    std::vector<int> anchors = batch_targets;
                    std::sort(anchors.begin(), anchors.end());
                    anchors.erase(std::unique(anchors.begin(), anchors.end()), anchors.end());
                    Rng cl_neg_rng(Rng::derive(config.seed,
                                               {0xc10e, uint64_t(epoch), uint64_t(batch_index)}));
                    std::vector<Var> terms;
                    terms.reserve(anchors.size());
                    for (int anchor : anchors) {
                        const uint64_t pair_seed = Rng::derive(
                            config.seed,
                            {0xa0a0, uint64_t(epoch), uint64_t(batch_index), uint64_t(anchor)});
                        const auto [v1, v2] =
                            sample_view_pair(ctx.graph, anchor, config.view_depth, pair_seed);
                        const Var e1 = anchor_embedding(tape, ctx, bound, v1);
                        const Var e2 = anchor_embedding(tape, ctx, bound, v2);

                        std::vector<int> negatives;
                        if (config.variant == Variant::random_negatives) {
                            negatives.reserve(size_t(config.contrast_negs));
                            for (int k = 0; k < config.contrast_negs; ++k) {
                                int cand = anchor;
                                while (cand == anchor)
                                    cand = 1 + int(cl_neg_rng.below(uint64_t(corpus.item_count())));
                                negatives.push_back(cand);
                            }
                        } else {
                            negatives = draw_negatives(ctx.buckets, anchor, cl_neg_rng);
                        }

                        std::vector<Var> neg_embeddings;
                        neg_embeddings.reserve(negatives.size());
                        for (size_t slot = 0; slot < negatives.size(); ++slot) {
                            Rng view_rng(Rng::derive(config.seed,
                                                     {0xa1a1, uint64_t(epoch),
                                                      uint64_t(batch_index), uint64_t(anchor),
                                                      uint64_t(slot)}));
                            const ViewSample nv = sample_view(ctx.graph, negatives[slot],
                                                              config.view_depth, view_rng);
                            neg_embeddings.push_back(anchor_embedding(tape, ctx, bound, nv));
                        }
                        terms.push_back(info_nce_loss(tape, e1, e2, neg_embeddings,
                                                      ctx.weights.tau, config.infonce_literal,
                                                      anchor));
                    }
                    cl = tape.mean(tape.concat_cols(terms));
                }

                const Var total = total_loss(tape, pred, cl, ctx.weights, bound.all());
                if (!std::isfinite(tape.scalar(total)))
                    throw NumericError("total loss is not finite");
                tape.backward(total);

                std::map<std::string, Tensor> grads;
                for (const auto& [name, var] : bound.leaves) grads.emplace(name, tape.grad(var));
                adam_step(ctx.model.params, grads, config.lr);

                sum_total += tape.scalar(total);
                sum_pred += tape.scalar(pred);
                sum_cl += cl.valid() ? tape.scalar(cl) : 0.0;
                ++batches;
            } catch (const DivergenceError&) {
                throw;
            } catch (const NumericError& e) {
                throw DivergenceError("epoch " + std::to_string(epoch) + " batch " +
                                      std::to_string(batch_index) + ": " + e.what());
            }
        }

        EpochLog el;
        el.epoch = epoch;
        el.loss_total = sum_total / batches;
        el.loss_pred = sum_pred / batches;
        el.loss_cl = sum_cl / batches;
        double reg = 0.0;
        for (const auto& [name, t] : ctx.model.params.values())
            for (double x : t.v) reg += x * x;
        el.reg = reg;
        el.bucket_census = ctx.buckets.census();
        el.reseeded_buckets = reseeded;
        el.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - epoch_start)
                         .count();

        if (config.patience > 0) {
            const RankReport val_report = evaluate_model(ctx.model, corpus, ctx.split, SplitKind::val);
            el.val_ndcg10 = val_report.at(10).ndcg;
            if (el.val_ndcg10 > best_val + 1e-12) {
                best_val = el.val_ndcg10;
                stale_epochs = 0;
            } else {
                ++stale_epochs;
            }
        }

        if (log_stream) {
            json line;
            line["epoch"] = el.epoch;
            line["loss_total"] = el.loss_total;
            line["loss_pred"] = el.loss_pred;
            line["loss_cl"] = el.loss_cl;
            line["reg"] = el.reg;
            line["bucket_census"] = el.bucket_census;
            line["reseeded_buckets"] = el.reseeded_buckets;
            line["seconds"] = el.seconds;
            if (config.patience > 0) line["val_ndcg10"] = el.val_ndcg10;
            log_stream << line.dump() << "\n";
        }
        result.epochs.push_back(std::move(el));

        if (config.patience > 0 && stale_epochs >= config.patience) break;
    }

    ctx.model.save(config.checkpoint);
    return result;
}

TrainResult train(const RunConfig& config) {
    config.validate();
    if (config.data.empty()) throw ConfigError("data path is required");
    Corpus corpus = load_sequences(config.data);
    if (!config.attributes.empty()) load_attributes(corpus, config.attributes);
    return train(config, corpus);
}

RankReport evaluate_cmd(const RunConfig& config, const Corpus& corpus) {
    const Model model = Model::load(config.checkpoint);
    if (model.item_count != corpus.item_count() || model.user_count != corpus.user_count())
        throw Error("checkpoint was trained on a different corpus (items " +
                    std::to_string(model.item_count) + " vs " +
                    std::to_string(corpus.item_count()) + ")");
    const Split split = chronological_split(corpus);
    RankReport report = evaluate_model(model, corpus, split, config.eval_split);
    if (!config.report.empty()) {
        std::ofstream os(config.report, std::ios::binary);
        if (!os) throw Error("cannot open report for writing: " + config.report);
        os << report.to_json() << "\n";
    }
    return report;
}

RankReport evaluate_cmd(const RunConfig& config) {
    if (config.data.empty()) throw ConfigError("data path is required");
    Corpus corpus = load_sequences(config.data);
    if (!config.attributes.empty()) load_attributes(corpus, config.attributes);
    return evaluate_cmd(config, corpus);
}

std::string AblationTable::to_text() const {
    std::ostringstream os;
    os << "Metric";
    for (const auto& cell : cells) os << '\t' << variant_display(cell.variant);
    os << '\n';
    const auto row = [&](const char* label, auto pick) {
        os << label;
        const double base = pick(cells[0]);
        for (const auto& cell : cells) {
            char buf[64];
            const double v = pick(cell);
            if (&cell == &cells[0]) {
                std::snprintf(buf, sizeof(buf), "\t%.4f", v);
            } else if (base != 0.0) {
                std::snprintf(buf, sizeof(buf), "\t%.4f (%+.1f%%)", v, (v - base) / base * 100.0);
            } else {
                std::snprintf(buf, sizeof(buf), "\t%.4f (n/a)", v);
            }
            os << buf;
        }
        os << '\n';
    };
    row("R@10", [](const AblationCell& c) { return c.recall10; });
    row("N@10", [](const AblationCell& c) { return c.ndcg10; });
    row("R@20", [](const AblationCell& c) { return c.recall20; });
    row("N@20", [](const AblationCell& c) { return c.ndcg20; });
    return os.str();
}

std::string AblationTable::to_json() const {
    json j = json::array();
    for (const auto& cell : cells) {
        json c;
        c["variant"] = variant_name(cell.variant);
        c["label"] = variant_display(cell.variant);
        c["recall10"] = cell.recall10;
        c["ndcg10"] = cell.ndcg10;
        c["recall20"] = cell.recall20;
        c["ndcg20"] = cell.ndcg20;
        if (&cell != &cells[0]) {
            const auto delta = [&](double v, double base) {
                return base != 0.0 ? (v - base) / base * 100.0 : 0.0;
            };
            c["delta_ndcg10_pct"] = delta(cell.ndcg10, cells[0].ndcg10);
            c["delta_recall10_pct"] = delta(cell.recall10, cells[0].recall10);
            c["delta_ndcg20_pct"] = delta(cell.ndcg20, cells[0].ndcg20);
            c["delta_recall20_pct"] = delta(cell.recall20, cells[0].recall20);
        }
        j.push_back(c);
    }
    return j.dump(2);
}

AblationTable ablate(const RunConfig& base, const std::vector<Variant>& variants,
                     const std::vector<uint64_t>& seeds, const std::string& workdir) {
    if (seeds.empty()) throw ConfigError("ablate needs at least one seed");
    if (base.data.empty()) throw ConfigError("data path is required");
    Corpus corpus = load_sequences(base.data);
    if (!base.attributes.empty()) load_attributes(corpus, base.attributes);

    std::vector<Variant> order{Variant::full};
    for (Variant v : variants)
        if (std::find(order.begin(), order.end(), v) == order.end()) order.push_back(v);

    AblationTable table;
    const Split split = chronological_split(corpus);
    for (Variant v : order) {
        AblationCell cell;
        cell.variant = v;
        for (uint64_t seed : seeds) {
            RunConfig cfg = base;
            cfg.variant = v;
            cfg.seed = seed;
            cfg.seed_set = true;
            cfg.log.clear();
            cfg.report.clear();
            cfg.checkpoint =
                workdir + "/ablate_" + variant_name(v) + "_" + std::to_string(seed) + ".ckpt";
            train(cfg, corpus);
            const Model model = Model::load(cfg.checkpoint);
            const RankReport report = evaluate_model(model, corpus, split, SplitKind::test);
            cell.recall10 += report.at(10).recall;
            cell.ndcg10 += report.at(10).ndcg;
            cell.recall20 += report.at(20).recall;
            cell.ndcg20 += report.at(20).ndcg;
        }
        const double n = double(seeds.size());
        cell.recall10 /= n;
        cell.ndcg10 /= n;
        cell.recall20 /= n;
        cell.ndcg20 /= n;
        table.cells.push_back(cell);
    }
    return table;
}

std::string GraphSummary::to_json() const {
    json j;
    j["items"] = items;
    j["users"] = users;
    j["edges_raw"] = edges_raw;
    j["edges_kept"] = edges_kept;
    j["edges_pruned"] = edges_raw - edges_kept;
    j["degree_histogram"] = degree_histogram;
    return j.dump(2);
}

GraphSummary build_graph_cmd(const RunConfig& config, const std::string& out_path) {
    config.validate();
    if (config.data.empty()) throw ConfigError("data path is required");
    const Corpus corpus = load_sequences(config.data);
    const Split split = chronological_split(corpus);

    GirgConfig girg_cfg = config.girg;
    EdgeWeightMode mode = EdgeWeightMode::inverse_interval;
    if (config.variant == Variant::unweighted_graph) {
        girg_cfg.max_interval = 1;
        mode = EdgeWeightMode::unit;
    }
    const auto raw = raw_weights(split.train, girg_cfg.max_interval, mode);
    const WeightedGraph graph =
        prune(corpus.item_count(), raw, normalize_weights(raw), girg_cfg.epsilon);
    if (!out_path.empty()) graph.export_edges(out_path);

    GraphSummary summary;
    summary.items = corpus.item_count();
    summary.users = corpus.user_count();
    summary.edges_raw = (long long)raw.size();
    summary.edges_kept = graph.edge_count();
    summary.degree_histogram = graph.degree_histogram();
    return summary;
}

Corpus synth_corpus(int blocks, int items_per_block, int users, uint64_t seed) {
    if (blocks < 2) throw ConfigError("synth_corpus needs at least 2 blocks");
    if (items_per_block < 1 || users < 1) throw ConfigError("synth_corpus sizes must be positive");

    Corpus corpus;
    corpus.item_names.push_back("<pad>");
    const int n_items = blocks * items_per_block;
    for (int i = 1; i <= n_items; ++i) corpus.item_names.push_back("i" + std::to_string(i));
    corpus.attributes.assign(size_t(n_items) + 1, 0);
    for (int i = 1; i <= n_items; ++i) corpus.attributes[size_t(i)] = (i - 1) / items_per_block;
    for (int b = 0; b < blocks; ++b) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "b%02d", b);
        corpus.attribute_names.push_back(buf);
    }
    corpus.unknown_attribute = blocks;
    corpus.attribute_names.push_back("<unknown>");

    Rng rng(Rng::derive(seed, {0x5d47}));
    for (int u = 0; u < users; ++u) {
        corpus.user_names.push_back("u" + std::to_string(u));
        const int home = int(rng.below(uint64_t(blocks)));
        const int len = std::min(10 + int(rng.below(5)), n_items);
        std::vector<char> used(size_t(n_items) + 1, 0);
        std::vector<int> seq;
        seq.reserve(size_t(len));
        for (int p = 0; p < len; ++p) {
            int block = home;
            if (rng.uniform() < 0.10) {
                block = int(rng.below(uint64_t(blocks - 1)));
                if (block >= home) ++block;
            }
            // draw without within-user repetition, preferring the chosen block
            int item = 0;
            for (int attempt = 0; attempt < 64 && item == 0; ++attempt) {
                const int cand =
                    1 + block * items_per_block + int(rng.below(uint64_t(items_per_block)));
                if (!used[size_t(cand)]) item = cand;
            }
            if (item == 0) {
                for (int cand = 1; cand <= n_items && item == 0; ++cand)
                    if (!used[size_t(cand)]) item = cand;
            }
            used[size_t(item)] = 1;
            seq.push_back(item);
        }
        corpus.sequences.push_back(std::move(seq));
    }
    return corpus;
}

void write_corpus(const Corpus& corpus, const std::string& data_path,
                  const std::string& attributes_path) {
    std::ofstream data(data_path, std::ios::binary);
    if (!data) throw Error("cannot open for writing: " + data_path);
    for (int u = 0; u < corpus.user_count(); ++u)
        for (size_t p = 0; p < corpus.sequences[u].size(); ++p)
            data << corpus.user_names[size_t(u)] << '\t'
                 << corpus.item_names[size_t(corpus.sequences[u][p])] << '\t' << p << '\n';
    if (!data) throw Error("write failed: " + data_path);

    if (attributes_path.empty() || !corpus.has_attributes()) return;
    std::ofstream attrs(attributes_path, std::ios::binary);
    if (!attrs) throw Error("cannot open for writing: " + attributes_path);
    for (int i = 1; i <= corpus.item_count(); ++i) {
        const int cat = corpus.attributes[size_t(i)];
        if (cat == corpus.unknown_attribute) continue;
        attrs << corpus.item_names[size_t(i)] << '\t' << corpus.attribute_names[size_t(cat)]
              << '\n';
    }
    if (!attrs) throw Error("write failed: " + attributes_path);
}

std::string corpus_summary_json(const Corpus& corpus) {
    long long interactions = 0;
    for (const auto& seq : corpus.sequences) interactions += (long long)seq.size();
    json j;
    j["users"] = corpus.user_count();
    j["items"] = corpus.item_count();
    j["interactions"] = interactions;
    j["has_attributes"] = corpus.has_attributes();
    if (corpus.has_attributes()) j["categories"] = corpus.attribute_count();
    return j.dump(2);
}

}  // namespace guesr
