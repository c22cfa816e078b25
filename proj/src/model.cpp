#include "guesr/model.hpp"

#include <cmath>

#include "guesr/errors.hpp"

namespace guesr {

namespace {

Tensor normal_init(int rows, int cols, double sigma, Rng& rng) {
    Tensor t(rows, cols);
    for (double& x : t.v) x = rng.normal(0.0, sigma);
    return t;
}

Tensor xavier_init(int rows, int cols, Rng& rng) {
    return normal_init(rows, cols, std::sqrt(2.0 / double(rows + cols)), rng);
}

constexpr double kEmbeddingSigma = 0.1;

}  // namespace

Model Model::init(const ModelConfig& config, int item_count, int user_count, uint64_t seed) {
    if (config.dim % config.heads != 0) throw ConfigError("dim must be divisible by heads");
    Model m;
    m.config = config;
    m.item_count = item_count;
    m.user_count = user_count;

    Rng rng(Rng::derive(seed, {0x696e6974}));
    const int d = config.dim;
    m.params.register_param("item_emb", normal_init(item_count + 1, d, kEmbeddingSigma, rng));
    m.params.register_param("user_emb", normal_init(user_count, d, kEmbeddingSigma, rng));
    m.params.register_param(
        "alpha", Tensor::full(1, config.graph_layers + 1, 1.0 / double(config.graph_layers + 1)));

    if (config.backbone == Backbone::transformer) {
        m.params.register_param("pos_emb", normal_init(config.window, d, kEmbeddingSigma, rng));
        for (int b = 0; b < config.tf_blocks; ++b) {
            const std::string p = "tf." + std::to_string(b) + ".";
            m.params.register_param(p + "wq", xavier_init(d, d, rng));
            m.params.register_param(p + "wk", xavier_init(d, d, rng));
            m.params.register_param(p + "wv", xavier_init(d, d, rng));
            m.params.register_param(p + "wo", xavier_init(d, d, rng));
            m.params.register_param(p + "ffn_w1", xavier_init(d, d, rng));
            m.params.register_param(p + "ffn_b1", Tensor(1, d));
            m.params.register_param(p + "ffn_w2", xavier_init(d, d, rng));
            m.params.register_param(p + "ffn_b2", Tensor(1, d));
        }
    } else {
        for (const char* name : {"wxr", "whr", "wxz", "whz", "wxn", "whn"})
            m.params.register_param(std::string("gru.") + name, xavier_init(d, d, rng));
        for (const char* name : {"br", "bz", "bn"})
            m.params.register_param(std::string("gru.") + name, Tensor(1, d));
    }
    m.params.register_param("wz", xavier_init(d, d, rng));
    for (int r = 0; r < config.capsules; ++r)
        m.params.register_param("caps." + std::to_string(r) + ".wo", xavier_init(d, d, rng));
    return m;
}

void Model::save(const std::string& path) const {
    Tensor meta(1, 11);
    meta.v = {1.0,
              config.backbone == Backbone::gru ? 1.0 : 0.0,
              double(config.window),
              double(config.dim),
              double(config.capsules),
              double(config.routing_iters),
              double(config.graph_layers),
              double(config.heads),
              double(config.tf_blocks),
              double(item_count),
              double(user_count)};
    params.save(path, {{"meta", meta}});
}

Model Model::load(const std::string& path) {
    auto tensors = load_tensors(path);
    auto meta_it = tensors.find("meta");
    if (meta_it == tensors.end()) throw ParseError("checkpoint has no meta tensor: " + path);
    const Tensor& meta = meta_it->second;
    if (meta.numel() != 11 || meta.v[0] != 1.0)
        throw ParseError("unsupported checkpoint meta layout");

    Model m;
    m.config.backbone = meta.v[1] == 1.0 ? Backbone::gru : Backbone::transformer;
    m.config.window = int(meta.v[2]);
    m.config.dim = int(meta.v[3]);
    m.config.capsules = int(meta.v[4]);
    m.config.routing_iters = int(meta.v[5]);
    m.config.graph_layers = int(meta.v[6]);
    m.config.heads = int(meta.v[7]);
    m.config.tf_blocks = int(meta.v[8]);
    m.item_count = int(meta.v[9]);
    m.user_count = int(meta.v[10]);
    tensors.erase(meta_it);
    for (auto& [name, t] : tensors) m.params.register_param(name, std::move(t));
    return m;
}

Model::Bound Model::bind(Tape& tape) const {
    Bound b;
    for (const auto& [name, value] : params.values()) b.leaves.emplace(name, tape.leaf(value));
    b.item_table = b.leaves.at("item_emb");
    b.user_table = b.leaves.at("user_emb");
    b.alpha = b.leaves.at("alpha");
    if (config.backbone == Backbone::transformer) {
        b.transformer.pos_table = b.leaves.at("pos_emb");
        b.transformer.wz = b.leaves.at("wz");
        for (int blk = 0; blk < config.tf_blocks; ++blk) {
            const std::string p = "tf." + std::to_string(blk) + ".";
            b.transformer.blocks.push_back(TransformerBlockVars{
                b.leaves.at(p + "wq"), b.leaves.at(p + "wk"), b.leaves.at(p + "wv"),
                b.leaves.at(p + "wo"), b.leaves.at(p + "ffn_w1"), b.leaves.at(p + "ffn_b1"),
                b.leaves.at(p + "ffn_w2"), b.leaves.at(p + "ffn_b2")});
        }
    } else {
        b.gru = GruVars{b.leaves.at("gru.wxr"), b.leaves.at("gru.whr"), b.leaves.at("gru.br"),
                        b.leaves.at("gru.wxz"), b.leaves.at("gru.whz"), b.leaves.at("gru.bz"),
                        b.leaves.at("gru.wxn"), b.leaves.at("gru.whn"), b.leaves.at("gru.bn"),
                        b.leaves.at("wz")};
    }
    for (int r = 0; r < config.capsules; ++r)
        b.capsule_proj.push_back(b.leaves.at("caps." + std::to_string(r) + ".wo"));
    return b;
}

std::vector<Var> Model::Bound::all() const {
    std::vector<Var> out;
    out.reserve(leaves.size());
    for (const auto& [name, var] : leaves) out.push_back(var);
    return out;
}

std::vector<Var> Model::interests_for_window(Tape& tape, const Bound& bound,
                                             const Window& win) const {
    const Var s = tape.gather_rows(bound.item_table, win.ids);
    SeqEncoderConfig seq_cfg;
    seq_cfg.backbone = config.backbone;
    seq_cfg.dim = config.dim;
    seq_cfg.heads = config.heads;
    seq_cfg.blocks = config.tf_blocks;
    seq_cfg.window = config.window;
    const Var z = config.backbone == Backbone::transformer
                      ? transformer_forward(tape, s, win.valid, bound.transformer, seq_cfg)
                      : gru_forward(tape, s, win.valid, bound.gru);
    CapsuleConfig caps_cfg{config.capsules, config.routing_iters};
    const auto capsules = dynamic_route(tape, z, win.valid, caps_cfg);
    std::vector<Var> interests;
    interests.reserve(capsules.size());
    for (size_t r = 0; r < capsules.size(); ++r)
        interests.push_back(project_capsule(tape, capsules[r], bound.capsule_proj[r]));
    return interests;
}

Var Model::score_example(Tape& tape, const Bound& bound, const std::vector<Var>& interests,
                         int user, int item, bool squashed) const {
    const Var target = tape.gather_rows(bound.item_table, {item});
    const Var user_vec = tape.gather_rows(bound.user_table, {user});
    const Var preference = fuse_interests(tape, interests, target, user_vec);
    return squashed ? score_pair(tape, preference, target)
                    : score_pair_raw(tape, preference, target);
}

}  // namespace guesr
