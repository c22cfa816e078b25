#include "guesr/interest.hpp"

#include "guesr/errors.hpp"

namespace guesr {

Var squash(Tape& tape, Var h) {
    const Var norm_sq = tape.sum(tape.mul(h, h));
    if (tape.scalar(norm_sq) == 0.0) return tape.scale(h, 0.0);
    const Var factor = tape.div(tape.l2_norm(h), tape.add_const(norm_sq, 1.0));
    return tape.mul(h, factor);
}

std::vector<Var> dynamic_route(Tape& tape, Var patterns, const std::vector<char>& valid,
                               const CapsuleConfig& config) {
    if (config.capsules < 1 || config.routing_iters < 1)
        throw ConfigError("capsules and routing iterations must be >= 1");
    const int mw = tape.val(patterns).rows;
    if (int(valid.size()) != mw) throw ShapeError("mask length != pattern rows");
    bool any_valid = false;
    for (char v : valid) any_valid = any_valid || v;
    if (!any_valid) throw Error("dynamic_route: no valid positions");

    Tensor mask(1, mw);
    for (int i = 0; i < mw; ++i) mask.at(0, i) = valid[size_t(i)] ? 1.0 : 0.0;

    std::vector<Var> outputs;
    outputs.reserve(size_t(config.capsules));
    for (int r = 0; r < config.capsules; ++r) {
        Var agreement = tape.constant(Tensor(1, mw));
        Var capsule{};
        for (int it = 0; it < config.routing_iters; ++it) {
            const Var attn = tape.softmax_rows(tape.masked_fill(agreement, mask, -1e30));
            const Var hidden = tape.matmul(attn, patterns);
            capsule = squash(tape, hidden);
            if (it + 1 < config.routing_iters)
                agreement = tape.add(agreement, tape.matmul(capsule, tape.transpose(patterns)));
        }
        outputs.push_back(capsule);
    }
    return outputs;
}

Var project_capsule(Tape& tape, Var capsule, Var projection) {
    return tape.relu(tape.matmul(capsule, projection));
}

Var fuse_interests(Tape& tape, const std::vector<Var>& interests, Var target, Var user) {
    if (interests.empty()) throw Error("fuse_interests: no interests");
    const Var stacked = tape.concat_rows(interests);                       // R x d
    const Var logits = tape.transpose(tape.matmul(stacked, tape.transpose(target)));  // 1 x R
    const Var beta = tape.softmax_rows(logits);
    return tape.add(tape.matmul(beta, stacked), user);
}

Var score_pair_raw(Tape& tape, Var preference, Var target) {
    return tape.sum(tape.mul(preference, target));
}

Var score_pair(Tape& tape, Var preference, Var target) {
    return tape.sigmoid(score_pair_raw(tape, preference, target));
}

}  // namespace guesr
