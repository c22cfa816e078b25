#include "guesr/objective.hpp"

#include "guesr/errors.hpp"

namespace guesr {

namespace {

Var vector_norm(Tape& tape, Var a, const char* role, long long anchor_id) {
    const Var norm = tape.l2_norm(a);
    if (tape.scalar(norm) == 0.0)
        throw NumericError(std::string("cosine undefined: zero-norm ") + role + " (anchor " +
                           std::to_string(anchor_id) + ")");
    return norm;
}

}  // namespace

Var cosine_similarity(Tape& tape, Var a, Var b, long long anchor_id) {
    const Var dot = tape.sum(tape.mul(a, b));
    const Var na = vector_norm(tape, a, "left operand", anchor_id);
    const Var nb = vector_norm(tape, b, "right operand", anchor_id);
    return tape.div(dot, tape.mul(na, nb));
}

Var info_nce_loss(Tape& tape, Var anchor, Var positive, const std::vector<Var>& negatives,
                  double tau, bool literal_denominator, long long anchor_id) {
    if (negatives.empty()) throw Error("info_nce_loss: at least one negative required");
    if (tau <= 0.0) throw ConfigError("temperature must be > 0");

    const Var pos_logit = tape.scale(cosine_similarity(tape, anchor, positive, anchor_id), 1.0 / tau);
    std::vector<Var> terms;
    terms.reserve(negatives.size() + 1);
    if (!literal_denominator) terms.push_back(tape.exp(pos_logit));
    for (Var n : negatives)
        terms.push_back(
            tape.exp(tape.scale(cosine_similarity(tape, anchor, n, anchor_id), 1.0 / tau)));
    const Var denom = tape.sum(tape.concat_cols(terms));
    return tape.sub(tape.log(denom), pos_logit);
}

Var bce_loss(Tape& tape, const std::vector<std::pair<Var, double>>& pairs) {
    if (pairs.empty()) throw Error("bce_loss: empty batch");
    std::vector<Var> terms;
    terms.reserve(pairs.size());
    for (const auto& [yhat, y] : pairs) {
        if (y != 0.0 && y != 1.0)
            throw Error("bce_loss: label must be 0 or 1, got " + std::to_string(y));
        const Var clamped = tape.clamp(yhat, 1e-12, 1.0 - 1e-12);
        const Var p = y == 1.0 ? clamped : tape.add_const(tape.scale(clamped, -1.0), 1.0);
        terms.push_back(tape.scale(tape.log(p), -1.0));
    }
    return tape.mean(tape.concat_cols(terms));
}

Var total_loss(Tape& tape, Var pred, Var cl, const LossWeights& weights,
               const std::vector<Var>& parameters) {
    Var loss = tape.scale(pred, weights.theta1);
    if (cl.valid()) loss = tape.add(loss, tape.scale(cl, weights.theta2));
    if (weights.theta3 != 0.0 && !parameters.empty()) {
        Var reg = tape.sum(tape.mul(parameters[0], parameters[0]));
        for (size_t i = 1; i < parameters.size(); ++i)
            reg = tape.add(reg, tape.sum(tape.mul(parameters[i], parameters[i])));
        loss = tape.add(loss, tape.scale(reg, weights.theta3));
    }
    return loss;
}

}  // namespace guesr
