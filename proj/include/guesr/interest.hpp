#pragma once

#include <vector>

#include "guesr/tape.hpp"

namespace guesr {

struct CapsuleConfig {
    int capsules = 2;       // R
    int routing_iters = 2;  // T
};

// ||h||/(1+||h||^2) * h, with squash(0) = 0.
Var squash(Tape& tape, Var h);

// Per capsule: agreement scores start at zero, T rounds of softmax-weighted
// pooling + squash + agreement update; masked positions get weight zero.
std::vector<Var> dynamic_route(Tape& tape, Var patterns, const std::vector<char>& valid,
                               const CapsuleConfig& config);

Var project_capsule(Tape& tape, Var capsule, Var projection);

// beta = softmax_r(o_r . e_v); q_u = Σ beta_r o_r + u.
Var fuse_interests(Tape& tape, const std::vector<Var>& interests, Var target, Var user);

Var score_pair_raw(Tape& tape, Var preference, Var target);  // inner product, used for ranking
Var score_pair(Tape& tape, Var preference, Var target);      // sigmoid(inner product)

}  // namespace guesr
