#pragma once

#include <utility>
#include <vector>

#include "guesr/tape.hpp"

namespace guesr {

struct LossWeights {
    double theta1 = 1.0;   // prediction
    double theta2 = 0.1;   // contrastive
    double theta3 = 1e-5;  // L2 regularization
    double tau = 0.2;      // InfoNCE temperature
};

// Cosine similarity; throws NumericError on a zero-norm operand.
Var cosine_similarity(Tape& tape, Var a, Var b, long long anchor_id = -1);

// InfoNCE with the positive term in the denominator by default (loss >= 0);
// literal_denominator reproduces the negatives-only denominator as printed.
Var info_nce_loss(Tape& tape, Var anchor, Var positive, const std::vector<Var>& negatives,
                  double tau, bool literal_denominator = false, long long anchor_id = -1);

// Mean of -[y ln yhat + (1-y) ln(1-yhat)] with yhat clamped away from 0/1.
Var bce_loss(Tape& tape, const std::vector<std::pair<Var, double>>& pairs);

// theta1*pred + theta2*cl + theta3 * Σ ||p||^2 over the given parameters.
Var total_loss(Tape& tape, Var pred, Var cl, const LossWeights& weights,
               const std::vector<Var>& parameters);

}  // namespace guesr
