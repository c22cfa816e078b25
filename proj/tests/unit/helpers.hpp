#pragma once

#include <vector>

#include "guesr/rng.hpp"
#include "guesr/tensor.hpp"

namespace guesr::test {

inline Tensor random_tensor(int rows, int cols, Rng& rng, double scale = 1.0) {
    Tensor t(rows, cols);
    for (double& x : t.v) x = rng.normal(0.0, scale);
    return t;
}

inline Tensor random_positive(int rows, int cols, Rng& rng, double lo = 0.5, double hi = 2.0) {
    Tensor t(rows, cols);
    for (double& x : t.v) x = lo + (hi - lo) * rng.uniform();
    return t;
}

}  // namespace guesr::test
