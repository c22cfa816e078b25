#pragma once

#include <cstdint>
#include <tuple>
#include <vector>

#include "guesr/girg.hpp"
#include "guesr/rng.hpp"

namespace guesr {

// Anchor-centered stochastic subgraph: node-induced edges of the parent graph.
struct ViewSample {
    int anchor = 0;
    int depth = 0;
    std::vector<int> nodes;                          // sorted, contains anchor
    std::vector<std::tuple<int, int, double>> edges; // (i < j, w_hat)
};

// Iterative neighbor sampling: D rounds, include an unsampled neighbor j of a
// frontier node i with probability min(1, w_hat_ij / D); the nodes included in
// a round form the next frontier.
ViewSample sample_view(const WeightedGraph& graph, int anchor, int depth, Rng& rng);

// Two independent draws from rng streams derived from seed.
std::pair<ViewSample, ViewSample> sample_view_pair(const WeightedGraph& graph, int anchor,
                                                   int depth, uint64_t seed);

}  // namespace guesr
