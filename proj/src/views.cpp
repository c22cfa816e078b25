#include "guesr/views.hpp"

#include <algorithm>
#include <unordered_set>

#include "guesr/errors.hpp"

namespace guesr {

ViewSample sample_view(const WeightedGraph& graph, int anchor, int depth, Rng& rng) {
    if (!graph.has_item(anchor))
        throw Error("sample_view: item " + std::to_string(anchor) + " not in graph");
    if (depth < 1) throw ConfigError("sampling depth must be >= 1");

    ViewSample view;
    view.anchor = anchor;
    view.depth = depth;

    std::unordered_set<int> sampled{anchor};
    std::vector<int> frontier{anchor};
    for (int round = 0; round < depth && !frontier.empty(); ++round) {
        std::vector<int> next;
        for (int i : frontier) {
            for (const auto& nbr : graph.neighbors(i)) {
                if (sampled.count(nbr.item)) continue;
                const double p = std::min(1.0, nbr.w_hat / double(depth));
                if (rng.uniform() < p) {
                    sampled.insert(nbr.item);
                    next.push_back(nbr.item);
                }
            }
        }
        std::sort(next.begin(), next.end());
        frontier = std::move(next);
    }

    view.nodes.assign(sampled.begin(), sampled.end());
    std::sort(view.nodes.begin(), view.nodes.end());
    for (int i : view.nodes)
        for (const auto& nbr : graph.neighbors(i))
            if (nbr.item > i && sampled.count(nbr.item))
                view.edges.emplace_back(i, nbr.item, nbr.w_hat);
    return view;
}

std::pair<ViewSample, ViewSample> sample_view_pair(const WeightedGraph& graph, int anchor,
                                                   int depth, uint64_t seed) {
    Rng first(Rng::derive(seed, {0x76696577, 1}));
    Rng second(Rng::derive(seed, {0x76696577, 2}));
    return {sample_view(graph, anchor, depth, first), sample_view(graph, anchor, depth, second)};
}

}  // namespace guesr
