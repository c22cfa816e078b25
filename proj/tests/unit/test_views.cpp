#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "guesr/errors.hpp"
#include "guesr/views.hpp"

using namespace guesr;

namespace {

// graph with explicit w_hat per edge (raw mirrors w_hat; both unused by sampling)
WeightedGraph make_graph(int items, const std::map<EdgeKey, double>& w_hat) {
    return WeightedGraph(items, w_hat, w_hat);
}

}  // namespace

TEST_CASE("an isolated anchor yields the singleton view") {
    const WeightedGraph g = make_graph(3, {{{2, 3}, 1.0}});
    Rng rng(1);
    const ViewSample v = sample_view(g, 1, 2, rng);
    CHECK(v.nodes == std::vector<int>{1});
    CHECK(v.edges.empty());
}

TEST_CASE("a missing anchor is an error") {
    const WeightedGraph g = make_graph(3, {});
    Rng rng(1);
    CHECK_THROWS_AS(sample_view(g, 9, 2, rng), Error);
}

TEST_CASE("single edge with w_hat 1 and depth 2 is included half the time") {
    const WeightedGraph g = make_graph(2, {{{1, 2}, 1.0}});
    Rng rng(2024);
    int included = 0;
    const int trials = 10000;
    for (int i = 0; i < trials; ++i) {
        const ViewSample v = sample_view(g, 1, 2, rng);
        if (v.nodes.size() == 2) ++included;
    }
    const double freq = double(included) / trials;
    CHECK(std::fabs(freq - 0.5) <= 0.02);
}

TEST_CASE("w_hat >= depth clamps the probability to one") {
    const WeightedGraph g = make_graph(2, {{{1, 2}, 3.0}});
    Rng rng(5);
    for (int i = 0; i < 200; ++i) {
        const ViewSample v = sample_view(g, 1, 3, rng);
        CHECK(v.nodes.size() == 2);
    }
}

TEST_CASE("higher edge weight does not lower the inclusion frequency") {
    const int trials = 10000;
    const auto freq = [&](double w) {
        const WeightedGraph g = make_graph(2, {{{1, 2}, w}});
        Rng rng(77);
        int inc = 0;
        for (int i = 0; i < trials; ++i)
            if (sample_view(g, 1, 2, rng).nodes.size() == 2) ++inc;
        return double(inc) / trials;
    };
    CHECK(freq(0.4) <= freq(0.8) + 0.02);
    CHECK(freq(0.8) <= freq(1.6) + 0.02);
}

TEST_CASE("view pairs are reproducible and anchored") {
    std::map<EdgeKey, double> edges;
    for (int i = 1; i <= 5; ++i)
        for (int j = i + 1; j <= 5; ++j) edges[{i, j}] = 0.8;
    const WeightedGraph g = make_graph(5, edges);
    const auto [a1, a2] = sample_view_pair(g, 3, 2, 99);
    const auto [b1, b2] = sample_view_pair(g, 3, 2, 99);
    CHECK(a1.nodes == b1.nodes);
    CHECK(a1.edges == b1.edges);
    CHECK(a2.nodes == b2.nodes);
    CHECK(a2.edges == b2.edges);
    CHECK(std::binary_search(a1.nodes.begin(), a1.nodes.end(), 3));
    CHECK(std::binary_search(a2.nodes.begin(), a2.nodes.end(), 3));
}

TEST_CASE("a heavy clique at depth 1 yields the closed neighborhood") {
    std::map<EdgeKey, double> edges;
    for (int i = 1; i <= 4; ++i)
        for (int j = i + 1; j <= 4; ++j) edges[{i, j}] = 5.0;  // p clamps to 1
    const WeightedGraph g = make_graph(5, edges);           // node 5 isolated
    Rng rng(13);
    const ViewSample v = sample_view(g, 2, 1, rng);
    CHECK(v.nodes == std::vector<int>{1, 2, 3, 4});
    CHECK(v.edges.size() == 6);  // the full clique is induced
}

TEST_CASE("views are node-induced subgraphs of the parent") {
    std::map<EdgeKey, double> edges{{{1, 2}, 0.9}, {{2, 3}, 0.9}, {{3, 4}, 0.9},
                                    {{1, 4}, 0.9}, {{1, 3}, 0.9}};
    const WeightedGraph g = make_graph(4, edges);
    Rng rng(17);
    for (int trial = 0; trial < 500; ++trial) {
        const ViewSample v = sample_view(g, 1, 2, rng);
        const std::set<int> nodes(v.nodes.begin(), v.nodes.end());
        CHECK(nodes.count(v.anchor) == 1);
        // every induced parent edge appears exactly once, and nothing else
        std::set<EdgeKey> expected;
        for (const auto& [key, w] : edges)
            if (nodes.count(key.first) && nodes.count(key.second)) expected.insert(key);
        std::set<EdgeKey> got;
        for (const auto& [i, j, w] : v.edges) {
            got.insert({i, j});
            CHECK(w == edges.at({i, j}));
        }
        CHECK(got == expected);
    }
}

TEST_CASE("every sampled node is within depth hops of the anchor") {
    // path 1-2-3-4: with depth 2, node 4 is unreachable from anchor 1
    const WeightedGraph g =
        make_graph(4, {{{1, 2}, 10.0}, {{2, 3}, 10.0}, {{3, 4}, 10.0}});
    Rng rng(19);
    for (int trial = 0; trial < 100; ++trial) {
        const ViewSample v = sample_view(g, 1, 2, rng);
        CHECK(v.nodes == std::vector<int>{1, 2, 3});
    }
}
