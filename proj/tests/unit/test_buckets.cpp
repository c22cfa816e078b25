#include <cmath>
#include <set>

#include "doctest.h"
#include "guesr/buckets.hpp"
#include "guesr/errors.hpp"

using namespace guesr;

namespace {

Tensor embeddings_from(const std::vector<std::vector<double>>& rows) {
    Tensor t(int(rows.size()), int(rows[0].size()));
    for (size_t r = 0; r < rows.size(); ++r)
        for (size_t c = 0; c < rows[r].size(); ++c) t.at(int(r), int(c)) = rows[r][c];
    return t;
}

}  // namespace

TEST_CASE("buckets mirror categories when they fit") {
    const std::vector<int> cats{0, 0, 1, 0, 1};  // index 0 unused
    const BucketState s = init_buckets(cats, 2, 2);
    CHECK(s.orig == std::vector<int>{0, 0, 1, 0, 1});
    CHECK(s.assign == s.orig);
    CHECK(s.members[0] == std::vector<int>{1, 3});
    CHECK(s.members[1] == std::vector<int>{2, 4});
}

TEST_CASE("categories beyond K fold deterministically by mod") {
    const std::vector<int> cats{0, 0, 1, 2, 3, 4};  // 5 categories, K=3
    const BucketState s = init_buckets(cats, 5, 3);
    CHECK(s.orig[1] == 0);
    CHECK(s.orig[2] == 1);
    CHECK(s.orig[3] == 2);
    CHECK(s.orig[4] == 0);  // 3 mod 3
    CHECK(s.orig[5] == 1);  // 4 mod 3
}

TEST_CASE("unknown-category items share one bucket") {
    const std::vector<int> cats{0, 2, 2, 2};  // category 2 = unknown
    const BucketState s = init_buckets(cats, 3, 4);
    CHECK(s.orig[1] == 2);
    CHECK(s.orig[2] == 2);
    CHECK(s.orig[3] == 2);
}

TEST_CASE("bucket count below 2 is rejected") {
    CHECK_THROWS_AS(init_buckets({0, 0}, 1, 1), ConfigError);
}

TEST_CASE("centers are member means") {
    BucketState s = init_buckets({0, 0, 0, 1}, 2, 2);
    Rng rng(3);
    SUBCASE("single member center equals its embedding") {
        const Tensor emb = embeddings_from({{0, 0}, {1, 2}, {3, 4}, {5, 6}});
        recompute_centers(s, emb, rng);
        CHECK(s.centers[1] == std::vector<double>{5, 6});
    }
    SUBCASE("opposite members cancel") {
        const Tensor emb = embeddings_from({{0, 0}, {2, -3}, {-2, 3}, {1, 1}});
        recompute_centers(s, emb, rng);
        CHECK(s.centers[0] == std::vector<double>{0, 0});
    }
}

TEST_CASE("centers match a mean oracle on a random state") {
    Rng rng(5);
    const int items = 10, d = 4, k = 3;
    std::vector<int> cats(size_t(items) + 1, 0);
    for (int i = 1; i <= items; ++i) cats[size_t(i)] = int(rng.below(uint64_t(k)));
    BucketState s = init_buckets(cats, k, k);
    Tensor emb(items + 1, d);
    for (double& x : emb.v) x = rng.normal();
    recompute_centers(s, emb, rng);
    for (int b = 0; b < k; ++b) {
        if (s.members[b].empty()) continue;
        std::vector<double> mean(size_t(d), 0.0);
        for (int item : s.members[b])
            for (int c = 0; c < d; ++c) mean[size_t(c)] += emb.at(item, c);
        for (int c = 0; c < d; ++c) mean[size_t(c)] /= double(s.members[b].size());
        for (int c = 0; c < d; ++c) CHECK(std::fabs(s.centers[b][size_t(c)] - mean[size_t(c)]) < 1e-12);
    }
}

TEST_CASE("an empty bucket is reseeded from a drawn item") {
    BucketState s = init_buckets({0, 0, 0}, 1, 3);  // buckets 1 and 2 empty
    const Tensor emb = embeddings_from({{0, 0}, {1, 2}, {3, 4}});
    Rng rng(7);
    const int reseeded = recompute_centers(s, emb, rng);
    CHECK(reseeded == 2);
    for (int b = 1; b < 3; ++b) {
        const bool matches_item1 = s.centers[b] == std::vector<double>{1, 2};
        const bool matches_item2 = s.centers[b] == std::vector<double>{3, 4};
        CHECK((matches_item1 || matches_item2));
    }
}

TEST_CASE("lambda 0 always returns the original bucket") {
    BucketState s = init_buckets({0, 0, 1}, 2, 2);
    const Tensor emb = embeddings_from({{0, 0}, {10, 10}, {-10, -10}});
    Rng rng(9);
    recompute_centers(s, emb, rng);
    const double far_away[2] = {100.0, 100.0};
    CHECK(assign_bucket(s, 1, far_away, 0.0, AssignRule::nearest) == 0);
    CHECK(assign_bucket(s, 2, far_away, 0.0, AssignRule::nearest) == 1);
}

TEST_CASE("lambda 1 under nearest picks the closer center") {
    BucketState s = init_buckets({0, 0, 1}, 2, 2);
    s.centers_defined = true;
    s.centers = {{0.0, 0.0}, {4.0, 0.0}};
    const double e[2] = {3.0, 0.0};
    CHECK(assign_bucket(s, 1, e, 1.0, AssignRule::nearest) == 1);
    // literal keeps the distance ratio un-complemented, so it picks the farther one
    CHECK(assign_bucket(s, 1, e, 1.0, AssignRule::literal) == 0);
}

TEST_CASE("equidistant centers fall back to the smallest bucket id") {
    BucketState s = init_buckets({0, 1, 0}, 2, 3);
    s.centers_defined = true;
    s.centers = {{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}};
    const double e[2] = {0.0, 0.0};
    // distances: 1, 1, 1 -> tie across all buckets
    CHECK(assign_bucket(s, 1, e, 1.0, AssignRule::nearest) == 0);
}

TEST_CASE("nearest with lambda 1 equals argmin-distance k-means assignment") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const int k = 2 + int(rng.below(3));
        BucketState s = init_buckets({0, 0}, 1, k);
        s.centers_defined = true;
        s.centers.assign(size_t(k), {});
        for (auto& c : s.centers) c = {rng.normal(), rng.normal(), rng.normal()};
        const double e[3] = {rng.normal(), rng.normal(), rng.normal()};
        int argmin = 0;
        double best = 1e300;
        for (int b = 0; b < k; ++b) {
            double dist = 0.0;
            for (int c = 0; c < 3; ++c)
                dist += (e[c] - s.centers[b][size_t(c)]) * (e[c] - s.centers[b][size_t(c)]);
            if (dist < best) {
                best = dist;
                argmin = b;
            }
        }
        CHECK(assign_bucket(s, 1, e, 1.0, AssignRule::nearest) == argmin);
    }
}

TEST_CASE("lambda 0 assignment ignores embedding changes") {
    BucketState s = init_buckets({0, 1, 0, 1}, 2, 2);
    Rng rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        Tensor emb(4, 3);
        for (double& x : emb.v) x = rng.normal();
        recompute_centers(s, emb, rng);
        for (int i = 1; i <= 3; ++i)
            CHECK(assign_bucket(s, i, &emb.v[size_t(i) * 3], 0.0, AssignRule::nearest) ==
                  s.orig[i]);
    }
}

TEST_CASE("negatives come from other buckets, proportionally to size") {
    // bucket 0 = anchor's (items 1..5), bucket 1 has 30 items, bucket 2 has 10
    std::vector<int> cats(46, 0);
    for (int i = 6; i <= 35; ++i) cats[size_t(i)] = 1;
    for (int i = 36; i <= 45; ++i) cats[size_t(i)] = 2;
    BucketState s = init_buckets(cats, 3, 3);
    s.n_neg = 1;
    Rng rng(2025);
    int from_b1 = 0, from_b2 = 0;
    for (int draw = 0; draw < 10000; ++draw) {
        const auto negs = draw_negatives(s, 1, rng);
        REQUIRE(negs.size() == 1);
        CHECK(s.assign[negs[0]] != s.assign[1]);
        CHECK(negs[0] != 1);
        if (s.assign[negs[0]] == 1) ++from_b1;
        if (s.assign[negs[0]] == 2) ++from_b2;
    }
    const double ratio = double(from_b1) / double(from_b2);
    CHECK(ratio > 3.0 * 0.95);
    CHECK(ratio < 3.0 * 1.05);
}

TEST_CASE("zero requested negatives give an empty draw") {
    BucketState s = init_buckets({0, 0, 1}, 2, 2);
    s.n_neg = 0;
    Rng rng(15);
    CHECK(draw_negatives(s, 1, rng).empty());
}

TEST_CASE("sampling is impossible when every other bucket is empty") {
    BucketState s = init_buckets({0, 0, 0}, 1, 2);  // everything in bucket 0
    s.n_neg = 2;
    Rng rng(17);
    CHECK_THROWS_AS(draw_negatives(s, 1, rng), Error);
}

TEST_CASE("K=2 draws always come from the single other bucket") {
    BucketState s = init_buckets({0, 0, 1, 1, 0}, 2, 2);
    s.n_neg = 4;
    Rng rng(19);
    for (int draw = 0; draw < 1000; ++draw)
        for (int neg : draw_negatives(s, 1, rng)) CHECK(s.assign[neg] == 1);
}
