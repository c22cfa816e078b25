#include "guesr/buckets.hpp"

#include <algorithm>

#include "guesr/errors.hpp"

namespace guesr {

namespace {

void rebuild_members(BucketState& state) {
    state.members.assign(state.k, {});
    for (int i = 1; i <= state.item_count(); ++i) state.members[state.assign[i]].push_back(i);
}

double sq_dist(const double* a, const double* b, int d) {
    double acc = 0.0;
    for (int i = 0; i < d; ++i) {
        const double diff = a[i] - b[i];
        acc += diff * diff;
    }
    return acc;
}

}  // namespace

std::vector<int> BucketState::census() const {
    std::vector<int> sizes(k, 0);
    for (int b = 0; b < k; ++b) sizes[b] = int(members[b].size());
    return sizes;
}

BucketState init_buckets(const std::vector<int>& item_category, int category_count, int k) {
    if (k < 2) throw ConfigError("bucket count must be >= 2");
    BucketState state;
    state.k = k;
    state.orig.assign(item_category.size(), 0);
    for (size_t i = 1; i < item_category.size(); ++i) {
        const int cat = item_category[i];
        if (cat < 0 || cat >= category_count)
            throw Error("category " + std::to_string(cat) + " out of range for item " +
                        std::to_string(i));
        state.orig[i] = category_count > k ? cat % k : cat;
    }
    state.assign = state.orig;
    rebuild_members(state);
    return state;
}

int recompute_centers(BucketState& state, const Tensor& item_embeddings, Rng& rng) {
    const int d = item_embeddings.cols;
    const int n = state.item_count();
    if (item_embeddings.rows != n + 1)
        throw ShapeError("embeddings " + shape_str(item_embeddings) + " for " + std::to_string(n) +
                         " items");
    state.centers.assign(state.k, std::vector<double>(d, 0.0));
    int reseeded = 0;
    for (int b = 0; b < state.k; ++b) {
        const auto& members = state.members[b];
        if (members.empty()) {
            const int item = 1 + int(rng.below(uint64_t(n)));
            const double* row = &item_embeddings.v[size_t(item) * d];
            state.centers[b].assign(row, row + d);
            ++reseeded;
            continue;
        }
        for (int item : members) {
            const double* row = &item_embeddings.v[size_t(item) * d];
            for (int c = 0; c < d; ++c) state.centers[b][c] += row[c];
        }
        for (int c = 0; c < d; ++c) state.centers[b][c] /= double(members.size());
    }
    state.centers_defined = true;
    return reseeded;
}

int assign_bucket(const BucketState& state, int item, const double* embedding, double lambda,
                  AssignRule rule) {
    if (!state.centers_defined) throw Error("assign_bucket before recompute_centers");
    const int d = int(state.centers[0].size());
    std::vector<double> dist(state.k);
    double total = 0.0;
    for (int b = 0; b < state.k; ++b) {
        dist[b] = sq_dist(embedding, state.centers[b].data(), d);
        total += dist[b];
    }
    int best = 0;
    double best_score = -1e300;
    for (int b = 0; b < state.k; ++b) {
        // all centers coincide with e: distance term is uninformative, use 0
        const double ratio = total > 0.0 ? dist[b] / total : 0.0;
        const double dist_term = rule == AssignRule::nearest ? 1.0 - ratio : ratio;
        const double score = (1.0 - lambda) * (b == state.orig[item] ? 1.0 : 0.0)
                             + lambda * dist_term;
        if (score > best_score) {  // ties keep the smallest bucket id
            best_score = score;
            best = b;
        }
    }
    return best;
}

void reassign_all(BucketState& state, const Tensor& item_embeddings, AssignRule rule) {
    const int d = item_embeddings.cols;
    for (int i = 1; i <= state.item_count(); ++i)
        state.assign[i] =
            assign_bucket(state, i, &item_embeddings.v[size_t(i) * d], state.lambda, rule);
    rebuild_members(state);
}

std::vector<int> draw_negatives(const BucketState& state, int anchor, Rng& rng) {
    const int anchor_bucket = state.assign[anchor];
    long long total = 0;
    for (int b = 0; b < state.k; ++b)
        if (b != anchor_bucket) total += (long long)state.members[b].size();
    if (state.n_neg > 0 && total == 0)
        throw Error("draw_negatives: every bucket other than the anchor's is empty");

    std::vector<int> out;
    out.reserve(size_t(state.n_neg));
    for (int s = 0; s < state.n_neg; ++s) {
        // bucket choice proportional to size == uniform over the union
        long long r = (long long)rng.below(uint64_t(total));
        for (int b = 0; b < state.k; ++b) {
            if (b == anchor_bucket) continue;
            if (r < (long long)state.members[b].size()) {
                out.push_back(state.members[b][size_t(r)]);
                break;
            }
            r -= (long long)state.members[b].size();
        }
    }
    return out;
}

}  // namespace guesr
