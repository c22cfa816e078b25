#pragma once

#include <vector>

#include "guesr/rng.hpp"
#include "guesr/tensor.hpp"

namespace guesr {

// "nearest" scores buckets by the complemented normalized distance so larger
// means closer; "literal" keeps the distance ratio un-complemented.
enum class AssignRule { nearest, literal };

struct BucketState {
    int k = 0;
    double lambda = 0.5;
    int n_neg = 4;
    bool centers_defined = false;
    std::vector<std::vector<double>> centers;   // k centers of embedding width
    std::vector<int> orig;                      // per item id (index 0 unused)
    std::vector<int> assign;                    // per item id (index 0 unused)
    std::vector<std::vector<int>> members;      // per bucket, ascending item ids

    int item_count() const { return int(orig.size()) - 1; }
    std::vector<int> census() const;
};

// Original bucket = category id (mod K when there are more categories than
// buckets); current assignment starts at the original bucket.
BucketState init_buckets(const std::vector<int>& item_category, int category_count, int k);

// Mean of member embeddings per bucket; an empty bucket is reseeded to the
// embedding of a uniformly drawn item. Returns the number of reseeded buckets.
int recompute_centers(BucketState& state, const Tensor& item_embeddings, Rng& rng);

int assign_bucket(const BucketState& state, int item, const double* embedding, double lambda,
                  AssignRule rule);

// Reassigns every item under the current centers and rebuilds member lists.
void reassign_all(BucketState& state, const Tensor& item_embeddings, AssignRule rule);

// N_neg draws: bucket != anchor's with probability proportional to bucket
// size, then uniform within the bucket; with replacement.
std::vector<int> draw_negatives(const BucketState& state, int anchor, Rng& rng);

}  // namespace guesr
