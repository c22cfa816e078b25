#pragma once

#include <string>
#include <vector>

#include "guesr/tensor.hpp"

namespace guesr {

struct RankEvent {
    int user = 0;
    int target = 0;
    int rank = 0;
};

struct MetricPair {
    double recall = 0.0;
    double ndcg = 0.0;
};

struct RankReport {
    std::vector<RankEvent> events;
    std::vector<int> ks{10, 20};
    int users_evaluated = 0;
    int users_skipped = 0;
    std::string policy = "every held-out event scored; pessimistic ties; seen-item masking";

    MetricPair at(int k) const;
    std::string to_json() const;   // stable key order and float formatting
    std::string to_table(const std::string& label) const;
};

// 1 + number of non-excluded items scoring >= the target (ties count against
// the target). scores is indexed by item id; index 0 is the padding slot.
int full_rank(const std::vector<double>& scores, int target, const std::vector<char>& excluded);

// recall = [rank <= K]; ndcg = 1/log2(rank+1) if rank <= K else 0; means.
MetricPair rank_metrics(const std::vector<int>& ranks, int k);

// Target-attention scores for every candidate item given projected interests
// (R x d), the user vector, and the item table; row 0 is left at -inf.
std::vector<double> score_all_candidates(const Tensor& interests, const std::vector<double>& user,
                                         const Tensor& item_table);

}  // namespace guesr
