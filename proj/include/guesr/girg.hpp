#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace guesr {

struct GirgConfig {
    int max_interval = 2;   // n: largest positional distance that contributes
    double epsilon = 0.0;   // prune normalized edges below this
};

// unit: every co-occurring pair gets raw weight 1 (the unweighted ablation)
enum class EdgeWeightMode { inverse_interval, unit };

using EdgeKey = std::pair<int, int>;  // first < second

// Σ_{k=1..n} count_k / k, evaluated in one fixed order so independently
// counted oracles reproduce the exact same double.
double combine_interval_counts(const std::vector<long long>& counts);

// count_k of position pairs at distance k, per unordered item pair; repeats
// of the same item contribute nothing.
std::map<EdgeKey, std::vector<long long>> interval_counts(
    const std::vector<std::vector<int>>& sequences, int max_interval);

std::map<EdgeKey, double> raw_weights(const std::vector<std::vector<int>>& sequences,
                                      int max_interval,
                                      EdgeWeightMode mode = EdgeWeightMode::inverse_interval);

// w' = w / sqrt(d_i * d_j) with d = weighted degree over the raw map.
std::map<EdgeKey, double> normalize_weights(const std::map<EdgeKey, double>& raw);

struct GraphNeighbor {
    int item;
    double w_raw;
    double w_hat;
};

class WeightedGraph {
public:
    WeightedGraph() = default;
    WeightedGraph(int item_count, const std::map<EdgeKey, double>& raw,
                  const std::map<EdgeKey, double>& surviving_norm);

    int item_count() const { return item_count_; }
    long long edge_count() const { return edge_count_; }
    const std::vector<GraphNeighbor>& neighbors(int item) const { return adj_[item]; }
    double weighted_degree(int item) const { return degree_hat_[item]; }
    bool has_item(int item) const { return item >= 1 && item <= item_count_; }

    // edge-list text `i<TAB>j<TAB>w_raw<TAB>w_hat`, sorted by (i, j)
    void export_edges(const std::string& path) const;
    std::string edges_text() const;
    static WeightedGraph import_edges(const std::string& path, int item_count);

    std::vector<long long> degree_histogram() const;  // index = neighbor count

private:
    int item_count_ = 0;
    long long edge_count_ = 0;
    std::vector<std::vector<GraphNeighbor>> adj_;  // index 0 unused, sorted by item
    std::vector<double> degree_hat_;
};

// Drops normalized edges below epsilon; survivors carry w_hat = w_norm and
// weighted degrees are recomputed on the pruned topology.
WeightedGraph prune(int item_count, const std::map<EdgeKey, double>& raw,
                    const std::map<EdgeKey, double>& normalized, double epsilon);

WeightedGraph build_girg(const std::vector<std::vector<int>>& train_sequences, int item_count,
                         const GirgConfig& config,
                         EdgeWeightMode mode = EdgeWeightMode::inverse_interval);

}  // namespace guesr
