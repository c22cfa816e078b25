#include "guesr/girg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "guesr/errors.hpp"

namespace guesr {

double combine_interval_counts(const std::vector<long long>& counts) {
    double w = 0.0;
    for (size_t k = 1; k <= counts.size(); ++k) w += double(counts[k - 1]) * (1.0 / double(k));
    return w;
}

std::map<EdgeKey, std::vector<long long>> interval_counts(
    const std::vector<std::vector<int>>& sequences, int max_interval) {
    if (max_interval < 1) throw ConfigError("max_interval must be >= 1");
    std::map<EdgeKey, std::vector<long long>> counts;
    for (const auto& seq : sequences) {
        const int len = int(seq.size());
        for (int p = 0; p < len; ++p) {
            const int qmax = std::min(len - 1, p + max_interval);
            for (int q = p + 1; q <= qmax; ++q) {
                if (seq[p] == seq[q]) continue;  // no self-loops from repeats
                const EdgeKey key{std::min(seq[p], seq[q]), std::max(seq[p], seq[q])};
                auto& c = counts[key];
                if (c.empty()) c.assign(max_interval, 0);
                c[q - p - 1] += 1;
            }
        }
    }
    return counts;
}

std::map<EdgeKey, double> raw_weights(const std::vector<std::vector<int>>& sequences,
                                      int max_interval, EdgeWeightMode mode) {
    std::map<EdgeKey, double> out;
    for (const auto& [key, counts] : interval_counts(sequences, max_interval))
        out.emplace(key, mode == EdgeWeightMode::unit ? 1.0 : combine_interval_counts(counts));
    return out;
}

std::map<EdgeKey, double> normalize_weights(const std::map<EdgeKey, double>& raw) {
    std::map<int, double> degree;
    for (const auto& [key, w] : raw) {
        if (w < 0) throw NumericError("negative raw weight");
        degree[key.first] += w;
        degree[key.second] += w;
    }
    std::map<EdgeKey, double> out;
    for (const auto& [key, w] : raw) {
        const double d = degree[key.first] * degree[key.second];
        out.emplace(key, w / std::sqrt(d));  // w>0 implies both degrees > 0
    }
    return out;
}

WeightedGraph::WeightedGraph(int item_count, const std::map<EdgeKey, double>& raw,
                             const std::map<EdgeKey, double>& surviving_norm)
    : item_count_(item_count) {
    adj_.assign(size_t(item_count) + 1, {});
    degree_hat_.assign(size_t(item_count) + 1, 0.0);
    for (const auto& [key, w_hat] : surviving_norm) {
        const double w_raw = raw.at(key);
        adj_[key.first].push_back(GraphNeighbor{key.second, w_raw, w_hat});
        adj_[key.second].push_back(GraphNeighbor{key.first, w_raw, w_hat});
        degree_hat_[key.first] += w_hat;
        degree_hat_[key.second] += w_hat;
        ++edge_count_;
    }
    for (auto& nbrs : adj_)
        std::sort(nbrs.begin(), nbrs.end(),
                  [](const GraphNeighbor& a, const GraphNeighbor& b) { return a.item < b.item; });
}

std::string WeightedGraph::edges_text() const {
    std::ostringstream os;
    os.precision(17);
    for (int i = 1; i <= item_count_; ++i)
        for (const auto& n : adj_[i])
            if (n.item > i) os << i << '\t' << n.item << '\t' << n.w_raw << '\t' << n.w_hat << '\n';
    return os.str();
}

void WeightedGraph::export_edges(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open for writing: " + path);
    os << edges_text();
    if (!os) throw Error("write failed: " + path);
}

WeightedGraph WeightedGraph::import_edges(const std::string& path, int item_count) {
    std::ifstream is(path);
    if (!is) throw Error("cannot open: " + path);
    std::map<EdgeKey, double> raw, norm;
    std::string line;
    long long line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        int i, j;
        double w_raw, w_hat;
        if (!(ls >> i >> j >> w_raw >> w_hat))
            throw ParseError("line " + std::to_string(line_no) + ": expected i j w_raw w_hat");
        raw[{i, j}] = w_raw;
        norm[{i, j}] = w_hat;
    }
    return WeightedGraph(item_count, raw, norm);
}

std::vector<long long> WeightedGraph::degree_histogram() const {
    size_t max_deg = 0;
    for (int i = 1; i <= item_count_; ++i) max_deg = std::max(max_deg, adj_[i].size());
    std::vector<long long> hist(max_deg + 1, 0);
    for (int i = 1; i <= item_count_; ++i) ++hist[adj_[i].size()];
    return hist;
}

WeightedGraph prune(int item_count, const std::map<EdgeKey, double>& raw,
                    const std::map<EdgeKey, double>& normalized, double epsilon) {
    if (epsilon < 0.0 || epsilon >= 1.0) throw ConfigError("epsilon must be in [0, 1)");
    std::map<EdgeKey, double> surviving;
    for (const auto& [key, w] : normalized)
        if (w >= epsilon) surviving.emplace(key, w);
    return WeightedGraph(item_count, raw, surviving);
}

WeightedGraph build_girg(const std::vector<std::vector<int>>& train_sequences, int item_count,
                         const GirgConfig& config, EdgeWeightMode mode) {
    const auto raw = raw_weights(train_sequences, config.max_interval, mode);
    return prune(item_count, raw, normalize_weights(raw), config.epsilon);
}

}  // namespace guesr
