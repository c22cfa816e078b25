#include "guesr/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "guesr/errors.hpp"
#include "json.hpp"

namespace guesr {

MetricPair RankReport::at(int k) const {
    std::vector<int> ranks;
    ranks.reserve(events.size());
    for (const auto& e : events) ranks.push_back(e.rank);
    return rank_metrics(ranks, k);
}

std::string RankReport::to_json() const {
    nlohmann::json j;
    j["policy"] = policy;
    j["users_evaluated"] = users_evaluated;
    j["users_skipped"] = users_skipped;
    j["events"] = int(events.size());
    nlohmann::json metrics = nlohmann::json::object();
    for (int k : ks) {
        const MetricPair m = at(k);
        metrics[std::to_string(k)] = {{"recall", m.recall}, {"ndcg", m.ndcg}};
    }
    j["K"] = metrics;
    return j.dump(2);
}

std::string RankReport::to_table(const std::string& label) const {
    std::ostringstream os;
    os << "Model";
    for (int k : ks) os << "\tR@" << k << "\tN@" << k;
    os << "\n" << label;
    char buf[32];
    for (int k : ks) {
        const MetricPair m = at(k);
        std::snprintf(buf, sizeof(buf), "\t%.4f", m.recall);
        os << buf;
        std::snprintf(buf, sizeof(buf), "\t%.4f", m.ndcg);
        os << buf;
    }
    os << "\n";
    return os.str();
}

int full_rank(const std::vector<double>& scores, int target, const std::vector<char>& excluded) {
    if (target < 1 || target >= int(scores.size()))
        throw Error("full_rank: target " + std::to_string(target) + " out of vocabulary");
    if (!excluded.empty() && excluded[size_t(target)])
        throw Error("full_rank: target " + std::to_string(target) + " is excluded");
    const double target_score = scores[size_t(target)];
    int rank = 1;
    for (size_t i = 1; i < scores.size(); ++i) {
        if (int(i) == target) continue;
        if (!excluded.empty() && excluded[i]) continue;
        if (scores[i] >= target_score) ++rank;
    }
    return rank;
}

MetricPair rank_metrics(const std::vector<int>& ranks, int k) {
    if (k < 1) throw ConfigError("K must be >= 1");
    MetricPair m;
    if (ranks.empty()) return m;
    for (int r : ranks) {
        if (r <= k) {
            m.recall += 1.0;
            m.ndcg += 1.0 / std::log2(double(r) + 1.0);
        }
    }
    m.recall /= double(ranks.size());
    m.ndcg /= double(ranks.size());
    return m;
}

std::vector<double> score_all_candidates(const Tensor& interests, const std::vector<double>& user,
                                         const Tensor& item_table) {
    const int r_caps = interests.rows;
    const int d = interests.cols;
    if (int(user.size()) != d || item_table.cols != d)
        throw ShapeError("score_all_candidates: width mismatch");

    std::vector<double> scores(size_t(item_table.rows),
                               -std::numeric_limits<double>::infinity());
    std::vector<double> logits(size_t(r_caps), 0.0);
    for (int v = 1; v < item_table.rows; ++v) {
        const double* ev = &item_table.v[size_t(v) * d];
        double mx = -std::numeric_limits<double>::infinity();
        for (int r = 0; r < r_caps; ++r) {
            double dot = 0.0;
            const double* orow = &interests.v[size_t(r) * d];
            for (int c = 0; c < d; ++c) dot += orow[c] * ev[c];
            logits[size_t(r)] = dot;
            mx = std::max(mx, dot);
        }
        double z = 0.0;
        for (int r = 0; r < r_caps; ++r) z += std::exp(logits[size_t(r)] - mx);
        // q_u . e_v = Σ_r beta_r (o_r . e_v) + u . e_v
        double s = 0.0;
        for (int r = 0; r < r_caps; ++r)
            s += std::exp(logits[size_t(r)] - mx) / z * logits[size_t(r)];
        for (int c = 0; c < d; ++c) s += user[size_t(c)] * ev[c];
        scores[size_t(v)] = s;
    }
    return scores;
}

}  // namespace guesr
