#include "guesr/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <unordered_map>

#include "guesr/errors.hpp"

namespace guesr {

namespace {

struct Row {
    int user;
    int item;
    long long ts;
    long long line;  // input order, breaks timestamp ties
};

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    size_t start = 0;
    while (true) {
        const size_t tab = line.find('\t', start);
        if (tab == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
}

long long parse_ll(const std::string& s, long long line_no, const char* what) {
    try {
        size_t pos = 0;
        const long long v = std::stoll(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(line_no) + ": bad " + what + " '" + s + "'");
    }
}

}  // namespace

Corpus load_sequences(const std::string& path, SequenceFormat format) {
    if (format != SequenceFormat::tsv_triples) throw ConfigError("unsupported sequence format");
    std::ifstream is(path);
    if (!is) throw Error("cannot open: " + path);

    Corpus corpus;
    corpus.item_names.push_back("<pad>");
    std::unordered_map<std::string, int> user_ids, item_ids;
    std::vector<Row> rows;

    std::string line;
    long long line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_tabs(line);
        if (fields.size() != 3 || fields[0].empty() || fields[1].empty())
            throw ParseError("line " + std::to_string(line_no) +
                             ": expected user<TAB>item<TAB>timestamp");
        const long long ts = parse_ll(fields[2], line_no, "timestamp");
        auto [uit, unew] = user_ids.emplace(fields[0], int(corpus.user_names.size()));
        if (unew) corpus.user_names.push_back(fields[0]);
        auto [iit, inew] = item_ids.emplace(fields[1], int(corpus.item_names.size()));
        if (inew) corpus.item_names.push_back(fields[1]);
        rows.push_back(Row{uit->second, iit->second, ts, line_no});
    }
    if (rows.empty()) throw ParseError("empty corpus: " + path);

    // stable chronological order per user
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        if (a.user != b.user) return a.user < b.user;
        if (a.ts != b.ts) return a.ts < b.ts;
        return a.line < b.line;
    });
    corpus.sequences.resize(corpus.user_names.size());
    for (const Row& r : rows) corpus.sequences[r.user].push_back(r.item);
    return corpus;
}

void load_attributes(Corpus& corpus, const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error("cannot open: " + path);

    std::map<std::string, std::string> item_to_cat;  // item name -> category name
    std::string line;
    long long line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_tabs(line);
        if (fields.size() != 2 || fields[0].empty() || fields[1].empty())
            throw ParseError("line " + std::to_string(line_no) + ": expected item<TAB>category");
        item_to_cat[fields[0]] = fields[1];
    }

    // dense category ids by sorted name; stable across loads
    std::map<std::string, int> cat_ids;
    for (const auto& [item, cat] : item_to_cat) cat_ids.emplace(cat, 0);
    corpus.attribute_names.clear();
    for (auto& [name, id] : cat_ids) {
        id = int(corpus.attribute_names.size());
        corpus.attribute_names.push_back(name);
    }
    corpus.unknown_attribute = int(corpus.attribute_names.size());
    corpus.attribute_names.push_back("<unknown>");

    corpus.attributes.assign(corpus.item_names.size(), corpus.unknown_attribute);
    for (size_t i = 1; i < corpus.item_names.size(); ++i) {
        auto it = item_to_cat.find(corpus.item_names[i]);
        if (it != item_to_cat.end()) corpus.attributes[i] = cat_ids[it->second];
    }
}

Split chronological_split(const Corpus& corpus, double r_train, double r_val, double r_test) {
    if (std::fabs(r_train + r_val + r_test - 1.0) > 1e-9 || r_train <= 0 || r_val < 0 || r_test < 0)
        throw ConfigError("split ratios must be non-negative and sum to 1");

    Split split;
    split.train.resize(corpus.sequences.size());
    split.val.resize(corpus.sequences.size());
    split.test.resize(corpus.sequences.size());
    for (size_t u = 0; u < corpus.sequences.size(); ++u) {
        const auto& seq = corpus.sequences[u];
        const int len = int(seq.size());
        if (len < 3) {
            split.dropped_users.push_back(int(u));
            continue;
        }
        const int n_train = std::max(1, int(std::floor(r_train * len)));
        const int n_val = int(std::floor(r_val * len));
        const int n_test = len - n_train - n_val;
        split.train[u].assign(seq.begin(), seq.begin() + n_train);
        split.val[u].assign(seq.begin() + n_train, seq.begin() + n_train + n_val);
        split.test[u].assign(seq.begin() + n_train + n_val, seq.begin() + n_train + n_val + n_test);
    }
    return split;
}

Window window(const std::vector<int>& sequence, int m) {
    if (m < 1) throw ConfigError("window capacity must be >= 1");
    Window w;
    w.ids.assign(m, 0);
    w.valid.assign(m, 0);
    const int keep = std::min<int>(m, int(sequence.size()));
    for (int i = 0; i < keep; ++i) {
        w.ids[m - keep + i] = sequence[sequence.size() - keep + i];
        w.valid[m - keep + i] = 1;
    }
    return w;
}

}  // namespace guesr
