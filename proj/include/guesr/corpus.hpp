#pragma once

#include <string>
#include <vector>

namespace guesr {

// Interaction corpus with dense ids. Item id 0 is the reserved padding id;
// real items are 1..item_count(). Users are 0..user_count()-1.
struct Corpus {
    std::vector<std::string> user_names;
    std::vector<std::string> item_names;              // index 0 = "<pad>"
    std::vector<std::vector<int>> sequences;          // per user, chronological
    std::vector<int> attributes;                      // per item id; empty until loaded
    std::vector<std::string> attribute_names;         // category id -> name; last = "<unknown>"
    int unknown_attribute = -1;

    int user_count() const { return int(user_names.size()); }
    int item_count() const { return int(item_names.size()) - 1; }
    bool has_attributes() const { return !attributes.empty(); }
    int attribute_count() const { return int(attribute_names.size()); }
};

enum class SequenceFormat { tsv_triples };

// Reads `user<TAB>item<TAB>timestamp` lines; per-user sequences sorted by
// timestamp ascending, ties kept in input order, repeats retained.
Corpus load_sequences(const std::string& path,
                      SequenceFormat format = SequenceFormat::tsv_triples);

// Reads `item<TAB>category` lines into corpus.attributes; items absent from
// the file get the reserved unknown category. Categories are mapped to dense
// ids by sorted name so two loads of the same file agree.
void load_attributes(Corpus& corpus, const std::string& path);

struct Split {
    std::vector<std::vector<int>> train, val, test;   // per user
    std::vector<int> dropped_users;                   // users with fewer than 3 interactions
};

Split chronological_split(const Corpus& corpus, double r_train = 0.8, double r_val = 0.1,
                          double r_test = 0.1);

struct Window {
    std::vector<int> ids;     // length m, left-padded with id 0
    std::vector<char> valid;  // 1 where ids holds a real item
};

// Keeps the most recent min(len, m) items, left-pads to length m.
Window window(const std::vector<int>& sequence, int m);

}  // namespace guesr
