#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "guesr/corpus.hpp"
#include "guesr/errors.hpp"
#include "guesr/rng.hpp"

using namespace guesr;

namespace {

struct TempFile {
    std::string path;
    TempFile(const std::string& name, const std::string& content) : path(name) {
        std::ofstream os(path, std::ios::binary);
        os << content;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("sequences are sorted by timestamp") {
    TempFile f("corpus_sort.tsv", "u1\ta\t5\nu1\tb\t1\nu1\tc\t9\n");
    const Corpus c = load_sequences(f.path);
    REQUIRE(c.user_count() == 1);
    REQUIRE(c.sequences[0].size() == 3);
    CHECK(c.item_names[size_t(c.sequences[0][0])] == "b");
    CHECK(c.item_names[size_t(c.sequences[0][1])] == "a");
    CHECK(c.item_names[size_t(c.sequences[0][2])] == "c");
}

TEST_CASE("timestamp ties keep input order") {
    TempFile f("corpus_ties.tsv", "u1\tx\t7\nu1\ty\t7\nu1\tz\t7\n");
    const Corpus c = load_sequences(f.path);
    CHECK(c.item_names[size_t(c.sequences[0][0])] == "x");
    CHECK(c.item_names[size_t(c.sequences[0][1])] == "y");
    CHECK(c.item_names[size_t(c.sequences[0][2])] == "z");
}

TEST_CASE("repeated user-item pairs are both kept") {
    TempFile f("corpus_rep.tsv", "u1\ta\t1\nu1\ta\t2\nu1\tb\t3\n");
    const Corpus c = load_sequences(f.path);
    REQUIRE(c.sequences[0].size() == 3);
    CHECK(c.sequences[0][0] == c.sequences[0][1]);
    CHECK(c.item_count() == 2);
}

TEST_CASE("malformed lines report the line number") {
    TempFile f("corpus_bad.tsv", "u1\ta\t1\nu1\tb\n");
    CHECK_THROWS_WITH_AS(load_sequences(f.path), "line 2: expected user<TAB>item<TAB>timestamp",
                         ParseError);

    TempFile g("corpus_badts.tsv", "u1\ta\tnotanumber\n");
    CHECK_THROWS_AS(load_sequences(g.path), ParseError);
}

TEST_CASE("an empty file is an empty-corpus error") {
    TempFile f("corpus_empty.tsv", "");
    CHECK_THROWS_AS(load_sequences(f.path), ParseError);
}

TEST_CASE("loading is deterministic") {
    TempFile f("corpus_det.tsv", "u2\tb\t2\nu1\ta\t1\nu1\tb\t3\nu2\ta\t1\nu1\tc\t2\n");
    const Corpus a = load_sequences(f.path);
    const Corpus b = load_sequences(f.path);
    CHECK(a.sequences == b.sequences);
    CHECK(a.item_names == b.item_names);
    CHECK(a.user_names == b.user_names);
}

TEST_CASE("chronological split follows the floor rule") {
    Corpus c;
    c.item_names = {"<pad>", "i"};
    SUBCASE("length 10 gives 8/1/1") {
        c.user_names = {"u"};
        c.sequences = {std::vector<int>(10, 1)};
        const Split s = chronological_split(c);
        CHECK(s.train[0].size() == 8);
        CHECK(s.val[0].size() == 1);
        CHECK(s.test[0].size() == 1);
    }
    SUBCASE("length 5 gives 4/0/1") {
        c.user_names = {"u"};
        c.sequences = {std::vector<int>(5, 1)};
        const Split s = chronological_split(c);
        CHECK(s.train[0].size() == 4);
        CHECK(s.val[0].size() == 0);
        CHECK(s.test[0].size() == 1);
    }
    SUBCASE("length 2 drops the user") {
        c.user_names = {"u"};
        c.sequences = {std::vector<int>(2, 1)};
        const Split s = chronological_split(c);
        REQUIRE(s.dropped_users.size() == 1);
        CHECK(s.dropped_users[0] == 0);
        CHECK(s.train[0].empty());
    }
}

TEST_CASE("split concatenation reproduces every fuzzed sequence") {
    Rng rng(101);
    for (int trial = 0; trial < 50; ++trial) {
        Corpus c;
        c.item_names = {"<pad>"};
        for (int i = 1; i <= 10; ++i) c.item_names.push_back("i" + std::to_string(i));
        const int users = 1 + int(rng.below(6));
        for (int u = 0; u < users; ++u) {
            c.user_names.push_back("u" + std::to_string(u));
            std::vector<int> seq;
            const int len = 3 + int(rng.below(15));
            for (int i = 0; i < len; ++i) seq.push_back(1 + int(rng.below(10)));
            c.sequences.push_back(seq);
        }
        const Split s = chronological_split(c);
        for (int u = 0; u < users; ++u) {
            std::vector<int> joined = s.train[u];
            joined.insert(joined.end(), s.val[u].begin(), s.val[u].end());
            joined.insert(joined.end(), s.test[u].begin(), s.test[u].end());
            CHECK(joined == c.sequences[u]);
        }
    }
}

TEST_CASE("bad split ratios are rejected") {
    Corpus c;
    c.item_names = {"<pad>", "i"};
    c.user_names = {"u"};
    c.sequences = {std::vector<int>(5, 1)};
    CHECK_THROWS_AS(chronological_split(c, 0.5, 0.1, 0.1), ConfigError);
}

TEST_CASE("window keeps the most recent items and pads on the left") {
    SUBCASE("exact fit") {
        const Window w = window({1, 2, 3, 4}, 4);
        CHECK(w.ids == std::vector<int>{1, 2, 3, 4});
        CHECK(w.valid == std::vector<char>{1, 1, 1, 1});
    }
    SUBCASE("truncation keeps the suffix") {
        const Window w = window({1, 2, 3, 4, 5, 6, 7}, 4);
        CHECK(w.ids == std::vector<int>{4, 5, 6, 7});
    }
    SUBCASE("short input left-pads with id 0") {
        const Window w = window({9}, 4);
        CHECK(w.ids == std::vector<int>{0, 0, 0, 9});
        CHECK(w.valid == std::vector<char>{0, 0, 0, 1});
    }
}

TEST_CASE("windowing never drops the most recent item") {
    Rng rng(103);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<int> seq;
        const int len = 1 + int(rng.below(20));
        for (int i = 0; i < len; ++i) seq.push_back(1 + int(rng.below(50)));
        const int m = 1 + int(rng.below(12));
        const Window w = window(seq, m);
        CHECK(w.ids.back() == seq.back());
        CHECK(w.valid.back() == 1);
    }
}

TEST_CASE("attributes load with a stable mapping and an unknown fallback") {
    TempFile data("corpus_attr_data.tsv", "u1\ta\t1\nu1\tb\t2\nu1\tc\t3\n");
    TempFile attrs("corpus_attr.tsv", "a\tsports\nb\tbooks\n");
    Corpus c = load_sequences(data.path);
    load_attributes(c, attrs.path);
    REQUIRE(c.has_attributes());
    CHECK(c.attribute_count() == 3);  // books, sports, <unknown>
    const int a_cat = c.attributes[1];
    const int b_cat = c.attributes[2];
    const int c_cat = c.attributes[3];
    CHECK(a_cat != b_cat);
    CHECK(c_cat == c.unknown_attribute);
    CHECK(c.attribute_names[size_t(a_cat)] == "sports");
    CHECK(c.attribute_names[size_t(b_cat)] == "books");

    // two loads agree
    Corpus c2 = load_sequences(data.path);
    load_attributes(c2, attrs.path);
    CHECK(c2.attributes == c.attributes);
    CHECK(c2.attribute_names == c.attribute_names);
}

TEST_CASE("malformed attribute lines are parse errors") {
    TempFile data("corpus_attr_data2.tsv", "u1\ta\t1\n");
    TempFile attrs("corpus_attr_bad.tsv", "a\n");
    Corpus c = load_sequences(data.path);
    CHECK_THROWS_AS(load_attributes(c, attrs.path), ParseError);
}
