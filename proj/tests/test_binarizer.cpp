#include <doctest.h>

#include "crslearn/binarizer.hpp"
#include "crslearn/errors.hpp"
#include "crslearn/rng.hpp"
#include "test_support.hpp"

using namespace crslearn;

TEST_SUITE_BEGIN("binarizer");

TEST_CASE("entropy basics") {
    std::vector<std::uint32_t> labels{0, 0, 1, 1};
    CHECK(entropy(labels) == doctest::Approx(1.0));

    labels = {0, 0, 0};
    CHECK(entropy(labels) == doctest::Approx(0.0));

    labels = {0, 0, 1, 1, 1, 1};
    CHECK(entropy(labels) == doctest::Approx(0.9182958340544896));

    labels.clear();
    CHECK_THROWS_AS(entropy(labels), DataError);
}

TEST_CASE("mdlp hand-derived cases") {
    std::vector<double> values{1, 2, 3, 4};

    // gain 1.0 beats (log2 3 + log2 7 - 2)/4 ~= 0.598
    std::vector<std::uint32_t> labels{0, 0, 1, 1};
    CHECK(mdlp_cuts(values, labels) == std::vector<double>{2.5});

    labels = {0, 0, 0, 0};
    CHECK(mdlp_cuts(values, labels).empty());

    // best candidates: gain 0 at 2.5, gain ~0.31 below threshold at 1.5/3.5
    labels = {0, 1, 0, 1};
    CHECK(mdlp_cuts(values, labels).empty());
}

TEST_CASE("mdlp degenerate inputs") {
    CHECK(mdlp_cuts(std::vector<double>{}, std::vector<std::uint32_t>{}).empty());
    CHECK(mdlp_cuts(std::vector<double>{3.0}, std::vector<std::uint32_t>{1}).empty());
    // constant values cannot be cut regardless of labels
    CHECK(mdlp_cuts(std::vector<double>{2, 2, 2, 2}, std::vector<std::uint32_t>{0, 1, 0, 1}).empty());
    std::vector<double> v{1, 2};
    std::vector<std::uint32_t> l{0, 1, 0};
    CHECK_THROWS_AS(mdlp_cuts(v, l), DimensionError);
}

TEST_CASE("mdlp equals the exhaustive recursive oracle on a small-case fixture set") {
    Rng rng(42);
    std::size_t checked = 0;

    // all two-class label patterns over distinct values, n <= 10
    for (std::size_t n : {2, 3, 4, 5, 6, 7, 8, 9, 10}) {
        std::vector<double> values(n);
        for (std::size_t i = 0; i < n; ++i) values[i] = double(i + 1);
        for (std::size_t bits = 0; bits < (std::size_t{1} << n); ++bits) {
            std::vector<std::uint32_t> labels(n);
            for (std::size_t i = 0; i < n; ++i) labels[i] = (bits >> i) & 1;
            CHECK(mdlp_cuts(values, labels) == testsupport::oracle_mdlp(values, labels));
            ++checked;
        }
    }

    // random cases with <= 12 instances, <= 4 distinct values (ties!), <= 3 classes
    const double pool[4] = {1.0, 2.5, 3.25, 7.0};
    for (int trial = 0; trial < 3000; ++trial) {
        const std::size_t n = 1 + rng.below(12);
        std::vector<double> values(n);
        std::vector<std::uint32_t> labels(n);
        const std::size_t classes = 2 + rng.below(2);
        for (std::size_t i = 0; i < n; ++i) {
            values[i] = pool[rng.below(4)];
            labels[i] = std::uint32_t(rng.below(classes));
        }
        CHECK(mdlp_cuts(values, labels) == testsupport::oracle_mdlp(values, labels));
        ++checked;
    }
    CHECK(checked > 4000);
}

TEST_CASE("fit_discretizer per-column behavior") {
    const std::string csv =
        "x,color,noise,cls\n"
        "1,a,5.5,0\n"
        "2,b,5.5,0\n"
        "3,a,5.5,1\n"
        "4,b,5.5,1\n";
    const RawDataset data = parse_csv(csv, "cls");
    const Discretizer disc = fit_discretizer(data);

    REQUIRE(disc.columns.size() == 3);
    CHECK(disc.columns[0].name == "x");
    CHECK(disc.columns[0].kind == ColumnKind::continuous);
    CHECK(disc.columns[0].cuts == std::vector<double>{2.5});
    CHECK_FALSE(disc.columns[0].dropped);

    CHECK(disc.columns[1].kind == ColumnKind::categorical);
    CHECK(disc.columns[1].categories == std::vector<std::string>{"a", "b"});  // first appearance

    // constant continuous column: no accepted cut, dropped
    CHECK(disc.columns[2].cuts.empty());
    CHECK(disc.columns[2].dropped);

    CHECK(disc.label_order == std::vector<std::string>{"0", "1"});

    // deterministic refit
    CHECK(fit_discretizer(data) == disc);
}

TEST_CASE("binarize bins, one-hot labels and dictionary") {
    const std::string csv =
        "x,color,cls\n"
        "1,red,n\n"
        "2,blue,n\n"
        "3,red,y\n"
        "4,blue,y\n";
    const RawDataset data = parse_csv(csv, "cls");
    const Discretizer disc = fit_discretizer(data);
    const BinarizedDataset b = binarize(data, disc);

    REQUIRE(b.binary_feature_count() == 4);  // 2 bins + 2 categories
    REQUIRE(b.class_count() == 2);

    // value 3.0 against cuts [2.5] -> [0, 1]
    CHECK(b.features(2, 0) == 0);
    CHECK(b.features(2, 1) == 1);
    // category blue against [red, blue] -> [0, 1]
    CHECK(b.features(1, 2) == 0);
    CHECK(b.features(1, 3) == 1);

    CHECK(b.dictionary.entries[0].text() == "x < 2.5");
    CHECK(b.dictionary.entries[1].text() == "x >= 2.5");
    CHECK(b.dictionary.entries[2].text() == "color = red");
    CHECK(b.dictionary.entries[3].text() == "color = blue");

    for (std::size_t i = 0; i < b.n(); ++i) {
        std::size_t ones = 0;
        for (std::size_t c = 0; c < b.class_count(); ++c) ones += b.labels(i, c);
        CHECK(ones == 1);
    }
}

TEST_CASE("one-hot partition per source column group") {
    Rng rng(3);
    std::string csv = "u,v,c\n";
    const char* cats[3] = {"p", "q", "r"};
    for (int i = 0; i < 40; ++i) {
        csv += std::to_string(rng.uniform(10.0)) + "," + cats[rng.below(3)] + "," +
               (rng.bernoulli(0.5) ? "A" : "B") + "\n";
    }
    const RawDataset data = parse_csv(csv, "c");
    const Discretizer disc = fit_discretizer(data);
    const BinarizedDataset b = binarize(data, disc);
    for (std::size_t i = 0; i < b.n(); ++i) {
        for (const auto& [begin, end] : b.dictionary.groups) {
            std::size_t sum = 0;
            for (std::size_t j = begin; j < end; ++j) sum += b.features(i, j);
            CHECK(sum == 1);
        }
    }
}

TEST_CASE("middle interval condition text") {
    const std::string csv =
        "x,cls\n"
        "1,a\n1.5,a\n2,a\n2.5,a\n3,b\n3.5,b\n4,b\n4.5,b\n5,c\n5.5,c\n6,c\n6.5,c\n";
    const RawDataset data = parse_csv(csv, "cls");
    const Discretizer disc = fit_discretizer(data);
    REQUIRE(disc.columns[0].cuts.size() == 2);
    const auto dict = disc.dictionary();
    CHECK(dict.entries[0].text() == "x < 2.75");
    CHECK(dict.entries[1].text() == "2.75 <= x < 4.75");
    CHECK(dict.entries[2].text() == "x >= 4.75");
}

TEST_CASE("dropped columns are recorded and produce no features") {
    const std::string csv =
        "k,x,cls\n"
        "same,1,0\n"
        "same,2,0\n"
        "same,3,1\n"
        "same,4,1\n";
    const RawDataset data = parse_csv(csv, "cls");
    const Discretizer disc = fit_discretizer(data);
    CHECK(disc.columns[0].dropped);  // single-category column
    const BinarizedDataset b = binarize(data, disc);
    CHECK(b.binary_feature_count() == 2);
    CHECK(b.dictionary.dropped_columns == std::vector<std::string>{"k"});
}

TEST_CASE("unseen category leaves the group all-zero; unseen class is an error") {
    const std::string fit_csv = "color,cls\nred,0\nblue,1\nred,0\nblue,1\n";
    const Discretizer disc = fit_discretizer(parse_csv(fit_csv, "cls"));

    const RawDataset odd = parse_csv("color,cls\ngreen,0\nred,1\n", "cls");
    const BinarizedDataset b = binarize(odd, disc);
    CHECK(b.features(0, 0) == 0);
    CHECK(b.features(0, 1) == 0);
    REQUIRE(b.unseen_category_counts.size() == 1);
    CHECK(b.unseen_category_counts[0].first == "color");
    CHECK(b.unseen_category_counts[0].second == 1);

    const RawDataset bad = parse_csv("color,cls\nred,2\nblue,0\n", "cls");
    CHECK_THROWS_AS(binarize(bad, disc), DataError);
}

TEST_CASE("column type mismatch propagates") {
    SchemaOverrides forced{{"x", ColumnKind::continuous}};
    CHECK_THROWS_AS(parse_csv("x,cls\n1,a\noops,b\n", "cls", forced), DataError);
}

TEST_CASE("missing values are rejected at load") {
    CHECK_THROWS_AS(parse_csv("x,cls\n1,a\n,b\n", "cls"), DataError);
    // "?" is a value, not a missing marker
    const RawDataset ds = parse_csv("x,cls\n1,a\n?,b\n", "cls");
    CHECK(ds.columns[0].kind == ColumnKind::categorical);
}

TEST_CASE("tic-tac-toe binarizes to 27 features") {
    const RawDataset data = load_csv(testsupport::repo_path("data/tic-tac-toe.csv"), "class");
    REQUIRE(data.n == 958);
    const Discretizer disc = fit_discretizer(data);
    const BinarizedDataset b = binarize(data, disc);
    CHECK(b.binary_feature_count() == 27);
    CHECK(b.class_count() == 2);
}

TEST_SUITE_END();
