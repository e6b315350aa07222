#include <doctest.h>

#include <set>

#include "crslearn/errors.hpp"
#include "crslearn/metrics.hpp"
#include "test_support.hpp"

using namespace crslearn;

TEST_SUITE_BEGIN("metrics");

namespace {

// independent per-class F1 from scratch
double oracle_macro_f1(const std::vector<std::size_t>& preds, const std::vector<std::size_t>& truths,
                       std::size_t classes) {
    double sum = 0.0;
    for (std::size_t c = 0; c < classes; ++c) {
        double tp = 0, fp = 0, fn = 0;
        for (std::size_t i = 0; i < truths.size(); ++i) {
            if (preds[i] == c && truths[i] == c) tp++;
            if (preds[i] == c && truths[i] != c) fp++;
            if (preds[i] != c && truths[i] == c) fn++;
        }
        const double prec = tp + fp > 0 ? tp / (tp + fp) : 0.0;
        const double rec = tp + fn > 0 ? tp / (tp + fn) : 0.0;
        if (prec + rec > 0) sum += 2 * prec * rec / (prec + rec);
    }
    return sum / double(classes);
}

}  // namespace

TEST_CASE("macro f1 hand cases") {
    std::vector<std::size_t> t{0, 1, 2, 0, 1, 2};
    CHECK(macro_f1(t, t, 3) == doctest::Approx(1.0));

    // all-majority predictor: class 0 F1 = 2/3, class 1 F1 = 0
    std::vector<std::size_t> truths{0, 0, 1, 1};
    std::vector<std::size_t> preds{0, 0, 0, 0};
    CHECK(macro_f1(preds, truths, 2) == doctest::Approx(1.0 / 3.0));
    CHECK(macro_f1(preds, truths, 2) == doctest::Approx(oracle_macro_f1(preds, truths, 2)));

    // class 2 absent from truths and preds still divides the mean
    truths = {0, 1, 0, 1};
    preds = {0, 1, 0, 1};
    CHECK(macro_f1(preds, truths, 3) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("macro f1 matches the oracle on random vectors") {
    Rng rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + rng.below(50);
        const std::size_t classes = 2 + rng.below(4);
        std::vector<std::size_t> truths(n), preds(n);
        for (std::size_t i = 0; i < n; ++i) {
            truths[i] = rng.below(classes);
            preds[i] = rng.below(classes);
        }
        CHECK(macro_f1(preds, truths, classes) ==
              doctest::Approx(oracle_macro_f1(preds, truths, classes)));
    }
}

TEST_CASE("macro f1 errors") {
    std::vector<std::size_t> a{0, 1}, b{0};
    CHECK_THROWS_AS(macro_f1(a, b, 2), DimensionError);
    std::vector<std::size_t> big{0, 5};
    CHECK_THROWS_AS(macro_f1(big, big, 2), DataError);
}

TEST_CASE("stratified k-fold balanced example") {
    // 10 instances, 2 balanced classes, k=5: one of each class per fold
    std::vector<std::uint32_t> labels{0, 1, 0, 1, 0, 1, 0, 1, 0, 1};
    const KFoldResult r = stratified_kfold(labels, 5, 9);
    CHECK(r.stratified);
    for (const auto& fold : r.folds) {
        REQUIRE(fold.test.size() == 2);
        CHECK(labels[fold.test[0]] + labels[fold.test[1]] == 1);
        CHECK(fold.train.size() == 8);
    }
}

TEST_CASE("folds partition the index set and are deterministic") {
    Rng rng(17);
    std::vector<std::uint32_t> labels(103);
    for (auto& l : labels) l = std::uint32_t(rng.below(3));
    const KFoldResult a = stratified_kfold(labels, 5, 1234);
    const KFoldResult b = stratified_kfold(labels, 5, 1234);

    std::set<std::size_t> seen;
    for (const auto& fold : a.folds) {
        for (std::size_t i : fold.test) CHECK(seen.insert(i).second);
        // train and test are disjoint
        std::set<std::size_t> test_set(fold.test.begin(), fold.test.end());
        for (std::size_t i : fold.train) CHECK_FALSE(test_set.count(i));
        CHECK(fold.train.size() + fold.test.size() == labels.size());
    }
    CHECK(seen.size() == labels.size());

    for (std::size_t f = 0; f < a.folds.size(); ++f) {
        CHECK(a.folds[f].test == b.folds[f].test);
        CHECK(a.folds[f].train == b.folds[f].train);
    }

    // per-fold class counts within 1 of proportional
    for (std::uint32_t cls = 0; cls < 3; ++cls) {
        std::size_t total = 0;
        for (auto l : labels) total += l == cls;
        for (const auto& fold : a.folds) {
            std::size_t got = 0;
            for (std::size_t i : fold.test) got += labels[i] == cls;
            const double expected = double(total) / 5.0;
            CHECK(std::abs(double(got) - expected) <= 1.0);
        }
    }
}

TEST_CASE("k-fold fallback and errors") {
    // a class with fewer than k members forces the plain fallback
    std::vector<std::uint32_t> labels{0, 0, 0, 0, 0, 0, 1};
    const KFoldResult r = stratified_kfold(labels, 3, 0);
    CHECK_FALSE(r.stratified);
    std::set<std::size_t> seen;
    for (const auto& fold : r.folds) {
        for (std::size_t i : fold.test) CHECK(seen.insert(i).second);
    }
    CHECK(seen.size() == labels.size());

    CHECK_THROWS_AS(stratified_kfold(labels, 8, 0), ConfigError);
    CHECK_THROWS_AS(stratified_kfold(labels, 1, 0), ConfigError);
}

TEST_CASE("stratified split keeps proportions") {
    std::vector<std::uint32_t> labels(100);
    for (std::size_t i = 0; i < 100; ++i) labels[i] = i < 60 ? 0 : 1;
    const FoldSplit s = stratified_split(labels, 0.8, 7);
    CHECK(s.train.size() == 80);
    CHECK(s.test.size() == 20);
    std::size_t c0 = 0;
    for (std::size_t i : s.train) c0 += labels[i] == 0;
    CHECK(c0 == 48);
}

TEST_SUITE_END();
