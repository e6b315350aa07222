#ifndef CRSLEARN_TEST_SUPPORT_HPP
#define CRSLEARN_TEST_SUPPORT_HPP

// Shared test helpers and independent oracles. Everything here is kept
// deliberately naive and separate from the library implementation paths it
// checks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "crslearn/crs.hpp"
#include "crslearn/dataset.hpp"
#include "crslearn/rng.hpp"

namespace testsupport {

// ---- finite differences ----------------------------------------------------

// central difference d f / d x_i with step h
inline double central_diff(const std::function<double(const std::vector<double>&)>& f,
                           std::vector<double> x, std::size_t i, double h = 1e-5) {
    x[i] += h;
    const double fp = f(x);
    x[i] -= 2 * h;
    const double fm = f(x);
    return (fp - fm) / (2 * h);
}

inline double rel_error(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    if (scale < 1e-300) return 0.0;
    return std::abs(a - b) / scale;
}

// ---- recursive MDLP oracle -------------------------------------------------

// Exhaustive re-derivation of the partitioning: entropy by definition,
// every boundary midpoint scored from scratch, the acceptance inequality
// evaluated, recursion on both sides. No incremental counting.
inline double oracle_entropy(const std::vector<std::uint32_t>& labels) {
    std::map<std::uint32_t, std::size_t> counts;
    for (auto l : labels) counts[l]++;
    double ent = 0.0;
    for (const auto& [cls, c] : counts) {
        const double p = double(c) / double(labels.size());
        ent -= p * std::log2(p);
    }
    return ent;
}

inline std::size_t oracle_distinct(const std::vector<std::uint32_t>& labels) {
    return std::set<std::uint32_t>(labels.begin(), labels.end()).size();
}

inline void oracle_mdlp_recurse(std::vector<std::pair<double, std::uint32_t>> items,
                                std::vector<double>& cuts) {
    const std::size_t n = items.size();
    if (n < 2) return;
    std::sort(items.begin(), items.end());

    std::vector<std::uint32_t> all;
    for (auto& [v, l] : items) all.push_back(l);
    if (oracle_distinct(all) < 2) return;

    // candidate boundary positions: value changes and the two value-groups
    // are not one pure shared class
    struct Cand {
        std::size_t pos;
        double weighted;
    };
    std::vector<Cand> cands;
    for (std::size_t p = 1; p < n; ++p) {
        if (items[p - 1].first == items[p].first) continue;
        std::set<std::uint32_t> group_classes;
        for (std::size_t i = 0; i < n; ++i) {
            if (items[i].first == items[p - 1].first || items[i].first == items[p].first) {
                group_classes.insert(items[i].second);
            }
        }
        if (group_classes.size() < 2) continue;
        std::vector<std::uint32_t> left, right;
        for (std::size_t i = 0; i < p; ++i) left.push_back(items[i].second);
        for (std::size_t i = p; i < n; ++i) right.push_back(items[i].second);
        const double weighted = (double(left.size()) * oracle_entropy(left) +
                                 double(right.size()) * oracle_entropy(right)) /
                                double(n);
        cands.push_back({p, weighted});
    }
    if (cands.empty()) return;

    const Cand best = *std::min_element(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        if (a.weighted != b.weighted) return a.weighted < b.weighted;
        return a.pos < b.pos;  // tie -> smaller cut value
    });

    std::vector<std::uint32_t> left, right;
    for (std::size_t i = 0; i < best.pos; ++i) left.push_back(items[i].second);
    for (std::size_t i = best.pos; i < n; ++i) right.push_back(items[i].second);

    const double ent = oracle_entropy(all);
    const double gain = ent - best.weighted;
    const double k = double(oracle_distinct(all));
    const double k1 = double(oracle_distinct(left));
    const double k2 = double(oracle_distinct(right));
    const double delta = std::log2(std::pow(3.0, k) - 2.0) -
                         (k * ent - k1 * oracle_entropy(left) - k2 * oracle_entropy(right));
    const double threshold = (std::log2(double(n) - 1.0) + delta) / double(n);
    if (!(gain > threshold)) return;

    cuts.push_back((items[best.pos - 1].first + items[best.pos].first) / 2.0);
    oracle_mdlp_recurse({items.begin(), items.begin() + long(best.pos)}, cuts);
    oracle_mdlp_recurse({items.begin() + long(best.pos), items.end()}, cuts);
}

inline std::vector<double> oracle_mdlp(const std::vector<double>& values,
                                       const std::vector<std::uint32_t>& labels) {
    std::vector<std::pair<double, std::uint32_t>> items;
    for (std::size_t i = 0; i < values.size(); ++i) items.emplace_back(values[i], labels[i]);
    std::vector<double> cuts;
    oracle_mdlp_recurse(std::move(items), cuts);
    std::sort(cuts.begin(), cuts.end());
    return cuts;
}

// ---- random models and exhaustive inputs -------------------------------------

// random rule model with the given widths; edge density ~0.5 by default
inline crslearn::CrsModel random_crs(const std::vector<std::size_t>& widths, crslearn::Rng& rng,
                                     double density = 0.5) {
    crslearn::CrsModel crs;
    crs.widths = widths;
    for (std::size_t l = 1; l < widths.size(); ++l) {
        crslearn::BinMatrix m(widths[l], widths[l - 1]);
        for (auto& b : m.data) b = rng.bernoulli(density) ? 1 : 0;
        crs.layers.push_back(std::move(m));
    }
    crs.fallback_class = 0;
    return crs;
}

// all 2^J binary inputs, J <= 20
inline std::vector<std::vector<std::uint8_t>> all_inputs(std::size_t j) {
    std::vector<std::vector<std::uint8_t>> out;
    out.reserve(std::size_t{1} << j);
    for (std::size_t bits = 0; bits < (std::size_t{1} << j); ++bits) {
        std::vector<std::uint8_t> x(j);
        for (std::size_t k = 0; k < j; ++k) x[k] = (bits >> k) & 1;
        out.push_back(std::move(x));
    }
    return out;
}

// ---- small dataset builders --------------------------------------------------

// XOR over two one-hot encoded binary attributes, each distinct instance
// replicated `copies` times
inline std::string xor_csv(std::size_t copies) {
    std::string csv = "a,b,target\n";
    for (std::size_t rep = 0; rep < copies; ++rep) {
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
                csv += a == 0 ? "a0," : "a1,";
                csv += b == 0 ? "b0," : "b1,";
                csv += (a ^ b) ? "odd\n" : "even\n";
            }
        }
    }
    return csv;
}

inline std::string repo_path(const std::string& rel) {
    return std::string(CRSLEARN_SOURCE_DIR) + "/" + rel;
}

}  // namespace testsupport

#endif
