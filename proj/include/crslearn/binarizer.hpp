#ifndef CRSLEARN_BINARIZER_HPP
#define CRSLEARN_BINARIZER_HPP

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "crslearn/dataset.hpp"
#include "crslearn/matrix.hpp"

namespace crslearn {

/// Shannon entropy (bits) of the empirical class distribution of `labels`.
double entropy(std::span<const std::uint32_t> labels);

/// Recursive minimal-entropy partitioning with the MDL stopping rule.
/// Candidate cuts are midpoints between adjacent distinct values whose
/// instances are not all of one shared class (boundary points); the
/// minimum-weighted-entropy cut is kept iff its information gain clears
/// the description-length threshold, and both sides are partitioned
/// recursively. Returns globally sorted cut points; degenerate inputs
/// give an empty list.
std::vector<double> mdlp_cuts(std::span<const double> values, std::span<const std::uint32_t> labels);

/// One rendered binary feature: a half-open interval over a continuous
/// column or an equality test on a categorical column.
struct DictEntry {
    enum class Kind { interval, equality };
    Kind kind = Kind::equality;
    std::string column;
    double low = -std::numeric_limits<double>::infinity();   // interval: value in [low, high)
    double high = std::numeric_limits<double>::infinity();
    std::string category;                                    // equality: value == category

    std::string text() const;
    bool matches_numeric(double v) const { return kind == Kind::interval && v >= low && v < high; }
    bool matches_category(const std::string& v) const { return kind == Kind::equality && v == category; }
};

/// Maps each binary feature index to a human-readable condition. Features
/// derived from one source column form a contiguous group that one-hot
/// partitions the column's value range.
struct FeatureDictionary {
    std::vector<DictEntry> entries;
    std::vector<std::string> label_order;
    std::vector<std::string> dropped_columns;
    // [begin, end) entry range per kept source column, in schema order
    std::vector<std::pair<std::size_t, std::size_t>> groups;

    std::size_t size() const { return entries.size(); }
    bool operator==(const FeatureDictionary&) const = default;
};

/// Fitted discretization state: cut lists for continuous columns, observed
/// category lists for categorical ones, class label order. All orders are
/// first-appearance over the fitting data, so fitting is deterministic.
struct Discretizer {
    struct Column {
        std::string name;
        ColumnKind kind = ColumnKind::categorical;
        std::vector<double> cuts;                // continuous; strictly increasing, may be empty
        std::vector<std::string> categories;     // categorical; no duplicates
        bool dropped = false;                    // would yield a single constant feature

        bool operator==(const Column&) const = default;
    };
    std::vector<Column> columns;                 // non-label columns, schema order
    std::vector<std::string> label_order;

    bool operator==(const Discretizer&) const = default;

    /// Dictionary implied by the fitted state.
    FeatureDictionary dictionary() const;
};

/// Binary design matrix plus one-hot labels and the rendering dictionary.
struct BinarizedDataset {
    BinMatrix features;                          // N x J
    BinMatrix labels;                            // N x C, one-hot rows
    std::vector<std::uint32_t> label_ids;        // argmax of each label row
    FeatureDictionary dictionary;
    // column name -> #values seen at transform time that match no fitted
    // category (their feature group is left all-zero)
    std::vector<std::pair<std::string, std::size_t>> unseen_category_counts;

    std::size_t n() const { return features.rows; }
    std::size_t binary_feature_count() const { return features.cols; }
    std::size_t class_count() const { return labels.cols; }

    /// Row subset in the given index order (CV splits).
    BinarizedDataset subset(std::span<const std::size_t> indices) const;
};

/// Runs mdlp_cuts per continuous column against the labels and records the
/// categorical category lists and label order.
Discretizer fit_discretizer(const RawDataset& data);

/// Applies a fitted discretizer: bin-membership features for continuous
/// columns, equality features for categorical ones, one-hot labels in
/// label_order. Columns the fit marked as dropped produce no features.
/// Unseen categories leave their group all-zero and are counted; an unseen
/// class label is an error.
BinarizedDataset binarize(const RawDataset& data, const Discretizer& disc);

/// Feature-only transform for unlabeled data: labels stay empty.
BinarizedDataset binarize_features(const RawDataset& data, const Discretizer& disc);

}  // namespace crslearn

#endif
