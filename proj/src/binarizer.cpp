#include "crslearn/binarizer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "crslearn/errors.hpp"

namespace crslearn {

namespace {

double entropy_from_counts(std::span<const std::size_t> counts, std::size_t total) {
    double ent = 0.0;
    for (std::size_t c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / static_cast<double>(total);
        ent -= p * std::log2(p);
    }
    return ent;
}

std::size_t distinct_classes(std::span<const std::size_t> counts) {
    std::size_t k = 0;
    for (std::size_t c : counts) k += c > 0 ? 1 : 0;
    return k;
}

// 3^k, exact in double for k <= 33
double pow3(std::size_t k) {
    double p = 1.0;
    for (std::size_t i = 0; i < k; ++i) p *= 3.0;
    return p;
}

struct MdlpWorker {
    std::vector<double> values;            // sorted
    std::vector<std::uint32_t> labels;     // sorted along with values
    std::size_t num_classes = 0;
    std::vector<double> cuts;

    void run() {
        if (values.size() >= 2 && num_classes >= 2) {
            partition(0, values.size());
        }
        std::sort(cuts.begin(), cuts.end());
    }

    void class_counts(std::size_t lo, std::size_t hi, std::vector<std::size_t>& out) const {
        std::fill(out.begin(), out.end(), 0);
        for (std::size_t i = lo; i < hi; ++i) out[labels[i]]++;
    }

    // Recursively splits the half-open sorted range [lo, hi).
    void partition(std::size_t lo, std::size_t hi) {
        const std::size_t n = hi - lo;
        if (n < 2) return;

        std::vector<std::size_t> total(num_classes, 0);
        class_counts(lo, hi, total);
        const std::size_t k = distinct_classes(total);
        if (k < 2) return;
        const double parent_ent = entropy_from_counts(total, n);

        // Walk the range once, keeping left-side counts. A position is a
        // boundary iff the value changes there and the instances of the two
        // adjacent values are not all of a single shared class.
        std::vector<std::size_t> left(num_classes, 0);
        std::vector<std::size_t> right(num_classes, 0);

        bool found = false;
        double best_weighted = 0.0;
        std::size_t best_pos = 0;
        double best_ent_l = 0.0, best_ent_r = 0.0;
        std::size_t best_k_l = 0, best_k_r = 0;

        std::size_t group_start = lo;
        for (std::size_t i = lo; i + 1 < hi; ++i) {
            left[labels[i]]++;
            if (values[i] == values[i + 1]) continue;
            // group of equal values ends at i (inclusive); next group starts at i+1
            std::size_t next_end = i + 1;
            while (next_end < hi && values[next_end] == values[i + 1]) ++next_end;
            const bool boundary = !pure_same_class(group_start, i + 1, i + 1, next_end);
            group_start = i + 1;
            if (!boundary) continue;

            const std::size_t nl = i + 1 - lo;
            const std::size_t nr = hi - (i + 1);
            for (std::size_t c = 0; c < num_classes; ++c) right[c] = total[c] - left[c];
            const double ent_l = entropy_from_counts(left, nl);
            const double ent_r = entropy_from_counts(right, nr);
            const double weighted =
                (static_cast<double>(nl) * ent_l + static_cast<double>(nr) * ent_r) / static_cast<double>(n);
            // ties broken toward the smaller cut value = the earlier position
            if (!found || weighted < best_weighted) {
                found = true;
                best_weighted = weighted;
                best_pos = i + 1;
                best_ent_l = ent_l;
                best_ent_r = ent_r;
                best_k_l = distinct_classes(left);
                best_k_r = distinct_classes(right);
            }
        }
        if (!found) return;

        const double gain = parent_ent - best_weighted;
        const double delta = std::log2(pow3(k) - 2.0) -
                             (static_cast<double>(k) * parent_ent -
                              static_cast<double>(best_k_l) * best_ent_l -
                              static_cast<double>(best_k_r) * best_ent_r);
        const double threshold =
            (std::log2(static_cast<double>(n) - 1.0) + delta) / static_cast<double>(n);
        if (!(gain > threshold)) return;

        cuts.push_back((values[best_pos - 1] + values[best_pos]) / 2.0);
        partition(lo, best_pos);
        partition(best_pos, hi);
    }

    // true iff [l0,l1) and [r0,r1) hold one identical class throughout
    bool pure_same_class(std::size_t l0, std::size_t l1, std::size_t r0, std::size_t r1) const {
        const std::uint32_t cls = labels[l0];
        for (std::size_t i = l0; i < l1; ++i) {
            if (labels[i] != cls) return false;
        }
        for (std::size_t i = r0; i < r1; ++i) {
            if (labels[i] != cls) return false;
        }
        return true;
    }
};

std::string format_cut(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

}  // namespace

double entropy(std::span<const std::uint32_t> labels) {
    if (labels.empty()) throw DataError("entropy: empty partition");
    std::uint32_t max_label = 0;
    for (auto l : labels) max_label = std::max(max_label, l);
    std::vector<std::size_t> counts(static_cast<std::size_t>(max_label) + 1, 0);
    for (auto l : labels) counts[l]++;
    return entropy_from_counts(counts, labels.size());
}

std::vector<double> mdlp_cuts(std::span<const double> values, std::span<const std::uint32_t> labels) {
    if (values.size() != labels.size()) {
        throw DimensionError("mdlp_cuts: values/labels length mismatch");
    }
    if (values.empty()) return {};

    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    // sort by (value, label) so duplicate values land in a fixed order
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (values[a] != values[b]) return values[a] < values[b];
        return labels[a] < labels[b];
    });

    MdlpWorker w;
    w.values.reserve(values.size());
    w.labels.reserve(values.size());
    std::uint32_t max_label = 0;
    for (std::size_t i : order) {
        w.values.push_back(values[i]);
        w.labels.push_back(labels[i]);
        max_label = std::max(max_label, labels[i]);
    }
    w.num_classes = static_cast<std::size_t>(max_label) + 1;
    w.run();
    return w.cuts;
}

std::string DictEntry::text() const {
    if (kind == Kind::equality) {
        return column + " = " + category;
    }
    const bool lo = std::isfinite(low);
    const bool hi = std::isfinite(high);
    if (!lo && hi) return column + " < " + format_cut(high);
    if (lo && !hi) return column + " >= " + format_cut(low);
    if (lo && hi) return format_cut(low) + " <= " + column + " < " + format_cut(high);
    return column + " : any";
}

FeatureDictionary Discretizer::dictionary() const {
    FeatureDictionary dict;
    dict.label_order = label_order;
    for (const auto& col : columns) {
        if (col.dropped) {
            dict.dropped_columns.push_back(col.name);
            continue;
        }
        const std::size_t begin = dict.entries.size();
        if (col.kind == ColumnKind::continuous) {
            for (std::size_t b = 0; b <= col.cuts.size(); ++b) {
                DictEntry e;
                e.kind = DictEntry::Kind::interval;
                e.column = col.name;
                if (b > 0) e.low = col.cuts[b - 1];
                if (b < col.cuts.size()) e.high = col.cuts[b];
                dict.entries.push_back(std::move(e));
            }
        } else {
            for (const auto& cat : col.categories) {
                DictEntry e;
                e.kind = DictEntry::Kind::equality;
                e.column = col.name;
                e.category = cat;
                dict.entries.push_back(std::move(e));
            }
        }
        dict.groups.emplace_back(begin, dict.entries.size());
    }
    return dict;
}

BinarizedDataset BinarizedDataset::subset(std::span<const std::size_t> indices) const {
    BinarizedDataset out;
    out.dictionary = dictionary;
    out.features = BinMatrix(indices.size(), features.cols);
    out.labels = BinMatrix(indices.size(), labels.cols);
    out.label_ids.reserve(indices.size());
    for (std::size_t r = 0; r < indices.size(); ++r) {
        const std::size_t i = indices[r];
        std::copy(features.row(i).begin(), features.row(i).end(), out.features.row(r).begin());
        std::copy(labels.row(i).begin(), labels.row(i).end(), out.labels.row(r).begin());
        out.label_ids.push_back(label_ids[i]);
    }
    return out;
}

Discretizer fit_discretizer(const RawDataset& data) {
    Discretizer disc;

    const RawColumn& label = data.label_column();
    std::map<std::string, std::uint32_t> label_id;
    for (const auto& v : label.text) {
        if (label_id.emplace(v, static_cast<std::uint32_t>(disc.label_order.size())).second) {
            disc.label_order.push_back(v);
        }
    }
    std::vector<std::uint32_t> label_ids;
    label_ids.reserve(data.n);
    for (const auto& v : label.text) label_ids.push_back(label_id.at(v));

    for (const auto& col : data.columns) {
        if (col.kind == ColumnKind::label) continue;
        Discretizer::Column out;
        out.name = col.name;
        out.kind = col.kind;
        if (col.kind == ColumnKind::continuous) {
            out.cuts = mdlp_cuts(col.numeric, label_ids);
            // zero cuts would produce one constant feature; drop the column
            out.dropped = out.cuts.empty();
        } else {
            std::map<std::string, bool> seen;
            for (const auto& v : col.text) {
                if (seen.emplace(v, true).second) out.categories.push_back(v);
            }
            out.dropped = out.categories.size() < 2;
        }
        disc.columns.push_back(std::move(out));
    }
    return disc;
}

namespace {

void fill_features(const RawDataset& data, const Discretizer& disc, BinarizedDataset& out);

}  // namespace

BinarizedDataset binarize(const RawDataset& data, const Discretizer& disc) {
    const RawColumn& label = data.label_column();
    std::map<std::string, std::uint32_t> label_id;
    for (std::size_t c = 0; c < disc.label_order.size(); ++c) {
        label_id[disc.label_order[c]] = static_cast<std::uint32_t>(c);
    }

    BinarizedDataset out = binarize_features(data, disc);
    out.labels = BinMatrix(data.n, disc.label_order.size());
    out.label_ids.reserve(data.n);
    for (std::size_t i = 0; i < data.n; ++i) {
        auto it = label_id.find(label.text[i]);
        if (it == label_id.end()) {
            throw DataError("binarize: unknown class '" + label.text[i] + "'");
        }
        out.label_ids.push_back(it->second);
        out.labels(i, it->second) = 1;
    }
    return out;
}

BinarizedDataset binarize_features(const RawDataset& data, const Discretizer& disc) {
    BinarizedDataset out;
    out.dictionary = disc.dictionary();
    const std::size_t J = out.dictionary.size();
    if (J == 0) throw DataError("binarize: no usable feature columns (all dropped)");
    out.features = BinMatrix(data.n, J);
    out.labels = BinMatrix(0, disc.label_order.size());
    fill_features(data, disc, out);
    return out;
}

namespace {

void fill_features(const RawDataset& data, const Discretizer& disc, BinarizedDataset& out) {
    // schema compatibility: every fitted column must exist with the same kind
    std::map<std::string, const RawColumn*> by_name;
    for (const auto& col : data.columns) by_name[col.name] = &col;

    std::size_t feature_base = 0;
    for (const auto& col : disc.columns) {
        if (col.dropped) continue;
        auto found = by_name.find(col.name);
        if (found == by_name.end()) {
            throw DataError("binarize: fitted column '" + col.name + "' missing from data");
        }
        const RawColumn& raw = *found->second;
        if (raw.kind != col.kind) {
            throw DataError("binarize: column '" + col.name + "' kind mismatch (fitted " +
                            std::string(to_string(col.kind)) + ", data " + to_string(raw.kind) + ")");
        }
        if (col.kind == ColumnKind::continuous) {
            const std::size_t bins = col.cuts.size() + 1;
            for (std::size_t i = 0; i < data.n; ++i) {
                const double v = raw.numeric[i];
                // bin index = number of cuts <= v
                const std::size_t b = static_cast<std::size_t>(
                    std::upper_bound(col.cuts.begin(), col.cuts.end(), v) - col.cuts.begin());
                out.features(i, feature_base + b) = 1;
            }
            feature_base += bins;
        } else {
            std::map<std::string, std::size_t> cat_index;
            for (std::size_t c = 0; c < col.categories.size(); ++c) cat_index[col.categories[c]] = c;
            std::size_t unseen = 0;
            for (std::size_t i = 0; i < data.n; ++i) {
                auto ci = cat_index.find(raw.text[i]);
                if (ci == cat_index.end()) {
                    ++unseen;  // group stays all-zero for this instance
                    continue;
                }
                out.features(i, feature_base + ci->second) = 1;
            }
            if (unseen > 0) out.unseen_category_counts.emplace_back(col.name, unseen);
            feature_base += col.categories.size();
        }
    }
}

}  // namespace

}  // namespace crslearn
