#include "crslearn/simplify.hpp"

#include <algorithm>
#include <set>

#include "crslearn/errors.hpp"

namespace crslearn {

std::size_t SimplificationReport::dead_nodes_total() const {
    std::size_t n = 0;
    for (std::size_t c : no_path_removed) n += c;
    for (std::size_t c : never_activated_removed) n += c;
    return n;
}

namespace {

// reachable[l][i]: some input node has a forward path to node i of layer l
std::vector<std::vector<std::uint8_t>> forward_reachability(const CrsModel& crs) {
    std::vector<std::vector<std::uint8_t>> reach(crs.layers.size() + 1);
    reach[0].assign(crs.widths[0], 1);
    for (std::size_t l = 1; l <= crs.layers.size(); ++l) {
        const BinMatrix& w = crs.layers[l - 1];
        reach[l].assign(w.rows, 0);
        for (std::size_t i = 0; i < w.rows; ++i) {
            for (std::size_t j = 0; j < w.cols; ++j) {
                if (w(i, j) && reach[l - 1][j]) {
                    reach[l][i] = 1;
                    break;
                }
            }
        }
    }
    return reach;
}

// reaches_out[l][i]: node i of layer l has a forward path to some output node
std::vector<std::vector<std::uint8_t>> backward_reachability(const CrsModel& crs) {
    std::vector<std::vector<std::uint8_t>> reach(crs.layers.size() + 1);
    reach[crs.layers.size()].assign(crs.widths.back(), 1);
    for (std::size_t l = crs.layers.size(); l-- > 0;) {
        const BinMatrix& w = crs.layers[l];  // layer l+1 adjacency
        reach[l].assign(crs.widths[l], 0);
        for (std::size_t i = 0; i < w.rows; ++i) {
            if (!reach[l + 1][i]) continue;
            for (std::size_t j = 0; j < w.cols; ++j) {
                if (w(i, j)) reach[l][j] = 1;
            }
        }
    }
    return reach;
}

// per-node activation counts over the training set, middle layers only
std::vector<std::vector<std::size_t>> activation_counts(const CrsModel& crs,
                                                        const BinarizedDataset& train) {
    std::vector<std::vector<std::size_t>> counts(crs.layers.size() + 1);
    for (std::size_t l = 0; l <= crs.layers.size(); ++l) counts[l].assign(crs.widths[l], 0);
    for (std::size_t i = 0; i < train.n(); ++i) {
        const auto reps = crs_forward(crs, train.features.row(i));
        for (std::size_t l = 1; l < crs.layers.size(); ++l) {
            for (std::size_t v = 0; v < reps[l].values.size(); ++v) {
                counts[l][v] += reps[l].values[v];
            }
        }
    }
    return counts;
}

// Middle-layer nodes with no forward path to any output node. Removing
// these cannot change any output; input-side-unreachable nodes are constant
// sources and are deliberately not collected here.
std::vector<DeadNode> structurally_removable(const CrsModel& crs) {
    const auto reaches_out = backward_reachability(crs);
    std::vector<DeadNode> dead;
    for (std::size_t l = 1; l < crs.layers.size(); ++l) {
        for (std::size_t i = 0; i < crs.widths[l]; ++i) {
            if (!reaches_out[l][i]) dead.push_back({l, i, DeadCause::no_path});
        }
    }
    return dead;
}

std::vector<DeadNode> activation_removable(const CrsModel& crs, const BinarizedDataset& train,
                                           const std::vector<DeadNode>& already) {
    std::set<std::pair<std::size_t, std::size_t>> skip;
    for (const auto& d : already) skip.emplace(d.layer, d.index);
    const auto counts = activation_counts(crs, train);
    std::vector<DeadNode> dead;
    for (std::size_t l = 1; l < crs.layers.size(); ++l) {
        for (std::size_t i = 0; i < crs.widths[l]; ++i) {
            if (counts[l][i] == 0 && !skip.count({l, i})) {
                dead.push_back({l, i, DeadCause::never_activated});
            }
        }
    }
    return dead;
}

// packed bit rows for fast subset tests
struct PackedRows {
    std::size_t words = 0;
    std::vector<std::uint64_t> bits;

    PackedRows(const BinMatrix& m) : words((m.cols + 63) / 64), bits(m.rows * words, 0) {
        for (std::size_t i = 0; i < m.rows; ++i) {
            for (std::size_t j = 0; j < m.cols; ++j) {
                if (m(i, j)) bits[i * words + j / 64] |= std::uint64_t{1} << (j % 64);
            }
        }
    }

    bool subset(std::size_t a, std::size_t b) const {
        const std::uint64_t* pa = bits.data() + a * words;
        const std::uint64_t* pb = bits.data() + b * words;
        for (std::size_t w = 0; w < words; ++w) {
            if (pa[w] & ~pb[w]) return false;
        }
        return true;
    }
};

}  // namespace

std::uint8_t subset(std::span<const std::uint8_t> sub, std::span<const std::uint8_t> super) {
    if (sub.size() != super.size()) throw DimensionError("subset: row length mismatch");
    for (std::size_t i = 0; i < sub.size(); ++i) {
        if (sub[i] && !super[i]) return 0;
    }
    return 1;
}

std::vector<DeadNode> detect_dead_nodes(const CrsModel& crs, const BinarizedDataset* train) {
    const auto from_input = forward_reachability(crs);
    const auto reaches_out = backward_reachability(crs);
    std::vector<std::vector<std::size_t>> counts;
    if (train) counts = activation_counts(crs, *train);

    std::vector<DeadNode> dead;
    for (std::size_t l = 1; l < crs.layers.size(); ++l) {
        for (std::size_t i = 0; i < crs.widths[l]; ++i) {
            if (!from_input[l][i] || !reaches_out[l][i]) {
                dead.push_back({l, i, DeadCause::no_path});
            } else if (train && counts[l][i] == 0) {
                dead.push_back({l, i, DeadCause::never_activated});
            }
        }
    }
    return dead;
}

CrsModel remove_nodes(const CrsModel& crs, std::span<const DeadNode> nodes) {
    std::vector<std::vector<std::uint8_t>> keep(crs.layers.size() + 1);
    for (std::size_t l = 0; l <= crs.layers.size(); ++l) keep[l].assign(crs.widths[l], 1);
    for (const auto& node : nodes) {
        if (node.layer == 0 || node.layer >= crs.layers.size()) {
            throw ConfigError("remove_nodes: cannot remove input or output layer node (layer " +
                              std::to_string(node.layer) + ")");
        }
        if (node.index >= crs.widths[node.layer]) {
            throw ConfigError("remove_nodes: node index out of range");
        }
        keep[node.layer][node.index] = 0;
    }

    CrsModel out;
    out.dictionary = crs.dictionary;
    out.fallback_class = crs.fallback_class;
    out.widths.resize(crs.widths.size());
    for (std::size_t l = 0; l <= crs.layers.size(); ++l) {
        out.widths[l] = static_cast<std::size_t>(
            std::count(keep[l].begin(), keep[l].end(), std::uint8_t{1}));
    }
    out.layers.reserve(crs.layers.size());
    for (std::size_t l = 1; l <= crs.layers.size(); ++l) {
        const BinMatrix& w = crs.layers[l - 1];
        BinMatrix nw(out.widths[l], out.widths[l - 1]);
        std::size_t ri = 0;
        for (std::size_t i = 0; i < w.rows; ++i) {
            if (!keep[l][i]) continue;
            std::size_t rj = 0;
            for (std::size_t j = 0; j < w.cols; ++j) {
                if (!keep[l - 1][j]) continue;
                nw(ri, rj) = w(i, j);
                ++rj;
            }
            ++ri;
        }
        out.layers.push_back(std::move(nw));
    }
    return out;
}

std::size_t eliminate_redundant(CrsModel& crs) {
    std::size_t removed = 0;
    for (std::size_t l = 2; l <= crs.layers.size(); ++l) {
        const PackedRows prev(crs.layers[l - 2]);
        BinMatrix& w = crs.layers[l - 1];
        std::vector<std::size_t> connected;
        for (std::size_t i = 0; i < w.rows; ++i) {
            connected.clear();
            for (std::size_t j = 0; j < w.cols; ++j) {
                if (w(i, j)) connected.push_back(j);
            }
            for (std::size_t j : connected) {
                for (std::size_t k : connected) {
                    if (k == j || !prev.subset(k, j)) continue;
                    // equal rows: keep the smaller index only
                    if (prev.subset(j, k) && k > j) continue;
                    w(i, j) = 0;
                    ++removed;
                    break;
                }
            }
        }
    }
    return removed;
}

std::pair<CrsModel, SimplificationReport> simplify(const CrsModel& crs,
                                                   const BinarizedDataset* train,
                                                   const SimplifyOptions& opts) {
    SimplificationReport report;
    report.edges_before = edge_count(crs);
    report.no_path_removed.assign(crs.layers.size() + 1, 0);
    report.never_activated_removed.assign(crs.layers.size() + 1, 0);

    CrsModel cur = crs;
    std::size_t total_nodes = 0;
    for (std::size_t wdt : crs.widths) total_nodes += wdt;
    const std::size_t bound = total_nodes + report.edges_before + 1;

    while (report.iterations < bound) {
        ++report.iterations;
        std::size_t zeroed = 0;
        if (opts.redundancy) {
            zeroed = eliminate_redundant(cur);
            report.redundant_edges_removed += zeroed;
        }
        std::vector<DeadNode> dead;
        if (opts.dead_nodes) {
            dead = structurally_removable(cur);
            if (train && !opts.structural_only) {
                const auto extra = activation_removable(cur, *train, dead);
                dead.insert(dead.end(), extra.begin(), extra.end());
            }
        }
        if (zeroed == 0 && dead.empty()) break;
        if (!dead.empty()) {
            // layer indices stay valid within one removal batch
            for (const auto& d : dead) {
                auto& slot = d.cause == DeadCause::no_path ? report.no_path_removed
                                                           : report.never_activated_removed;
                slot[d.layer]++;
            }
            cur = remove_nodes(cur, dead);
        }
    }
    report.edges_after = edge_count(cur);
    return {std::move(cur), std::move(report)};
}

}  // namespace crslearn
