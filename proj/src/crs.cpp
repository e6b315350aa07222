#include "crslearn/crs.hpp"

#include <sstream>

#include "crslearn/errors.hpp"

namespace crslearn {

const char* to_string(LayerKind kind) {
    return kind == LayerKind::conjunction ? "conjunction" : "disjunction";
}

void CrsModel::validate() const {
    if (widths.size() < 3 || widths.size() % 2 == 0) {
        throw ConfigError("rule model needs an odd number (>= 3) of layer widths");
    }
    if (layers.size() != widths.size() - 1) {
        throw ConfigError("rule model layer count does not match widths");
    }
    for (std::size_t l = 0; l < layers.size(); ++l) {
        if (layers[l].rows != widths[l + 1] || layers[l].cols != widths[l]) {
            throw ConfigError("rule model layer " + std::to_string(l + 1) + " has shape " +
                              std::to_string(layers[l].rows) + "x" + std::to_string(layers[l].cols) +
                              ", expected " + std::to_string(widths[l + 1]) + "x" +
                              std::to_string(widths[l]));
        }
    }
    if (fallback_class >= class_count()) {
        throw ConfigError("fallback class out of range");
    }
}

std::vector<LayerRepresentation> crs_forward(const CrsModel& crs, std::span<const std::uint8_t> x) {
    if (x.size() != crs.input_width()) {
        throw DimensionError("crs_forward: input length " + std::to_string(x.size()) + " != " +
                             std::to_string(crs.input_width()));
    }
    std::vector<LayerRepresentation> reps;
    reps.reserve(crs.layers.size() + 1);
    reps.push_back({0, {x.begin(), x.end()}});
    for (std::size_t l = 0; l < crs.layers.size(); ++l) {
        const BinMatrix& w = crs.layers[l];
        const std::vector<std::uint8_t>& prev = reps.back().values;
        const bool conj = CrsModel::kind_of(l + 1) == LayerKind::conjunction;
        LayerRepresentation rep;
        rep.layer = l + 1;
        rep.values.resize(w.rows);
        for (std::size_t i = 0; i < w.rows; ++i) {
            // AND over connected nodes (empty -> 1) / OR (empty -> 0)
            std::uint8_t v = conj ? 1 : 0;
            const std::uint8_t* row = w.data.data() + i * w.cols;
            for (std::size_t j = 0; j < w.cols; ++j) {
                if (!row[j]) continue;
                if (conj) {
                    if (!prev[j]) {
                        v = 0;
                        break;
                    }
                } else {
                    if (prev[j]) {
                        v = 1;
                        break;
                    }
                }
            }
            rep.values[i] = v;
        }
        reps.push_back(std::move(rep));
    }
    return reps;
}

std::vector<std::uint8_t> crs_output(const CrsModel& crs, std::span<const std::uint8_t> x) {
    return crs_forward(crs, x).back().values;
}

std::pair<std::size_t, bool> predict_with_fallback_flag(const CrsModel& crs,
                                                        std::span<const std::uint8_t> x) {
    const std::vector<std::uint8_t> out = crs_output(crs, x);
    for (std::size_t c = 0; c < out.size(); ++c) {
        if (out[c]) return {c, false};
    }
    return {crs.fallback_class, true};
}

std::size_t predict(const CrsModel& crs, std::span<const std::uint8_t> x) {
    return predict_with_fallback_flag(crs, x).first;
}

std::size_t edge_count(const CrsModel& crs) {
    std::size_t n = 0;
    for (const auto& layer : crs.layers) n += layer.count_ones();
    return n;
}

namespace {

std::string node_name(std::size_t layer, std::size_t index) {
    std::ostringstream os;
    os << (CrsModel::kind_of(layer) == LayerKind::conjunction ? 'r' : 's') << '(' << layer << ")_"
       << index;
    return os.str();
}

std::string feature_text(const CrsModel& crs, std::size_t j) {
    if (j < crs.dictionary.entries.size()) return crs.dictionary.entries[j].text();
    return "f" + std::to_string(j);  // no dictionary: raw feature index
}

void render_node(const CrsModel& crs, std::size_t layer, std::size_t index, int indent,
                 const char* prefix, std::ostringstream& os) {
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    const BinMatrix& w = crs.layers[layer - 1];
    const bool conj = CrsModel::kind_of(layer) == LayerKind::conjunction;

    os << pad << prefix << node_name(layer, index) << ":";
    if (layer == 1) {
        // level-1 rule: inline conjunction of dictionary conditions
        bool any = false;
        for (std::size_t j = 0; j < w.cols; ++j) {
            if (!w(index, j)) continue;
            os << (any ? " AND" : " IF") << " (" << feature_text(crs, j) << ")";
            any = true;
        }
        if (!any) os << " TRUE";
        os << "\n";
        return;
    }
    bool any = false;
    for (std::size_t j = 0; j < w.cols; ++j) {
        if (w(index, j)) any = true;
    }
    if (!any) {
        os << (conj ? " TRUE" : " FALSE") << "\n";
        return;
    }
    os << "\n";
    for (std::size_t j = 0; j < w.cols; ++j) {
        if (!w(index, j)) continue;
        render_node(crs, layer - 1, j, indent + 1, conj ? "AND " : "OR ", os);
    }
}

}  // namespace

std::string render_rules(const CrsModel& crs, NodeRef node) {
    if (node.layer < 1 || node.layer > crs.layers.size() ||
        node.index >= crs.layers[node.layer - 1].rows) {
        throw ConfigError("render_rules: unknown node " + std::to_string(node.layer) + ":" +
                          std::to_string(node.index));
    }
    std::ostringstream os;
    render_node(crs, node.layer, node.index, 0, "", os);
    return os.str();
}

std::string render_all_rules(const CrsModel& crs) {
    std::ostringstream os;
    const std::size_t out_layer = crs.layers.size();
    for (std::size_t c = 0; c < crs.class_count(); ++c) {
        const std::string label = c < crs.dictionary.label_order.size()
                                      ? crs.dictionary.label_order[c]
                                      : "class_" + std::to_string(c);
        os << "class " << label << ":\n";
        std::ostringstream body;
        render_node(crs, out_layer, c, 1, "", body);
        os << body.str();
    }
    return os.str();
}

}  // namespace crslearn
