#include "crslearn/serialize.hpp"

#include <cmath>
#include <fstream>

#include "crslearn/errors.hpp"

namespace crslearn {

using nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;

void require_format(const json& j, const char* format) {
    if (!j.is_object() || j.value("format", "") != format) {
        throw DataError(std::string("expected a '") + format + "' document");
    }
    if (j.value("version", 0) != kFormatVersion) {
        throw DataError(std::string("unsupported ") + format + " version");
    }
}

json dict_to_json(const FeatureDictionary& dict) {
    json entries = json::array();
    for (std::size_t i = 0; i < dict.entries.size(); ++i) {
        const DictEntry& e = dict.entries[i];
        json je{{"index", i}, {"column", e.column}, {"text", e.text()}};
        if (e.kind == DictEntry::Kind::interval) {
            je["kind"] = "interval";
            je["low"] = std::isfinite(e.low) ? json(e.low) : json();
            je["high"] = std::isfinite(e.high) ? json(e.high) : json();
        } else {
            je["kind"] = "equality";
            je["category"] = e.category;
        }
        entries.push_back(std::move(je));
    }
    json groups = json::array();
    for (const auto& [b, e] : dict.groups) groups.push_back({b, e});
    return json{{"entries", std::move(entries)},
                {"label_order", dict.label_order},
                {"dropped_columns", dict.dropped_columns},
                {"groups", std::move(groups)}};
}

FeatureDictionary dict_from_json(const json& j) {
    FeatureDictionary dict;
    dict.label_order = j.at("label_order").get<std::vector<std::string>>();
    dict.dropped_columns = j.value("dropped_columns", std::vector<std::string>{});
    for (const auto& je : j.at("entries")) {
        DictEntry e;
        e.column = je.at("column").get<std::string>();
        if (je.at("kind").get<std::string>() == "interval") {
            e.kind = DictEntry::Kind::interval;
            if (!je.at("low").is_null()) e.low = je.at("low").get<double>();
            if (!je.at("high").is_null()) e.high = je.at("high").get<double>();
        } else {
            e.kind = DictEntry::Kind::equality;
            e.category = je.at("category").get<std::string>();
        }
        dict.entries.push_back(std::move(e));
    }
    for (const auto& jg : j.value("groups", json::array())) {
        dict.groups.emplace_back(jg.at(0).get<std::size_t>(), jg.at(1).get<std::size_t>());
    }
    return dict;
}

json config_to_json(const TrainConfig& cfg) {
    return json{{"layer_widths", cfg.layer_widths},
                {"epochs", cfg.epochs},
                {"batch_size", cfg.batch_size},
                {"lr", cfg.lr},
                {"lr_decay_factor", cfg.lr_decay_factor},
                {"lr_decay_every", cfg.lr_decay_every},
                {"weight_decay", cfg.weight_decay},
                {"rb_rate", cfg.rb_rate},
                {"threshold", cfg.threshold},
                {"optimizer", to_string(cfg.optimizer)},
                {"seed", cfg.seed}};
}

TrainConfig config_from_json(const json& j) {
    TrainConfig cfg;
    cfg.layer_widths = j.at("layer_widths").get<std::vector<std::size_t>>();
    cfg.epochs = j.at("epochs").get<int>();
    cfg.batch_size = j.at("batch_size").get<int>();
    cfg.lr = j.at("lr").get<double>();
    cfg.lr_decay_factor = j.at("lr_decay_factor").get<double>();
    cfg.lr_decay_every = j.at("lr_decay_every").get<int>();
    cfg.weight_decay = j.at("weight_decay").get<double>();
    cfg.rb_rate = j.at("rb_rate").get<double>();
    cfg.threshold = j.at("threshold").get<double>();
    cfg.optimizer = optimizer_from_string(j.value("optimizer", "sgd"));
    cfg.seed = j.at("seed").get<std::uint64_t>();
    return cfg;
}

const char* kind_name(LayerKind k) { return k == LayerKind::conjunction ? "conjunction" : "disjunction"; }

}  // namespace

json discretizer_to_json(const Discretizer& disc) {
    json cols = json::array();
    for (const auto& c : disc.columns) {
        json jc{{"name", c.name}, {"kind", to_string(c.kind)}, {"dropped", c.dropped}};
        if (c.kind == ColumnKind::continuous) {
            jc["cuts"] = c.cuts;
        } else {
            jc["categories"] = c.categories;
        }
        cols.push_back(std::move(jc));
    }
    return json{{"format", "crslearn.discretizer"},
                {"version", kFormatVersion},
                {"label_order", disc.label_order},
                {"columns", std::move(cols)},
                {"dictionary", dict_to_json(disc.dictionary())}};
}

Discretizer discretizer_from_json(const json& j) {
    require_format(j, "crslearn.discretizer");
    Discretizer disc;
    disc.label_order = j.at("label_order").get<std::vector<std::string>>();
    for (const auto& jc : j.at("columns")) {
        Discretizer::Column c;
        c.name = jc.at("name").get<std::string>();
        c.kind = column_kind_from_string(jc.at("kind").get<std::string>());
        c.dropped = jc.at("dropped").get<bool>();
        if (c.kind == ColumnKind::continuous) {
            c.cuts = jc.at("cuts").get<std::vector<double>>();
        } else {
            c.categories = jc.at("categories").get<std::vector<std::string>>();
        }
        disc.columns.push_back(std::move(c));
    }
    return disc;
}

json mllp_to_json(const MllpModel& model) {
    json layers = json::array();
    for (const auto& layer : model.layers) {
        layers.push_back(json{{"kind", kind_name(layer.kind)},
                              {"rows", layer.w.rows},
                              {"cols", layer.w.cols},
                              {"weights", layer.w.data}});
    }
    return json{{"format", "crslearn.model"},
                {"version", kFormatVersion},
                {"kind", "mllp"},
                {"widths", model.widths},
                {"layers", std::move(layers)},
                {"config", config_to_json(model.config)},
                {"seed", model.config.seed},
                {"majority_class", model.majority_class},
                {"dictionary", dict_to_json(model.dictionary)}};
}

MllpModel mllp_from_json(const json& j) {
    require_format(j, "crslearn.model");
    if (j.value("kind", "") != "mllp") throw DataError("model file does not hold a continuous model");
    MllpModel model;
    model.widths = j.at("widths").get<std::vector<std::size_t>>();
    model.config = config_from_json(j.at("config"));
    model.majority_class = j.at("majority_class").get<std::size_t>();
    model.dictionary = dict_from_json(j.at("dictionary"));
    for (const auto& jl : j.at("layers")) {
        WeightLayer layer;
        layer.kind = jl.at("kind").get<std::string>() == "conjunction" ? LayerKind::conjunction
                                                                       : LayerKind::disjunction;
        layer.w.rows = jl.at("rows").get<std::size_t>();
        layer.w.cols = jl.at("cols").get<std::size_t>();
        layer.w.data = jl.at("weights").get<std::vector<double>>();
        if (layer.w.data.size() != layer.w.rows * layer.w.cols) {
            throw DataError("model layer weight array has the wrong length");
        }
        model.layers.push_back(std::move(layer));
    }
    return model;
}

json crs_to_json(const CrsModel& crs) {
    json layers = json::array();
    for (std::size_t l = 0; l < crs.layers.size(); ++l) {
        std::vector<int> bits(crs.layers[l].data.begin(), crs.layers[l].data.end());
        layers.push_back(json{{"kind", kind_name(CrsModel::kind_of(l + 1))},
                              {"rows", crs.layers[l].rows},
                              {"cols", crs.layers[l].cols},
                              {"weights", std::move(bits)}});
    }
    return json{{"format", "crslearn.model"},
                {"version", kFormatVersion},
                {"kind", "crs"},
                {"widths", crs.widths},
                {"layers", std::move(layers)},
                {"fallback_class", crs.fallback_class},
                {"dictionary", dict_to_json(crs.dictionary)}};
}

CrsModel crs_from_json(const json& j) {
    require_format(j, "crslearn.model");
    if (j.value("kind", "") != "crs") throw DataError("model file does not hold a rule model");
    CrsModel crs;
    crs.widths = j.at("widths").get<std::vector<std::size_t>>();
    crs.fallback_class = j.at("fallback_class").get<std::size_t>();
    crs.dictionary = dict_from_json(j.at("dictionary"));
    for (const auto& jl : j.at("layers")) {
        BinMatrix m;
        m.rows = jl.at("rows").get<std::size_t>();
        m.cols = jl.at("cols").get<std::size_t>();
        for (const auto& v : jl.at("weights")) {
            const int b = v.get<int>();
            if (b != 0 && b != 1) throw DataError("rule model weights must be 0 or 1");
            m.data.push_back(static_cast<std::uint8_t>(b));
        }
        if (m.data.size() != m.rows * m.cols) {
            throw DataError("model layer weight array has the wrong length");
        }
        crs.layers.push_back(std::move(m));
    }
    crs.validate();
    return crs;
}

namespace {

json rule_tree_node(const CrsModel& crs, std::size_t layer, std::size_t index) {
    const bool conj = CrsModel::kind_of(layer) == LayerKind::conjunction;
    json node{{"layer", layer},
              {"index", index},
              {"op", conj ? "and" : "or"}};
    const BinMatrix& w = crs.layers[layer - 1];
    json children = json::array();
    for (std::size_t j = 0; j < w.cols; ++j) {
        if (!w(index, j)) continue;
        if (layer == 1) {
            json leaf{{"feature", j}};
            if (j < crs.dictionary.entries.size()) leaf["condition"] = crs.dictionary.entries[j].text();
            children.push_back(std::move(leaf));
        } else {
            children.push_back(rule_tree_node(crs, layer - 1, j));
        }
    }
    node["children"] = std::move(children);
    return node;
}

}  // namespace

json rule_tree_json(const CrsModel& crs, NodeRef node) {
    if (node.layer < 1 || node.layer > crs.layers.size() ||
        node.index >= crs.layers[node.layer - 1].rows) {
        throw ConfigError("rule_tree_json: unknown node");
    }
    return rule_tree_node(crs, node.layer, node.index);
}

void save_json(const json& j, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << j.dump(2) << "\n";
    if (!out) throw DataError("failed writing '" + path + "'");
}

json load_json(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    try {
        json j;
        in >> j;
        return j;
    } catch (const json::exception& e) {
        throw DataError(path + ": " + e.what());
    }
}

std::string model_kind(const json& j) {
    require_format(j, "crslearn.model");
    return j.value("kind", "");
}

}  // namespace crslearn
