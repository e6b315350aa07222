#include "crslearn/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "crslearn/errors.hpp"
#include "crslearn/serialize.hpp"
#include "crslearn/simplify.hpp"
#include "crslearn/trainer.hpp"

namespace crslearn {

void ExperimentConfig::validate() const {
    if (folds < 2) throw ConfigError("folds must be >= 2");
    if (p_grid.empty()) throw ConfigError("the binarization-rate grid must be non-empty");
    for (double p : p_grid) {
        if (p < 0.0 || p > 1.0) throw ConfigError("grid rates must be in [0, 1]");
    }
    if (!(train_fraction > 0.0) || !(train_fraction < 1.0)) {
        throw ConfigError("train fraction must be in (0, 1)");
    }
    if (jobs < 1) throw ConfigError("jobs must be >= 1");
    if (logical_layers < 2 || logical_layers % 2 != 0) {
        throw ConfigError("the number of logical layers (2L) must be even and >= 2");
    }
    // remaining knobs are validated through TrainConfig
    TrainConfig probe;
    probe.layer_widths = {1, 1, 1};
    probe.epochs = epochs;
    probe.batch_size = batch_size;
    probe.lr = lr;
    probe.lr_decay_factor = lr_decay_factor;
    probe.lr_decay_every = lr_decay_every;
    probe.weight_decay = weight_decay;
    probe.threshold = threshold;
    probe.validate();
}

void ExperimentReport::finalize_means() {
    const double n = static_cast<double>(folds.size());
    mean_crs_f1 = mean_crs_dnrr_f1 = mean_mllp_f1 = 0.0;
    double p0m = 0.0, p0c = 0.0;
    bool have_p0 = !folds.empty();
    total_seconds = 0.0;
    mean_grid.clear();
    if (!folds.empty()) {
        mean_grid.resize(folds.front().grid.size());
        for (std::size_t g = 0; g < mean_grid.size(); ++g) {
            mean_grid[g].p = folds.front().grid[g].p;
        }
    }
    for (const auto& f : folds) {
        mean_crs_f1 += f.crs_f1 / n;
        mean_crs_dnrr_f1 += f.crs_dnrr_f1 / n;
        mean_mllp_f1 += f.mllp_f1 / n;
        if (f.mllp_p0_f1 < 0.0) have_p0 = false;
        p0m += f.mllp_p0_f1 / n;
        p0c += f.crs_p0_f1 / n;
        total_seconds += f.seconds;
        for (std::size_t g = 0; g < mean_grid.size(); ++g) {
            mean_grid[g].validation_f1 += f.grid[g].validation_f1 / n;
        }
    }
    mean_mllp_p0_f1 = have_p0 ? p0m : -1.0;
    mean_crs_p0_f1 = have_p0 ? p0c : -1.0;
}

namespace {

TrainConfig base_train_config(const ExperimentConfig& cfg) {
    TrainConfig tc;
    tc.epochs = cfg.epochs;
    tc.batch_size = cfg.batch_size;
    tc.lr = cfg.lr;
    tc.lr_decay_factor = cfg.lr_decay_factor;
    tc.lr_decay_every = cfg.lr_decay_every;
    tc.weight_decay = cfg.weight_decay;
    tc.threshold = cfg.threshold;
    tc.optimizer = cfg.optimizer;
    return tc;
}

double evaluate_mllp_argmax(const MllpModel& model, const BinarizedDataset& data) {
    std::vector<std::size_t> preds(data.n());
    for (std::size_t i = 0; i < data.n(); ++i) {
        preds[i] = mllp_predict(model, data.features.row(i));
    }
    std::vector<std::size_t> truths(data.label_ids.begin(), data.label_ids.end());
    return macro_f1(preds, truths, data.class_count());
}

FoldResult run_fold(const ExperimentConfig& cfg, const RawDataset& raw, const FoldSplit& split,
                    std::size_t fold_index, const Discretizer* global_disc) {
    const auto t0 = std::chrono::steady_clock::now();
    FoldResult result;
    result.fold = fold_index;
    const std::uint64_t fold_seed = mix_seed(cfg.seed, 1000 + fold_index);

    const RawDataset train_raw = raw.subset(split.train);
    const RawDataset test_raw = raw.subset(split.test);
    const Discretizer disc = global_disc ? *global_disc : fit_discretizer(train_raw);
    const BinarizedDataset btrain = binarize(train_raw, disc);
    const BinarizedDataset btest = binarize(test_raw, disc);
    result.binary_features = btrain.binary_feature_count();

    TrainConfig tc = base_train_config(cfg);
    const std::size_t hidden =
        cfg.hidden_width ? cfg.hidden_width : TrainConfig::default_hidden_width(btrain.binary_feature_count());
    tc.layer_widths = TrainConfig::make_widths(btrain.binary_feature_count(), btrain.class_count(),
                                               cfg.logical_layers, hidden);

    // inner split for rate tuning
    const FoldSplit inner = stratified_split(btrain.label_ids, cfg.train_fraction, fold_seed);
    const BinarizedDataset inner_train = btrain.subset(inner.train);
    const BinarizedDataset inner_val = btrain.subset(inner.test);

    result.grid.reserve(cfg.p_grid.size());
    std::size_t best = 0;
    for (std::size_t g = 0; g < cfg.p_grid.size(); ++g) {
        TrainConfig gtc = tc;
        gtc.rb_rate = cfg.p_grid[g];
        gtc.seed = mix_seed(fold_seed, 2000 + g);
        const MllpModel model = train(init_model(gtc), inner_train);
        const CrsModel crs = extract_crs(model, gtc.threshold);
        const double f1 = evaluate_crs(crs, inner_val).f1;
        result.grid.push_back({cfg.p_grid[g], f1});
        if (f1 > result.grid[best].validation_f1) best = g;
    }
    result.best_p = result.grid[best].p;

    // retrain on the full training fold at the winning rate
    TrainConfig ftc = tc;
    ftc.rb_rate = result.best_p;
    ftc.seed = mix_seed(fold_seed, 3000);
    MllpModel model = train(init_model(ftc), btrain);
    model.dictionary = btrain.dictionary;
    const CrsModel crs = extract_crs(model, ftc.threshold);

    const CrsEvaluation eval = evaluate_crs(crs, btest);
    result.crs_f1 = eval.f1;
    result.fallback_count = eval.fallback_count;
    result.mllp_f1 = evaluate_mllp_argmax(model, btest);

    SimplifyOptions dn_only{.redundancy = false, .dead_nodes = true, .structural_only = cfg.structural_only};
    SimplifyOptions rr_only{.redundancy = true, .dead_nodes = false, .structural_only = cfg.structural_only};
    SimplifyOptions both{.redundancy = true, .dead_nodes = true, .structural_only = cfg.structural_only};
    result.edges_o = edge_count(crs);
    result.edges_dn = simplify(crs, &btrain, dn_only).second.edges_after;
    result.edges_rr = simplify(crs, &btrain, rr_only).second.edges_after;
    const auto [crs_dnrr, rep] = simplify(crs, &btrain, both);
    result.edges_dnrr = rep.edges_after;
    result.crs_dnrr_f1 = evaluate_crs(crs_dnrr, btest).f1;

    if (cfg.ablation) {
        TrainConfig ztc = tc;
        ztc.rb_rate = 0.0;
        ztc.seed = mix_seed(fold_seed, 4000);
        const MllpModel m0 = train(init_model(ztc), btrain);
        result.mllp_p0_f1 = evaluate_mllp_argmax(m0, btest);
        result.crs_p0_f1 = evaluate_crs(extract_crs(m0, ztc.threshold), btest).f1;
    }

    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg, const RawDataset& data) {
    cfg.validate();
    ExperimentReport report;
    report.config = cfg;
    report.instances = data.n;

    {
        const Discretizer full = fit_discretizer(data);
        report.label_order = full.label_order;
        report.classes = full.label_order.size();
    }

    std::vector<std::uint32_t> label_ids(data.n);
    {
        std::map<std::string, std::uint32_t> ids;
        for (std::size_t c = 0; c < report.label_order.size(); ++c) {
            ids[report.label_order[c]] = static_cast<std::uint32_t>(c);
        }
        const auto& text = data.label_column().text;
        for (std::size_t i = 0; i < data.n; ++i) label_ids[i] = ids.at(text[i]);
    }

    const KFoldResult kfold = stratified_kfold(label_ids, cfg.folds, cfg.seed);
    report.stratified = kfold.stratified;

    std::optional<Discretizer> global_disc;
    if (cfg.global_discretize) global_disc = fit_discretizer(data);

    report.folds.resize(cfg.folds);
    const int jobs = std::min<int>(cfg.jobs, static_cast<int>(cfg.folds));
    if (jobs <= 1) {
        for (std::size_t f = 0; f < cfg.folds; ++f) {
            report.folds[f] =
                run_fold(cfg, data, kfold.folds[f], f, global_disc ? &*global_disc : nullptr);
        }
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(jobs);
        for (int t = 0; t < jobs; ++t) {
            pool.emplace_back([&, t] {
                try {
                    for (std::size_t f = static_cast<std::size_t>(t); f < cfg.folds;
                         f += static_cast<std::size_t>(jobs)) {
                        report.folds[f] = run_fold(cfg, data, kfold.folds[f], f,
                                                   global_disc ? &*global_disc : nullptr);
                    }
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    }

    report.finalize_means();
    return report;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    SchemaOverrides overrides;
    if (!cfg.schema_path.empty()) overrides = load_schema_file(cfg.schema_path);
    const RawDataset data = load_csv(cfg.data_path, cfg.label_col, overrides);
    return run_experiment(cfg, data);
}

namespace {

std::string pct(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v * 100.0);
    return buf;
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

}  // namespace

std::string report_text(const ExperimentReport& r) {
    std::ostringstream os;
    os << "experiment: " << r.config.data_path << "\n";
    os << "label: " << r.config.label_col << "   instances: " << r.instances << "   classes: "
       << r.classes << "   folds: " << r.config.folds
       << (r.stratified ? " (stratified)" : " (plain, small classes)") << "   seed: " << r.config.seed
       << "\n";
    os << "layers: 2L=" << r.config.logical_layers << "   hidden: "
       << (r.config.hidden_width ? std::to_string(r.config.hidden_width) : std::string("auto"))
       << "   epochs: " << r.config.epochs << "   batch: " << r.config.batch_size << "   lr: "
       << num(r.config.lr) << " (x" << num(r.config.lr_decay_factor) << " every "
       << r.config.lr_decay_every << ")\n";
    os << "weight decay: " << num(r.config.weight_decay) << "   threshold: " << num(r.config.threshold)
       << "   optimizer: " << to_string(r.config.optimizer) << "   discretization: "
       << (r.config.global_discretize ? "global" : "per-fold") << "\n\n";

    const bool p0 = r.mean_mllp_p0_f1 >= 0.0;
    os << "fold     J  best_P   crs_f1  dnrr_f1  mllp_f1";
    if (p0) os << "  mllp_p0   crs_p0";
    os << "  edges_o  edges_dn  edges_rr  edges_dnrr  fallback\n";
    char line[256];
    for (const auto& f : r.folds) {
        std::snprintf(line, sizeof line, "%4zu  %4zu  %6.2f  %7s  %7s  %7s", f.fold,
                      f.binary_features, f.best_p, pct(f.crs_f1).c_str(), pct(f.crs_dnrr_f1).c_str(),
                      pct(f.mllp_f1).c_str());
        os << line;
        if (p0) {
            std::snprintf(line, sizeof line, "  %7s  %7s", pct(f.mllp_p0_f1).c_str(),
                          pct(f.crs_p0_f1).c_str());
            os << line;
        }
        std::snprintf(line, sizeof line, "  %7zu  %8zu  %8zu  %10zu  %8zu\n", f.edges_o, f.edges_dn,
                      f.edges_rr, f.edges_dnrr, f.fallback_count);
        os << line;
    }
    os << "\nmean crs_f1: " << pct(r.mean_crs_f1) << "   mean dnrr_f1: " << pct(r.mean_crs_dnrr_f1)
       << "   mean mllp_f1: " << pct(r.mean_mllp_f1);
    if (p0) {
        os << "   mean mllp_p0: " << pct(r.mean_mllp_p0_f1) << "   mean crs_p0: "
           << pct(r.mean_crs_p0_f1);
    }
    os << "\n";
    os << "grid mean validation f1:";
    for (const auto& g : r.mean_grid) {
        os << "  P=" << num(g.p) << ": " << pct(g.validation_f1);
    }
    os << "\n";
    return os.str();
}

std::string report_csv(const ExperimentReport& r) {
    std::ostringstream os;
    os << "fold,binary_features,best_p,crs_f1,crs_dnrr_f1,mllp_f1,mllp_p0_f1,crs_p0_f1,"
          "edges_o,edges_dn,edges_rr,edges_dnrr,fallback_count";
    for (const auto& g : r.mean_grid) os << ",val_f1_p" << num(g.p);
    os << "\n";
    auto row = [&](const std::string& name, double bp, double crs, double dnrr, double mllp,
                   double p0m, double p0c, const FoldResult* f) {
        os << name << ',' << (f ? std::to_string(f->binary_features) : "") << ',' << num(bp) << ','
           << pct(crs) << ',' << pct(dnrr) << ',' << pct(mllp) << ','
           << (p0m >= 0 ? pct(p0m) : "") << ',' << (p0c >= 0 ? pct(p0c) : "");
        if (f) {
            os << ',' << f->edges_o << ',' << f->edges_dn << ',' << f->edges_rr << ',' << f->edges_dnrr
               << ',' << f->fallback_count;
            for (const auto& g : f->grid) os << ',' << pct(g.validation_f1);
        } else {
            os << ",,,,,";
            for (const auto& g : r.mean_grid) os << ',' << pct(g.validation_f1);
        }
        os << "\n";
    };
    for (const auto& f : r.folds) {
        row(std::to_string(f.fold), f.best_p, f.crs_f1, f.crs_dnrr_f1, f.mllp_f1, f.mllp_p0_f1,
            f.crs_p0_f1, &f);
    }
    row("mean", 0.0, r.mean_crs_f1, r.mean_crs_dnrr_f1, r.mean_mllp_f1, r.mean_mllp_p0_f1,
        r.mean_crs_p0_f1, nullptr);
    return os.str();
}

nlohmann::json report_json(const ExperimentReport& r) {
    nlohmann::json folds = nlohmann::json::array();
    for (const auto& f : r.folds) {
        nlohmann::json grid = nlohmann::json::array();
        for (const auto& g : f.grid) grid.push_back({{"p", g.p}, {"validation_f1", g.validation_f1}});
        nlohmann::json jf{{"fold", f.fold},
                          {"binary_features", f.binary_features},
                          {"best_p", f.best_p},
                          {"grid", std::move(grid)},
                          {"crs_f1", f.crs_f1},
                          {"crs_dnrr_f1", f.crs_dnrr_f1},
                          {"mllp_f1", f.mllp_f1},
                          {"edges_o", f.edges_o},
                          {"edges_dn", f.edges_dn},
                          {"edges_rr", f.edges_rr},
                          {"edges_dnrr", f.edges_dnrr},
                          {"fallback_count", f.fallback_count}};
        if (f.mllp_p0_f1 >= 0.0) {
            jf["mllp_p0_f1"] = f.mllp_p0_f1;
            jf["crs_p0_f1"] = f.crs_p0_f1;
        }
        folds.push_back(std::move(jf));
    }
    nlohmann::json mean_grid = nlohmann::json::array();
    for (const auto& g : r.mean_grid) {
        mean_grid.push_back({{"p", g.p}, {"validation_f1", g.validation_f1}});
    }
    nlohmann::json j{{"format", "crslearn.report"},
                     {"version", 1},
                     {"dataset", r.config.data_path},
                     {"label", r.config.label_col},
                     {"instances", r.instances},
                     {"classes", r.classes},
                     {"label_order", r.label_order},
                     {"folds_requested", r.config.folds},
                     {"stratified", r.stratified},
                     {"seed", r.config.seed},
                     {"global_discretize", r.config.global_discretize},
                     {"structural_only", r.config.structural_only},
                     {"logical_layers", r.config.logical_layers},
                     {"hidden_width", r.config.hidden_width},
                     {"epochs", r.config.epochs},
                     {"batch_size", r.config.batch_size},
                     {"lr", r.config.lr},
                     {"lr_decay_factor", r.config.lr_decay_factor},
                     {"lr_decay_every", r.config.lr_decay_every},
                     {"weight_decay", r.config.weight_decay},
                     {"threshold", r.config.threshold},
                     {"optimizer", to_string(r.config.optimizer)},
                     {"p_grid", r.config.p_grid},
                     {"folds", std::move(folds)},
                     {"mean_crs_f1", r.mean_crs_f1},
                     {"mean_crs_dnrr_f1", r.mean_crs_dnrr_f1},
                     {"mean_mllp_f1", r.mean_mllp_f1},
                     {"mean_grid", std::move(mean_grid)}};
    if (r.mean_mllp_p0_f1 >= 0.0) {
        j["mean_mllp_p0_f1"] = r.mean_mllp_p0_f1;
        j["mean_crs_p0_f1"] = r.mean_crs_p0_f1;
    }
    return j;
}

std::string timings_csv(const ExperimentReport& r) {
    std::ostringstream os;
    os << "fold,seconds\n";
    for (const auto& f : r.folds) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3f", f.seconds);
        os << f.fold << ',' << buf << "\n";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", r.total_seconds);
    os << "total," << buf << "\n";
    return os.str();
}

void write_reports(const ExperimentReport& report, const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DataError("cannot create output directory '" + dir + "': " + ec.message());
    auto write = [&](const std::string& name, const std::string& content) {
        const std::string path = (fs::path(dir) / name).string();
        std::ofstream out(path, std::ios::binary);
        if (!out) throw DataError("cannot write '" + path + "'");
        out << content;
    };
    write("report.txt", report_text(report));
    write("report.csv", report_csv(report));
    write("report.json", report_json(report).dump(2) + "\n");
    write("timings.csv", timings_csv(report));
}

}  // namespace crslearn
