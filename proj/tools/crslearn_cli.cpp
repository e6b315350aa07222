// Command-line driver: discretize / train / extract / simplify / predict /
// eval / export-rules / experiment.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "crslearn/errors.hpp"
#include "crslearn/experiment.hpp"
#include "crslearn/serialize.hpp"
#include "crslearn/simplify.hpp"
#include "crslearn/trainer.hpp"

namespace {

using namespace crslearn;

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

struct DataArgs {
    std::string data_path;
    std::string label_col;
    std::string schema_path;

    void attach(CLI::App* cmd, bool label_required = true) {
        cmd->add_option("--data", data_path, "input CSV with a header row")->required();
        auto* label = cmd->add_option("--label-col", label_col, "name of the class label column");
        if (label_required) label->required();
        cmd->add_option("--schema", schema_path, "JSON file with per-column kind overrides");
    }

    RawDataset load() const {
        SchemaOverrides overrides;
        if (!schema_path.empty()) overrides = load_schema_file(schema_path);
        return load_csv(data_path, label_col, overrides);
    }
};

struct TrainArgs {
    std::size_t layers = 4;
    std::size_t hidden = 0;
    int epochs = 400;
    int batch = 128;
    double lr = 5e-3;
    double lr_decay = 0.75;
    int lr_decay_every = 100;
    double weight_decay = 1e-8;
    double threshold = 0.5;
    std::string optimizer = "sgd";
    std::uint64_t seed = 0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--layers", layers, "number of logical layers 2L (default 4)");
        cmd->add_option("--hidden", hidden, "middle layer width (default: auto from J)");
        cmd->add_option("--epochs", epochs, "training epochs (default 400)");
        cmd->add_option("--batch", batch, "mini-batch size (default 128)");
        cmd->add_option("--lr", lr, "initial learning rate (default 5e-3)");
        cmd->add_option("--lr-decay", lr_decay, "learning-rate decay factor (default 0.75)");
        cmd->add_option("--lr-decay-every", lr_decay_every, "epochs between decays (default 100)");
        cmd->add_option("--weight-decay", weight_decay, "L2 coefficient (default 1e-8)");
        cmd->add_option("--threshold", threshold, "binarization threshold T (default 0.5)");
        cmd->add_option("--optimizer", optimizer, "sgd (plain gradient descent) or adam");
        cmd->add_option("--seed", seed, "random seed (default 0)");
    }
};

void warn_unseen(const BinarizedDataset& data) {
    for (const auto& [col, count] : data.unseen_category_counts) {
        std::cerr << "warning: column '" << col << "': " << count
                  << " value(s) unseen at fit time; their feature group is all-zero\n";
    }
}

int cmd_discretize(const DataArgs& data_args, const std::string& out_path) {
    const RawDataset data = data_args.load();
    const Discretizer disc = fit_discretizer(data);
    save_json(discretizer_to_json(disc), out_path);
    const auto dict = disc.dictionary();
    std::cout << "fitted " << disc.columns.size() << " columns -> " << dict.size()
              << " binary features, " << dict.label_order.size() << " classes";
    if (!dict.dropped_columns.empty()) {
        std::cout << " (" << dict.dropped_columns.size() << " constant column(s) dropped)";
    }
    std::cout << "\n";
    return 0;
}

int cmd_train(const DataArgs& data_args, const TrainArgs& train_args, const std::string& disc_path,
              double rb_rate, const std::string& out_path, const std::string& log_path,
              bool log_crs) {
    const RawDataset data = data_args.load();
    const Discretizer disc = disc_path.empty() ? fit_discretizer(data)
                                               : discretizer_from_json(load_json(disc_path));
    const BinarizedDataset bdata = binarize(data, disc);
    warn_unseen(bdata);

    TrainConfig cfg;
    const std::size_t hidden = train_args.hidden
                                   ? train_args.hidden
                                   : TrainConfig::default_hidden_width(bdata.binary_feature_count());
    cfg.layer_widths = TrainConfig::make_widths(bdata.binary_feature_count(), bdata.class_count(),
                                                train_args.layers, hidden);
    cfg.epochs = train_args.epochs;
    cfg.batch_size = train_args.batch;
    cfg.lr = train_args.lr;
    cfg.lr_decay_factor = train_args.lr_decay;
    cfg.lr_decay_every = train_args.lr_decay_every;
    cfg.weight_decay = train_args.weight_decay;
    cfg.rb_rate = rb_rate;
    cfg.threshold = train_args.threshold;
    cfg.optimizer = optimizer_from_string(train_args.optimizer);
    cfg.seed = train_args.seed;

    std::ofstream log;
    TrainOptions opts;
    if (!log_path.empty()) {
        log.open(log_path);
        if (!log) throw DataError("cannot write '" + log_path + "'");
        log << "epoch,lr,mean_loss" << (log_crs ? ",crs_train_f1" : "") << "\n";
        opts.log_crs_f1 = log_crs;
        opts.log = [&](const EpochLog& e) {
            log << e.epoch << ',' << e.lr << ',' << e.mean_loss;
            if (log_crs) log << ',' << e.crs_train_f1;
            log << "\n";
        };
    }

    MllpModel model = train(init_model(cfg), bdata, opts);
    model.dictionary = bdata.dictionary;
    save_json(mllp_to_json(model), out_path);
    std::cout << "trained " << model.depth() << "-layer model on " << bdata.n() << " instances (J="
              << bdata.binary_feature_count() << ", C=" << bdata.class_count() << ") -> " << out_path
              << "\n";
    return 0;
}

int cmd_extract(const std::string& model_path, double threshold, const std::string& out_path) {
    const MllpModel model = mllp_from_json(load_json(model_path));
    const CrsModel crs = extract_crs(model, threshold);
    save_json(crs_to_json(crs), out_path);
    std::cout << "extracted rule model with " << edge_count(crs) << " edges -> " << out_path << "\n";
    return 0;
}

std::string simplification_text(const SimplificationReport& rep) {
    std::ostringstream os;
    os << "edges:                   " << rep.edges_before << " -> " << rep.edges_after << "\n";
    os << "redundant edges removed: " << rep.redundant_edges_removed << "\n";
    os << "dead nodes removed:      " << rep.dead_nodes_total() << "\n";
    for (std::size_t l = 0; l < rep.no_path_removed.size(); ++l) {
        if (rep.no_path_removed[l] == 0 && rep.never_activated_removed[l] == 0) continue;
        os << "  layer " << l << ": no-path " << rep.no_path_removed[l] << ", never-activated "
           << rep.never_activated_removed[l] << "\n";
    }
    os << "iterations:              " << rep.iterations << "\n";
    return os.str();
}

std::string simplification_csv(const SimplificationReport& rep) {
    std::ostringstream os;
    os << "layer,no_path_removed,never_activated_removed\n";
    for (std::size_t l = 0; l < rep.no_path_removed.size(); ++l) {
        os << l << ',' << rep.no_path_removed[l] << ',' << rep.never_activated_removed[l] << "\n";
    }
    os << "edges_before," << rep.edges_before << ",\n";
    os << "edges_after," << rep.edges_after << ",\n";
    os << "redundant_edges_removed," << rep.redundant_edges_removed << ",\n";
    os << "iterations," << rep.iterations << ",\n";
    return os.str();
}

int cmd_simplify(const std::string& model_path, const DataArgs& data_args,
                 const std::string& disc_path, bool structural_only, const std::string& out_path,
                 const std::string& report_csv_path) {
    const CrsModel crs = crs_from_json(load_json(model_path));

    BinarizedDataset train_data;
    const BinarizedDataset* train_ptr = nullptr;
    if (!data_args.data_path.empty()) {
        if (disc_path.empty()) {
            throw ConfigError("simplify --data needs --disc to binarize the training data");
        }
        const Discretizer disc = discretizer_from_json(load_json(disc_path));
        train_data = binarize(data_args.load(), disc);
        if (train_data.binary_feature_count() != crs.input_width()) {
            throw DataError("training data binarizes to " +
                            std::to_string(train_data.binary_feature_count()) +
                            " features but the model expects " + std::to_string(crs.input_width()));
        }
        train_ptr = &train_data;
    }

    SimplifyOptions opts;
    opts.structural_only = structural_only;
    const auto [simplified, rep] = simplify(crs, train_ptr, opts);
    if (!out_path.empty()) save_json(crs_to_json(simplified), out_path);
    std::cout << simplification_text(rep);
    if (!report_csv_path.empty()) {
        std::ofstream out(report_csv_path);
        if (!out) throw DataError("cannot write '" + report_csv_path + "'");
        out << simplification_csv(rep);
    }
    return 0;
}

int cmd_predict(const std::string& model_path, const DataArgs& data_args,
                const std::string& disc_path, const std::string& out_path) {
    const CrsModel crs = crs_from_json(load_json(model_path));
    const Discretizer disc = discretizer_from_json(load_json(disc_path));
    const RawDataset data = data_args.load();
    const BinarizedDataset bdata = data_args.label_col.empty() ? binarize_features(data, disc)
                                                               : binarize(data, disc);
    warn_unseen(bdata);

    std::ostream* out = &std::cout;
    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) throw DataError("cannot write '" + out_path + "'");
        out = &file;
    }
    *out << "prediction\n";
    for (std::size_t i = 0; i < bdata.n(); ++i) {
        const std::size_t cls = predict(crs, bdata.features.row(i));
        *out << (cls < crs.dictionary.label_order.size() ? crs.dictionary.label_order[cls]
                                                         : std::to_string(cls))
             << "\n";
    }
    return 0;
}

int cmd_eval(const std::string& model_path, const DataArgs& data_args,
             const std::string& disc_path) {
    const nlohmann::json j = load_json(model_path);
    const Discretizer disc = discretizer_from_json(load_json(disc_path));
    const BinarizedDataset bdata = binarize(data_args.load(), disc);
    warn_unseen(bdata);

    char buf[32];
    if (model_kind(j) == "crs") {
        const CrsModel crs = crs_from_json(j);
        const CrsEvaluation eval = evaluate_crs(crs, bdata);
        std::snprintf(buf, sizeof buf, "%.2f", eval.f1 * 100.0);
        std::cout << "macro-F1: " << buf << " on " << bdata.n() << " instances ("
                  << eval.fallback_count << " fallback prediction(s))\n";
    } else {
        const MllpModel model = mllp_from_json(j);
        std::vector<std::size_t> preds(bdata.n());
        for (std::size_t i = 0; i < bdata.n(); ++i) {
            preds[i] = mllp_predict(model, bdata.features.row(i));
        }
        std::vector<std::size_t> truths(bdata.label_ids.begin(), bdata.label_ids.end());
        std::snprintf(buf, sizeof buf, "%.2f",
                      macro_f1(preds, truths, bdata.class_count()) * 100.0);
        std::cout << "macro-F1 (argmax): " << buf << " on " << bdata.n() << " instances\n";
    }
    return 0;
}

int cmd_export_rules(const std::string& model_path, const std::string& node_spec,
                     const std::string& out_path, const std::string& json_path) {
    const CrsModel crs = crs_from_json(load_json(model_path));

    std::string text;
    nlohmann::json tree;
    if (node_spec.empty()) {
        text = render_all_rules(crs);
        tree = nlohmann::json::array();
        for (std::size_t c = 0; c < crs.class_count(); ++c) {
            tree.push_back(rule_tree_json(crs, {crs.depth(), c}));
        }
    } else {
        const auto colon = node_spec.find(':');
        if (colon == std::string::npos) {
            throw ConfigError("--node expects LAYER:INDEX, e.g. 2:0");
        }
        NodeRef node;
        try {
            node.layer = std::stoul(node_spec.substr(0, colon));
            node.index = std::stoul(node_spec.substr(colon + 1));
        } catch (const std::exception&) {
            throw ConfigError("--node expects LAYER:INDEX, e.g. 2:0");
        }
        text = render_rules(crs, node);
        tree = rule_tree_json(crs, node);
    }

    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw DataError("cannot write '" + out_path + "'");
        out << text;
    }
    if (!json_path.empty()) save_json(tree, json_path);
    return 0;
}

int cmd_experiment(const ExperimentConfig& cfg, const std::string& out_dir) {
    const ExperimentReport report = run_experiment(cfg);
    std::cout << report_text(report);
    if (!out_dir.empty()) {
        write_reports(report, out_dir);
        std::cout << "\nreports written to " << out_dir << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hierarchical rule-set classifiers trained by gradient descent"};
    app.require_subcommand(1);

    // discretize
    DataArgs disc_data;
    std::string disc_out;
    auto* discretize = app.add_subcommand("discretize", "fit entropy-based cuts and category lists");
    disc_data.attach(discretize);
    discretize->add_option("--out", disc_out, "output discretizer JSON")->required();

    // train
    DataArgs train_data;
    TrainArgs train_args;
    std::string train_disc, train_out, train_log;
    double train_rb = 0.8;
    bool train_log_crs = false;
    auto* train_cmd = app.add_subcommand("train", "train a continuous logic network");
    train_data.attach(train_cmd);
    train_args.attach(train_cmd);
    train_cmd->add_option("--disc", train_disc, "discretizer JSON (default: fit on --data)");
    train_cmd->add_option("--rb-rate", train_rb, "random binarization rate P (default 0.8)");
    train_cmd->add_option("--out", train_out, "output model JSON")->required();
    train_cmd->add_option("--log", train_log, "per-epoch CSV training log");
    train_cmd->add_flag("--log-crs", train_log_crs, "log the extracted rules' training macro-F1 per epoch");

    // extract
    std::string extract_model, extract_out;
    double extract_threshold = 0.5;
    auto* extract_cmd = app.add_subcommand("extract", "binarize a trained model into rules");
    extract_cmd->add_option("--model", extract_model, "trained model JSON")->required();
    extract_cmd->add_option("--threshold", extract_threshold, "binarization threshold (default 0.5)");
    extract_cmd->add_option("--out", extract_out, "output rule model JSON")->required();

    // simplify
    DataArgs simplify_data;
    std::string simplify_model, simplify_disc, simplify_out, simplify_csv;
    bool structural_only = false;
    auto* simplify_cmd = app.add_subcommand("simplify", "remove dead nodes and redundant edges");
    simplify_cmd->add_option("--model", simplify_model, "rule model JSON")->required();
    simplify_cmd->add_option("--data", simplify_data.data_path,
                             "training CSV for activation-based dead-node removal");
    simplify_cmd->add_option("--label-col", simplify_data.label_col, "label column of --data");
    simplify_cmd->add_option("--schema", simplify_data.schema_path, "schema overrides for --data");
    simplify_cmd->add_option("--disc", simplify_disc, "discretizer JSON matching the model");
    simplify_cmd->add_flag("--structural-only", structural_only,
                           "skip the training-data dead-node test");
    simplify_cmd->add_option("--out", simplify_out, "output rule model JSON");
    simplify_cmd->add_option("--report-csv", simplify_csv, "write the simplification report as CSV");

    // predict
    DataArgs predict_data;
    std::string predict_model, predict_disc, predict_out;
    auto* predict_cmd = app.add_subcommand("predict", "classify instances with a rule model");
    predict_cmd->add_option("--model", predict_model, "rule model JSON")->required();
    predict_data.attach(predict_cmd, /*label_required=*/false);
    predict_cmd->add_option("--disc", predict_disc, "discretizer JSON")->required();
    predict_cmd->add_option("--out", predict_out, "output CSV (default: stdout)");

    // eval
    DataArgs eval_data;
    std::string eval_model, eval_disc;
    auto* eval_cmd = app.add_subcommand("eval", "macro-F1 of a model on labelled data");
    eval_cmd->add_option("--model", eval_model, "model JSON (rules or continuous)")->required();
    eval_data.attach(eval_cmd);
    eval_cmd->add_option("--disc", eval_disc, "discretizer JSON")->required();

    // export-rules
    std::string export_model, export_node, export_out, export_json;
    auto* export_cmd = app.add_subcommand("export-rules", "render rules as text");
    export_cmd->add_option("--model", export_model, "rule model JSON")->required();
    export_cmd->add_option("--node", export_node, "render one node, as LAYER:INDEX");
    export_cmd->add_option("--out", export_out, "output text file (default: stdout)");
    export_cmd->add_option("--json", export_json, "also write a machine-readable rule tree");

    // experiment
    ExperimentConfig exp_cfg;
    TrainArgs exp_train;
    std::string exp_out;
    double exp_rb_rate = -1.0;
    std::vector<double> exp_grid;
    auto* exp_cmd = app.add_subcommand("experiment", "cross-validated end-to-end run");
    exp_cmd->add_option("--data", exp_cfg.data_path, "input CSV")->required();
    exp_cmd->add_option("--label-col", exp_cfg.label_col, "label column")->required();
    exp_cmd->add_option("--schema", exp_cfg.schema_path, "schema overrides");
    exp_cmd->add_option("--folds", exp_cfg.folds, "cross-validation folds (default 5)");
    exp_train.attach(exp_cmd);
    exp_cmd->add_option("--rb-grid", exp_grid, "binarization rates to grid-search")->delimiter(',');
    exp_cmd->add_option("--rb-rate", exp_rb_rate, "fix one binarization rate (skips the grid)");
    exp_cmd->add_flag("--global-discretize", exp_cfg.global_discretize,
                      "fit the discretizer on the full dataset instead of per fold");
    exp_cmd->add_flag("--structural-only", exp_cfg.structural_only,
                      "restrict dead-node removal to the structural test");
    exp_cmd->add_flag("--ablation", exp_cfg.ablation, "also train and report the P=0 rows");
    exp_cmd->add_option("--jobs", exp_cfg.jobs, "parallel fold jobs (default 1)");
    exp_cmd->add_option("--out", exp_out, "report output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitConfig;
    }

    try {
        if (discretize->parsed()) return cmd_discretize(disc_data, disc_out);
        if (train_cmd->parsed()) {
            return cmd_train(train_data, train_args, train_disc, train_rb, train_out, train_log,
                             train_log_crs);
        }
        if (extract_cmd->parsed()) return cmd_extract(extract_model, extract_threshold, extract_out);
        if (simplify_cmd->parsed()) {
            return cmd_simplify(simplify_model, simplify_data, simplify_disc, structural_only,
                                simplify_out, simplify_csv);
        }
        if (predict_cmd->parsed()) {
            return cmd_predict(predict_model, predict_data, predict_disc, predict_out);
        }
        if (eval_cmd->parsed()) return cmd_eval(eval_model, eval_data, eval_disc);
        if (export_cmd->parsed()) {
            return cmd_export_rules(export_model, export_node, export_out, export_json);
        }
        if (exp_cmd->parsed()) {
            exp_cfg.epochs = exp_train.epochs;
            exp_cfg.batch_size = exp_train.batch;
            exp_cfg.lr = exp_train.lr;
            exp_cfg.lr_decay_factor = exp_train.lr_decay;
            exp_cfg.lr_decay_every = exp_train.lr_decay_every;
            exp_cfg.weight_decay = exp_train.weight_decay;
            exp_cfg.threshold = exp_train.threshold;
            exp_cfg.optimizer = optimizer_from_string(exp_train.optimizer);
            exp_cfg.logical_layers = exp_train.layers;
            exp_cfg.hidden_width = exp_train.hidden;
            exp_cfg.seed = exp_train.seed;
            if (exp_rb_rate >= 0.0) {
                exp_cfg.p_grid = {exp_rb_rate};
            } else if (!exp_grid.empty()) {
                exp_cfg.p_grid = exp_grid;
            }
            return cmd_experiment(exp_cfg, exp_out);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DimensionError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
