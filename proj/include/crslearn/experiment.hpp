#ifndef CRSLEARN_EXPERIMENT_HPP
#define CRSLEARN_EXPERIMENT_HPP

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "crslearn/dataset.hpp"
#include "crslearn/metrics.hpp"
#include "crslearn/model.hpp"

namespace crslearn {

/// End-to-end cross-validation run: per fold, fit the discretizer on the
/// training fold (or globally), grid-search the binarization rate on an
/// inner train/validation split, retrain at the winner, extract, simplify,
/// and score on the held-out fold.
struct ExperimentConfig {
    std::string data_path;
    std::string label_col;
    std::string schema_path;             // optional
    std::size_t folds = 5;
    double train_fraction = 0.8;         // inner split; validation gets the rest
    std::vector<double> p_grid = {0.0, 0.5, 0.7, 0.8, 0.9, 0.95};

    int epochs = 400;
    int batch_size = 128;
    double lr = 5e-3;
    double lr_decay_factor = 0.75;
    int lr_decay_every = 100;
    double weight_decay = 1e-8;
    double threshold = 0.5;
    Optimizer optimizer = Optimizer::sgd;
    std::size_t logical_layers = 4;      // 2L
    std::size_t hidden_width = 0;        // 0 = heuristic from J

    bool global_discretize = false;
    bool structural_only = false;
    bool ablation = false;               // also train/report P=0 rows
    int jobs = 1;                        // folds run as independent jobs
    std::uint64_t seed = 0;

    void validate() const;
};

struct GridPoint {
    double p = 0.0;
    double validation_f1 = 0.0;          // [0,1]
};

struct FoldResult {
    std::size_t fold = 0;
    std::size_t binary_features = 0;
    double best_p = 0.0;
    std::vector<GridPoint> grid;
    double crs_f1 = 0.0;                 // extracted rules on the held-out fold
    double crs_dnrr_f1 = 0.0;            // after both simplification passes
    double mllp_f1 = 0.0;                // argmax-decoded continuous model
    double mllp_p0_f1 = -1.0;            // ablation rows; -1 when not run
    double crs_p0_f1 = -1.0;
    std::size_t edges_o = 0;
    std::size_t edges_dn = 0;
    std::size_t edges_rr = 0;
    std::size_t edges_dnrr = 0;
    std::size_t fallback_count = 0;
    double seconds = 0.0;                // wall clock; kept out of report files
};

struct ExperimentReport {
    ExperimentConfig config;
    std::size_t instances = 0;
    std::size_t classes = 0;
    std::vector<std::string> label_order;  // over the full dataset
    bool stratified = true;
    std::vector<FoldResult> folds;

    // arithmetic means over folds, all in [0,1]
    double mean_crs_f1 = 0.0;
    double mean_crs_dnrr_f1 = 0.0;
    double mean_mllp_f1 = 0.0;
    double mean_mllp_p0_f1 = -1.0;
    double mean_crs_p0_f1 = -1.0;
    std::vector<GridPoint> mean_grid;      // mean validation f1 per grid P
    double total_seconds = 0.0;

    void finalize_means();
};

ExperimentReport run_experiment(const ExperimentConfig& cfg);

/// Same, on an already-loaded dataset (tests, reuse).
ExperimentReport run_experiment(const ExperimentConfig& cfg, const RawDataset& data);

std::string report_text(const ExperimentReport& report);
std::string report_csv(const ExperimentReport& report);
/// Deterministic document: identical seeded runs serialize byte-identically
/// (wall-clock lives in the separate timings sidecar).
nlohmann::json report_json(const ExperimentReport& report);
std::string timings_csv(const ExperimentReport& report);

/// Writes report.txt / report.csv / report.json / timings.csv into dir,
/// creating it if needed.
void write_reports(const ExperimentReport& report, const std::string& dir);

}  // namespace crslearn

#endif
