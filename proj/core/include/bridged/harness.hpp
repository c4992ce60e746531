#ifndef BRIDGED_HARNESS_HPP
#define BRIDGED_HARNESS_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bridged/baselines.hpp"
#include "bridged/bridge.hpp"
#include "bridged/clustering.hpp"
#include "bridged/metrics.hpp"
#include "bridged/predictor.hpp"
#include "bridged/split.hpp"

namespace bridged {

enum class ModelKind { bc, knn, eot, gw };
std::string to_string(ModelKind model);
ModelKind parse_model_kind(const std::string& text);

struct SyntheticSource {
    int x_dim = 8;
    int y_dim = 8;
    double delta_over_sigma = 10.0;
    double sigma = 1.0;
    std::size_t samples = 1000;
};

struct FileSource {
    std::filesystem::path x;
    std::filesystem::path y;
};

struct ExperimentConfig {
    /// Exactly one of the two is set.
    std::optional<SyntheticSource> synthetic;
    std::optional<FileSource> files;

    std::vector<int> clusters{3, 4, 5, 6, 7};
    std::vector<int> pairs_per_cluster{1, 2, 3, 4};
    int seeds = 30;
    std::uint64_t master_seed = 0;
    SplitMode mode = SplitMode::transductive;
    Direction direction = Direction::forward;
    std::vector<ModelKind> models{ModelKind::bc, ModelKind::knn, ModelKind::eot, ModelKind::gw};

    PoolPolicy pools = PoolPolicy::disjoint;
    double minor_pool_fraction = 0.1;
    double holdout_fraction = 0.2;

    ClusterOptions clustering;
    BridgeMethod bridge_method = BridgeMethod::majority;
    bool enlarge_pools = true;
    int knn_k = 1;
    EotConfig eot;
    /// Sweep default: looser than the solver defaults so that a full grid
    /// of GW trials fits a desk-scale time budget.
    GwPredictConfig gw = [] {
        GwPredictConfig g;
        g.gw.eps = 2e-2;
        g.gw.max_iter = 10;
        g.gw.inner_max_iter = 200;
        return g;
    }();

    int threads = 1;
    std::filesystem::path output_dir = "results";

    /// Throws ArgumentError on empty grids, seeds < 1 or a missing source.
    void validate() const;
};

/// Parses the JSON config. Relative data paths resolve against `base_dir`.
ExperimentConfig parse_experiment_config(const std::string& text,
                                         const std::filesystem::path& base_dir = {});

struct Setting {
    int clusters = 0;
    int pairs_per_cluster = 0;
    int seed_index = 0;
    std::uint64_t trial_seed = 0;
    SplitMode mode = SplitMode::transductive;
    Direction direction = Direction::forward;
};

struct ModelRecord {
    ModelKind model = ModelKind::bc;
    MetricsReport metrics;
    PhaseTimes times;
    std::uint64_t distance_evals = 0;
    std::uint64_t coupling_entries = 0;
    /// Empty on success; the failure message otherwise (metrics are NaN).
    std::string error;
};

struct TrialRecord {
    Setting setting;
    std::vector<ModelRecord> models;
};

/// Runs one trial: data, one split per direction, every configured model.
/// Model failures are recorded, not thrown.
std::vector<TrialRecord> run_trial(const ExperimentConfig& config, int clusters,
                                   int pairs_per_cluster, int seed_index, std::uint64_t trial_seed);

/// Runs the whole grid. Records come back sorted by (direction, C, pairs,
/// seed) whatever the thread count.
std::vector<TrialRecord> run_trials(const ExperimentConfig& config);

/// Writes trials.csv, timings.csv, aggregate.json and winrates.csv to `dir`.
void write_results(const std::vector<TrialRecord>& records, const ExperimentConfig& config,
                   const std::filesystem::path& dir);

/// run_trials + write_results into config.output_dir.
std::vector<TrialRecord> run_experiment(const ExperimentConfig& config);

/// Win-rate per model, one row per (direction, C, pairs) setting plus an
/// "overall" row per direction.
struct WinrateRow {
    std::string direction;
    std::string setting;  // "C=3,pairs=1" or "overall"
    std::map<std::string, double> rates;
};
std::vector<WinrateRow> winrate_table(const std::vector<TrialRecord>& records);

struct ScalingConfig {
    std::vector<std::size_t> sizes{500, 1000, 2000, 4000};
    int clusters = 5;
    int x_dim = 8;
    int y_dim = 8;
    double delta_over_sigma = 10.0;
    std::vector<ModelKind> models{ModelKind::bc, ModelKind::eot};
    int repeats = 3;
    std::uint64_t master_seed = 0;
    /// Fixed caps keep the work per iteration the only size-dependent cost.
    int bc_max_iter = 20;
    int transport_max_iter = 20;
    double timeout_s = 120.0;
};

struct ScalingCell {
    ModelKind model = ModelKind::bc;
    std::size_t n = 0;
    /// Median wall-clock over repeats; NaN when skipped.
    double seconds = 0.0;
    /// BC: stored pool and centroid values; EOT/GW: coupling entries.
    double memory_units = 0.0;
    bool timed_out = false;
};

struct ScalingReport {
    std::vector<ScalingCell> cells;
    std::map<std::string, double> time_slope;
    std::map<std::string, double> memory_slope;
};

ScalingReport run_scaling_bench(const ScalingConfig& config);
ScalingConfig parse_scaling_config(const std::string& text);
std::string to_json(const ScalingReport& report);

/// Least-squares slope of log(y) on log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace bridged

#endif  // BRIDGED_HARNESS_HPP
