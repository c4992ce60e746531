#ifndef BRIDGED_PREDICTOR_HPP
#define BRIDGED_PREDICTOR_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "bridged/bridge.hpp"
#include "bridged/clustering.hpp"
#include "bridged/types.hpp"

namespace bridged {

enum class PredictionStatus { ok, unresolved_bridge };

std::string to_string(PredictionStatus status);

/// One test point's prediction. `value` is the target cluster's centroid
/// when status is ok and empty otherwise.
struct Prediction {
    std::string id;
    Eigen::RowVectorXd value;
    int source = 0;
    int target = kUnresolved;
    PredictionStatus status = PredictionStatus::ok;
};

/// y-hat(x) = centroid of output cluster forward[assign(x)].
std::vector<Prediction> predict_forward(const PointSet& x_test, const ClusterModel& x_model,
                                        const ClusterModel& y_model, const Bridge& bridge);

/// x-hat(y) = centroid of input cluster inverse[assign(y)].
std::vector<Prediction> predict_inverse(const PointSet& y_test, const ClusterModel& y_model,
                                        const ClusterModel& x_model, const Bridge& bridge);

enum class Direction { forward, inverse, both };

std::string to_string(Direction direction);
Direction parse_direction(const std::string& text);

struct PipelineConfig {
    int clusters = 3;
    ClusterOptions clustering;
    BridgeMethod bridge_method = BridgeMethod::majority;
    /// Add the paired x's and y's to the pools before clustering.
    bool enlarge_pools = true;
    Direction direction = Direction::forward;
};

struct PhaseTimes {
    double fit_s = 0.0;
    double bridge_s = 0.0;
    double predict_s = 0.0;
};

struct PipelineResult {
    /// The pools that were actually clustered (after optional enlargement);
    /// rows align with the models' assignments.
    PointSet x_fit;
    PointSet y_fit;
    ClusterModel x_model;
    ClusterModel y_model;
    Bridge bridge;
    std::vector<Prediction> forward;
    std::vector<Prediction> inverse;
    PhaseTimes times;
};

/// Cluster both pools, learn the bridge from the paired set, and predict
/// x_test (and/or y_test). Clustering seeds are derived from `seed`.
PipelineResult run_pipeline(const DataSplit& split, const PipelineConfig& config, RngSeed seed);

/// Number of predictions with status unresolved_bridge.
std::size_t unresolved_count(const std::vector<Prediction>& predictions);

/// Columns: id, source_cluster, target_cluster, status, v0..v{dim-1}.
/// Unresolved rows leave the value columns empty.
void write_predictions_csv(std::ostream& out, const std::vector<Prediction>& predictions, int dim);
std::vector<Prediction> read_predictions_csv(std::istream& in);

}  // namespace bridged

#endif  // BRIDGED_PREDICTOR_HPP
