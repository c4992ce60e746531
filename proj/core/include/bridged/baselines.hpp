#ifndef BRIDGED_BASELINES_HPP
#define BRIDGED_BASELINES_HPP

#include <cstdint>

#include "bridged/transport.hpp"
#include "bridged/types.hpp"

namespace bridged {

/// Predictions for the rows of split.x_test plus solver bookkeeping.
struct BaselineOutput {
    Matrix predictions;
    std::uint64_t coupling_entries = 0;
    int iterations = 0;
    bool converged = true;
};

/// Mean of the y's of the k nearest paired x's (squared Euclidean, lower
/// pair index first on ties).
Matrix knn_predict(const PairedSet& paired, const PointSet& x_test, int k_neighbors);

/// Affine ridge map x -> y fitted on the paired set (both sides centred,
/// intercept unpenalised).
struct RidgeMap {
    Eigen::RowVectorXd x_mean;
    Eigen::RowVectorXd y_mean;
    Eigen::MatrixXd weights;  // d x d'

    Matrix apply(const Matrix& x) const;
};

RidgeMap fit_ridge(const PairedSet& paired, double alpha);

/// Row-wise coupling-weighted average of `targets`.
Matrix barycentric_projection(const Matrix& coupling, const Matrix& targets);

struct EotConfig {
    /// Regularisation relative to the largest entry of the cost matrix.
    double eps = 0.05;
    double ridge_alpha = 1e-2;
    int max_iter = 2000;
    double tol = 1e-9;
};

/// Entropic OT from the input pool to the output pool under the cost
/// ||ridge(x) - y||², read out by barycentric projection. Paired rows join
/// both pools; inductive queries are appended as extra source rows.
BaselineOutput eot_predict(const DataSplit& split, const EotConfig& config);

struct GwPredictConfig {
    GwConfig gw;
    /// Restart 0 starts from the product coupling, later ones from random
    /// couplings. The restart with the lowest paired-set error wins.
    int restarts = 3;
    double restart_noise = 1.0;
};

/// Entropic GW between the two pools' Euclidean distance matrices (each
/// scaled to max 1), barycentric read-out, paired-set restart selection.
BaselineOutput gw_predict(const DataSplit& split, const GwPredictConfig& config, RngSeed seed);

Matrix euclidean_distances(const Matrix& points);

}  // namespace bridged

#endif  // BRIDGED_BASELINES_HPP
