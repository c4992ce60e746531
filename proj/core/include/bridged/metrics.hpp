#ifndef BRIDGED_METRICS_HPP
#define BRIDGED_METRICS_HPP

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bridged/clustering.hpp"
#include "bridged/types.hpp"

namespace bridged {

/// Evaluation summary for one model on one trial. Cluster-level fields are
/// empty for models that do not cluster.
struct MetricsReport {
    double mse = 0.0;
    std::optional<double> retrieval_mse;
    std::optional<double> ami_x;
    std::optional<double> ami_y;
    std::optional<double> eps_x;
    std::optional<double> eps_y;
    std::optional<double> eps_b;
    std::optional<double> d_y_mean;
    std::size_t unresolved_count = 0;
};

/// Mean over points of the per-dimension mean squared difference.
double mse(const Matrix& pred, const Matrix& truth);

/// Squared error after snapping every prediction to its nearest pool vector.
double retrieval_mse(const Matrix& pred, const Matrix& pool, const Matrix& truth);

/// Multi-reference variant: point i scores against the closest of
/// references[i]'s rows.
double retrieval_mse(const Matrix& pred, const Matrix& pool, std::span<const Matrix> references);

/// Adjusted mutual information with max-normalisation and the
/// hypergeometric (permutation-model) expected MI. Natural logarithms.
double ami(const Labels& labels_a, const Labels& labels_b);

struct Misclustering {
    double rate = 0.0;
    /// permutation[cluster] = latent label it is matched to.
    std::vector<int> permutation;
};

/// Disagreement after the agreement-maximising relabelling of clusters.
Misclustering misclustering_rate(const Labels& assignments, const Labels& latents, int clusters);

/// Mean Euclidean distance from each point to its nearest centroid.
double d_y_mean(const PointSet& y_points, const ClusterModel& y_model);

/// Per-point squared distance to the nearest centroid, divided by d'.
/// This is the error a perfectly clustered, perfectly bridged centroid
/// prediction makes on each point.
std::vector<double> centroid_distance_terms(const Matrix& y_points, const ClusterModel& y_model);

/// Share of trials in which each model has the lowest MSE; exact ties are
/// split. Non-finite MSEs never win unless every model is non-finite.
std::map<std::string, double> winrate(const std::map<std::string, std::vector<double>>& per_trial_mse);

}  // namespace bridged

#endif  // BRIDGED_METRICS_HPP
