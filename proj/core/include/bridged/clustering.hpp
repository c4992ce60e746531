#ifndef BRIDGED_CLUSTERING_HPP
#define BRIDGED_CLUSTERING_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "bridged/types.hpp"

namespace bridged {

enum class ClusterAlgo { lloyd, balanced, minibatch };

std::string to_string(ClusterAlgo algo);
ClusterAlgo parse_cluster_algo(const std::string& text);

/// C centroids plus nearest-centroid assignment of the fitted points.
struct ClusterModel {
    Matrix centroids;
    Labels assignments;
    double inertia = 0.0;
    ClusterAlgo algo = ClusterAlgo::lloyd;
    int iterations = 0;
    /// Inertia after each iteration (lloyd and balanced only).
    std::vector<double> inertia_trace;
    /// Point-to-centroid distance evaluations spent fitting.
    std::uint64_t distance_evals = 0;

    int clusters() const { return static_cast<int>(centroids.rows()); }
    int dim() const { return static_cast<int>(centroids.cols()); }
    std::vector<std::size_t> cluster_sizes() const;
};

struct ClusterOptions {
    ClusterAlgo algo = ClusterAlgo::lloyd;
    /// k-means++ restarts; the lowest-inertia model wins.
    int restarts = 10;
    int max_iter = 100;
    /// Stop once no centroid moves farther than this.
    double tol = 1e-6;
    /// Mini-batch size (clamped to n).
    int batch = 256;
};

/// D²-weighted seeding. Picks C distinct rows of `data`.
Matrix kmeanspp_init(const PointSet& data, int clusters, RngSeed seed);

ClusterModel fit_lloyd(const PointSet& data, int clusters, RngSeed seed, int max_iter = 100,
                       double tol = 1e-6);

/// Lloyd iterations whose assignment step is a capacity-constrained linear
/// assignment: every cluster receives floor(n/C) or ceil(n/C) points.
ClusterModel fit_balanced(const PointSet& data, int clusters, RngSeed seed, int max_iter = 100,
                          double tol = 1e-6);

ClusterModel fit_minibatch(const PointSet& data, int clusters, RngSeed seed, int batch,
                           int max_iter = 100, double tol = 1e-6);

/// Runs `options.restarts` independent fits and keeps the lowest inertia
/// (earliest restart on ties).
ClusterModel fit_clustering(const PointSet& data, int clusters, const ClusterOptions& options,
                            RngSeed seed);

/// Nearest centroid by squared Euclidean distance; ties go to the lowest index.
int assign(const ClusterModel& model, const Eigen::Ref<const Eigen::RowVectorXd>& x);
Labels assign_all(const ClusterModel& model, const Matrix& points);

/// Same model with centroid c moved to index perm[c]; assignments follow.
ClusterModel relabel(const ClusterModel& model, const std::vector<int>& perm);

}  // namespace bridged

#endif  // BRIDGED_CLUSTERING_HPP
