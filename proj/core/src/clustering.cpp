#include "bridged/clustering.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "bridged/assignment.hpp"
#include "bridged/random.hpp"

namespace bridged {

namespace {

using RowRef = Eigen::Ref<const Eigen::RowVectorXd>;

void check_fit_args(const PointSet& data, int clusters) {
    if (clusters < 1) throw ArgumentError("cluster count must be >= 1");
    if (data.empty()) throw ArgumentError("cannot cluster an empty point set");
    if (static_cast<std::size_t>(clusters) > data.size()) {
        throw ArgumentError(
            fmt::format("cluster count {} exceeds point count {}", clusters, data.size()));
    }
    if (!data.points().allFinite()) throw NumericError("point set contains non-finite values");
}

struct Nearest {
    int index;
    double dist2;
};

Nearest nearest(const Matrix& centroids, const RowRef& x) {
    Nearest best{0, std::numeric_limits<double>::infinity()};
    for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
        const double d2 = (centroids.row(c) - x).squaredNorm();
        if (d2 < best.dist2) best = {static_cast<int>(c), d2};
    }
    return best;
}

/// E-step: labels and per-point squared distances.
double assign_step(const Matrix& pts, const Matrix& centroids, Labels& labels,
                   std::vector<double>& dist2, std::uint64_t& evals) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
        const auto nn = nearest(centroids, pts.row(i));
        labels[static_cast<std::size_t>(i)] = nn.index;
        dist2[static_cast<std::size_t>(i)] = nn.dist2;
        total += nn.dist2;
    }
    evals += static_cast<std::uint64_t>(pts.rows() * centroids.rows());
    return total;
}

double inertia_of(const Matrix& pts, const Matrix& centroids, const Labels& labels) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
        total += (pts.row(i) - centroids.row(labels[static_cast<std::size_t>(i)])).squaredNorm();
    }
    return total;
}

/// M-step. Empty clusters move onto the points farthest from their
/// current centroids. Returns the largest centroid shift.
double update_step(const Matrix& pts, const Labels& labels, const std::vector<double>& dist2,
                   Matrix& centroids) {
    const auto C = centroids.rows();
    Matrix sums = Matrix::Zero(C, centroids.cols());
    std::vector<std::size_t> counts(static_cast<std::size_t>(C), 0);
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
        const int l = labels[static_cast<std::size_t>(i)];
        sums.row(l) += pts.row(i);
        ++counts[static_cast<std::size_t>(l)];
    }
    std::vector<std::size_t> order;
    double shift = 0.0;
    std::size_t next_far = 0;
    for (Eigen::Index c = 0; c < C; ++c) {
        Eigen::RowVectorXd updated;
        if (counts[static_cast<std::size_t>(c)] > 0) {
            updated = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
        } else {
            if (order.empty()) {
                order.resize(dist2.size());
                std::iota(order.begin(), order.end(), std::size_t{0});
                std::stable_sort(order.begin(), order.end(),
                                 [&](std::size_t a, std::size_t b) { return dist2[a] > dist2[b]; });
            }
            updated = pts.row(static_cast<Eigen::Index>(order[next_far % order.size()]));
            ++next_far;
        }
        shift = std::max(shift, (updated - centroids.row(c)).norm());
        centroids.row(c) = updated;
    }
    return shift;
}

/// Capacity-constrained assignment. Every cluster has floor(n/C) mandatory
/// slots and one optional slot; C - n mod C dummy rows soak up the unused
/// optional slots, so sizes end up in {floor(n/C), ceil(n/C)}.
double balanced_assign_step(const Matrix& pts, const Matrix& centroids, Labels& labels,
                            std::vector<double>& dist2, std::uint64_t& evals) {
    const auto n = pts.rows();
    const auto C = centroids.rows();
    const auto base = n / C;
    const auto extra = n % C;
    const auto slots = C * base + C;
    const auto rows = n + (C - extra);

    Matrix d2(n, C);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index c = 0; c < C; ++c) d2(i, c) = (pts.row(i) - centroids.row(c)).squaredNorm();
    }
    evals += static_cast<std::uint64_t>(n * C);
    const double big = (d2.size() > 0 ? d2.maxCoeff() + 1.0 : 1.0) * static_cast<double>(rows + 1);

    // Slot layout: [cluster c mandatory 0..base-1] for all c, then optional slot per cluster.
    Matrix cost(rows, slots);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index c = 0; c < C; ++c) {
            cost.row(i).segment(c * base, base).setConstant(d2(i, c));
            cost(i, C * base + c) = d2(i, c);
        }
    }
    for (Eigen::Index r = n; r < rows; ++r) {
        cost.row(r).head(C * base).setConstant(big);
        cost.row(r).tail(C).setZero();
    }
    const auto cols = solve_assignment(cost);
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const int slot = cols[static_cast<std::size_t>(i)];
        const int c = slot < C * base ? static_cast<int>(slot / base) : static_cast<int>(slot - C * base);
        labels[static_cast<std::size_t>(i)] = c;
        dist2[static_cast<std::size_t>(i)] = d2(i, c);
        total += d2(i, c);
    }
    return total;
}

ClusterModel finish(const Matrix& pts, ClusterModel model) {
    model.assignments.assign(static_cast<std::size_t>(pts.rows()), 0);
    std::vector<double> dist2(static_cast<std::size_t>(pts.rows()));
    model.inertia = assign_step(pts, model.centroids, model.assignments, dist2, model.distance_evals);
    return model;
}

}  // namespace

std::string to_string(ClusterAlgo algo) {
    switch (algo) {
        case ClusterAlgo::lloyd: return "lloyd";
        case ClusterAlgo::balanced: return "balanced";
        case ClusterAlgo::minibatch: return "minibatch";
    }
    return "lloyd";
}

ClusterAlgo parse_cluster_algo(const std::string& text) {
    if (text == "lloyd") return ClusterAlgo::lloyd;
    if (text == "balanced") return ClusterAlgo::balanced;
    if (text == "minibatch") return ClusterAlgo::minibatch;
    throw ArgumentError(fmt::format("unknown clustering algorithm '{}'", text));
}

std::vector<std::size_t> ClusterModel::cluster_sizes() const {
    std::vector<std::size_t> sizes(static_cast<std::size_t>(clusters()), 0);
    for (int l : assignments) ++sizes[static_cast<std::size_t>(l)];
    return sizes;
}

Matrix kmeanspp_init(const PointSet& data, int clusters, RngSeed seed) {
    check_fit_args(data, clusters);
    const auto& pts = data.points();
    const auto n = data.size();
    auto engine = make_engine(seed);

    Matrix centroids(clusters, pts.cols());
    std::vector<char> chosen(n, 0);
    std::vector<double> d2(n, std::numeric_limits<double>::infinity());

    std::uniform_int_distribution<std::size_t> first(0, n - 1);
    std::size_t pick = first(engine);
    for (int c = 0; c < clusters; ++c) {
        if (c > 0) {
            double total = 0.0;
            for (std::size_t i = 0; i < n; ++i) total += chosen[i] ? 0.0 : d2[i];
            if (total > 0.0) {
                std::uniform_real_distribution<double> u(0.0, total);
                const double target = u(engine);
                double acc = 0.0;
                pick = n;
                for (std::size_t i = 0; i < n; ++i) {
                    if (chosen[i] || d2[i] <= 0.0) continue;
                    acc += d2[i];
                    pick = i;
                    if (acc >= target) break;
                }
            } else {
                // Remaining points coincide with chosen seeds; pick among the unchosen uniformly.
                std::vector<std::size_t> rest;
                for (std::size_t i = 0; i < n; ++i) {
                    if (!chosen[i]) rest.push_back(i);
                }
                std::uniform_int_distribution<std::size_t> u(0, rest.size() - 1);
                pick = rest[u(engine)];
            }
        }
        chosen[pick] = 1;
        centroids.row(c) = pts.row(static_cast<Eigen::Index>(pick));
        for (std::size_t i = 0; i < n; ++i) {
            const double dd = (pts.row(static_cast<Eigen::Index>(i)) - centroids.row(c)).squaredNorm();
            d2[i] = std::min(d2[i], dd);
        }
    }
    return centroids;
}

ClusterModel fit_lloyd(const PointSet& data, int clusters, RngSeed seed, int max_iter, double tol) {
    check_fit_args(data, clusters);
    if (max_iter < 1) throw ArgumentError("max_iter must be >= 1");
    const auto& pts = data.points();

    ClusterModel model;
    model.algo = ClusterAlgo::lloyd;
    model.centroids = kmeanspp_init(data, clusters, seed);
    model.distance_evals = data.size() * static_cast<std::uint64_t>(clusters);
    Labels labels(data.size(), 0);
    std::vector<double> dist2(data.size());
    for (int it = 0; it < max_iter; ++it) {
        assign_step(pts, model.centroids, labels, dist2, model.distance_evals);
        const double shift = update_step(pts, labels, dist2, model.centroids);
        model.inertia_trace.push_back(inertia_of(pts, model.centroids, labels));
        model.iterations = it + 1;
        if (shift < tol) break;
    }
    return finish(pts, std::move(model));
}

ClusterModel fit_balanced(const PointSet& data, int clusters, RngSeed seed, int max_iter, double tol) {
    check_fit_args(data, clusters);
    if (max_iter < 1) throw ArgumentError("max_iter must be >= 1");
    const auto& pts = data.points();

    ClusterModel model;
    model.algo = ClusterAlgo::balanced;
    model.centroids = kmeanspp_init(data, clusters, seed);
    Labels labels(data.size(), 0);
    std::vector<double> dist2(data.size());
    for (int it = 0; it < max_iter; ++it) {
        balanced_assign_step(pts, model.centroids, labels, dist2, model.distance_evals);
        // Balanced assignment never leaves a cluster empty, so this is a plain mean update.
        const double shift = update_step(pts, labels, dist2, model.centroids);
        model.inertia_trace.push_back(inertia_of(pts, model.centroids, labels));
        model.iterations = it + 1;
        if (shift < tol) break;
    }
    // Final capacity-respecting assignment against the final centroids.
    model.assignments = labels;
    model.inertia = balanced_assign_step(pts, model.centroids, model.assignments, dist2,
                                         model.distance_evals);
    return model;
}

ClusterModel fit_minibatch(const PointSet& data, int clusters, RngSeed seed, int batch,
                           int max_iter, double tol) {
    check_fit_args(data, clusters);
    if (batch < 1 || static_cast<std::size_t>(batch) > data.size()) {
        throw ArgumentError(fmt::format("batch must be in [1, {}], got {}", data.size(), batch));
    }
    if (max_iter < 1) throw ArgumentError("max_iter must be >= 1");
    const auto& pts = data.points();
    const auto n = data.size();

    ClusterModel model;
    model.algo = ClusterAlgo::minibatch;
    model.centroids = kmeanspp_init(data, clusters, seed);
    model.distance_evals = n * static_cast<std::uint64_t>(clusters);
    auto engine = make_engine(derive_seed(seed, 1));

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(clusters), 0);
    std::vector<int> batch_labels(static_cast<std::size_t>(batch));
    const auto b = static_cast<std::size_t>(batch);
    for (int it = 0; it < max_iter; ++it) {
        // Partial Fisher-Yates: the first `batch` entries are a uniform sample without replacement.
        for (std::size_t i = 0; i < b; ++i) {
            std::uniform_int_distribution<std::size_t> u(i, n - 1);
            std::swap(perm[i], perm[u(engine)]);
        }
        for (std::size_t i = 0; i < b; ++i) {
            batch_labels[i] = nearest(model.centroids, pts.row(static_cast<Eigen::Index>(perm[i]))).index;
        }
        model.distance_evals += b * static_cast<std::uint64_t>(clusters);
        const Matrix before = model.centroids;
        for (std::size_t i = 0; i < b; ++i) {
            const auto c = static_cast<std::size_t>(batch_labels[i]);
            ++counts[c];
            const double eta = 1.0 / static_cast<double>(counts[c]);
            model.centroids.row(static_cast<Eigen::Index>(c)) +=
                eta * (pts.row(static_cast<Eigen::Index>(perm[i])) - model.centroids.row(static_cast<Eigen::Index>(c)));
        }
        model.iterations = it + 1;
        const double shift = (model.centroids - before).rowwise().norm().maxCoeff();
        if (shift < tol) break;
    }
    return finish(pts, std::move(model));
}

ClusterModel fit_clustering(const PointSet& data, int clusters, const ClusterOptions& options,
                            RngSeed seed) {
    if (options.restarts < 1) throw ArgumentError("restarts must be >= 1");
    ClusterModel best;
    bool have = false;
    std::uint64_t evals = 0;
    for (int r = 0; r < options.restarts; ++r) {
        const auto s = derive_seed(seed, static_cast<std::uint64_t>(r));
        ClusterModel m;
        switch (options.algo) {
            case ClusterAlgo::lloyd:
                m = fit_lloyd(data, clusters, s, options.max_iter, options.tol);
                break;
            case ClusterAlgo::balanced:
                m = fit_balanced(data, clusters, s, options.max_iter, options.tol);
                break;
            case ClusterAlgo::minibatch: {
                const int batch = std::min<int>(options.batch, static_cast<int>(data.size()));
                m = fit_minibatch(data, clusters, s, batch, options.max_iter, options.tol);
                break;
            }
        }
        evals += m.distance_evals;
        if (!have || m.inertia < best.inertia) {
            best = std::move(m);
            have = true;
        }
    }
    best.distance_evals = evals;
    return best;
}

int assign(const ClusterModel& model, const Eigen::Ref<const Eigen::RowVectorXd>& x) {
    if (x.size() != model.centroids.cols()) {
        throw ArgumentError(fmt::format("point has dimension {}, model expects {}", x.size(),
                                        model.centroids.cols()));
    }
    if (model.centroids.rows() == 0) throw ArgumentError("model has no centroids");
    return nearest(model.centroids, x).index;
}

Labels assign_all(const ClusterModel& model, const Matrix& points) {
    Labels out(static_cast<std::size_t>(points.rows()));
    for (Eigen::Index i = 0; i < points.rows(); ++i) out[static_cast<std::size_t>(i)] = assign(model, points.row(i));
    return out;
}

ClusterModel relabel(const ClusterModel& model, const std::vector<int>& perm) {
    if (perm.size() != static_cast<std::size_t>(model.clusters())) {
        throw ArgumentError("relabel permutation has the wrong length");
    }
    ClusterModel out = model;
    for (int c = 0; c < model.clusters(); ++c) {
        out.centroids.row(perm[static_cast<std::size_t>(c)]) = model.centroids.row(c);
    }
    for (auto& l : out.assignments) l = perm[static_cast<std::size_t>(l)];
    return out;
}

}  // namespace bridged
