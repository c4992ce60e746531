#include "bridged/baselines.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "bridged/random.hpp"

namespace bridged {

namespace {

Matrix squared_distances(const Matrix& a, const Matrix& b) {
    const Vector an = a.rowwise().squaredNorm();
    const Vector bn = b.rowwise().squaredNorm();
    Matrix d(a.rows(), b.rows());
    d.noalias() = -2.0 * a * b.transpose();
    d.colwise() += an;
    d.rowwise() += bn.transpose();
    return d.cwiseMax(0.0);
}

Matrix vstack(const Matrix& top, const Matrix& bottom) {
    if (top.rows() == 0) return bottom;
    if (bottom.rows() == 0) return top;
    if (top.cols() != bottom.cols()) throw DimensionError("cannot stack matrices of different widths");
    Matrix out(top.rows() + bottom.rows(), top.cols());
    out << top, bottom;
    return out;
}

/// Source/target supports shared by the transport baselines.
struct Supports {
    Matrix source;
    Matrix target;
    Eigen::Index query_offset = 0;
    std::vector<Eigen::Index> paired_rows;
};

Supports build_supports(const DataSplit& split) {
    if (split.paired.empty()) throw ArgumentError("split has no paired set");
    Supports s;
    s.source = split.x_pool.points();
    s.target = split.y_pool.points();
    if (split.pools_enlarged) {
        for (const auto& id : split.paired.ids()) {
            const auto row = split.x_pool.find(id);
            if (!row) throw ArgumentError(fmt::format("enlarged pool lacks paired id '{}'", id));
            s.paired_rows.push_back(static_cast<Eigen::Index>(*row));
        }
    } else {
        const auto base = s.source.rows();
        s.source = vstack(s.source, split.paired.x());
        s.target = vstack(s.target, split.paired.y());
        for (Eigen::Index j = 0; j < split.paired.x().rows(); ++j) s.paired_rows.push_back(base + j);
    }
    const bool test_is_pool = split.mode == SplitMode::transductive &&
                              split.x_test.size() == split.x_pool.size() &&
                              split.x_test.ids() == split.x_pool.ids();
    if (test_is_pool) {
        s.query_offset = 0;
    } else {
        s.query_offset = s.source.rows();
        if (!split.x_test.empty()) s.source = vstack(s.source, split.x_test.points());
    }
    if (s.target.rows() == 0) throw ArgumentError("output pool is empty");
    return s;
}

Matrix scaled(Matrix m) {
    const double top = m.size() ? m.maxCoeff() : 0.0;
    if (top > 0.0) m /= top;
    return m;
}

}  // namespace

Matrix knn_predict(const PairedSet& paired, const PointSet& x_test, int k_neighbors) {
    const auto k = static_cast<int>(paired.size());
    if (k_neighbors < 1 || k_neighbors > k) {
        throw ArgumentError(fmt::format("k_neighbors must be in [1, {}], got {}", k, k_neighbors));
    }
    if (!x_test.empty() && x_test.dim() != paired.x_dim()) {
        throw ArgumentError("query dimension does not match the paired set");
    }
    Matrix out(static_cast<Eigen::Index>(x_test.size()), paired.y_dim());
    std::vector<int> order(static_cast<std::size_t>(k));
    std::vector<double> d2(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < x_test.size(); ++i) {
        for (int j = 0; j < k; ++j) d2[static_cast<std::size_t>(j)] = (paired.x().row(j) - x_test.row(i)).squaredNorm();
        std::iota(order.begin(), order.end(), 0);
        std::partial_sort(order.begin(), order.begin() + k_neighbors, order.end(), [&](int a, int b) {
            const auto ua = static_cast<std::size_t>(a);
            const auto ub = static_cast<std::size_t>(b);
            return d2[ua] < d2[ub] || (d2[ua] == d2[ub] && a < b);
        });
        Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(paired.y_dim());
        for (int r = 0; r < k_neighbors; ++r) acc += paired.y().row(order[static_cast<std::size_t>(r)]);
        out.row(static_cast<Eigen::Index>(i)) = acc / static_cast<double>(k_neighbors);
    }
    return out;
}

Matrix RidgeMap::apply(const Matrix& x) const {
    Matrix centred = x.rowwise() - x_mean;
    Matrix out = centred * weights;
    out.rowwise() += y_mean;
    return out;
}

RidgeMap fit_ridge(const PairedSet& paired, double alpha) {
    if (paired.empty()) throw ArgumentError("ridge needs at least one pair");
    if (!(alpha > 0.0)) throw ArgumentError("ridge_alpha must be > 0");
    RidgeMap map;
    map.x_mean = paired.x().colwise().mean();
    map.y_mean = paired.y().colwise().mean();
    const Eigen::MatrixXd xc = paired.x().rowwise() - map.x_mean;
    const Eigen::MatrixXd yc = paired.y().rowwise() - map.y_mean;
    Eigen::MatrixXd gram = xc.transpose() * xc;
    gram.diagonal().array() += alpha;
    map.weights = gram.ldlt().solve(xc.transpose() * yc);
    return map;
}

Matrix barycentric_projection(const Matrix& coupling, const Matrix& targets) {
    if (coupling.cols() != targets.rows()) throw DimensionError("coupling and targets disagree");
    Matrix out = coupling * targets;
    const Vector mass = coupling.rowwise().sum();
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
        if (mass(i) > 0.0) out.row(i) /= mass(i);
    }
    return out;
}

BaselineOutput eot_predict(const DataSplit& split, const EotConfig& config) {
    const auto s = build_supports(split);
    const auto ridge = fit_ridge(split.paired, config.ridge_alpha);
    const Matrix cost = scaled(squared_distances(ridge.apply(s.source), s.target));
    const auto plan = sinkhorn(cost, uniform_weights(static_cast<std::size_t>(s.source.rows())),
                               uniform_weights(static_cast<std::size_t>(s.target.rows())), config.eps,
                               config.max_iter, config.tol);
    BaselineOutput out;
    const auto q = static_cast<Eigen::Index>(split.x_test.size());
    out.predictions = barycentric_projection(plan.coupling.middleRows(s.query_offset, q), s.target);
    out.coupling_entries = plan.coupling_entries;
    out.iterations = plan.iterations;
    out.converged = plan.converged;
    return out;
}

Matrix euclidean_distances(const Matrix& points) {
    Matrix d = squared_distances(points, points).cwiseSqrt();
    d.diagonal().setZero();
    // Symmetrise away rounding from the Gram-matrix expansion.
    return 0.5 * (d + d.transpose());
}

BaselineOutput gw_predict(const DataSplit& split, const GwPredictConfig& config, RngSeed seed) {
    if (config.restarts < 1) throw ArgumentError("GW restarts must be >= 1");
    const auto s = build_supports(split);
    const Matrix dx = scaled(euclidean_distances(s.source));
    const Matrix dy = scaled(euclidean_distances(s.target));
    const Vector mu = uniform_weights(static_cast<std::size_t>(s.source.rows()));
    const Vector nu = uniform_weights(static_cast<std::size_t>(s.target.rows()));

    BaselineOutput best;
    double best_err = std::numeric_limits<double>::infinity();
    std::uint64_t entries = 0;
    for (int r = 0; r < config.restarts; ++r) {
        GwConfig cfg = config.gw;
        cfg.init_noise = r == 0 ? 0.0 : config.restart_noise;
        const auto plan = gw_align(dx, dy, mu, nu, cfg, derive_seed(seed, static_cast<std::uint64_t>(r)));
        entries += plan.coupling_entries;
        const Matrix all = barycentric_projection(plan.coupling, s.target);
        double err = 0.0;
        for (std::size_t j = 0; j < s.paired_rows.size(); ++j) {
            err += (all.row(s.paired_rows[j]) - split.paired.y().row(static_cast<Eigen::Index>(j))).squaredNorm();
        }
        if (err < best_err) {
            best_err = err;
            best.predictions = all.middleRows(s.query_offset, static_cast<Eigen::Index>(split.x_test.size()));
            best.iterations = plan.iterations;
            best.converged = plan.converged;
        }
    }
    best.coupling_entries = entries / static_cast<std::uint64_t>(config.restarts);
    return best;
}

}  // namespace bridged
