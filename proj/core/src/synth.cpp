#include "bridged/synth.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "bridged/random.hpp"

namespace bridged {

namespace {

Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Engine& engine) {
    std::normal_distribution<double> z(0.0, 1.0);
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = z(engine);
    }
    return m;
}

/// Orthonormal columns spanning a random k-dimensional subspace of R^d.
Eigen::MatrixXd random_frame(int d, int k, Engine& engine) {
    const Eigen::MatrixXd g = gaussian_matrix(d, k, engine);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    return qr.householderQ() * Eigen::MatrixXd::Identity(d, k);
}

Matrix simplex_means(int clusters, int d, Engine& engine) {
    if (clusters == 1) return Matrix::Zero(1, d);
    // Centered standard basis vectors, expressed in an orthonormal basis of
    // the sum-zero subspace, then rotated into R^d.
    const Eigen::MatrixXd centered =
        Eigen::MatrixXd::Identity(clusters, clusters) -
        Eigen::MatrixXd::Constant(clusters, clusters, 1.0 / clusters);
    Eigen::MatrixXd seed_basis = Eigen::MatrixXd::Identity(clusters, clusters);
    seed_basis.col(0).setOnes();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(seed_basis);
    const Eigen::MatrixXd q = qr.householderQ();
    const Eigen::MatrixXd basis = q.rightCols(clusters - 1);
    const Eigen::MatrixXd coords = centered * basis;
    const Eigen::MatrixXd frame = random_frame(d, clusters - 1, engine);
    return coords * frame.transpose();
}

Matrix spread_means(int clusters, int d, Engine& engine) {
    if (d == 1) {
        Matrix m(clusters, 1);
        for (int c = 0; c < clusters; ++c) m(c, 0) = c;
        return m;
    }
    const int candidates = 64 * clusters;
    Matrix cand = gaussian_matrix(candidates, d, engine);
    cand.rowwise().normalize();
    std::vector<double> nearest(static_cast<std::size_t>(candidates),
                                std::numeric_limits<double>::infinity());
    std::vector<char> taken(static_cast<std::size_t>(candidates), 0);
    Matrix means(clusters, d);
    int pick = 0;
    for (int c = 0; c < clusters; ++c) {
        if (c > 0) {
            double best = -1.0;
            for (int i = 0; i < candidates; ++i) {
                if (!taken[static_cast<std::size_t>(i)] && nearest[static_cast<std::size_t>(i)] > best) {
                    best = nearest[static_cast<std::size_t>(i)];
                    pick = i;
                }
            }
        }
        taken[static_cast<std::size_t>(pick)] = 1;
        means.row(c) = cand.row(pick);
        for (int i = 0; i < candidates; ++i) {
            nearest[static_cast<std::size_t>(i)] =
                std::min(nearest[static_cast<std::size_t>(i)], (cand.row(i) - cand.row(pick)).norm());
        }
    }
    return means;
}

Matrix place_means(int clusters, int d, double target, Engine& engine) {
    Matrix means = clusters <= d + 1 ? simplex_means(clusters, d, engine)
                                     : spread_means(clusters, d, engine);
    if (clusters < 2) return means;
    const double sep = min_separation(means);
    if (!(sep > 0.0)) {
        throw ArgumentError(fmt::format("cannot separate {} means in dimension {}", clusters, d));
    }
    means *= target / sep;
    return means;
}

void sample_gaussian_row(Eigen::Ref<Eigen::RowVectorXd> out, const Eigen::Ref<const Eigen::RowVectorXd>& mean,
                         double sigma, Engine& engine) {
    std::normal_distribution<double> z(0.0, 1.0);
    for (Eigen::Index j = 0; j < out.size(); ++j) out(j) = mean(j) + sigma * z(engine);
}

}  // namespace

double min_separation(const Matrix& means) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index a = 0; a < means.rows(); ++a) {
        for (Eigen::Index b = a + 1; b < means.rows(); ++b) {
            best = std::min(best, (means.row(a) - means.row(b)).norm());
        }
    }
    return best;
}

void MixtureSpec::validate() const {
    const int C = clusters();
    if (C < 1) throw ArgumentError("mixture needs at least one class");
    if (mu_x.rows() != C || mu_y.rows() != C) {
        throw ArgumentError(fmt::format("mixture has {} priors but {} / {} mean rows", C,
                                        mu_x.rows(), mu_y.rows()));
    }
    if (mu_x.cols() < 1 || mu_y.cols() < 1) throw ArgumentError("mixture means need dimension >= 1");
    double total = 0.0;
    for (double p : priors) {
        if (!(p >= 0.0)) throw ArgumentError("mixture priors must be nonnegative");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw ArgumentError(fmt::format("mixture priors sum to {}, not 1", total));
    }
    if (!(sigma_x >= 0.0) || !(sigma_y >= 0.0)) throw ArgumentError("noise scale must be >= 0");
    if (!mu_x.allFinite() || !mu_y.allFinite()) throw ArgumentError("mixture means must be finite");
    if (C >= 2 && (!(min_separation(mu_x) > 0.0) || !(min_separation(mu_y) > 0.0))) {
        throw ArgumentError("mixture means must be pairwise distinct");
    }
}

MixtureSample sample_mixture(const MixtureSpec& spec, std::size_t n, RngSeed seed) {
    spec.validate();
    if (n < 1) throw ArgumentError("sample size must be >= 1");
    Matrix xs(static_cast<Eigen::Index>(n), spec.x_dim());
    Matrix ys(static_cast<Eigen::Index>(n), spec.y_dim());
    Labels latent(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto engine = make_engine(derive_seed(seed, i));
        std::discrete_distribution<int> pick(spec.priors.begin(), spec.priors.end());
        const int t = pick(engine);
        latent[i] = t;
        const auto r = static_cast<Eigen::Index>(i);
        sample_gaussian_row(xs.row(r), spec.mu_x.row(t), spec.sigma_x, engine);
        sample_gaussian_row(ys.row(r), spec.mu_y.row(t), spec.sigma_y, engine);
    }
    MixtureSample out;
    out.x = PointSet(std::move(xs), {}, latent);
    out.y = PointSet(std::move(ys), {}, latent);
    out.latent = std::move(latent);
    return out;
}

MixtureSpec make_separated_spec(int clusters, int x_dim, int y_dim, double delta_over_sigma,
                                RngSeed seed) {
    if (clusters < 1) throw ArgumentError("cluster count must be >= 1");
    if (x_dim < 1 || y_dim < 1) throw ArgumentError("dimensions must be >= 1");
    if (!(delta_over_sigma > 0.0)) throw ArgumentError("delta_over_sigma must be > 0");
    MixtureSpec spec;
    spec.priors.assign(static_cast<std::size_t>(clusters), 1.0 / clusters);
    // Exact simplex: 1/C summed C times may miss 1 by an ulp; fix the last entry.
    spec.priors.back() = 1.0 - std::accumulate(spec.priors.begin(), spec.priors.end() - 1, 0.0);
    auto ex = make_engine(derive_seed(seed, 0));
    auto ey = make_engine(derive_seed(seed, 1));
    spec.mu_x = place_means(clusters, x_dim, delta_over_sigma, ex);
    spec.mu_y = place_means(clusters, y_dim, delta_over_sigma, ey);
    spec.sigma_x = 1.0;
    spec.sigma_y = 1.0;
    return spec;
}

BoundReport eval_bound(const MixtureSpec& spec) {
    spec.validate();
    if (spec.clusters() < 2) throw ArgumentError("bound needs at least two classes");
    if (!(spec.sigma_x > 0.0) || !(spec.sigma_y > 0.0)) throw ArgumentError("bound needs sigma > 0");
    BoundReport r;
    r.delta_x = min_separation(spec.mu_x);
    r.delta_y = min_separation(spec.mu_y);
    r.bound_x = std::exp(-(r.delta_x * r.delta_x) / (16.0 * spec.sigma_x * spec.sigma_x));
    r.bound_y = std::exp(-(r.delta_y * r.delta_y) / (16.0 * spec.sigma_y * spec.sigma_y));
    return r;
}

}  // namespace bridged
