#include "bridged/transport.hpp"

#include <cmath>

#include <fmt/format.h>

#include "bridged/random.hpp"

namespace bridged {

namespace {

using Array = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void check_marginal(const Vector& w, const char* name) {
    if (w.size() == 0) throw ArgumentError(fmt::format("{} is empty", name));
    if (!w.allFinite() || (w.array() <= 0.0).any()) {
        throw ArgumentError(fmt::format("{} must be strictly positive", name));
    }
    if (std::abs(w.sum() - 1.0) > 1e-9) {
        throw ArgumentError(fmt::format("{} sums to {}, not 1", name, w.sum()));
    }
}

struct Potentials {
    Vector a;  // f / eps
    Vector b;  // g / eps
};

/// Log-sum-exp of each row of (K + 1 b^T), written into `out`.
void row_lse(const Array& k, const Vector& b, Array& tmp, Vector& out) {
    tmp = k.rowwise() + b.transpose().array();
    const Eigen::VectorXd mx = tmp.rowwise().maxCoeff();
    out = mx.array() + (tmp.colwise() - mx.array()).exp().rowwise().sum().log();
}

/// Log-sum-exp of each column of (K + a 1^T).
void col_lse(const Array& k, const Vector& a, Array& tmp, Vector& out) {
    tmp = k.colwise() + a.array();
    const Eigen::RowVectorXd mx = tmp.colwise().maxCoeff();
    out = (mx.array() + (tmp.rowwise() - mx.array()).exp().colwise().sum().log()).transpose();
}

TransportPlan sinkhorn_impl(const Matrix& cost, const Vector& mu, const Vector& nu, double eps,
                            int max_iter, double tol, Potentials& pot) {
    const auto n = cost.rows();
    const auto m = cost.cols();
    if (n != mu.size() || m != nu.size()) {
        throw DimensionError(fmt::format("cost is {}x{} but marginals have sizes {} and {}", n, m,
                                         mu.size(), nu.size()));
    }
    if (!cost.allFinite()) throw NumericError("transport cost is not finite");
    if (!(eps > 0.0)) throw ArgumentError("eps must be > 0");
    if (max_iter < 1) throw ArgumentError("max_iter must be >= 1");
    check_marginal(mu, "mu");
    check_marginal(nu, "nu");

    const Array k = -cost.array() / eps;
    const Vector log_mu = mu.array().log();
    const Vector log_nu = nu.array().log();
    if (pot.a.size() != n) pot.a = Vector::Zero(n);
    if (pot.b.size() != m) pot.b = Vector::Zero(m);

    Array tmp(n, m);
    Vector r(n);
    Vector c(m);
    TransportPlan plan;
    plan.eps = eps;
    plan.mu = mu;
    plan.nu = nu;
    plan.coupling_entries = static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(m);

    for (int it = 1; it <= max_iter; ++it) {
        row_lse(k, pot.b, tmp, r);
        if (it > 1) {
            // Columns are exact after the previous column update; rows are what is left.
            const double viol = ((pot.a + r).array().exp() - mu.array()).abs().maxCoeff();
            if (viol < tol) {
                plan.converged = true;
                plan.iterations = it - 1;
                break;
            }
        }
        pot.a = log_mu - r;
        col_lse(k, pot.a, tmp, c);
        pot.b = log_nu - c;
        plan.iterations = it;
    }

    tmp = (k.colwise() + pot.a.array()).rowwise() + pot.b.transpose().array();
    plan.coupling = tmp.exp().matrix();
    const double row_viol = (plan.coupling.rowwise().sum() - mu).cwiseAbs().maxCoeff();
    const double col_viol = (plan.coupling.colwise().sum().transpose() - nu).cwiseAbs().maxCoeff();
    plan.marginal_violation = std::max(row_viol, col_viol);
    plan.converged = plan.marginal_violation < tol;
    return plan;
}

void check_distance_matrix(const Matrix& d, const char* name) {
    if (d.rows() != d.cols()) throw DimensionError(fmt::format("{} is not square", name));
    if (!d.allFinite()) throw NumericError(fmt::format("{} is not finite", name));
    const double scale = d.size() ? d.cwiseAbs().maxCoeff() : 0.0;
    const double tol = 1e-9 * (1.0 + scale);
    if ((d - d.transpose()).cwiseAbs().maxCoeff() > tol) {
        throw ArgumentError(fmt::format("{} is not symmetric", name));
    }
    if (d.diagonal().cwiseAbs().maxCoeff() > tol) {
        throw ArgumentError(fmt::format("{} has a nonzero diagonal", name));
    }
}

/// Symmetric in (i, j) so that swapping the spaces transposes the start.
double symmetric_noise(RngSeed seed, Eigen::Index i, Eigen::Index j) {
    const auto lo = static_cast<std::uint64_t>(std::min(i, j));
    const auto hi = static_cast<std::uint64_t>(std::max(i, j));
    const auto bits = derive_seed(seed, lo, hi).value;
    return 2.0 * (static_cast<double>(bits >> 11) * 0x1.0p-53) - 1.0;
}

}  // namespace

Vector uniform_weights(std::size_t n) {
    return Vector::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n));
}

TransportPlan sinkhorn(const Matrix& cost, const Vector& mu, const Vector& nu, double eps,
                       int max_iter, double tol) {
    Potentials pot;
    return sinkhorn_impl(cost, mu, nu, eps, max_iter, tol, pot);
}

double regularized_objective(const TransportPlan& plan, const Matrix& cost) {
    const auto& p = plan.coupling;
    double linear = (p.array() * cost.array()).sum();
    double kl = 0.0;
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        for (Eigen::Index j = 0; j < p.cols(); ++j) {
            const double v = p(i, j);
            if (v > 0.0) kl += v * std::log(v / (plan.mu(i) * plan.nu(j))) - v + plan.mu(i) * plan.nu(j);
        }
    }
    return linear + plan.eps * kl;
}

void GwConfig::validate() const {
    if (!(eps > 0.0)) throw ArgumentError("GW eps must be > 0");
    if (max_iter < 1) throw ArgumentError("GW max_iter must be >= 1");
    if (inner_max_iter < 1) throw ArgumentError("GW inner_max_iter must be >= 1");
    if (!(init_noise >= 0.0)) throw ArgumentError("GW init_noise must be >= 0");
}

TransportPlan gw_align(const Matrix& dist_x, const Matrix& dist_y, const Vector& mu,
                       const Vector& nu, const GwConfig& config, RngSeed seed) {
    config.validate();
    check_distance_matrix(dist_x, "dist_x");
    check_distance_matrix(dist_y, "dist_y");
    if (dist_x.rows() != mu.size() || dist_y.rows() != nu.size()) {
        throw DimensionError("distance matrices and marginals disagree in size");
    }
    check_marginal(mu, "mu");
    check_marginal(nu, "nu");
    const auto n = dist_x.rows();
    const auto m = dist_y.rows();

    // Square loss: L(P) = (Dx∘Dx) mu 1^T + 1 ((Dy∘Dy) nu)^T - 2 Dx P Dy.
    const Vector fx = dist_x.cwiseProduct(dist_x) * mu;
    const Vector fy = dist_y.cwiseProduct(dist_y) * nu;
    Matrix const_cost = fx.replicate(1, m);
    const_cost.rowwise() += fy.transpose();

    Matrix coupling;
    if (config.init_noise > 0.0) {
        Matrix noise(n, m);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < m; ++j) noise(i, j) = -config.init_noise * symmetric_noise(seed, i, j);
        }
        coupling = sinkhorn(noise, mu, nu, 1.0, config.inner_max_iter, config.inner_tol).coupling;
    } else {
        coupling = mu * nu.transpose();
    }

    TransportPlan plan;
    Potentials pot;
    Matrix grad(n, m);
    int outer = 0;
    bool settled = false;
    for (outer = 1; outer <= config.max_iter; ++outer) {
        grad.noalias() = dist_x * coupling;
        Matrix linear(n, m);
        linear.noalias() = grad * dist_y;
        grad = const_cost - 2.0 * linear;
        plan = sinkhorn_impl(grad, mu, nu, config.eps, config.inner_max_iter, config.inner_tol, pot);
        const double change = (plan.coupling - coupling).norm();
        coupling = plan.coupling;
        if (change < config.tol) {
            settled = true;
            break;
        }
    }
    plan.iterations = std::min(outer, config.max_iter);
    plan.converged = settled && plan.marginal_violation < config.inner_tol;
    plan.coupling_entries = static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(m);
    return plan;
}

double gw_distortion(const Matrix& dist_x, const Matrix& dist_y, const Matrix& coupling) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < dist_x.rows(); ++i) {
        for (Eigen::Index j = 0; j < dist_y.rows(); ++j) {
            for (Eigen::Index k = 0; k < dist_x.rows(); ++k) {
                for (Eigen::Index l = 0; l < dist_y.rows(); ++l) {
                    const double diff = dist_x(i, k) - dist_y(j, l);
                    total += diff * diff * coupling(i, j) * coupling(k, l);
                }
            }
        }
    }
    return total;
}

}  // namespace bridged
