#ifndef BRIDGED_TRANSPORT_HPP
#define BRIDGED_TRANSPORT_HPP

#include <cstdint>

#include "bridged/types.hpp"

namespace bridged {

/// Entropic coupling with its marginals and solver bookkeeping.
struct TransportPlan {
    Matrix coupling;
    Vector mu;
    Vector nu;
    double eps = 0.0;
    /// Sinkhorn iterations (for GW: outer iterations).
    int iterations = 0;
    /// Largest absolute row or column marginal violation at exit.
    double marginal_violation = 0.0;
    bool converged = false;
    /// Dense n_X x n_Y buffers allocated while solving (coupling storage).
    std::uint64_t coupling_entries = 0;
};

/// Log-domain Sinkhorn for min <P, cost> + eps KL(P | mu nu^T) subject to
/// P 1 = mu, P^T 1 = nu. Stops when the largest marginal violation drops
/// below `tol` or after `max_iter` iterations; non-convergence is reported
/// through `converged`, never thrown.
TransportPlan sinkhorn(const Matrix& cost, const Vector& mu, const Vector& nu, double eps,
                       int max_iter = 2000, double tol = 1e-9);

/// <P, cost> + eps KL(P | mu nu^T) for a plan.
double regularized_objective(const TransportPlan& plan, const Matrix& cost);

struct GwConfig {
    double eps = 5e-3;
    /// Outer (linearisation) iterations.
    int max_iter = 50;
    /// Frobenius change of the coupling between outer iterations.
    double tol = 1e-7;
    int inner_max_iter = 2000;
    double inner_tol = 1e-9;
    /// 0 starts from mu nu^T; > 0 starts from a random coupling whose log is
    /// perturbed by this scale (symmetric in the two index sets).
    double init_noise = 0.0;

    void validate() const;
};

/// Entropic Gromov-Wasserstein (square loss) by iterated linearisation:
/// each outer step builds the GW gradient cost from the current coupling
/// and solves an entropic OT subproblem. Distance matrices must be
/// symmetric with a zero diagonal.
TransportPlan gw_align(const Matrix& dist_x, const Matrix& dist_y, const Vector& mu,
                       const Vector& nu, const GwConfig& config, RngSeed seed);

/// Sum_ijkl (dx_ik - dy_jl)^2 P_ij P_kl.
double gw_distortion(const Matrix& dist_x, const Matrix& dist_y, const Matrix& coupling);

Vector uniform_weights(std::size_t n);

}  // namespace bridged

#endif  // BRIDGED_TRANSPORT_HPP
