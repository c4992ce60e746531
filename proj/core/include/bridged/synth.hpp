#ifndef BRIDGED_SYNTH_HPP
#define BRIDGED_SYNTH_HPP

#include <vector>

#include "bridged/types.hpp"

namespace bridged {

/// Latent-class Gaussian mixture: T ~ priors, X | T ~ N(mu_x[T], sigma_x² I),
/// Y | T ~ N(mu_y[T], sigma_y² I), with X and Y independent given T.
struct MixtureSpec {
    std::vector<double> priors;
    Matrix mu_x;
    Matrix mu_y;
    double sigma_x = 1.0;
    double sigma_y = 1.0;

    int clusters() const { return static_cast<int>(priors.size()); }
    int x_dim() const { return static_cast<int>(mu_x.cols()); }
    int y_dim() const { return static_cast<int>(mu_y.cols()); }

    /// Throws ArgumentError on shape mismatch, non-simplex priors, negative
    /// noise, or coincident means.
    void validate() const;
};

/// Smallest pairwise distance between rows (infinity for a single row).
double min_separation(const Matrix& means);

struct BoundReport {
    double delta_x = 0.0;
    double delta_y = 0.0;
    double bound_x = 1.0;
    double bound_y = 1.0;
};

struct MixtureSample {
    PointSet x;
    PointSet y;
    Labels latent;
};

/// Draws n samples. Both point sets share ids ("0".."n-1") and carry the
/// latent labels. Row i uses its own derived stream, so results do not
/// depend on how the work is blocked.
MixtureSample sample_mixture(const MixtureSpec& spec, std::size_t n, RngSeed seed);

/// Uniform priors; means placed so that the minimum pairwise distance in
/// each space equals delta_over_sigma exactly (sigma = 1). Up to d+1 classes
/// form a randomly rotated regular simplex; beyond that a greedy max-min
/// spread on the sphere is rescaled.
MixtureSpec make_separated_spec(int clusters, int x_dim, int y_dim, double delta_over_sigma,
                                RngSeed seed);

/// Exponential mis-clustering factor exp(-Δ² / (16 σ²)) per space.
BoundReport eval_bound(const MixtureSpec& spec);

}  // namespace bridged

#endif  // BRIDGED_SYNTH_HPP
