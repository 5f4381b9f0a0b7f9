#ifndef CFGEC_MIXTURE_HPP
#define CFGEC_MIXTURE_HPP

#include <vector>

#include "cfgec/rng.hpp"
#include "cfgec/schedule.hpp"
#include "cfgec/vec.hpp"

namespace cfgec {

/// Class-labeled Gaussian mixture with diagonal covariances. Defines the
/// ground-truth conditional (per component) and unconditional densities.
struct GaussianMixture {
    int dim = 0;
    std::vector<double> weights;    // K entries, nonnegative, sum 1
    std::vector<Vec> means;         // K vectors of length dim
    std::vector<Vec> variances;     // K diagonal covariance vectors, entries > 0

    int num_classes() const { return static_cast<int>(weights.size()); }
    void validate() const;

    double log_density(const Vec& x) const;
    double component_log_density(int k, const Vec& x) const;
    /// d/dx log p(x), with log-sum-exp-stabilized responsibilities.
    Vec score(const Vec& x) const;
    Vec component_score(int k, const Vec& x) const;

    Vec sample_component(int k, RngStream& rng) const;
    Vec sample(RngStream& rng) const;
};

/// Diffused mixture at timestep t: means scaled by sqrt(abar), per-class
/// covariance abar*Sigma_k + (1-abar)*I, weights unchanged.
GaussianMixture marginal_at_t(const GaussianMixture& mixture, int t,
                              const NoiseSchedule& schedule);

/// Bayes posterior p(y | x0) under the t=0 mixture.
std::vector<double> posterior_class_prob(const Vec& x0, const GaussianMixture& mixture);

/// 3 classes at 120 degrees on a radius-4 circle, d=2, variances 0.3.
GaussianMixture default_three_class_mixture();

}  // namespace cfgec

#endif
