#ifndef CFGEC_ANALYSIS_HPP
#define CFGEC_ANALYSIS_HPP

#include <optional>
#include <vector>

#include "cfgec/mixture.hpp"
#include "cfgec/oracle.hpp"
#include "cfgec/rng.hpp"
#include "cfgec/vec.hpp"

namespace cfgec {

/// Error vectors of the two guidance branches plus the scale/dropout
/// parameters that enter the sampling-error bounds.
struct BoundInput {
    Vec eps_uc_p;
    Vec eps_c_p;
    double w = 0.0;
    double p = 0.5;  // conditioning-dropout probability, strictly in (0,1)

    void validate() const;
};

constexpr double kOrthoTol = 1e-9;

struct ErrorBreakdown {
    double e_uc = 0.0;     // ||eps_uc_p||^2
    double e_c = 0.0;      // ||eps_c_p||^2
    double inner = 0.0;    // <eps_uc_p, eps_c_p>
    double e_sample = 0.0;
    double e_train = 0.0;
    double bound_general = 0.0;
    std::optional<double> bound_orthogonal;
};

/// p * ||eps_uc_p||^2 + (1-p) * ||eps_c_p||^2
double training_error(const BoundInput& in);

/// ||(1-w) eps_uc_p + w eps_c_p||^2
double sampling_error(const BoundInput& in);

/// ((1-w)^2 + w^2) / min(p, 1-p) * training_error
double bound_general(const BoundInput& in);

/// max((1-w)^2, w^2) / min(p, 1-p) * training_error; empty unless the error
/// vectors are orthogonal within kOrthoTol (relative).
std::optional<double> bound_orthogonal(const BoundInput& in);

/// Measures both branch errors against the oracle at a probe point,
/// substituting corrected_uc for the raw unconditional prediction when given.
ErrorBreakdown decompose(const NoisePredictor& predictor, const Vec& x_t, int t, int y,
                         const std::optional<Vec>& corrected_uc, double w, double p);

/// Two-sample energy distance 2 E||X-Y|| - E||X-X'|| - E||Y-Y'||.
double energy_distance(const std::vector<Vec>& xs, const std::vector<Vec>& ys);

/// 95th-percentile (by default) of the permutation null for the energy
/// distance between two equal-role halves of the pooled samples.
double energy_distance_permutation_quantile(const std::vector<Vec>& xs,
                                            const std::vector<Vec>& ys, RngStream& rng,
                                            int permutations = 200, double quantile = 0.95);

/// Mean posterior probability of class y over the samples.
double alignment_score(const std::vector<Vec>& samples, const GaussianMixture& mixture, int y);

}  // namespace cfgec

#endif
