#ifndef CFGEC_SCHEDULE_HPP
#define CFGEC_SCHEDULE_HPP

#include <vector>

#include "cfgec/vec.hpp"

namespace cfgec {

/// Variance schedule {alpha_t} with cumulative products {alpha_bar_t},
/// indexed 1..T. t = 0 is the clean-data endpoint (alpha_bar = 1).
struct NoiseSchedule {
    int T = 0;
    std::vector<double> alphas;      // alphas[t-1] = alpha_t
    std::vector<double> alpha_bars;  // alpha_bars[t-1] = prod_{s<=t} alpha_s
    std::vector<int> timestep_grid;  // descending sampling times, subset of 1..T

    double alpha_bar_at(int t) const;  // t in 0..T
};

NoiseSchedule make_linear_schedule(int T, double beta_min, double beta_max);

/// Uniform-stride subsample of 1..T with nfe entries, descending from T.
std::vector<int> uniform_stride_grid(int T, int nfe);

/// sqrt(abar_t) * x0 + sqrt(1 - abar_t) * eps
Vec forward_sample(const Vec& x0, int t, const Vec& eps, const NoiseSchedule& schedule);

}  // namespace cfgec

#endif
