#include "cfgec/schedule.hpp"

#include <cmath>
#include <stdexcept>

#include "cfgec/errors.hpp"

namespace cfgec {

double NoiseSchedule::alpha_bar_at(int t) const {
    if (t < 0 || t > T) throw std::invalid_argument("timestep out of range");
    return t == 0 ? 1.0 : alpha_bars[static_cast<std::size_t>(t) - 1];
}

NoiseSchedule make_linear_schedule(int T, double beta_min, double beta_max) {
    if (T < 2) throw ConfigError("schedule: T must be >= 2");
    if (!(beta_min > 0.0 && beta_min <= beta_max && beta_max < 1.0)) {
        throw ConfigError("schedule: need 0 < beta_min <= beta_max < 1");
    }
    NoiseSchedule s;
    s.T = T;
    s.alphas.resize(T);
    s.alpha_bars.resize(T);
    double prod = 1.0;
    for (int t = 0; t < T; ++t) {
        double beta = beta_min + (beta_max - beta_min) * t / (T - 1);
        s.alphas[t] = 1.0 - beta;
        prod *= s.alphas[t];
        s.alpha_bars[t] = prod;
    }
    s.timestep_grid.resize(T);
    for (int t = 0; t < T; ++t) s.timestep_grid[t] = T - t;
    return s;
}

std::vector<int> uniform_stride_grid(int T, int nfe) {
    if (nfe < 2 || nfe > T) throw ConfigError("grid: need 2 <= nfe <= T");
    std::vector<int> grid(nfe);
    for (int i = 0; i < nfe; ++i) {
        grid[i] = static_cast<int>(std::lround(static_cast<double>(T) * (nfe - i) / nfe));
        if (grid[i] < 1) grid[i] = 1;
    }
    return grid;
}

Vec forward_sample(const Vec& x0, int t, const Vec& eps, const NoiseSchedule& schedule) {
    check_same_dim(x0, eps);
    if (t < 1 || t > schedule.T) throw std::invalid_argument("forward_sample: bad timestep");
    double ab = schedule.alpha_bar_at(t);
    Vec r(x0.size());
    double a = std::sqrt(ab), b = std::sqrt(1.0 - ab);
    for (std::size_t i = 0; i < x0.size(); ++i) r[i] = a * x0[i] + b * eps[i];
    return r;
}

}  // namespace cfgec
