#include "cfgec/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace cfgec {

void BoundInput::validate() const {
    check_same_dim(eps_uc_p, eps_c_p);
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("bound input: p must be in (0,1)");
    if (!std::isfinite(w)) throw std::invalid_argument("bound input: w must be finite");
}

double training_error(const BoundInput& in) {
    return in.p * dot(in.eps_uc_p, in.eps_uc_p) + (1.0 - in.p) * dot(in.eps_c_p, in.eps_c_p);
}

double sampling_error(const BoundInput& in) {
    Vec combined = add(scale(in.eps_uc_p, 1.0 - in.w), scale(in.eps_c_p, in.w));
    return dot(combined, combined);
}

double bound_general(const BoundInput& in) {
    double c2 = (1.0 - in.w) * (1.0 - in.w);
    double d2 = in.w * in.w;
    return (c2 + d2) / std::min(in.p, 1.0 - in.p) * training_error(in);
}

std::optional<double> bound_orthogonal(const BoundInput& in) {
    double e_uc = dot(in.eps_uc_p, in.eps_uc_p);
    double e_c = dot(in.eps_c_p, in.eps_c_p);
    double inner = dot(in.eps_uc_p, in.eps_c_p);
    if (std::abs(inner) > kOrthoTol * std::sqrt(e_uc * e_c)) return std::nullopt;
    double c2 = (1.0 - in.w) * (1.0 - in.w);
    double d2 = in.w * in.w;
    return std::max(c2, d2) / std::min(in.p, 1.0 - in.p) * training_error(in);
}

ErrorBreakdown decompose(const NoisePredictor& predictor, const Vec& x_t, int t, int y,
                         const std::optional<Vec>& corrected_uc, double w, double p) {
    Vec eps_uc = corrected_uc ? *corrected_uc : predictor.predict(x_t, t, std::nullopt);
    Vec eps_c = predictor.predict(x_t, t, y);
    BoundInput in;
    in.eps_uc_p = sub(eps_uc, predictor.true_uncond_noise(x_t, t));
    in.eps_c_p = sub(eps_c, predictor.true_cond_noise(x_t, t, y));
    in.w = w;
    in.p = p;
    ErrorBreakdown br;
    br.e_uc = dot(in.eps_uc_p, in.eps_uc_p);
    br.e_c = dot(in.eps_c_p, in.eps_c_p);
    br.inner = dot(in.eps_uc_p, in.eps_c_p);
    br.e_sample = sampling_error(in);
    br.e_train = training_error(in);
    br.bound_general = bound_general(in);
    br.bound_orthogonal = bound_orthogonal(in);
    return br;
}

namespace {
double euclidean(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

double energy_distance_indexed(const std::vector<Vec>& pool, const std::vector<int>& xi,
                               const std::vector<int>& yi) {
    const auto n = xi.size(), m = yi.size();
    double xy = 0.0, xx = 0.0, yy = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) xy += euclidean(pool[xi[i]], pool[yi[j]]);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) xx += euclidean(pool[xi[i]], pool[xi[j]]);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) yy += euclidean(pool[yi[i]], pool[yi[j]]);
    return 2.0 * xy / (double(n) * m) - xx / (double(n) * n) - yy / (double(m) * m);
}
}  // namespace

double energy_distance(const std::vector<Vec>& xs, const std::vector<Vec>& ys) {
    if (xs.empty() || ys.empty()) throw std::invalid_argument("energy_distance: empty sample set");
    std::vector<Vec> pool = xs;
    pool.insert(pool.end(), ys.begin(), ys.end());
    std::vector<int> xi(xs.size()), yi(ys.size());
    std::iota(xi.begin(), xi.end(), 0);
    std::iota(yi.begin(), yi.end(), static_cast<int>(xs.size()));
    return energy_distance_indexed(pool, xi, yi);
}

double energy_distance_permutation_quantile(const std::vector<Vec>& xs,
                                            const std::vector<Vec>& ys, RngStream& rng,
                                            int permutations, double quantile) {
    std::vector<Vec> pool = xs;
    pool.insert(pool.end(), ys.begin(), ys.end());
    const int n = static_cast<int>(xs.size());
    const int total = static_cast<int>(pool.size());
    std::vector<int> idx(total);
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<double> stats(permutations);
    for (int p = 0; p < permutations; ++p) {
        // Fisher-Yates with the stream's uniforms
        for (int i = total - 1; i > 0; --i) {
            int j = static_cast<int>(rng.uniform() * (i + 1));
            if (j > i) j = i;
            std::swap(idx[i], idx[j]);
        }
        std::vector<int> xi(idx.begin(), idx.begin() + n);
        std::vector<int> yi(idx.begin() + n, idx.end());
        stats[p] = energy_distance_indexed(pool, xi, yi);
    }
    std::sort(stats.begin(), stats.end());
    int k = static_cast<int>(std::ceil(quantile * permutations)) - 1;
    k = std::clamp(k, 0, permutations - 1);
    return stats[k];
}

double alignment_score(const std::vector<Vec>& samples, const GaussianMixture& mixture, int y) {
    if (samples.empty()) throw std::invalid_argument("alignment_score: no samples");
    double s = 0.0;
    for (const auto& x : samples) s += posterior_class_prob(x, mixture)[y];
    return s / static_cast<double>(samples.size());
}

}  // namespace cfgec
