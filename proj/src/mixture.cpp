#include "cfgec/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cfgec/errors.hpp"

namespace cfgec {

namespace {
constexpr double kLog2Pi = 1.8378770664093453;  // log(2*pi)
}

void GaussianMixture::validate() const {
    const auto K = weights.size();
    if (dim < 1) throw ConfigError("mixture: dim must be >= 1");
    if (K == 0 || means.size() != K || variances.size() != K) {
        throw ConfigError("mixture: weights/means/variances size mismatch");
    }
    double sum = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw ConfigError("mixture: negative weight");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw ConfigError("mixture: weights must sum to 1");
    for (const auto& m : means) {
        if (static_cast<int>(m.size()) != dim) throw ConfigError("mixture: mean dim mismatch");
    }
    for (const auto& v : variances) {
        if (static_cast<int>(v.size()) != dim) throw ConfigError("mixture: variance dim mismatch");
        for (double x : v) {
            if (!(x > 0.0)) throw ConfigError("mixture: covariance entries must be > 0");
        }
    }
}

double GaussianMixture::component_log_density(int k, const Vec& x) const {
    const Vec& m = means[k];
    const Vec& v = variances[k];
    double lp = 0.0;
    for (int i = 0; i < dim; ++i) {
        double d = x[i] - m[i];
        lp += -0.5 * (d * d / v[i] + std::log(v[i]) + kLog2Pi);
    }
    return lp;
}

double GaussianMixture::log_density(const Vec& x) const {
    const int K = num_classes();
    std::vector<double> lp(K);
    double mx = -1e300;
    for (int k = 0; k < K; ++k) {
        lp[k] = std::log(weights[k]) + component_log_density(k, x);
        mx = std::max(mx, lp[k]);
    }
    double s = 0.0;
    for (int k = 0; k < K; ++k) s += std::exp(lp[k] - mx);
    return mx + std::log(s);
}

Vec GaussianMixture::component_score(int k, const Vec& x) const {
    const Vec& m = means[k];
    const Vec& v = variances[k];
    Vec sc(dim);
    for (int i = 0; i < dim; ++i) sc[i] = -(x[i] - m[i]) / v[i];
    return sc;
}

Vec GaussianMixture::score(const Vec& x) const {
    const int K = num_classes();
    std::vector<double> lp(K);
    double mx = -1e300;
    for (int k = 0; k < K; ++k) {
        lp[k] = std::log(weights[k]) + component_log_density(k, x);
        mx = std::max(mx, lp[k]);
    }
    double z = 0.0;
    for (int k = 0; k < K; ++k) z += std::exp(lp[k] - mx);
    Vec sc(dim, 0.0);
    for (int k = 0; k < K; ++k) {
        double r = std::exp(lp[k] - mx) / z;
        Vec ck = component_score(k, x);
        for (int i = 0; i < dim; ++i) sc[i] += r * ck[i];
    }
    return sc;
}

Vec GaussianMixture::sample_component(int k, RngStream& rng) const {
    Vec x(dim);
    for (int i = 0; i < dim; ++i) x[i] = means[k][i] + std::sqrt(variances[k][i]) * rng.normal();
    return x;
}

Vec GaussianMixture::sample(RngStream& rng) const {
    double u = rng.uniform();
    double acc = 0.0;
    int k = 0;
    for (; k < num_classes() - 1; ++k) {
        acc += weights[k];
        if (u < acc) break;
    }
    return sample_component(k, rng);
}

GaussianMixture marginal_at_t(const GaussianMixture& mixture, int t,
                              const NoiseSchedule& schedule) {
    double ab = schedule.alpha_bar_at(t);
    GaussianMixture m = mixture;
    double sa = std::sqrt(ab);
    for (int k = 0; k < m.num_classes(); ++k) {
        for (int i = 0; i < m.dim; ++i) {
            m.means[k][i] *= sa;
            m.variances[k][i] = ab * mixture.variances[k][i] + (1.0 - ab);
        }
    }
    return m;
}

std::vector<double> posterior_class_prob(const Vec& x0, const GaussianMixture& mixture) {
    const int K = mixture.num_classes();
    std::vector<double> lp(K);
    double mx = -1e300;
    for (int k = 0; k < K; ++k) {
        lp[k] = std::log(mixture.weights[k]) + mixture.component_log_density(k, x0);
        mx = std::max(mx, lp[k]);
    }
    double z = 0.0;
    for (int k = 0; k < K; ++k) z += std::exp(lp[k] - mx);
    std::vector<double> post(K);
    for (int k = 0; k < K; ++k) post[k] = std::exp(lp[k] - mx) / z;
    return post;
}

GaussianMixture default_three_class_mixture() {
    GaussianMixture m;
    m.dim = 2;
    const double radius = 4.0;
    for (int k = 0; k < 3; ++k) {
        double ang = std::numbers::pi / 2 + 2.0 * std::numbers::pi * k / 3.0;
        m.weights.push_back(1.0 / 3.0);
        m.means.push_back({radius * std::cos(ang), radius * std::sin(ang)});
        m.variances.push_back({0.3, 0.3});
    }
    m.validate();
    return m;
}

}  // namespace cfgec
