#include "cfgec/oracle.hpp"

#include <cmath>
#include <stdexcept>

#include "cfgec/errors.hpp"
#include "cfgec/rng.hpp"

namespace cfgec {

namespace {
// Field amplitude scales. Strong x- and t-dependence keeps the time-step
// difference proxy informative about the engineered error.
constexpr double kLinearScale = 2.0;
constexpr double kTimeScale = 3.0;
constexpr double kOffsetScale = 1.0;

AffineField make_field(int dim, std::uint64_t field_seed, std::uint64_t branch_tag) {
    RngStream rng(field_seed, hash_combine(0x5eedf1e1dULL, branch_tag));
    AffineField f;
    f.rows.resize(dim);
    double w = kLinearScale / std::sqrt(static_cast<double>(dim));
    for (int i = 0; i < dim; ++i) {
        f.rows[i].resize(dim);
        for (int j = 0; j < dim; ++j) f.rows[i][j] = w * rng.normal();
    }
    f.u.resize(dim);
    for (int i = 0; i < dim; ++i) f.u[i] = kTimeScale * rng.normal();
    f.b.resize(dim);
    for (int i = 0; i < dim; ++i) f.b[i] = kOffsetScale * rng.normal();
    return f;
}
}  // namespace

void PerturbationSpec::validate() const {
    if (sigma_uc < 0.0 || sigma_c < 0.0) throw ConfigError("perturbation: sigma must be >= 0");
    if (rho < -1.0 || rho > 1.0) throw ConfigError("perturbation: rho must be in [-1, 1]");
}

Vec AffineField::eval(const Vec& x, double t_frac) const {
    Vec r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        double s = u[i] * t_frac + b[i];
        for (std::size_t j = 0; j < x.size(); ++j) s += rows[i][j] * x[j];
        r[i] = s;
    }
    return r;
}

NoisePredictor::NoisePredictor(GaussianMixture mixture, NoiseSchedule schedule,
                               PerturbationSpec perturbation)
    : mixture_(std::move(mixture)),
      schedule_(std::move(schedule)),
      perturbation_(perturbation) {
    mixture_.validate();
    perturbation_.validate();
    if (perturbation_.kind == PerturbationKind::SmoothField) {
        const int K = mixture_.num_classes();
        fields_.reserve(K + 2);
        for (int b = 0; b < K + 2; ++b) {
            fields_.push_back(make_field(mixture_.dim, perturbation_.field_seed,
                                         static_cast<std::uint64_t>(b)));
        }
    }
}

Vec NoisePredictor::true_cond_noise(const Vec& x_t, int t, int y) const {
    if (y < 0 || y >= mixture_.num_classes()) throw std::invalid_argument("bad class index");
    double ab = schedule_.alpha_bar_at(t);
    GaussianMixture m = marginal_at_t(mixture_, t, schedule_);
    return scale(m.component_score(y, x_t), -std::sqrt(1.0 - ab));
}

Vec NoisePredictor::true_uncond_noise(const Vec& x_t, int t) const {
    double ab = schedule_.alpha_bar_at(t);
    GaussianMixture m = marginal_at_t(mixture_, t, schedule_);
    return scale(m.score(x_t), -std::sqrt(1.0 - ab));
}

Vec NoisePredictor::field_value(const Vec& x_t, int t, int branch) const {
    if (perturbation_.kind == PerturbationKind::SmoothField) {
        return fields_[branch].eval(x_t, static_cast<double>(t) / schedule_.T);
    }
    // white: counter-based draw keyed on (x bits, t, branch, field_seed)
    std::uint64_t key = mix64(perturbation_.field_seed);
    key = hash_combine(key, static_cast<std::uint64_t>(t));
    key = hash_combine(key, static_cast<std::uint64_t>(branch));
    for (double c : x_t) key = hash_combine(key, double_bits(c));
    Vec r(x_t.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = counter_normal(key, i);
    return r;
}

Vec NoisePredictor::perturbation_error(const Vec& x_t, int t, std::optional<int> y) const {
    double sigma = y ? perturbation_.sigma_c : perturbation_.sigma_uc;
    if (sigma == 0.0) return Vec(x_t.size(), 0.0);
    double rho = perturbation_.rho;
    // Negative rho anti-aligns the shared component on the conditional branch.
    double shared_coef = std::sqrt(std::abs(rho));
    if (rho < 0.0 && y) shared_coef = -shared_coef;
    double own_coef = std::sqrt(1.0 - std::abs(rho));
    int branch = y ? 2 + *y : 1;
    Vec shared = field_value(x_t, t, 0);
    Vec own = field_value(x_t, t, branch);
    Vec r(x_t.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        r[i] = sigma * (shared_coef * shared[i] + own_coef * own[i]);
    }
    return r;
}

Vec NoisePredictor::predict(const Vec& x_t, int t, std::optional<int> y) const {
    Vec oracle = y ? true_cond_noise(x_t, t, *y) : true_uncond_noise(x_t, t);
    double sigma = y ? perturbation_.sigma_c : perturbation_.sigma_uc;
    if (sigma == 0.0) return oracle;
    return add(oracle, perturbation_error(x_t, t, y));
}

}  // namespace cfgec
