#ifndef CFGEC_ORACLE_HPP
#define CFGEC_ORACLE_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "cfgec/mixture.hpp"
#include "cfgec/schedule.hpp"
#include "cfgec/vec.hpp"

namespace cfgec {

enum class PerturbationKind { SmoothField, White };

/// Controllable prediction-error layer: turns the exact noise oracle into a
/// simulated trained model with per-branch error magnitudes and a tunable
/// cross-branch error correlation rho.
struct PerturbationSpec {
    double sigma_uc = 0.0;
    double sigma_c = 0.0;
    double rho = 0.0;  // in [-1, 1]; shared-field fraction of the error
    std::uint64_t field_seed = 0;
    PerturbationKind kind = PerturbationKind::SmoothField;

    void validate() const;
};

/// Fixed affine field F(x, t) = W x + u * (t/T) + b, the smooth error shape.
struct AffineField {
    std::vector<Vec> rows;  // W, d x d
    Vec u;
    Vec b;

    Vec eval(const Vec& x, double t_frac) const;
};

/// Oracle noise functions over a Gaussian mixture plus the perturbation
/// layer. predict() = oracle + error; the oracle itself stays accessible so
/// true error vectors are measurable at every step.
class NoisePredictor {
public:
    NoisePredictor(GaussianMixture mixture, NoiseSchedule schedule,
                   PerturbationSpec perturbation);

    const GaussianMixture& mixture() const { return mixture_; }
    const NoiseSchedule& schedule() const { return schedule_; }
    const PerturbationSpec& perturbation() const { return perturbation_; }
    int dim() const { return mixture_.dim; }

    /// eps*(x_t | y) = -sqrt(1-abar_t) * score of the class-y marginal at t.
    Vec true_cond_noise(const Vec& x_t, int t, int y) const;
    /// eps*(x_t) from the full time-t marginal mixture.
    Vec true_uncond_noise(const Vec& x_t, int t) const;
    /// Oracle plus deterministic perturbation; y absent = unconditional branch.
    Vec predict(const Vec& x_t, int t, std::optional<int> y) const;

    /// The error added by predict() at this point (predict - oracle).
    Vec perturbation_error(const Vec& x_t, int t, std::optional<int> y) const;

private:
    Vec field_value(const Vec& x_t, int t, int branch) const;  // branch 0 = shared

    GaussianMixture mixture_;
    NoiseSchedule schedule_;
    PerturbationSpec perturbation_;
    std::vector<AffineField> fields_;  // [0]=shared, [1]=uncond, [2..K+1]=classes
};

}  // namespace cfgec

#endif
