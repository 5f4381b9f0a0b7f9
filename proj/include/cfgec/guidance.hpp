#ifndef CFGEC_GUIDANCE_HPP
#define CFGEC_GUIDANCE_HPP

#include <optional>

#include "cfgec/vec.hpp"

namespace cfgec {

enum class GuidanceMode { Cfg, EcFull, EcDynamic };
enum class RenoiseMode { Standard, CfgPP };

struct GuidanceConfig {
    double w = 7.5;
    GuidanceMode mode = GuidanceMode::Cfg;
    RenoiseMode renoise = RenoiseMode::Standard;
    double tau = 0.8;          // dynamic-mode deactivation threshold
    bool clamp_s = false;      // clamp interpolation weight to [0, 1]
    double eps_norm = 1e-12;   // degenerate-norm guard

    void validate() const;
};

/// Previous-step ORIGINAL (pre-correction) predictions. Empty on the first
/// sampling step; the corrected value is never stored here.
struct CorrectionState {
    std::optional<Vec> prev_c;
    std::optional<Vec> prev_uc;

    bool has_previous() const { return prev_c.has_value() && prev_uc.has_value(); }
};

struct CorrectionOutcome {
    Vec eps_uc_out;
    bool applied = false;
    std::optional<double> s_before;
    std::optional<double> s_after;
    std::optional<Vec> A;  // conditional time-difference proxy
    std::optional<Vec> B;  // unconditional time-difference proxy
};

/// eps_uc + w * (eps_c - eps_uc). Exact at the degenerate scales: w=1
/// returns eps_c and w=0 returns eps_uc bitwise, so guided output is
/// independent of any unconditional correction at w=1.
Vec cfg_combine(const Vec& eps_uc, const Vec& eps_c, double w);

/// 2*curr - prev, the linear continuation of the last two predictions.
Vec extrapolate_next(const Vec& curr, const Vec& prev);

/// Gram-Schmidt correction of the unconditional prediction (full mode) or
/// its cosine-gated dynamic interpolation. No-op before the second step.
CorrectionOutcome correct_unconditional(const Vec& eps_c, const Vec& eps_uc,
                                        const CorrectionState& state,
                                        const GuidanceConfig& cfg);

/// Stores this step's pre-correction predictions for the next step.
CorrectionState update_state(const CorrectionState& state, const Vec& eps_c_original,
                             const Vec& eps_uc_original);

}  // namespace cfgec

#endif
