#include "cfgec/guidance.hpp"

#include <algorithm>
#include <cmath>

#include "cfgec/errors.hpp"

namespace cfgec {

void GuidanceConfig::validate() const {
    if (!std::isfinite(w)) throw ConfigError("guidance: w must be finite");
    if (!(tau > -1.0 && tau <= 1.0)) throw ConfigError("guidance: tau must be in (-1, 1]");
    if (!(eps_norm > 0.0)) throw ConfigError("guidance: eps_norm must be > 0");
}

Vec cfg_combine(const Vec& eps_uc, const Vec& eps_c, double w) {
    check_same_dim(eps_uc, eps_c);
    if (w == 1.0) return eps_c;
    if (w == 0.0) return eps_uc;
    Vec r(eps_uc.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        r[i] = eps_uc[i] + w * (eps_c[i] - eps_uc[i]);
    }
    return r;
}

Vec extrapolate_next(const Vec& curr, const Vec& prev) {
    check_same_dim(curr, prev);
    Vec r(curr.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = 2.0 * curr[i] - prev[i];
    return r;
}

CorrectionOutcome correct_unconditional(const Vec& eps_c, const Vec& eps_uc,
                                        const CorrectionState& state,
                                        const GuidanceConfig& cfg) {
    check_same_dim(eps_c, eps_uc);
    CorrectionOutcome out;
    out.eps_uc_out = eps_uc;
    if (!state.has_previous()) return out;

    Vec ext_c = extrapolate_next(eps_c, *state.prev_c);
    Vec ext_uc = extrapolate_next(eps_uc, *state.prev_uc);
    Vec A = sub(eps_c, ext_c);    // = prev_c - eps_c
    Vec B = sub(eps_uc, ext_uc);  // = prev_uc - eps_uc
    out.A = A;
    out.B = B;

    auto s_opt = cosine_similarity(A, B, cfg.eps_norm);
    if (!s_opt) return out;  // degenerate proxy, skip this step
    double s = *s_opt;
    out.s_before = s;
    out.s_after = s;  // unchanged output until a correction is applied

    if (cfg.mode == GuidanceMode::EcDynamic && s >= cfg.tau) return out;

    Vec B_perp = *gram_schmidt_reject(A, B, cfg.eps_norm);
    Vec eps_mod = add(B_perp, ext_uc);
    if (cfg.mode == GuidanceMode::EcFull) {
        out.eps_uc_out = eps_mod;
    } else {
        double sp = cfg.clamp_s ? std::max(s, 0.0) : s;
        out.eps_uc_out = add(scale(eps_mod, 1.0 - sp), scale(eps_uc, sp));
    }
    out.applied = true;
    auto after = cosine_similarity(sub(out.eps_uc_out, ext_uc), A, cfg.eps_norm);
    out.s_after = after ? *after : 0.0;
    return out;
}

CorrectionState update_state(const CorrectionState&, const Vec& eps_c_original,
                             const Vec& eps_uc_original) {
    CorrectionState next;
    next.prev_c = eps_c_original;
    next.prev_uc = eps_uc_original;
    return next;
}

}  // namespace cfgec
