#ifndef CFGEC_SOLVERS_HPP
#define CFGEC_SOLVERS_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "cfgec/analysis.hpp"
#include "cfgec/guidance.hpp"
#include "cfgec/oracle.hpp"
#include "cfgec/schedule.hpp"
#include "cfgec/vec.hpp"

namespace cfgec {

enum class SamplerKind { Ddim, Dpmpp2m };

struct SamplerSpec {
    SamplerKind kind = SamplerKind::Ddim;
    int nfe = 50;
    double eta = 0.0;  // DDIM stochasticity; 0 = deterministic

    void validate(int schedule_T) const;
};

struct TrajectoryRequest {
    int y = 0;
    GuidanceConfig guidance;
    SamplerSpec sampler;
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;
    bool record_detail = false;
    double dropout_p = 0.1;  // only feeds the per-step error decomposition
};

struct StepRecord {
    int t = 0;
    int t_next = 0;
    bool applied = false;
    std::optional<double> s_before;
    std::optional<double> s_after;
    std::optional<double> norm_A;
    std::optional<double> norm_B;
    std::optional<ErrorBreakdown> breakdown;           // raw predictions
    std::optional<ErrorBreakdown> breakdown_corrected;  // with corrected uncond
};

struct TrajectoryRecord {
    Vec x_init;
    Vec x_final;
    bool diverged = false;
    std::vector<StepRecord> steps;
};

/// One reverse DDIM update t -> t_prev. eps_renoise re-adds the noise
/// (equal to eps_pred for standard renoising). rng is only consulted when
/// eta > 0.
Vec ddim_step(const Vec& x_t, const Vec& eps_pred, const Vec& eps_renoise, int t, int t_prev,
              const NoiseSchedule& schedule, double eta, RngStream* rng);

/// Picks the noise used for re-adding: the guided prediction (standard) or
/// the corrected unconditional prediction (CFG++-style).
const Vec& renoise_selector(const GuidanceConfig& guidance, const Vec& eps_pred,
                            const Vec& eps_uc_corrected);

struct Dpmpp2mHistory {
    std::optional<Vec> prev_x0;
    double prev_lambda = 0.0;
};

/// Second-order multistep update in data-prediction form under log-SNR
/// coordinates; falls back to the first-order update on an empty history.
Vec dpmpp2m_step(const Vec& x_t, const Vec& eps_pred, Dpmpp2mHistory& history, int t, int t_prev,
                 const NoiseSchedule& schedule);

struct TrajectoryResult {
    Vec x0;
    TrajectoryRecord record;
};

/// Full reverse loop: predictor pair -> correction -> CFG -> sampler step,
/// threading CorrectionState with the ORIGINAL predictions.
TrajectoryResult sample_trajectory(const TrajectoryRequest& request,
                                   const NoisePredictor& predictor);

}  // namespace cfgec

#endif
