#include "cfgec/solvers.hpp"

#include <cmath>
#include <stdexcept>

#include "cfgec/errors.hpp"

namespace cfgec {

void SamplerSpec::validate(int schedule_T) const {
    if (nfe < 2 || nfe > schedule_T) throw ConfigError("sampler: need 2 <= nfe <= T");
    if (eta < 0.0) throw ConfigError("sampler: eta must be >= 0");
}

namespace {
void check_grid_pair(int t, int t_prev, const NoiseSchedule& schedule) {
    if (!(t_prev >= 0 && t_prev < t && t <= schedule.T)) {
        throw std::invalid_argument("sampler step: need 0 <= t_prev < t <= T");
    }
}

// lambda = log(alpha/sigma) in the sqrt(abar)/sqrt(1-abar) parameterization
double log_snr(double alpha_bar) {
    return 0.5 * std::log(alpha_bar / (1.0 - alpha_bar));
}
}  // namespace

Vec ddim_step(const Vec& x_t, const Vec& eps_pred, const Vec& eps_renoise, int t, int t_prev,
              const NoiseSchedule& schedule, double eta, RngStream* rng) {
    check_grid_pair(t, t_prev, schedule);
    check_same_dim(x_t, eps_pred);
    check_same_dim(x_t, eps_renoise);
    double ab_t = schedule.alpha_bar_at(t);
    double ab_p = schedule.alpha_bar_at(t_prev);

    double sigma = 0.0;
    if (eta > 0.0 && t_prev > 0) {
        sigma = eta * std::sqrt((1.0 - ab_p) / (1.0 - ab_t)) * std::sqrt(1.0 - ab_t / ab_p);
    }
    double coef_renoise = std::sqrt(std::max(0.0, 1.0 - ab_p - sigma * sigma));
    double sa_t = std::sqrt(ab_t), sb_t = std::sqrt(1.0 - ab_t), sa_p = std::sqrt(ab_p);

    Vec x(x_t.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        double x0 = (x_t[i] - sb_t * eps_pred[i]) / sa_t;
        x[i] = sa_p * x0 + coef_renoise * eps_renoise[i];
    }
    if (sigma > 0.0) {
        if (rng == nullptr) throw std::invalid_argument("ddim_step: eta > 0 needs an rng");
        for (auto& xi : x) xi += sigma * rng->normal();
    }
    return x;
}

const Vec& renoise_selector(const GuidanceConfig& guidance, const Vec& eps_pred,
                            const Vec& eps_uc_corrected) {
    return guidance.renoise == RenoiseMode::CfgPP ? eps_uc_corrected : eps_pred;
}

Vec dpmpp2m_step(const Vec& x_t, const Vec& eps_pred, Dpmpp2mHistory& history, int t, int t_prev,
                 const NoiseSchedule& schedule) {
    check_grid_pair(t, t_prev, schedule);
    check_same_dim(x_t, eps_pred);
    double ab_t = schedule.alpha_bar_at(t);
    double ab_p = schedule.alpha_bar_at(t_prev);
    double sa_t = std::sqrt(ab_t), sb_t = std::sqrt(1.0 - ab_t);
    double lambda_t = log_snr(ab_t);

    Vec x0_t(x_t.size());
    for (std::size_t i = 0; i < x0_t.size(); ++i) x0_t[i] = (x_t[i] - sb_t * eps_pred[i]) / sa_t;

    Vec data = x0_t;
    if (history.prev_x0 && t_prev > 0) {
        double h = log_snr(ab_p) - lambda_t;
        double h_prev = lambda_t - history.prev_lambda;
        double r = h_prev / h;
        double c = 1.0 / (2.0 * r);
        data = add(scale(x0_t, 1.0 + c), scale(*history.prev_x0, -c));
    } else if (history.prev_x0) {
        // terminal step: the exact update collapses onto the data prediction,
        // still extrapolated with the previous point
        double h_prev = lambda_t - history.prev_lambda;
        if (h_prev > 0.0) {
            // h -> infinity, so the 2M correction vanishes; keep first order
            data = x0_t;
        }
    }

    Vec x(x_t.size());
    if (t_prev == 0) {
        x = data;
    } else {
        double ab_prev = ab_p;
        double sa_p = std::sqrt(ab_prev), sb_p = std::sqrt(1.0 - ab_prev);
        double h = log_snr(ab_prev) - lambda_t;
        double ratio = sb_p / sb_t;
        double coef = sa_p * (std::exp(-h) - 1.0);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = ratio * x_t[i] - coef * data[i];
    }
    history.prev_x0 = x0_t;
    history.prev_lambda = lambda_t;
    return x;
}

TrajectoryResult sample_trajectory(const TrajectoryRequest& request,
                                   const NoisePredictor& predictor) {
    const NoiseSchedule& schedule = predictor.schedule();
    request.guidance.validate();
    request.sampler.validate(schedule.T);
    if (request.y < 0 || request.y >= predictor.mixture().num_classes()) {
        throw std::invalid_argument("trajectory: bad class index");
    }

    RngStream rng(request.seed, request.stream_id);
    std::vector<int> grid = uniform_stride_grid(schedule.T, request.sampler.nfe);
    grid.push_back(0);

    TrajectoryResult res;
    Vec x = rng.normal_vec(static_cast<std::size_t>(predictor.dim()));
    res.record.x_init = x;

    CorrectionState state;
    Dpmpp2mHistory history;
    const double w = request.guidance.w;

    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        int t = grid[i], t_next = grid[i + 1];
        Vec eps_c = predictor.predict(x, t, request.y);
        Vec eps_uc = predictor.predict(x, t, std::nullopt);

        StepRecord step;
        step.t = t;
        step.t_next = t_next;

        const Vec* eps_uc_used = &eps_uc;
        CorrectionOutcome outcome;
        if (request.guidance.mode != GuidanceMode::Cfg) {
            outcome = correct_unconditional(eps_c, eps_uc, state, request.guidance);
            eps_uc_used = &outcome.eps_uc_out;
            step.applied = outcome.applied;
            step.s_before = outcome.s_before;
            step.s_after = outcome.s_after;
            if (outcome.A) step.norm_A = norm(*outcome.A);
            if (outcome.B) step.norm_B = norm(*outcome.B);
        }

        if (request.record_detail) {
            step.breakdown = decompose(predictor, x, t, request.y, std::nullopt, w,
                                       request.dropout_p);
            if (request.guidance.mode != GuidanceMode::Cfg) {
                step.breakdown_corrected = decompose(predictor, x, t, request.y, *eps_uc_used,
                                                     w, request.dropout_p);
            }
        }

        Vec eps_pred = cfg_combine(*eps_uc_used, eps_c, w);
        const Vec& eps_renoise = renoise_selector(request.guidance, eps_pred, *eps_uc_used);

        if (request.sampler.kind == SamplerKind::Ddim) {
            x = ddim_step(x, eps_pred, eps_renoise, t, t_next, schedule, request.sampler.eta,
                          &rng);
        } else {
            x = dpmpp2m_step(x, eps_pred, history, t, t_next, schedule);
        }
        state = update_state(state, eps_c, eps_uc);

        res.record.steps.push_back(std::move(step));
        if (!all_finite(x)) {
            res.record.diverged = true;
            break;
        }
    }

    res.record.x_final = x;
    res.x0 = x;
    return res;
}

}  // namespace cfgec
