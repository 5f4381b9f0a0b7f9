#include "cfgec/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <thread>

#include "cfgec/analysis.hpp"

namespace cfgec {

namespace {

int resolve_threads(const RunConfig& config) {
    if (config.run.threads > 0) return config.run.threads;
    if (const char* env = std::getenv("CFGEC_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

struct TrajStats {
    bool diverged = false;
    Vec terminal;
    std::vector<double> e_sample;      // corrected, per step
    std::vector<double> e_sample_raw;  // raw predictions, per step
    std::vector<double> abs_inner;
    std::vector<bool> applied;
};

TrajStats run_one(const RunConfig& config, GuidanceMode mode, double w, int index,
                  const NoisePredictor& predictor) {
    TrajectoryRequest req;
    req.y = config.run.class_y;
    req.guidance = config.guidance;
    req.guidance.mode = mode;
    req.guidance.w = w;
    req.sampler = config.sampler;
    req.seed = config.run.base_seed;
    req.stream_id = static_cast<std::uint64_t>(index);
    req.record_detail = true;
    req.dropout_p = config.run.dropout_p;

    TrajectoryResult res = sample_trajectory(req, predictor);
    TrajStats st;
    st.diverged = res.record.diverged;
    st.terminal = res.x0;
    for (const auto& step : res.record.steps) {
        const ErrorBreakdown& raw = *step.breakdown;
        const ErrorBreakdown& eff = step.breakdown_corrected ? *step.breakdown_corrected : raw;
        st.e_sample.push_back(eff.e_sample);
        st.e_sample_raw.push_back(raw.e_sample);
        st.abs_inner.push_back(std::abs(raw.inner));
        st.applied.push_back(step.applied);
    }
    return st;
}

}  // namespace

MethodResult run_method(const RunConfig& config, GuidanceMode mode, double w) {
    NoisePredictor predictor(config.mixture,
                             make_linear_schedule(config.schedule.T, config.schedule.beta_min,
                                                  config.schedule.beta_max),
                             config.perturbation);
    const int n = config.run.trajectories;
    std::vector<TrajStats> stats(n);

    int threads = config.run.sequential_reduction ? 1 : resolve_threads(config);
    if (threads <= 1) {
        for (int i = 0; i < n; ++i) stats[i] = run_one(config, mode, w, i, predictor);
    } else {
        std::vector<std::thread> pool;
        for (int tid = 0; tid < threads; ++tid) {
            pool.emplace_back([&, tid]() {
                for (int i = tid; i < n; i += threads) {
                    stats[i] = run_one(config, mode, w, i, predictor);
                }
            });
        }
        for (auto& th : pool) th.join();
    }

    MethodResult out;
    out.method = mode_name(mode);
    out.w = w;

    const int nfe = config.sampler.nfe;
    out.per_step_e_sample.assign(nfe, 0.0);
    std::vector<int> per_step_count(nfe, 0);
    double sum_e = 0.0, sum_e_raw = 0.0, sum_inner = 0.0;
    long long count = 0;
    int diverged = 0;
    for (const auto& st : stats) {  // sequential, order-fixed reduction
        if (st.diverged) {
            ++diverged;
            continue;
        }
        out.terminal_samples.push_back(st.terminal);
        for (std::size_t s = 0; s < st.e_sample.size(); ++s) {
            out.per_step_e_sample[s] += st.e_sample[s];
            ++per_step_count[s];
            sum_e += st.e_sample[s];
            sum_e_raw += st.e_sample_raw[s];
            sum_inner += st.abs_inner[s];
            ++count;
        }
    }
    for (int s = 0; s < nfe; ++s) {
        if (per_step_count[s] > 0) out.per_step_e_sample[s] /= per_step_count[s];
    }
    if (count > 0) {
        out.mean_e_sample = sum_e / count;
        out.mean_e_sample_raw = sum_e_raw / count;
        out.mean_abs_inner = sum_inner / count;
        out.mean_abs_inner_term = std::abs(2.0 * w * (1.0 - w)) * out.mean_abs_inner;
    }
    out.quality.diverged_fraction = static_cast<double>(diverged) / n;

    if (!out.terminal_samples.empty()) {
        out.quality.alignment = alignment_score(out.terminal_samples, config.mixture,
                                                config.run.class_y);
        RngStream ref_rng(config.run.base_seed, 0x7ef7efULL);
        std::vector<Vec> reference;
        reference.reserve(out.terminal_samples.size());
        for (std::size_t i = 0; i < out.terminal_samples.size(); ++i) {
            reference.push_back(config.mixture.sample_component(config.run.class_y, ref_rng));
        }
        out.quality.energy_distance = energy_distance(out.terminal_samples, reference);
    }
    return out;
}

SampleSummary run_sample(const RunConfig& config) {
    SampleSummary summary;
    for (const auto& m : config.run.methods) {
        summary.methods.push_back(run_method(config, parse_mode(m), config.guidance.w));
    }
    return summary;
}

BoundsAudit run_bounds(const RunConfig& config) {
    const BoundsSection& b = config.bounds;
    RngStream rng(b.seed, 0);
    BoundsAudit audit;
    audit.tuples = b.tuples;
    double sum_tg = 0.0, sum_to = 0.0;
    for (int i = 0; i < b.tuples; ++i) {
        int d = b.dims[static_cast<std::size_t>(i) % b.dims.size()];
        BoundInput in;
        in.w = b.w_min + (b.w_max - b.w_min) * rng.uniform();
        in.p = b.p_min + (b.p_max - b.p_min) * rng.uniform();
        in.eps_uc_p.resize(d);
        in.eps_c_p.resize(d);
        for (auto& x : in.eps_uc_p) x = 20.0 * rng.uniform() - 10.0;
        for (auto& x : in.eps_c_p) x = 20.0 * rng.uniform() - 10.0;

        double es = sampling_error(in);
        double bg = bound_general(in);
        if (es > bg * (1.0 + 1e-9)) ++audit.violations_general;
        double tg = bg > 0.0 ? es / bg : 0.0;
        sum_tg += tg;
        if (tg > audit.max_tightness_general) audit.max_tightness_general = tg;

        // orthogonalized variant of the same tuple
        BoundInput orth = in;
        orth.eps_uc_p = *gram_schmidt_reject(in.eps_c_p, in.eps_uc_p, 0.0);
        double es_o = sampling_error(orth);
        double bg_o = bound_general(orth);
        auto bo = bound_orthogonal(orth);
        if (!bo) {
            ++audit.violations_orthogonal;
            continue;
        }
        if (es_o > *bo * (1.0 + 1e-9)) ++audit.violations_orthogonal;
        if (*bo > bg_o * (1.0 + 1e-9)) ++audit.violations_ordering;
        double to = *bo > 0.0 ? es_o / *bo : 0.0;
        sum_to += to;
        if (to > audit.max_tightness_orthogonal) audit.max_tightness_orthogonal = to;
    }
    audit.mean_tightness_general = sum_tg / b.tuples;
    audit.mean_tightness_orthogonal = sum_to / b.tuples;
    return audit;
}

TrajectoryRecord run_single_trajectory(const RunConfig& config) {
    NoisePredictor predictor(config.mixture,
                             make_linear_schedule(config.schedule.T, config.schedule.beta_min,
                                                  config.schedule.beta_max),
                             config.perturbation);
    TrajectoryRequest req;
    req.y = config.run.class_y;
    req.guidance = config.guidance;
    req.sampler = config.sampler;
    req.seed = config.run.base_seed;
    req.stream_id = 0;
    req.record_detail = true;
    req.dropout_p = config.run.dropout_p;
    return sample_trajectory(req, predictor).record;
}

std::vector<SweepRow> run_sweep(const RunConfig& config) {
    std::vector<SweepRow> rows;
    for (const auto& m : config.run.methods) {
        GuidanceMode mode = parse_mode(m);
        for (double w : config.sweep.w_grid) {
            SweepRow row;
            row.method = m;
            row.w = w;
            row.result = run_method(config, mode, w);
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

namespace {
nlohmann::json quality_to_json(const MethodResult& r) {
    return {{"method", r.method},
            {"w", r.w},
            {"energy_distance", r.quality.energy_distance},
            {"alignment", r.quality.alignment},
            {"diverged_fraction", r.quality.diverged_fraction},
            {"mean_e_sample", r.mean_e_sample},
            {"mean_e_sample_raw", r.mean_e_sample_raw},
            {"mean_abs_inner", r.mean_abs_inner},
            {"mean_abs_inner_term", r.mean_abs_inner_term}};
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void write_csv_preamble(std::ofstream& out, const RunConfig& config) {
    out << "# format_version " << kFormatVersion << "\n";
    out << "# config " << config.to_json().dump() << "\n";
}
}  // namespace

nlohmann::json summary_to_json(const SampleSummary& summary, const RunConfig& config) {
    nlohmann::json j;
    j["format_version"] = kFormatVersion;
    j["config"] = config.to_json();
    j["methods"] = nlohmann::json::array();
    for (const auto& r : summary.methods) j["methods"].push_back(quality_to_json(r));
    return j;
}

nlohmann::json bounds_to_json(const BoundsAudit& audit, const RunConfig& config) {
    nlohmann::json j;
    j["format_version"] = kFormatVersion;
    j["config"] = config.to_json();
    j["tuples"] = audit.tuples;
    j["violations_general"] = audit.violations_general;
    j["violations_orthogonal"] = audit.violations_orthogonal;
    j["violations_ordering"] = audit.violations_ordering;
    j["max_tightness_general"] = audit.max_tightness_general;
    j["max_tightness_orthogonal"] = audit.max_tightness_orthogonal;
    j["mean_tightness_general"] = audit.mean_tightness_general;
    j["mean_tightness_orthogonal"] = audit.mean_tightness_orthogonal;
    j["ok"] = audit.ok();
    return j;
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file: " + path);
    out << j.dump(2) << "\n";
}

void write_trajectory_csv(const std::string& path, const TrajectoryRecord& record,
                          const RunConfig& config) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file: " + path);
    write_csv_preamble(out, config);
    out << "t,s_before,s_after,norm_A,norm_B,applied\n";
    for (const auto& s : record.steps) {
        out << s.t << ',';
        out << (s.s_before ? fmt(*s.s_before) : "") << ',';
        out << (s.s_after ? fmt(*s.s_after) : "") << ',';
        out << (s.norm_A ? fmt(*s.norm_A) : "") << ',';
        out << (s.norm_B ? fmt(*s.norm_B) : "") << ',';
        out << (s.applied ? 1 : 0) << '\n';
    }
}

void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows,
                     const RunConfig& config) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file: " + path);
    write_csv_preamble(out, config);
    out << "method,w,energy_distance,alignment,diverged_fraction,"
           "mean_e_sample,mean_e_sample_raw,mean_abs_inner,mean_abs_inner_term\n";
    for (const auto& row : rows) {
        const MethodResult& r = row.result;
        out << row.method << ',' << fmt(row.w) << ',' << fmt(r.quality.energy_distance) << ','
            << fmt(r.quality.alignment) << ',' << fmt(r.quality.diverged_fraction) << ','
            << fmt(r.mean_e_sample) << ',' << fmt(r.mean_e_sample_raw) << ','
            << fmt(r.mean_abs_inner) << ',' << fmt(r.mean_abs_inner_term) << '\n';
    }
}

}  // namespace cfgec
