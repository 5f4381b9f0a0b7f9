#ifndef CFGEC_EXPERIMENT_HPP
#define CFGEC_EXPERIMENT_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "cfgec/config.hpp"
#include "cfgec/solvers.hpp"

namespace cfgec {

struct QualityReport {
    double energy_distance = 0.0;
    double alignment = 0.0;
    double diverged_fraction = 0.0;
};

struct MethodResult {
    std::string method;
    double w = 0.0;
    QualityReport quality;
    double mean_e_sample = 0.0;       // corrected predictions, mean over steps
    double mean_e_sample_raw = 0.0;   // raw predictions
    double mean_abs_inner = 0.0;
    double mean_abs_inner_term = 0.0; // |2w(1-w) * inner|
    /// Per-grid-step mean e_sample (corrected), indexed by step position.
    std::vector<double> per_step_e_sample;
    std::vector<Vec> terminal_samples;  // non-diverged only
};

/// Runs run.trajectories trajectories of one method at one guidance scale.
/// Trajectory i uses stream_id i, so methods sharing a config are paired.
MethodResult run_method(const RunConfig& config, GuidanceMode mode, double w);

struct SampleSummary {
    std::vector<MethodResult> methods;
};

SampleSummary run_sample(const RunConfig& config);

struct BoundsAudit {
    long long tuples = 0;
    long long violations_general = 0;
    long long violations_orthogonal = 0;
    long long violations_ordering = 0;  // bound_orthogonal > bound_general
    double max_tightness_general = 0.0;    // max e_sample / bound
    double max_tightness_orthogonal = 0.0;
    double mean_tightness_general = 0.0;
    double mean_tightness_orthogonal = 0.0;

    bool ok() const {
        return violations_general == 0 && violations_orthogonal == 0 &&
               violations_ordering == 0;
    }
};

BoundsAudit run_bounds(const RunConfig& config);

/// Single detailed trajectory for per-step plotting.
TrajectoryRecord run_single_trajectory(const RunConfig& config);

struct SweepRow {
    std::string method;
    double w = 0.0;
    MethodResult result;
};

std::vector<SweepRow> run_sweep(const RunConfig& config);

// --- file emission (formats documented in the README) ---

nlohmann::json summary_to_json(const SampleSummary& summary, const RunConfig& config);
nlohmann::json bounds_to_json(const BoundsAudit& audit, const RunConfig& config);
void write_json_file(const std::string& path, const nlohmann::json& j);
void write_trajectory_csv(const std::string& path, const TrajectoryRecord& record,
                          const RunConfig& config);
void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows,
                     const RunConfig& config);

}  // namespace cfgec

#endif
