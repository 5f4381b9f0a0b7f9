#ifndef CFGEC_CONFIG_HPP
#define CFGEC_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "cfgec/errors.hpp"
#include "cfgec/guidance.hpp"
#include "cfgec/mixture.hpp"
#include "cfgec/oracle.hpp"
#include "cfgec/solvers.hpp"

namespace cfgec {

constexpr int kFormatVersion = 1;

struct ScheduleConfig {
    int T = 1000;
    double beta_min = 1e-4;
    double beta_max = 0.02;
};

struct RunSection {
    int trajectories = 256;
    std::uint64_t base_seed = 7;
    int class_y = 0;
    bool record_detail = false;
    double dropout_p = 0.1;
    bool sequential_reduction = true;
    int threads = 0;  // 0 = CFGEC_THREADS env or hardware concurrency
    std::vector<std::string> methods = {"cfg", "cfg-ec-full", "cfg-ec-dynamic"};
};

struct SweepSection {
    std::vector<double> w_grid = {0.5, 2.5, 5.0, 7.5};
};

struct BoundsSection {
    int tuples = 100000;
    std::vector<int> dims = {2, 8, 64};
    double w_min = -2.0, w_max = 10.0;
    double p_min = 0.01, p_max = 0.99;
    std::uint64_t seed = 1;
};

struct RunConfig {
    GaussianMixture mixture = default_three_class_mixture();
    ScheduleConfig schedule;
    PerturbationSpec perturbation;
    GuidanceConfig guidance;
    SamplerSpec sampler;
    RunSection run;
    SweepSection sweep;
    BoundsSection bounds;

    static RunConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;  // fully resolved config for embedding
    void validate() const;
};

RunConfig load_config_file(const std::string& path);

/// Applies a "dotted.path=value" override; value parsed as JSON when
/// possible, else taken as a string.
void apply_override(nlohmann::json& j, const std::string& assignment);

GuidanceMode parse_mode(const std::string& s);
std::string mode_name(GuidanceMode m);

}  // namespace cfgec

#endif
