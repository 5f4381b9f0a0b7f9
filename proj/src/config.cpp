#include "cfgec/config.hpp"

#include <fstream>
#include <sstream>

namespace cfgec {

using nlohmann::json;

namespace {

template <typename T>
void read_field(const json& j, const std::string& section, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        j.at(key).get_to(out);
    } catch (const json::exception& e) {
        throw ConfigError("config field '" + section + "." + key + "': " + e.what());
    }
}

PerturbationKind parse_kind(const std::string& s) {
    if (s == "smooth-field") return PerturbationKind::SmoothField;
    if (s == "white") return PerturbationKind::White;
    throw ConfigError("config field 'perturbation.kind': unknown value '" + s + "'");
}

RenoiseMode parse_renoise(const std::string& s) {
    if (s == "standard") return RenoiseMode::Standard;
    if (s == "cfgpp") return RenoiseMode::CfgPP;
    throw ConfigError("config field 'guidance.renoise': unknown value '" + s + "'");
}

SamplerKind parse_sampler(const std::string& s) {
    if (s == "ddim") return SamplerKind::Ddim;
    if (s == "dpmpp2m") return SamplerKind::Dpmpp2m;
    throw ConfigError("config field 'sampler.kind': unknown value '" + s + "'");
}

}  // namespace

GuidanceMode parse_mode(const std::string& s) {
    if (s == "cfg") return GuidanceMode::Cfg;
    if (s == "cfg-ec-full") return GuidanceMode::EcFull;
    if (s == "cfg-ec-dynamic") return GuidanceMode::EcDynamic;
    throw ConfigError("config field 'guidance.mode': unknown value '" + s + "'");
}

std::string mode_name(GuidanceMode m) {
    switch (m) {
        case GuidanceMode::Cfg: return "cfg";
        case GuidanceMode::EcFull: return "cfg-ec-full";
        case GuidanceMode::EcDynamic: return "cfg-ec-dynamic";
    }
    return "?";
}

RunConfig RunConfig::from_json(const json& j) {
    RunConfig c;
    if (j.contains("mixture")) {
        const json& m = j.at("mixture");
        if (m.contains("preset")) {
            std::string p = m.at("preset").get<std::string>();
            if (p != "three-class") throw ConfigError("config field 'mixture.preset': unknown value '" + p + "'");
        } else {
            GaussianMixture gm;
            read_field(m, "mixture", "dim", gm.dim);
            read_field(m, "mixture", "weights", gm.weights);
            read_field(m, "mixture", "means", gm.means);
            read_field(m, "mixture", "variances", gm.variances);
            c.mixture = gm;
        }
    }
    if (j.contains("schedule")) {
        const json& s = j.at("schedule");
        read_field(s, "schedule", "T", c.schedule.T);
        read_field(s, "schedule", "beta_min", c.schedule.beta_min);
        read_field(s, "schedule", "beta_max", c.schedule.beta_max);
    }
    if (j.contains("perturbation")) {
        const json& p = j.at("perturbation");
        read_field(p, "perturbation", "sigma_uc", c.perturbation.sigma_uc);
        read_field(p, "perturbation", "sigma_c", c.perturbation.sigma_c);
        read_field(p, "perturbation", "rho", c.perturbation.rho);
        read_field(p, "perturbation", "field_seed", c.perturbation.field_seed);
        if (p.contains("kind")) c.perturbation.kind = parse_kind(p.at("kind").get<std::string>());
    }
    if (j.contains("guidance")) {
        const json& g = j.at("guidance");
        read_field(g, "guidance", "w", c.guidance.w);
        if (g.contains("mode")) c.guidance.mode = parse_mode(g.at("mode").get<std::string>());
        if (g.contains("renoise")) c.guidance.renoise = parse_renoise(g.at("renoise").get<std::string>());
        read_field(g, "guidance", "tau", c.guidance.tau);
        read_field(g, "guidance", "clamp_s", c.guidance.clamp_s);
        read_field(g, "guidance", "eps_norm", c.guidance.eps_norm);
    }
    if (j.contains("sampler")) {
        const json& s = j.at("sampler");
        if (s.contains("kind")) c.sampler.kind = parse_sampler(s.at("kind").get<std::string>());
        read_field(s, "sampler", "nfe", c.sampler.nfe);
        read_field(s, "sampler", "eta", c.sampler.eta);
    }
    if (j.contains("run")) {
        const json& r = j.at("run");
        read_field(r, "run", "trajectories", c.run.trajectories);
        read_field(r, "run", "base_seed", c.run.base_seed);
        read_field(r, "run", "class_y", c.run.class_y);
        read_field(r, "run", "record_detail", c.run.record_detail);
        read_field(r, "run", "dropout_p", c.run.dropout_p);
        read_field(r, "run", "sequential_reduction", c.run.sequential_reduction);
        read_field(r, "run", "threads", c.run.threads);
        read_field(r, "run", "methods", c.run.methods);
    }
    if (j.contains("sweep")) {
        read_field(j.at("sweep"), "sweep", "w_grid", c.sweep.w_grid);
    }
    if (j.contains("bounds")) {
        const json& b = j.at("bounds");
        read_field(b, "bounds", "tuples", c.bounds.tuples);
        read_field(b, "bounds", "dims", c.bounds.dims);
        read_field(b, "bounds", "w_min", c.bounds.w_min);
        read_field(b, "bounds", "w_max", c.bounds.w_max);
        read_field(b, "bounds", "p_min", c.bounds.p_min);
        read_field(b, "bounds", "p_max", c.bounds.p_max);
        read_field(b, "bounds", "seed", c.bounds.seed);
    }
    c.validate();
    return c;
}

void RunConfig::validate() const {
    mixture.validate();
    perturbation.validate();
    guidance.validate();
    sampler.validate(schedule.T);
    if (run.trajectories < 1) throw ConfigError("config field 'run.trajectories': must be >= 1");
    if (run.class_y < 0 || run.class_y >= mixture.num_classes()) {
        throw ConfigError("config field 'run.class_y': out of range");
    }
    if (!(run.dropout_p > 0.0 && run.dropout_p < 1.0)) {
        throw ConfigError("config field 'run.dropout_p': must be in (0,1)");
    }
    for (const auto& m : run.methods) parse_mode(m);
    if (bounds.tuples < 1) throw ConfigError("config field 'bounds.tuples': must be >= 1");
    // make_linear_schedule re-validates T/beta ranges
    make_linear_schedule(schedule.T, schedule.beta_min, schedule.beta_max);
}

json RunConfig::to_json() const {
    json j;
    j["format_version"] = kFormatVersion;
    j["mixture"] = {{"dim", mixture.dim},
                    {"weights", mixture.weights},
                    {"means", mixture.means},
                    {"variances", mixture.variances}};
    j["schedule"] = {{"T", schedule.T}, {"beta_min", schedule.beta_min}, {"beta_max", schedule.beta_max}};
    j["perturbation"] = {
        {"sigma_uc", perturbation.sigma_uc},
        {"sigma_c", perturbation.sigma_c},
        {"rho", perturbation.rho},
        {"field_seed", perturbation.field_seed},
        {"kind", perturbation.kind == PerturbationKind::SmoothField ? "smooth-field" : "white"}};
    j["guidance"] = {{"w", guidance.w},
                     {"mode", mode_name(guidance.mode)},
                     {"renoise", guidance.renoise == RenoiseMode::CfgPP ? "cfgpp" : "standard"},
                     {"tau", guidance.tau},
                     {"clamp_s", guidance.clamp_s},
                     {"eps_norm", guidance.eps_norm}};
    j["sampler"] = {{"kind", sampler.kind == SamplerKind::Ddim ? "ddim" : "dpmpp2m"},
                    {"nfe", sampler.nfe},
                    {"eta", sampler.eta}};
    j["run"] = {{"trajectories", run.trajectories},
                {"base_seed", run.base_seed},
                {"class_y", run.class_y},
                {"record_detail", run.record_detail},
                {"dropout_p", run.dropout_p},
                {"sequential_reduction", run.sequential_reduction},
                {"threads", run.threads},
                {"methods", run.methods}};
    j["sweep"] = {{"w_grid", sweep.w_grid}};
    j["bounds"] = {{"tuples", bounds.tuples}, {"dims", bounds.dims},
                   {"w_min", bounds.w_min},  {"w_max", bounds.w_max},
                   {"p_min", bounds.p_min},  {"p_max", bounds.p_max},
                   {"seed", bounds.seed}};
    return j;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
    return RunConfig::from_json(j);
}

void apply_override(json& j, const std::string& assignment) {
    auto eq = assignment.find('=');
    if (eq == std::string::npos) {
        throw ConfigError("--set expects key.path=value, got: " + assignment);
    }
    std::string path = assignment.substr(0, eq);
    std::string value = assignment.substr(eq + 1);
    json* node = &j;
    std::stringstream ss(path);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) parts.push_back(part);
    if (parts.empty()) throw ConfigError("--set: empty key path");
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) node = &(*node)[parts[i]];
    json parsed = json::parse(value, nullptr, false);
    (*node)[parts.back()] = parsed.is_discarded() ? json(value) : parsed;
}

}  // namespace cfgec
