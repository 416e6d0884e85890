#include "gentree/run_config.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace gentree {

using nlohmann::json;

namespace {

template <typename T>
void read_if(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

const char* kKnownKeys[] = {
    "family", "weights", "uniform_nmax", "seed", "workers", "out_dir",
    "spectral_x", "spectral_samples", "bracket_tol",
    "volume_r", "volume_samples",
    "mass_x", "mass_samples", "mass_n", "mass_transient_cut",
    "zn_nmax", "validate_samples",
};

} // namespace

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    json j = json::parse(in);
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : kKnownKeys)
            if (it.key() == k) { known = true; break; }
        if (!known) throw std::runtime_error("unknown config key: " + it.key());
    }
    RunConfig cfg;
    read_if(j, "family", cfg.family);
    read_if(j, "weights", cfg.weights);
    read_if(j, "uniform_nmax", cfg.uniform_nmax);
    read_if(j, "seed", cfg.seed);
    read_if(j, "workers", cfg.workers);
    read_if(j, "out_dir", cfg.out_dir);
    read_if(j, "spectral_x", cfg.spectral_x);
    read_if(j, "spectral_samples", cfg.spectral_samples);
    read_if(j, "bracket_tol", cfg.bracket_tol);
    read_if(j, "volume_r", cfg.volume_r);
    read_if(j, "volume_samples", cfg.volume_samples);
    read_if(j, "mass_x", cfg.mass_x);
    read_if(j, "mass_samples", cfg.mass_samples);
    read_if(j, "mass_n", cfg.mass_n);
    read_if(j, "mass_transient_cut", cfg.mass_transient_cut);
    read_if(j, "zn_nmax", cfg.zn_nmax);
    read_if(j, "validate_samples", cfg.validate_samples);
    return cfg;
}

std::string config_to_json(const RunConfig& cfg) {
    json j;
    j["family"] = cfg.family;
    j["weights"] = cfg.weights;
    j["uniform_nmax"] = cfg.uniform_nmax;
    j["seed"] = cfg.seed;
    j["workers"] = cfg.workers;
    j["out_dir"] = cfg.out_dir;
    j["spectral_x"] = cfg.spectral_x;
    j["spectral_samples"] = cfg.spectral_samples;
    j["bracket_tol"] = cfg.bracket_tol;
    j["volume_r"] = cfg.volume_r;
    j["volume_samples"] = cfg.volume_samples;
    j["mass_x"] = cfg.mass_x;
    j["mass_samples"] = cfg.mass_samples;
    j["mass_n"] = cfg.mass_n;
    j["mass_transient_cut"] = cfg.mass_transient_cut;
    j["zn_nmax"] = cfg.zn_nmax;
    j["validate_samples"] = cfg.validate_samples;
    return j.dump(2);   // nlohmann dumps object keys sorted
}

std::uint64_t config_hash(const RunConfig& cfg) {
    std::string s = config_to_json(cfg);
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

WeightSpec family_spec(const RunConfig& cfg) {
    if (cfg.family == "uniform") return WeightSpec::uniform(cfg.uniform_nmax);
    if (cfg.family == "binary") return WeightSpec::binary();
    if (cfg.family == "explicit") return WeightSpec::from_list(cfg.weights);
    if (cfg.family == "halfline") {
        WeightSpec s;
        s.weights = {1.0, 1.0};
        s.family_tag = "halfline";
        s.rho = std::numeric_limits<double>::infinity();
        return s;
    }
    throw std::runtime_error("unknown weight family: " + cfg.family);
}

CriticalData family_crit(const RunConfig& cfg) {
    if (cfg.family == "halfline") return CriticalData::halfline_control();
    return solve_criticality(family_spec(cfg));
}

std::string write_manifest(const RunConfig& cfg, const std::string& command,
                           const std::vector<std::string>& outputs,
                           const std::string& status) {
    std::filesystem::create_directories(cfg.out_dir);
    json j;
    j["command"] = command;
    j["config"] = json::parse(config_to_json(cfg));
    char hex[32];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(config_hash(cfg)));
    j["config_hash"] = hex;
    j["seed"] = cfg.seed;
    j["workers"] = cfg.workers;
    j["outputs"] = outputs;
    j["status"] = status;
    j["version"] = "gentree 0.1.0";
    std::string path = cfg.out_dir + "/" + command + "_manifest.json";
    std::ofstream out(path);
    out << j.dump(2) << "\n";
    return path;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    // Shorten when a shorter form round-trips.
    for (int prec = 1; prec < 17; ++prec) {
        char t[40];
        std::snprintf(t, sizeof t, "%.*g", prec, v);
        double back;
        std::sscanf(t, "%lf", &back);
        if (back == v) return t;
    }
    return buf;
}

} // namespace gentree
