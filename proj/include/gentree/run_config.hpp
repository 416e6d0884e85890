#pragma once

#include "gentree/criticality.hpp"
#include "gentree/weights.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace gentree {

/// One run's full parameter set. Serializable to JSON; a manifest containing
/// the config hash, seed and worker count accompanies every output so a run
/// can be reproduced byte for byte (reductions are chunk-ordered, so results
/// do not depend on the worker count).
struct RunConfig {
    // weight family: a named one or an explicit table
    std::string family = "uniform";     // "uniform" | "binary" | "halfline" | "explicit"
    std::vector<double> weights;        // for family == "explicit"
    int uniform_nmax = 256;

    std::uint64_t seed = 1;
    int workers = 0;                    // 0 = all hardware threads
    std::string out_dir = "out";

    std::vector<double> spectral_x = {1.0 / 64, 1.0 / 256, 1.0 / 1024, 1.0 / 4096, 1.0 / 16384};
    std::size_t spectral_samples = 20000;
    double bracket_tol = 1e-3;

    std::vector<int> volume_r = {4, 8, 16, 32, 64, 128};
    std::size_t volume_samples = 20000;

    std::vector<double> mass_x = {1.0 / 64, 1.0 / 256, 1.0 / 1024, 1.0 / 4096};
    std::size_t mass_samples = 10000;
    std::vector<int> mass_n;            // empty = automatic
    int mass_transient_cut = 5;

    int zn_nmax = 200;

    std::size_t validate_samples = 20000;
};

/// Parses the JSON config file; unknown keys are rejected. Missing keys keep
/// their defaults.
RunConfig load_config(const std::string& path);

/// Canonical JSON dump (sorted keys, fixed float format).
std::string config_to_json(const RunConfig& cfg);

/// FNV-1a hash of the canonical dump.
std::uint64_t config_hash(const RunConfig& cfg);

/// Builds the weight family named by the config.
WeightSpec family_spec(const RunConfig& cfg);

/// Solved constants for the configured family ("halfline" uses the
/// branchless control data).
CriticalData family_crit(const RunConfig& cfg);

/// Writes `<out_dir>/<name>_manifest.json` recording the command, config,
/// hash, seed, worker count and produced files; returns the manifest path.
std::string write_manifest(const RunConfig& cfg, const std::string& command,
                           const std::vector<std::string>& outputs,
                           const std::string& status);

/// Fixed-format float for CSV output: shortest round-trip representation.
std::string format_double(double v);

} // namespace gentree
