#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gentree {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct ValidateOptions {
    std::uint64_t seed = 1;
    int workers = 0;
    // Sample counts; the defaults are the sizes the checks are specified at.
    std::size_t nu_n_samples = 100000;     // nu_N frequency tests, N <= 5
    std::size_t kl_draws = 1000000;        // (k,l) law against phi
    std::size_t b2_samples = 20000;        // B_2 shape frequencies
    std::size_t property_cases = 1000;     // pathwise inequality suites
    std::size_t oracle_cases = 200;        // walk-sum agreement corpus
    std::size_t tail_samples = 60000;      // lower-tail shape checks
};

/// The oracle/property suite: partition-function equivalence, coefficient
/// asymptotics and zero pattern, measure characterization (nu_N, phi, B_2
/// frequencies), walk-generating-function correctness against the walk-sum
/// oracle, the pathwise inequality suites, and the ball-volume series
/// moments. Each entry reports pass/fail plus a one-line detail.
std::vector<CheckResult> run_validation_suite(const ValidateOptions& opts);

} // namespace gentree
