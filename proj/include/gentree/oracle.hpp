#pragma once

#include "gentree/tree.hpp"
#include "gentree/weights.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace gentree {

/// Brute-force walk sum with certified truncation error:
/// the true generating-function value lies in [value, value + tail_bound].
struct WalkSumResult {
    double value = 0.0;
    double tail_bound = 0.0;
    int t_max = 0;
};

enum class WalkMode {
    all_walks,      // Q_tau(x; v): every walk from source ending at target
    first_passage,  // G: walks that never revisit the source after the start
    first_return,   // P: walks returning to the source for the first time
};

/// Iterates the one-step vector p_t(v) (each interior visit contributes a
/// 1/sigma factor, endpoints contribute none) and accumulates
/// (1-x)^{t/2} p_t(target) up to t_max. The tail bound is
/// sigma_source (1-x)^{(t_max+1)/2} / (1 - sqrt(1-x)), since the per-step
/// vector mass never exceeds sigma_source. Trees are capped at 1000 vertices.
WalkSumResult walk_sum_q(const Tree& tree, double x, std::int32_t source, std::int32_t target,
                         WalkMode mode, int t_max);

/// Exhaustive nu_N: every tree of Gamma_N with its probability
/// Z_N^{-1} prod w_{sigma_i}. For integer weight tables the arithmetic is
/// exact (integer-valued doubles). Guarded to N <= 8.
std::vector<std::pair<Tree, double>> exact_nu_n(const WeightSpec& spec, int N);

/// Z_N by exhaustive enumeration (N <= 12).
double oracle_z_n(const WeightSpec& spec, int N);

/// Weight product prod_{i in tau \ r} w_{sigma_i} of one tree.
double tree_weight(const WeightSpec& spec, const Tree& tree);

} // namespace gentree
