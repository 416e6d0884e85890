#pragma once

#include "gentree/samplers.hpp"
#include "gentree/tree.hpp"

#include <cstdint>
#include <vector>

namespace gentree {

/// Certified two-sided bracket on a first-return generating function of a
/// truncated infinite tree. The recursion P = (1-x)/(sigma - sum P_i) is
/// increasing in every subtree value, so substituting 0 and 1 for unexplored
/// subtrees gives rigorous bounds.
struct BoundedGF {
    double lower = 0.0;
    double upper = 1.0;
    int depth_used = 0;
};

struct PInterval {
    double lo = 0.0;
    double hi = 1.0;
    double mid() const { return 0.5 * (lo + hi); }
    double halfwidth() const { return 0.5 * (hi - lo); }
};

/// Exact first-return generating function P_T(x) of a finite tree by
/// post-order evaluation; the single link evaluates to 1-x. Requires
/// 0 < x <= 1 and a fully generated tree (no open vertices).
double p_finite(const Tree& tree, double x);

/// Bracket version: open vertices contribute [0, 1].
PInterval p_interval(const Tree& tree, double x);

/// Q = 1/(1-p); throws std::domain_error at p >= 1.
double q_from_p(double p);

/// Bracket on P_tau(x) for a truncated nu-sample, substituting 0 (lower) and
/// 1 (upper) for the unexplored spine continuation: walks contributing to the
/// lower bound never reach s_L, so on the bare half-line the lower bound
/// equals R_L(x). Branch brackets propagate the same way. Requires
/// 1 <= L <= spine.length().
BoundedGF p_spine_bounds(const SpineSection& spine, double x, int L);

/// First-return generating function for walks on the half line restricted to
/// the first L-1 vertices above the root:
/// R_L(x) = (1-x) ((1+sqrt x)^{L-1} - (1-sqrt x)^{L-1}) / ((1+sqrt x)^L - (1-sqrt x)^L).
double r_l_closed(double x, int L);

/// First-passage generating function across a bare chain of length L:
/// 2 (1-x)^{L/2} / ((1+sqrt x)^L + (1-sqrt x)^L), always <= 1.
double chain_green_closed(double x, int L);

/// Exact G_tau(x; v) on a finite tree: generating function for walks from the
/// root to v that avoid the root after the start,
///   G = sigma_v (1-x)^{-n/2} prod_{k=0}^{n-1} P_{tau_k}(x),
/// where tau_k is the subtree hanging below the k-th edge of the root-v path
/// (tau_0 being the whole tree). Requires a fully generated tree.
double green_finite(const Tree& tree, double x, std::int32_t v);

struct GreenBounds {
    double lower = 0.0;
    double upper = 0.0;
};

/// Bracket on G_tau(x; n) for a truncated spine sample, from the same spine
/// recursion as p_spine_bounds. Requires 1 <= n < spine.length().
GreenBounds green_to_spine_vertex(const SpineSection& spine, double x, int n);

/// Q_tau(x) <= R + 2/(x |B_R|): true iff the (upper-bracket) Q satisfies it.
bool q_upper_bound_check(double q_upper, double x, int R, std::int64_t ball_edges);
bool q_upper_bound_check(const Tree& tree, double x, int R);

// ---------------------------------------------------------------------------
// Arena evaluation (estimator hot path). One reverse-BFS pass computes the
// bracket of P_tau together with the brackets of every spine subtree value
// S_k = P(subtree below the edge s_k -> s_{k+1}); Q and the two-point Green
// factors are assembled from these.
// ---------------------------------------------------------------------------
struct ArenaEval {
    PInterval p_root;                    // bracket of P_tau
    std::vector<PInterval> spine_sub;    // spine_sub[k] = S_k, k = 0 .. depth-1
};

struct ArenaEvalScratch {
    std::vector<double> plo, phi;
};

void eval_arena(const NuBallArena& arena, double x, ArenaEval& out, ArenaEvalScratch& scratch);

/// G bracket for the arena: sigma_{s_n} (1-x)^{-n/2} prod_{k<n} S_k.
GreenBounds arena_green(const NuBallArena& arena, const ArenaEval& eval, double x, int n);

} // namespace gentree
