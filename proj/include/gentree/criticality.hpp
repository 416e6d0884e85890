#pragma once

#include "gentree/tree.hpp"
#include "gentree/weights.hpp"

#include <vector>

namespace gentree {

/// Criticality constants of a generic ensemble: the fixed-point constant Z_0
/// solving z g'(z) = g(z), the fugacity zeta_0 = Z_0/g(Z_0), the equivalent
/// critical offspring law p_n = zeta_0 w_{n+1} Z_0^{n-1}, the offspring
/// variance f''(1) = zeta_0 Z_0 g''(Z_0), and the support divisor d.
struct CriticalData {
    double z0 = 0.0;
    double zeta0 = 0.0;
    double fpp1 = 0.0;                 // f''(1)
    std::vector<double> offspring;     // p_0 .. p_nmax, truncated and renormalized
    int divisor_d = 1;
    double tail_mass_tol = 1e-12;
    WeightSpec spec;

    bool is_halfline() const { return spec.family_tag == "halfline"; }

    /// Degenerate branchless control: the bare half-line spine. Not a generic
    /// ensemble (solve_criticality rejects it); used to pin estimator code
    /// against the closed-form chain generating functions.
    static CriticalData halfline_control();
};

/// Finds Z_0 by bracketed bisection plus Newton polish (relative tolerance
/// `tol`, default 1e-13) and fills in the derived constants. Throws
/// std::invalid_argument for invalid weights and std::runtime_error when the
/// criticality equation has no solution inside (0, rho) or the solution sits
/// at rho (non-generic ensemble).
CriticalData solve_criticality(const WeightSpec& spec, double tol = 1e-13);

/// Offspring generating function f(z) = zeta_0 Z_0^{-1} g(Z_0 z) and its
/// first two derivatives. Requires Z_0 * z < rho.
double eval_f(const CriticalData& crit, double z, int deriv);

/// f'''(1); needed for second factorial moments of ball volumes.
double eval_f3_at1(const CriticalData& crit);

/// Spine branch-count law phi(k, l) = zeta_0 w_{k+l+2} Z_0^{k+l}:
/// probability that a spine vertex carries k left and l right branches.
double branch_pair_prob(const CriticalData& crit, int k, int l);

/// nu-measure of the event B_R(tau) = tau0 for an infinite tree tau:
/// M W(tau0) Z_0^{M-1} zeta_0^{|tau0|-M}, where M counts the vertices of
/// tau0 at distance R and W is the weight product over the interior
/// B_{R-1}(tau0) minus the root. Requires height(tau0) == R.
double measure_ball(const CriticalData& crit, const Tree& tau0, int R);

} // namespace gentree
