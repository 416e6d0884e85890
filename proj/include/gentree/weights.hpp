#pragma once

#include <optional>
#include <string>
#include <vector>

namespace gentree {

/// A family of branching weights w_1, w_2, ... together with its generating
/// function g(z) = sum_n w_n z^{n-1}.
///
/// Two representations are supported:
///  - an explicit finite table w_1..w_nmax (rho = +infinity), and
///  - the "uniform" family w_n = 1 for all n, which keeps the closed form
///    g(z) = 1/(1-z) (rho = 1) and materializes the table only up to a
///    cutoff nmax for sampling and series work.
struct WeightSpec {
    std::vector<double> weights;          // weights[i] = w_{i+1}
    std::string family_tag;               // "" for explicit lists, else e.g. "uniform"
    double rho = 0.0;                     // radius of convergence of g

    /// w_n (1-based); 0 beyond the stored table unless the family's closed
    /// form says otherwise.
    double w(int n) const;

    int nmax() const { return static_cast<int>(weights.size()); }

    /// Explicit finite list w_1..w_k.  Throws std::invalid_argument unless
    /// w_1 > 0, all weights are >= 0, and some w_n > 0 with n >= 3.
    static WeightSpec from_list(std::vector<double> w);

    /// w_n = 1 for all n; table cutoff nmax for tabulated work.
    static WeightSpec uniform(int nmax = 256);

    /// w_1 = w_3 = 1: trees with inner vertices of degree 1 or 3 only.
    static WeightSpec binary();
};

/// g(z), g'(z) or g''(z).  deriv must be 0, 1 or 2; requires 0 <= z < rho.
double eval_g(const WeightSpec& spec, double z, int deriv);

/// Third derivative of g; internal helper for second-moment series work.
double eval_g3(const WeightSpec& spec, double z);

} // namespace gentree
