#pragma once

#include "gentree/samplers.hpp"
#include "gentree/stats.hpp"

#include <cstdint>
#include <vector>

namespace gentree {

/// One Monte Carlo point. bracket_residual is the mean half-width of the
/// per-sample certified brackets: a bound on the systematic offset of `mean`
/// from the untruncated value. Consumers should use
/// stderr_ + bracket_residual as the total uncertainty.
struct EstimateRecord {
    double abscissa = 0.0;          // x, R or n
    double mean = 0.0;
    double stderr_ = 0.0;
    std::size_t n_samples = 0;
    std::size_t censored = 0;       // samples that hit a cap or failed adaptive depth
    double bracket_residual = 0.0;
    double total_uncertainty() const { return stderr_ + bracket_residual; }
};

struct FitResult {
    double exponent = 0.0;
    double exponent_stderr = 0.0;
    double window_lo = 0.0;         // abscissa range entering the fit
    double window_hi = 0.0;
    double residual_diagnostic = 0.0;   // sqrt(chi2/dof) of the weighted fit
};

struct McOptions {
    std::size_t n_samples = 20000;
    std::uint64_t seed = 1;
    int workers = 0;                    // 0 = all hardware threads
    double bracket_tol = 1e-3;          // relative bracket width target
    std::int64_t max_vertices = kDefaultSizeCap;
    std::size_t chunk = 64;             // reduction granularity (bit-stable order)
};

struct QBracketResult {
    double lo = 0.0, hi = 0.0;
    double p_mid = 0.0;        // midpoint of the underlying P bracket
    bool converged = false;
    int depth = 0;
};

/// Deepens one arena sample (doubling) until the certified bracket of
/// Q_tau(x) is narrower than tol relative, the depth limit 16 x^{-1/2} is
/// hit, or the vertex budget runs out. The pathwise bound Q <= x^{-1/2}
/// caps the upper end throughout.
QBracketResult q_bracket_adaptive(NuBallArena& arena, const SamplerTables& tables, double x,
                                  double tol, std::int64_t max_vertices, int min_depth = 0);

/// Q(x) = <Q_tau(x)>_nu on a grid of x values. One tree sample set is shared
/// across the grid (common random numbers); per sample the generation depth
/// doubles until the certified Q bracket is narrower than bracket_tol
/// relative, or the depth exceeds 16 x^{-1/2} (counted as censored, with the
/// wide bracket folded into bracket_residual). The pathwise bound
/// Q <= x^{-1/2} caps the upper bracket throughout.
/// When mean_field is non-null it receives <1 - P_tau(x)> records on the same
/// grid and samples: the inputs to the (unproven) mean-field comparison
/// Q(x) vs 1/<1 - P_tau(x)>. No acceptance criterion consumes them.
std::vector<EstimateRecord> estimate_q(const SamplerTables& tables,
                                       const std::vector<double>& x_grid,
                                       const McOptions& opts,
                                       std::vector<EstimateRecord>* mean_field = nullptr);

/// Weighted log-log fit of Q(x) ~ x^{-alpha}; exponent = alpha, and the
/// spectral dimension is d_s = 2 - 2 alpha. Requires >= 4 points spanning at
/// least two decades of x.
FitResult fit_spectral(const std::vector<EstimateRecord>& records);

struct VolumeResult {
    std::vector<EstimateRecord> mean_records;   // <|B_R|>
    std::vector<EstimateRecord> inv_records;    // <1/|B_R|>
    FitResult dh_fit;                           // slope of log <|B_R|> vs log R
    FitResult inv_fit;                          // slope of log <1/|B_R|> vs log R
};

VolumeResult estimate_volume(const SamplerTables& tables,
                             const std::vector<int>& r_grid,
                             const McOptions& opts);

struct MassResult {
    std::vector<double> x_grid;
    std::vector<std::vector<EstimateRecord>> records;   // records[xi][k]: Q(x; n_k)
    std::vector<int> n_grid;
    std::vector<FitResult> mass_fits;   // per x: slope of -log Q(x;n) vs n
    std::vector<double> m_hat;          // mass estimates per x
    FitResult exponent_fit;             // slope of log m(x) vs log x
};

/// Two-point function Q(x;n) = <Q_tau(x) G_tau(x;n)>_nu, the per-x mass from
/// its exponential decay in n (small-n transient dropped), and the mass
/// exponent from the per-x masses. Empty n_grid selects one automatically
/// from the x range.
MassResult estimate_mass(const SamplerTables& tables,
                         const std::vector<double>& x_grid,
                         std::vector<int> n_grid,
                         const McOptions& opts,
                         int transient_cut = 5);

struct TailReport {
    int R = 0;
    std::vector<double> lambda;
    std::vector<double> prob;            // nu(|B_R| < lambda R^2)
    std::vector<std::size_t> hits;
    double slope = 0.0;                  // log prob vs lambda^{-1/2}
    double correlation = 0.0;            // over bins with enough hits
    std::vector<int> y_radii;            // radii for the Y_R check
    double c_prime = 0.0;                // grid-searched threshold constant
    std::vector<double> y_scaled;        // R' * nu(Y_{R'} >= c' R'^2)
    std::vector<std::size_t> y_hits;
};

/// Lower-tail shape of |B_R| (log-probability linear in lambda^{-1/2}) and
/// the Y_R >= c' R^2 frequency scaled by R. Report only; thresholds live in
/// the callers.
TailReport tail_checks(const SamplerTables& tables, int R,
                       const std::vector<double>& lambda_grid,
                       const McOptions& opts);

} // namespace gentree
