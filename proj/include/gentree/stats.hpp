#pragma once

#include <cstddef>
#include <vector>

namespace gentree {

/// Streaming mean/variance (Welford). merge() combines two accumulators with
/// the pairwise update; results are bit-stable as long as the merge order is
/// fixed.
struct MeanAccumulator {
    std::size_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++n;
        double d = x - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (x - mean);
    }

    void merge(const MeanAccumulator& o) {
        if (o.n == 0) return;
        if (n == 0) { *this = o; return; }
        double d = o.mean - mean;
        std::size_t nn = n + o.n;
        mean += d * static_cast<double>(o.n) / static_cast<double>(nn);
        m2 += o.m2 + d * d * static_cast<double>(n) * static_cast<double>(o.n) / static_cast<double>(nn);
        n = nn;
    }

    double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
    double stderr_of_mean() const;
};

struct LinFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;
    double intercept_se = 0.0;
    double chi2 = 0.0;       // weighted residual sum of squares
    std::size_t n = 0;
};

/// Weighted least squares y = a + b*x with per-point weights w (typically
/// 1/sigma^2). Points with w <= 0 are skipped.
LinFit weighted_linear_fit(const std::vector<double>& x,
                           const std::vector<double>& y,
                           const std::vector<double>& w);

double pearson_correlation(const std::vector<double>& x, const std::vector<double>& y);

/// Regularized upper incomplete gamma Q(a, x) = Gamma(a,x)/Gamma(a).
double gamma_q(double a, double x);

/// Survival function of the chi-square distribution: P(X >= stat | dof).
double chi2_survival(double stat, double dof);

/// Pearson goodness-of-fit statistic against expected probabilities.
/// Bins with expected count below min_expected are pooled into one tail bin.
/// Returns the p-value; *out_stat/*out_dof optionally receive stat and dof.
double chi2_gof_pvalue(const std::vector<double>& observed_counts,
                       const std::vector<double>& expected_probs,
                       double n_total,
                       double min_expected = 5.0,
                       double* out_stat = nullptr,
                       double* out_dof = nullptr);

} // namespace gentree
