#include "gentree/stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace gentree {

double MeanAccumulator::stderr_of_mean() const {
    if (n < 2) return 0.0;
    return std::sqrt(variance() / static_cast<double>(n));
}

LinFit weighted_linear_fit(const std::vector<double>& x,
                           const std::vector<double>& y,
                           const std::vector<double>& w) {
    if (x.size() != y.size() || x.size() != w.size())
        throw std::invalid_argument("weighted_linear_fit: size mismatch");
    double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(w[i] > 0)) continue;
        ++n;
        sw += w[i];
        swx += w[i] * x[i];
        swy += w[i] * y[i];
        swxx += w[i] * x[i] * x[i];
        swxy += w[i] * x[i] * y[i];
    }
    if (n < 2) throw std::invalid_argument("weighted_linear_fit: need >= 2 weighted points");
    double det = sw * swxx - swx * swx;
    if (det <= 0) throw std::runtime_error("weighted_linear_fit: degenerate abscissas");
    LinFit fit;
    fit.n = n;
    fit.slope = (sw * swxy - swx * swy) / det;
    fit.intercept = (swxx * swy - swx * swxy) / det;
    fit.slope_se = std::sqrt(sw / det);
    fit.intercept_se = std::sqrt(swxx / det);
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(w[i] > 0)) continue;
        double r = y[i] - (fit.intercept + fit.slope * x[i]);
        fit.chi2 += w[i] * r * r;
    }
    return fit;
}

double pearson_correlation(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("pearson_correlation: bad input");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) { mx += x[i]; my += y[i]; }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(x.size());
    double sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx <= 0 || syy <= 0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

namespace {

double log_gamma(double z) { return std::lgamma(z); }

// Lower incomplete gamma by series, valid for x < a+1.
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 1000; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - log_gamma(a));
}

// Upper incomplete gamma by continued fraction, valid for x >= a+1.
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 1000; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - log_gamma(a));
}

} // namespace

double gamma_q(double a, double x) {
    if (!(a > 0) || x < 0) throw std::domain_error("gamma_q: need a>0, x>=0");
    if (x == 0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

double chi2_survival(double stat, double dof) {
    if (stat <= 0) return 1.0;
    return gamma_q(dof / 2.0, stat / 2.0);
}

double chi2_gof_pvalue(const std::vector<double>& observed_counts,
                       const std::vector<double>& expected_probs,
                       double n_total,
                       double min_expected,
                       double* out_stat,
                       double* out_dof) {
    if (observed_counts.size() != expected_probs.size())
        throw std::invalid_argument("chi2_gof_pvalue: size mismatch");
    double stat = 0.0;
    int bins = 0;
    double pooled_obs = 0.0, pooled_exp = 0.0;
    for (std::size_t i = 0; i < observed_counts.size(); ++i) {
        double e = expected_probs[i] * n_total;
        if (e < min_expected) {
            pooled_obs += observed_counts[i];
            pooled_exp += e;
            continue;
        }
        double d = observed_counts[i] - e;
        stat += d * d / e;
        ++bins;
    }
    if (pooled_exp >= min_expected) {
        double d = pooled_obs - pooled_exp;
        stat += d * d / pooled_exp;
        ++bins;
    }
    double dof = static_cast<double>(bins > 1 ? bins - 1 : 1);
    if (out_stat) *out_stat = stat;
    if (out_dof) *out_dof = dof;
    if (bins < 2) return 1.0;
    return chi2_survival(stat, dof);
}

} // namespace gentree
