#include "gentree/series.hpp"

#include <cmath>
#include <stdexcept>

namespace gentree {

TruncatedSeries& TruncatedSeries::operator+=(const TruncatedSeries& o) {
    if (o.coeffs.size() != coeffs.size() || o.center != center)
        throw std::invalid_argument("TruncatedSeries: degree/center mismatch");
    for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] += o.coeffs[i];
    return *this;
}

TruncatedSeries& TruncatedSeries::operator*=(double s) {
    for (double& c : coeffs) c *= s;
    return *this;
}

TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b) {
    if (a.coeffs.size() != b.coeffs.size() || a.center != b.center)
        throw std::invalid_argument("TruncatedSeries: degree/center mismatch");
    TruncatedSeries out(a.degree(), a.center);
    int K = a.degree();
    for (int i = 0; i <= K; ++i) {
        double ai = a[i];
        if (ai == 0.0) continue;
        for (int j = 0; j + i <= K; ++j) out[i + j] += ai * b[j];
    }
    return out;
}

TruncatedSeries TruncatedSeries::mul_shift_add(double c) const {
    TruncatedSeries out(degree(), center);
    out[0] = c;
    for (int k = 1; k <= degree(); ++k) out[k] = (*this)[k - 1];
    return out;
}

namespace {

// Convolution of a and b into out, keeping degrees <= cap only.
void mul_capped(const std::vector<double>& a, const std::vector<double>& b,
                std::vector<double>& out, int cap) {
    out.assign(static_cast<std::size_t>(cap + 1), 0.0);
    int na = static_cast<int>(a.size()) - 1;
    for (int i = 0; i <= na && i <= cap; ++i) {
        double ai = a[static_cast<std::size_t>(i)];
        if (ai == 0.0) continue;
        int jmax = std::min<int>(static_cast<int>(b.size()) - 1, cap - i);
        for (int j = 0; j <= jmax; ++j)
            out[static_cast<std::size_t>(i + j)] += ai * b[static_cast<std::size_t>(j)];
    }
}

// g(Z) truncated at degree T, for a series Z vanishing at 0. Horner from the
// top weight down; the running polynomial only needs degree T - n + 1 while
// processing weight w_n, because it still gets multiplied by Z^{n-1}.
std::vector<double> g_of_series(const WeightSpec& spec, const std::vector<double>& z, int T) {
    std::vector<double> h{spec.w(T + 1)};
    std::vector<double> tmp;
    for (int n = T; n >= 1; --n) {
        mul_capped(h, z, tmp, T - (n - 1));
        tmp[0] += spec.w(n);
        h.swap(tmp);
    }
    return h;   // degree T
}

} // namespace

std::vector<double> partition_coeffs_scaled(const WeightSpec& spec, const CriticalData& crit, int n_max) {
    if (n_max < 1) throw std::invalid_argument("partition_coeffs: n_max must be >= 1");
    // Rescaled fixed point: with s = zeta/zeta0 and Zh(s) = Z(zeta0 s),
    // Zh = zeta0 * s * g(Zh). Iteration k settles the coefficient of s^k.
    std::vector<double> zh(static_cast<std::size_t>(n_max + 1), 0.0);
    for (int k = 1; k <= n_max; ++k) {
        std::vector<double> g = g_of_series(spec, zh, k - 1);
        // zh <- zeta0 * s * g, truncated at degree k (degrees 1..k final so far).
        for (int m = k; m >= 1; --m)
            zh[static_cast<std::size_t>(m)] = crit.zeta0 * g[static_cast<std::size_t>(m - 1)];
    }
    zh.erase(zh.begin());
    return zh;   // zh[N-1] = Z_N zeta0^N
}

std::vector<double> partition_coeffs(const WeightSpec& spec, const CriticalData& crit, int n_max) {
    std::vector<double> zh = partition_coeffs_scaled(spec, crit, n_max);
    double inv = 1.0 / crit.zeta0;
    double scale = 1.0;
    for (auto& v : zh) {
        scale *= inv;
        v *= scale;
    }
    return zh;   // zh[N-1] = Z_N
}

double zn_asymptotic_ratio(const CriticalData& crit, const std::vector<double>& scaled_coeffs, int N) {
    if (N < 1 || N > static_cast<int>(scaled_coeffs.size()))
        throw std::invalid_argument("zn_asymptotic_ratio: N out of range");
    if ((N - 1) % crit.divisor_d != 0)
        throw std::invalid_argument("zn_asymptotic_ratio: Z_N vanishes for this N (divisor obstruction)");
    double g0 = eval_g(crit.spec, crit.z0, 0);
    double g2 = eval_g(crit.spec, crit.z0, 2);
    double amp = crit.divisor_d * std::sqrt(g0 / (2.0 * M_PI * g2));
    double zhat = scaled_coeffs[static_cast<std::size_t>(N - 1)];
    return zhat * std::pow(static_cast<double>(N), 1.5) / amp;
}

double zn_asymptotic_ratio(const WeightSpec& spec, const CriticalData& crit, int N) {
    return zn_asymptotic_ratio(crit, partition_coeffs_scaled(spec, crit, N), N);
}

namespace {

// Degree-2 jet at z = 1; [0] is the value, [1] the first derivative, [2] half
// the second. compose_f applies an analytic F given (F, F', F'') at the value.
struct Jet {
    TruncatedSeries s{2, 1.0};
};

Jet compose(const Jet& inner, double F0, double F1, double F2) {
    TruncatedSeries d = inner.s;   // inner minus its value
    d[0] = 0.0;
    TruncatedSeries d2 = d * d;
    Jet out;
    out.s[0] = F0;
    out.s += (d *= F1);
    out.s += (d2 *= 0.5 * F2);
    return out;
}

Jet compose_f(const CriticalData& crit, const Jet& inner) {
    double v = inner.s[0];
    return compose(inner, eval_f(crit, v, 0), eval_f(crit, v, 1), eval_f(crit, v, 2));
}

Jet compose_fprime(const CriticalData& crit, const Jet& inner) {
    double v = inner.s[0];
    // f' jets need f''' at the expansion value; only v = 1 occurs here.
    return compose(inner, eval_f(crit, v, 1), eval_f(crit, v, 2), eval_f3_at1(crit));
}

Jet identity_jet() {
    Jet j;
    j.s[0] = 1.0;
    j.s[1] = 1.0;
    return j;
}

Jet mul_by_z(const Jet& j) {
    // z = 1 + u at center 1.
    Jet out = j;
    out.s[1] += j.s[0];
    out.s[2] += j.s[1];
    return out;
}

std::pair<double, double> moments_of(const Jet& j) {
    double first = j.s[1];
    double second_fact = 2.0 * j.s[2];
    if (!std::isfinite(first) || !std::isfinite(second_fact))
        throw std::overflow_error("ball_series: moment overflow");
    return {first, second_fact};
}

} // namespace

std::pair<double, double> ball_series(const CriticalData& crit, int R,
                                      BallSeriesKind which, BallSeriesEval eval) {
    if (R < 1) throw std::invalid_argument("ball_series: R must be >= 1");
    if (eval == BallSeriesEval::at0) {
        switch (which) {
            case BallSeriesKind::f_R:
                return {0.0, 0.0};   // |B_R| >= 1 always: no mass at 0
            case BallSeriesKind::g_R: {
                double fR0 = 0.0;    // f_R(0) = 0 for every R
                return {eval_f(crit, fR0, 1), 0.0};
            }
            case BallSeriesKind::k_n: {
                double k = 0.0;      // k_1(0) = 0
                for (int i = 1; i < R; ++i) k = eval_f(crit, k, 0);
                return {k, 0.0};
            }
            case BallSeriesKind::h_n: {
                double k = 0.0;
                for (int i = 1; i < R; ++i) k = eval_f(crit, k, 0);
                return {eval_f(crit, k, 1), 0.0};
            }
        }
    }
    // moments12: carry degree-2 series centered at 1 through the recursion.
    Jet base = identity_jet();
    if (which == BallSeriesKind::f_R || which == BallSeriesKind::g_R) {
        for (int i = 1; i < R; ++i) base = mul_by_z(compose_f(crit, base));
        if (which == BallSeriesKind::g_R) base = compose_fprime(crit, base);
    } else {
        for (int i = 1; i < R; ++i) base = compose_f(crit, base);
        if (which == BallSeriesKind::h_n) base = compose_fprime(crit, base);
    }
    return moments_of(base);
}

double nu_ball_mean(const CriticalData& crit, int R) {
    if (R < 1) throw std::invalid_argument("nu_ball_mean: R must be >= 1");
    double r = static_cast<double>(R);
    return 0.5 * crit.fpp1 * r * (r - 1.0) + r;
}

} // namespace gentree
