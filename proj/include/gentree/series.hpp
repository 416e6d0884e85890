#pragma once

#include "gentree/criticality.hpp"
#include "gentree/weights.hpp"

#include <utility>
#include <vector>

namespace gentree {

/// Power series truncated at degree K: sum_k c_k u^k with u = (z - center).
/// Arithmetic is exact modulo u^{K+1}; multiplication is the plain O(K^2)
/// convolution, which is all the desk-scale work here needs.
struct TruncatedSeries {
    std::vector<double> coeffs;   // c_0 .. c_K
    double center = 0.0;

    TruncatedSeries(int K, double center_) : coeffs(static_cast<std::size_t>(K + 1), 0.0), center(center_) {}

    int degree() const { return static_cast<int>(coeffs.size()) - 1; }
    double& operator[](int k) { return coeffs[static_cast<std::size_t>(k)]; }
    double operator[](int k) const { return coeffs[static_cast<std::size_t>(k)]; }

    TruncatedSeries& operator+=(const TruncatedSeries& o);
    TruncatedSeries& operator*=(double s);

    /// Truncated product; both operands must share degree and center.
    friend TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b);

    /// (this) * u + c, i.e. a Horner step in the local variable.
    TruncatedSeries mul_shift_add(double c) const;
};

/// Coefficients Z_1..Z_{N_max} of the series solution of Z = zeta g(Z)
/// vanishing at zeta = 0, by fixed-point iteration in truncated series
/// arithmetic (iteration k settles the coefficient of zeta^k). The iteration
/// runs on the rescaled series Z_N zeta0^N to keep magnitudes O(1); raw Z_N
/// values are recovered at the end. Zero slots (divisor d not dividing N-1)
/// come out exactly zero.
std::vector<double> partition_coeffs(const WeightSpec& spec, const CriticalData& crit, int n_max);

/// Same, but returns the rescaled coefficients Z_N zeta0^N (safe for large N).
std::vector<double> partition_coeffs_scaled(const WeightSpec& spec, const CriticalData& crit, int n_max);

/// Z_N N^{3/2} zeta0^N / (d sqrt(g(Z0)/(2 pi g''(Z0)))): approaches 1 with an
/// O(1/N) correction. Requires N == 1 mod d (the other slots vanish).
double zn_asymptotic_ratio(const WeightSpec& spec, const CriticalData& crit, int N);

/// Same ratio from precomputed rescaled coefficients (partition_coeffs_scaled).
double zn_asymptotic_ratio(const CriticalData& crit, const std::vector<double>& scaled_coeffs, int N);

enum class BallSeriesKind { f_R, g_R, k_n, h_n };
enum class BallSeriesEval { at0, moments12 };

/// Ball-volume and profile generating functions:
///   f_R: law of |B_R| under the branch measure mu,  f_{R+1}(z) = z f(f_R(z)), f_1 = z
///   g_R: law of Y_R (branch ball volume at a spine vertex), g_R = f'(f_R)
///   k_n: law of D_n under mu (generation sizes below the root edge), k_1 = z, k_{n+1} = f(k_n)
///   h_n: law of X_n (spine-vertex branch profile), h_n = f'(k_n)
/// at0 returns (value at z = 0, 0); moments12 returns the (first, second
/// factorial) moments at z = 1, carried as degree-2 series centered at 1.
std::pair<double, double> ball_series(const CriticalData& crit, int R,
                                      BallSeriesKind which, BallSeriesEval eval);

/// <|B_R|>_nu = f''(1) R (R-1) / 2 + R, exactly.
double nu_ball_mean(const CriticalData& crit, int R);

} // namespace gentree
