#include "gentree/criticality.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace gentree {

CriticalData CriticalData::halfline_control() {
    CriticalData c;
    c.spec.weights = {1.0, 1.0};   // only w_2 matters for the spine
    c.spec.family_tag = "halfline";
    c.spec.rho = std::numeric_limits<double>::infinity();
    c.z0 = 1.0;
    c.zeta0 = 1.0;                 // phi(0,0) = zeta0 * w_2 = 1
    c.fpp1 = 0.0;
    c.offspring = {0.0, 1.0};      // p_1 = 1: every vertex has one child
    c.divisor_d = 1;
    return c;
}

namespace {

double crit_h(const WeightSpec& spec, double z) {
    return z * eval_g(spec, z, 1) - eval_g(spec, z, 0);
}

} // namespace

CriticalData solve_criticality(const WeightSpec& spec, double tol) {
    if (!(tol > 0)) throw std::invalid_argument("solve_criticality: tol must be > 0");
    if (spec.family_tag == "halfline")
        throw std::invalid_argument("solve_criticality: half-line control is not a generic ensemble");
    // Revalidate (specs may have been built by hand).
    if (spec.nmax() < 1 || !(spec.w(1) > 0))
        throw std::invalid_argument("solve_criticality: w_1 must be > 0");
    bool tail = spec.family_tag == "uniform";
    for (int n = 3; n <= spec.nmax() && !tail; ++n)
        if (spec.w(n) > 0) tail = true;
    if (!tail)
        throw std::invalid_argument("solve_criticality: need w_n > 0 for some n >= 3 "
                                    "(only linear chains otherwise)");

    // h(z) = z g'(z) - g(z) is strictly increasing on (0, rho) with
    // h(0) = -w_1 < 0. Certify a sign change before refining.
    const double eps = 1e-9;
    double lo = 0.0, hi;
    if (std::isfinite(spec.rho)) {
        hi = spec.rho * (1.0 - eps);
        if (!(crit_h(spec, hi) > 0))
            throw std::runtime_error("solve_criticality: no sign change in (0, rho): "
                                     "non-generic or invalid weights");
    } else {
        hi = 1.0;
        while (!(crit_h(spec, hi) > 0)) {
            hi *= 2.0;
            if (hi > 1e100)
                throw std::runtime_error("solve_criticality: criticality equation has no root");
        }
    }

    // Coarse bisection, then Newton to full precision (h'(z) = z g''(z) > 0).
    for (int it = 0; it < 80 && (hi - lo) > 1e-6 * std::max(1.0, hi); ++it) {
        double mid = 0.5 * (lo + hi);
        if (crit_h(spec, mid) > 0) hi = mid; else lo = mid;
    }
    double z0 = 0.5 * (lo + hi);
    for (int it = 0; it < 60; ++it) {
        double hz = crit_h(spec, z0);
        double dz = z0 * eval_g(spec, z0, 2);
        if (!(dz > 0)) break;
        double step = hz / dz;
        double next = z0 - step;
        if (!(next > 0) || (std::isfinite(spec.rho) && next >= spec.rho)) break;
        z0 = next;
        if (std::fabs(step) <= tol * std::fabs(z0)) break;
    }

    if (std::isfinite(spec.rho) && z0 >= spec.rho * (1.0 - 1e-6))
        throw std::runtime_error("solve_criticality: Z_0 at the convergence radius: "
                                 "non-generic ensemble");

    CriticalData crit;
    crit.spec = spec;
    crit.z0 = z0;
    crit.zeta0 = z0 / eval_g(spec, z0, 0);
    crit.fpp1 = crit.zeta0 * z0 * eval_g(spec, z0, 2);
    crit.tail_mass_tol = 1e-12;

    // Offspring table p_n = zeta0 w_{n+1} z0^{n-1}, cut where the remaining
    // tail mass drops below tail_mass_tol, then renormalized.
    std::vector<double> p;
    double zpow = 1.0 / z0;        // z0^{n-1} at n = 0
    double cum = 0.0;
    int n = 0;
    int hard_cap = (spec.family_tag == "uniform") ? 4096 : spec.nmax();
    while (n < hard_cap) {
        double pn = crit.zeta0 * spec.w(n + 1) * zpow;
        p.push_back(pn);
        cum += pn;
        ++n;
        zpow *= z0;
        // The cut must keep both sum p_n and sum n p_n within tail_mass_tol,
        // so weight the remaining mass by the index scale before comparing.
        if (spec.family_tag == "uniform" && (1.0 - cum) * (n + 2) < crit.tail_mass_tol && n >= 2)
            break;
    }
    double total = std::accumulate(p.begin(), p.end(), 0.0);
    if (!(total > 0.5))
        throw std::runtime_error("solve_criticality: degenerate offspring table");
    for (double& v : p) v /= total;
    crit.offspring = std::move(p);

    // Largest common divisor of {n >= 1 : w_{n+1} != 0} (support gap of the weight family).
    int d = 0;
    for (int m = 1; m + 1 <= (spec.family_tag == "uniform" ? 2 : spec.nmax()); ++m)
        if (spec.w(m + 1) > 0) d = std::gcd(d, m);
    crit.divisor_d = d == 0 ? 1 : d;
    return crit;
}

double eval_f(const CriticalData& crit, double z, int deriv) {
    if (deriv < 0 || deriv > 2) throw std::invalid_argument("eval_f: deriv must be 0, 1 or 2");
    double zz = crit.z0 * z;
    if (z < 0 || zz >= crit.spec.rho) throw std::domain_error("eval_f: Z_0 * z outside [0, rho)");
    switch (deriv) {
        case 0: return crit.zeta0 / crit.z0 * eval_g(crit.spec, zz, 0);
        case 1: return crit.zeta0 * eval_g(crit.spec, zz, 1);
        default: return crit.zeta0 * crit.z0 * eval_g(crit.spec, zz, 2);
    }
}

double eval_f3_at1(const CriticalData& crit) {
    return crit.zeta0 * crit.z0 * crit.z0 * eval_g3(crit.spec, crit.z0);
}

double branch_pair_prob(const CriticalData& crit, int k, int l) {
    if (k < 0 || l < 0) throw std::invalid_argument("branch_pair_prob: k, l must be >= 0");
    if (crit.is_halfline()) return (k == 0 && l == 0) ? 1.0 : 0.0;
    return crit.zeta0 * crit.spec.w(k + l + 2) * std::pow(crit.z0, k + l);
}

double measure_ball(const CriticalData& crit, const Tree& tau0, int R) {
    if (R < 1) throw std::invalid_argument("measure_ball: R must be >= 1");
    if (tau0.height() != R)
        throw std::invalid_argument("measure_ball: tau0 must have height exactly R");
    int M = profile(tau0, R);
    double W = 1.0;
    for (std::int32_t v = 1; v < tau0.num_vertices(); ++v) {
        if (tau0.depth(v) <= R - 1) W *= crit.spec.w(tau0.degree(v));
    }
    return static_cast<double>(M) * W * std::pow(crit.z0, M - 1) *
           std::pow(crit.zeta0, tau0.size() - M);
}

} // namespace gentree
