#include "gentree/weights.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace gentree {

namespace {

void validate(const std::vector<double>& w) {
    if (w.empty() || !(w[0] > 0))
        throw std::invalid_argument("branching weights: w_1 must be > 0");
    bool tail = false;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i] < 0) throw std::invalid_argument("branching weights must be non-negative");
        if (i >= 2 && w[i] > 0) tail = true;
    }
    if (!tail)
        throw std::invalid_argument("branching weights: need w_n > 0 for some n >= 3");
}

} // namespace

double WeightSpec::w(int n) const {
    if (n < 1) return 0.0;
    if (family_tag == "uniform") return 1.0;
    if (n > nmax()) return 0.0;
    return weights[static_cast<std::size_t>(n - 1)];
}

WeightSpec WeightSpec::from_list(std::vector<double> w) {
    validate(w);
    WeightSpec s;
    s.weights = std::move(w);
    s.rho = std::numeric_limits<double>::infinity();
    return s;
}

WeightSpec WeightSpec::uniform(int nmax) {
    if (nmax < 3) throw std::invalid_argument("uniform family: nmax must be >= 3");
    WeightSpec s;
    s.weights.assign(static_cast<std::size_t>(nmax), 1.0);
    s.family_tag = "uniform";
    s.rho = 1.0;
    return s;
}

WeightSpec WeightSpec::binary() { return from_list({1.0, 0.0, 1.0}); }

double eval_g(const WeightSpec& spec, double z, int deriv) {
    if (deriv < 0 || deriv > 2) throw std::invalid_argument("eval_g: deriv must be 0, 1 or 2");
    if (z < 0 || z >= spec.rho) throw std::domain_error("eval_g: z outside [0, rho)");
    if (spec.family_tag == "uniform") {
        // g(z) = 1/(1-z)
        double u = 1.0 - z;
        switch (deriv) {
            case 0: return 1.0 / u;
            case 1: return 1.0 / (u * u);
            default: return 2.0 / (u * u * u);
        }
    }
    // Finite sum; coefficient of z^m in g^{(d)} is w_{m+d+1} * (m+1)...(m+d).
    int top = spec.nmax() - 1 - deriv;
    double acc = 0.0;
    for (int m = top; m >= 0; --m) {
        double c = spec.weights[static_cast<std::size_t>(m + deriv)];
        for (int i = 1; i <= deriv; ++i) c *= static_cast<double>(m + i);
        acc = acc * z + c;
    }
    return acc;
}

double eval_g3(const WeightSpec& spec, double z) {
    if (z < 0 || z >= spec.rho) throw std::domain_error("eval_g3: z outside [0, rho)");
    if (spec.family_tag == "uniform") {
        double u = 1.0 - z;
        return 6.0 / (u * u * u * u);
    }
    int top = spec.nmax() - 4;
    double acc = 0.0;
    for (int m = top; m >= 0; --m) {
        double c = spec.weights[static_cast<std::size_t>(m + 3)] *
                   static_cast<double>(m + 1) * static_cast<double>(m + 2) *
                   static_cast<double>(m + 3);
        acc = acc * z + c;
    }
    return acc;
}

} // namespace gentree
