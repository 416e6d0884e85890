#include "gentree/validate.hpp"

#include "gentree/criticality.hpp"
#include "gentree/estimators.hpp"
#include "gentree/oracle.hpp"
#include "gentree/samplers.hpp"
#include "gentree/series.hpp"
#include "gentree/stats.hpp"
#include "gentree/walk_gf.hpp"
#include "gentree/weights.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>

namespace gentree {

namespace {

struct Suite {
    std::vector<CheckResult> results;

    void add(const std::string& name, bool pass, const std::string& detail) {
        results.push_back({name, pass, detail});
    }

    template <typename... Args>
    void addf(const std::string& name, bool pass, const char* fmt, Args... args) {
        char buf[256];
        std::snprintf(buf, sizeof buf, fmt, args...);
        results.push_back({name, pass, buf});
    }
};

struct Family {
    std::string name;
    WeightSpec spec;
    CriticalData crit;
};

std::vector<Family> test_families() {
    std::vector<Family> out;
    auto add = [&](const std::string& n, WeightSpec s) {
        CriticalData c = solve_criticality(s);
        out.push_back({n, std::move(s), std::move(c)});
    };
    add("uniform", WeightSpec::uniform(256));
    add("binary", WeightSpec::binary());
    add("w1001", WeightSpec::from_list({1.0, 0.0, 0.0, 1.0}));   // support divisor 3
    add("w_mix", WeightSpec::from_list({1.0, 0.5, 0.25}));
    return out;
}

double rel_err(double a, double b) {
    double scale = std::max({std::fabs(a), std::fabs(b), 1e-300});
    return std::fabs(a - b) / scale;
}

// Exact nu_N sample of a small tree with 2..max_edges edges (uniform family).
Tree random_small_tree(const SamplerTables& tables, RngStream& rng, int max_edges) {
    int n = 2 + static_cast<int>(rng.next_below(static_cast<std::uint32_t>(max_edges - 1)));
    return sample_nu_n(tables, n, rng);
}

double log_uniform(RngStream& rng, double lo, double hi) {
    return lo * std::pow(hi / lo, rng.next_double());
}

// Spine section terminated before s_L: the finite tree whose first-return
// function equals the upper spine bound when the branches are complete.
Tree terminated_tree(const SpineSection& spine, int L) {
    Tree out;
    std::int32_t cur = out.add_child(0);
    for (int i = 1; i <= L - 1; ++i) {
        const auto& sv = spine.vertices[static_cast<std::size_t>(i - 1)];
        for (const auto& b : sv.left) graft_below(out, cur, b, 0);
        std::int32_t nxt = (i < L - 1) ? out.add_child(cur) : -1;
        for (const auto& b : sv.right) graft_below(out, cur, b, 0);
        cur = nxt;
    }
    return out;
}

bool branches_complete(const SpineSection& spine) {
    for (const auto& sv : spine.vertices) {
        for (const auto& b : sv.left)
            if (b.has_open()) return false;
        for (const auto& b : sv.right)
            if (b.has_open()) return false;
    }
    return true;
}

// --------------------------------------------------------------------------
// partition function and series checks
// --------------------------------------------------------------------------

void check_series(Suite& s, const std::vector<Family>& fams) {
    for (const auto& f : fams) {
        auto zn = partition_coeffs(f.spec, f.crit, 8);
        double worst = 0.0;
        for (int n = 1; n <= 8; ++n) {
            double ref = oracle_z_n(f.spec, n);
            double got = zn[static_cast<std::size_t>(n - 1)];
            if (ref == 0.0) {
                worst = std::max(worst, std::fabs(got));
            } else {
                worst = std::max(worst, rel_err(ref, got));
            }
        }
        s.addf("partition_coeffs_vs_enumeration[" + f.name + "]", worst <= 1e-9,
               "max rel err %.3g over N<=8", worst);
    }

    // Asymptotic amplitude ratio at N = 200 (and the divisor-3 family at 199).
    {
        const auto& uni = fams[0];
        auto zs = partition_coeffs_scaled(uni.spec, uni.crit, 400);
        double r200 = zn_asymptotic_ratio(uni.crit, zs, 200);
        s.addf("zn_asymptotic_ratio[uniform,N=200]", std::fabs(r200 - 1.0) <= 0.02,
               "ratio %.6f", r200);
        double prev = 1e9;
        bool monotone = true;
        for (int n : {50, 100, 200, 400}) {
            double d = std::fabs(zn_asymptotic_ratio(uni.crit, zs, n) - 1.0);
            if (d > prev) monotone = false;
            prev = d;
        }
        s.add("zn_ratio_converges[uniform]", monotone, "|ratio-1| decreasing over N=50..400");
    }
    {
        const auto& bin = fams[1];
        auto zs = partition_coeffs_scaled(bin.spec, bin.crit, 201);
        double r = zn_asymptotic_ratio(bin.crit, zs, 201);
        s.addf("zn_asymptotic_ratio[binary,N=201]", std::fabs(r - 1.0) <= 0.02, "ratio %.6f", r);
        bool zeros_ok = true;
        auto zn = partition_coeffs(bin.spec, bin.crit, 200);
        for (int n = 1; n <= 200; ++n) {
            bool should_vanish = (n - 1) % 2 != 0;
            if (should_vanish != (zn[static_cast<std::size_t>(n - 1)] == 0.0)) zeros_ok = false;
        }
        s.add("zn_zero_pattern[binary,d=2]", zeros_ok, "Z_N = 0 exactly when N is even");
    }
    {
        const auto& w3 = fams[2];
        s.addf("support_divisor[w1001]", w3.crit.divisor_d == 3, "d=%d", w3.crit.divisor_d);
        auto zn = partition_coeffs(w3.spec, w3.crit, 100);
        bool zeros_ok = true;
        for (int n = 1; n <= 100; ++n) {
            bool should_vanish = (n - 1) % 3 != 0;
            if (should_vanish != (zn[static_cast<std::size_t>(n - 1)] == 0.0)) zeros_ok = false;
        }
        s.add("zn_zero_pattern[w1001,d=3]", zeros_ok, "Z_N = 0 exactly when 3 does not divide N-1");
    }
}

void check_criticality(Suite& s, const std::vector<Family>& fams) {
    for (const auto& f : fams) {
        double sp = 0.0, snp = 0.0;
        for (std::size_t n = 0; n < f.crit.offspring.size(); ++n) {
            sp += f.crit.offspring[n];
            snp += static_cast<double>(n) * f.crit.offspring[n];
        }
        double f1 = eval_f(f.crit, 1.0, 0), fp1 = eval_f(f.crit, 1.0, 1);
        bool ok = std::fabs(sp - 1.0) < 1e-12 && std::fabs(snp - 1.0) < 1e-12 &&
                  std::fabs(f1 - 1.0) < 1e-12 && std::fabs(fp1 - 1.0) < 1e-12 &&
                  f.crit.z0 < f.spec.rho && f.crit.fpp1 > 0;
        s.addf("criticality_identities[" + f.name + "]", ok,
               "|1-sum p|=%.2g |1-sum np|=%.2g |1-f(1)|=%.2g |1-f'(1)|=%.2g",
               std::fabs(sp - 1.0), std::fabs(snp - 1.0), std::fabs(f1 - 1.0), std::fabs(fp1 - 1.0));
    }
}

// --------------------------------------------------------------------------
// measure characterization: nu_N, phi, B_2 shapes
// --------------------------------------------------------------------------

void check_nu_n(Suite& s, const Family& fam, const ValidateOptions& o) {
    SamplerTables tables(fam.crit);
    for (int N = 3; N <= 5; ++N) {
        if ((N - 1) % fam.crit.divisor_d != 0) continue;
        auto exact = exact_nu_n(fam.spec, N);
        std::map<std::string, std::size_t> idx;
        std::vector<double> expected;
        for (const auto& [t, p] : exact) {
            idx[canonical_code(t)] = expected.size();
            expected.push_back(p);
        }
        std::vector<double> observed(expected.size(), 0.0);
        RngStream rng(o.seed ^ 0xA5A5u, static_cast<std::uint64_t>(N));
        bool unknown_shape = false;
        for (std::size_t i = 0; i < o.nu_n_samples; ++i) {
            Tree t = sample_nu_n(tables, N, rng);
            auto it = idx.find(canonical_code(t));
            if (it == idx.end()) { unknown_shape = true; break; }
            observed[it->second] += 1.0;
        }
        double st = 0, dof = 0;
        double p = chi2_gof_pvalue(observed, expected, static_cast<double>(o.nu_n_samples), 5.0, &st, &dof);
        s.addf("nu_n_frequencies[" + fam.name + ",N=" + std::to_string(N) + "]",
               !unknown_shape && p > 1e-3, "chi2=%.2f dof=%.0f p=%.4g", st, dof, p);
    }
}

void check_kl_law(Suite& s, const Family& fam, const ValidateOptions& o) {
    SamplerTables tables(fam.crit);
    RngStream rng(o.seed ^ 0xB6B6u, 0);
    std::map<std::pair<int, int>, std::size_t> counts;
    for (std::size_t i = 0; i < o.kl_draws; ++i) ++counts[tables.sample_branch_pair(rng)];
    std::vector<double> obs, expd;
    double covered = 0.0;
    int kmax = 0, lmax = 0;
    for (const auto& [kl, c] : counts) {
        kmax = std::max(kmax, kl.first);
        lmax = std::max(lmax, kl.second);
        (void)c;
    }
    for (int k = 0; k <= kmax + 1; ++k)
        for (int l = 0; l <= lmax + 1; ++l) {
            double p = branch_pair_prob(fam.crit, k, l);
            auto it = counts.find({k, l});
            obs.push_back(it == counts.end() ? 0.0 : static_cast<double>(it->second));
            expd.push_back(p);
            covered += p;
        }
    obs.push_back(0.0);
    expd.push_back(std::max(0.0, 1.0 - covered));
    double st = 0, dof = 0;
    double p = chi2_gof_pvalue(obs, expd, static_cast<double>(o.kl_draws), 5.0, &st, &dof);
    s.addf("branch_pair_frequencies[" + fam.name + "]", p > 1e-3,
           "chi2=%.2f dof=%.0f p=%.4g", st, dof, p);
    double tot = 0.0;
    for (int m = 0; m < 400; ++m) tot += (m + 1) * branch_pair_prob(fam.crit, m, 0);
    s.addf("phi_normalization[" + fam.name + "]", std::fabs(tot - 1.0) < 1e-9,
           "sum phi = %.12f", tot);
}

void check_b2_shapes(Suite& s, const Family& fam, const ValidateOptions& o) {
    SamplerTables tables(fam.crit);
    RngStream rng(o.seed ^ 0xC7C7u, 0);
    std::map<std::string, std::size_t> counts;
    for (std::size_t i = 0; i < o.b2_samples; ++i) {
        SpineSection sp = sample_spine(tables, 2, 2, rng);
        ++counts[canonical_code(spine_ball_tree(sp, 2))];
    }
    // every B_2 ball of an infinite tree is a stem with j leaves at depth 2
    double n = static_cast<double>(o.b2_samples);
    bool all_ok = true;
    std::string worst;
    double worst_z = 0.0;
    double mass_seen = 0.0;
    for (int j = 1; j <= 64; ++j) {
        std::string code = "(";
        for (int i = 0; i < j; ++i) code += "()";
        code += ")";
        Tree t = decode_canonical(code);
        double p = measure_ball(fam.crit, t, 2);
        mass_seen += p;
        double expct = p * n;
        auto it = counts.find(code);
        double obs = it == counts.end() ? 0.0 : static_cast<double>(it->second);
        if (expct < 50.0) continue;
        double z = std::fabs(obs - expct) / std::sqrt(n * p * (1.0 - p));
        if (z > worst_z) { worst_z = z; worst = code; }
        if (z > 3.0) all_ok = false;
    }
    s.addf("b2_shape_frequencies[" + fam.name + "]", all_ok && mass_seen > 1.0 - 1e-6,
           "worst shape %s z=%.2f (mass enumerated %.9f)", worst.c_str(), worst_z, mass_seen);
}

void check_measure_ball_norm(Suite& s) {
    // Families with bounded degrees: sum over all height-2 ball shapes = 1.
    for (auto [name, spec] : {std::pair<std::string, WeightSpec>{"binary", WeightSpec::binary()},
                              {"w111", WeightSpec::from_list({1.0, 1.0, 1.0})}}) {
        CriticalData crit = solve_criticality(spec);
        double total = 0.0;
        for (int nEdges = 1; nEdges <= 7; ++nEdges)
            for (const Tree& t : enumerate_trees(nEdges))
                if (t.height() == 2) total += measure_ball(crit, t, 2);
        s.addf("measure_ball_normalization[" + name + "]", std::fabs(total - 1.0) <= 1e-9,
               "sum over height-2 shapes = %.12f", total);
    }
}

void check_acceptance_rate(Suite& s, const Family& fam, const ValidateOptions& o) {
    SamplerTables tables(fam.crit);
    const int N = 4;
    auto zn = partition_coeffs(fam.spec, fam.crit, N);
    double p_accept = zn[N - 1] * std::pow(fam.crit.zeta0, N) / fam.crit.z0;   // mu(|T| = N)
    RngStream rng(o.seed ^ 0xD8D8u, 0);
    std::size_t accepted = 0, attempts = 0;
    const std::size_t target = 5000;
    while (accepted < target) {
        ++attempts;
        try {
            Tree t = sample_gw(tables, rng, std::nullopt, N);
            if (t.size() == N) ++accepted;
        } catch (const TreeTooLarge&) {
        }
    }
    double obs = static_cast<double>(accepted) / static_cast<double>(attempts);
    double se = std::sqrt(p_accept * (1.0 - p_accept) / static_cast<double>(attempts));
    s.addf("nu_n_acceptance_rate[" + fam.name + "]", std::fabs(obs - p_accept) <= 3.0 * se,
           "observed %.5f expected %.5f (3se=%.5f)", obs, p_accept, 3.0 * se);
}

// --------------------------------------------------------------------------
// walk generating functions against the oracle
// --------------------------------------------------------------------------

int t_max_for(double x, double tol) {
    double step = std::sqrt(1.0 - x);
    if (step < 1e-12) return 8;
    int t = static_cast<int>(std::ceil(2.0 * std::log(tol * (1.0 - step)) / std::log(1.0 - x)));
    return std::clamp(t, 8, 2000000);
}

void check_walk_oracle(Suite& s, const ValidateOptions& o) {
    CriticalData crit = solve_criticality(WeightSpec::uniform(64));
    SamplerTables tables(crit);
    RngStream rng(o.seed ^ 0xE9E9u, 0);
    double worst_p = 0.0, worst_q = 0.0;
    for (std::size_t c = 0; c < o.oracle_cases; ++c) {
        Tree t = random_small_tree(tables, rng, 20);
        double x = log_uniform(rng, 0.05, 0.9);
        int tmax = t_max_for(x, 1e-12);
        auto first_ret = walk_sum_q(t, x, 0, 0, WalkMode::first_return, tmax);
        double p = p_finite(t, x);
        double err = std::fabs(p - first_ret.value);
        worst_p = std::max(worst_p, std::max(0.0, err - first_ret.tail_bound));
        auto all = walk_sum_q(t, x, 0, 0, WalkMode::all_walks, tmax);
        double q = q_from_p(p);
        double qerr = std::fabs(q - all.value);
        worst_q = std::max(worst_q, std::max(0.0, qerr - all.tail_bound));
    }
    s.addf("first_return_vs_oracle", worst_p <= 1e-8, "worst excess err %.3g over %zu cases",
           worst_p, o.oracle_cases);
    s.addf("return_gf_vs_oracle", worst_q <= 1e-8, "worst excess err %.3g", worst_q);
}

void check_green_oracle(Suite& s, const ValidateOptions& o) {
    CriticalData crit = solve_criticality(WeightSpec::uniform(64));
    SamplerTables tables(crit);
    RngStream rng(o.seed ^ 0xFAFAu, 0);
    double worst_g = 0.0, worst_w5 = 0.0;
    for (std::size_t c = 0; c < o.oracle_cases; ++c) {
        Tree t = random_small_tree(tables, rng, 12);
        double x = log_uniform(rng, 0.1, 0.6);
        auto v = static_cast<std::int32_t>(1 + rng.next_below(static_cast<std::uint32_t>(t.num_vertices() - 1)));
        int tmax = t_max_for(x, 1e-12);
        auto g_oracle = walk_sum_q(t, x, 0, v, WalkMode::first_passage, tmax);
        double g = green_finite(t, x, v);
        worst_g = std::max(worst_g, std::max(0.0, std::fabs(g - g_oracle.value) - g_oracle.tail_bound));
        // two-point identity: Q(x; v) = Q(x) G(x; v)
        auto q_v = walk_sum_q(t, x, 0, v, WalkMode::all_walks, tmax);
        double qg = q_from_p(p_finite(t, x)) * g;
        worst_w5 = std::max(worst_w5, std::max(0.0, std::fabs(qg - q_v.value) - q_v.tail_bound));
    }
    s.addf("green_product_formula_vs_oracle", worst_g <= 1e-8, "worst excess err %.3g", worst_g);
    s.addf("two_point_split_vs_oracle", worst_w5 <= 1e-8, "worst excess err %.3g", worst_w5);
}

void check_closed_forms(Suite& s) {
    // chain recursion: F_0 = 0, F_m = (1-x)/(2 - F_{m-1}); R_L = F_{L-1}
    double worst_r = 0.0, worst_g = 0.0;
    bool straight_ok = true, g_le_1 = true;
    for (double x : {0.9, 0.5, 0.25, 0.1, 0.01, 1e-4}) {
        double f = 0.0;
        for (int L = 1; L <= 60; ++L) {
            worst_r = std::max(worst_r, std::fabs(r_l_closed(x, L) - f));
            if (1.0 / (1.0 - r_l_closed(x, L)) > static_cast<double>(L) * (1.0 + 1e-12))
                straight_ok = false;
            f = (1.0 - x) / (2.0 - f);
        }
        for (int L = 0; L <= 40; ++L) {
            double g = chain_green_closed(x, L);
            if (g > 1.0 + 1e-12) g_le_1 = false;
            if (L >= 1) {
                Tree chain = make_chain(L);
                double gf = green_finite(chain, x, chain.num_vertices() - 1);
                worst_g = std::max(worst_g, std::fabs(g - gf));
            }
        }
    }
    s.addf("half_line_return_closed_form", worst_r <= 1e-12, "max |R_L - recursion| = %.3g", worst_r);
    s.add("half_line_return_bound", straight_ok, "1/(1-R_L) <= L everywhere");
    s.addf("chain_crossing_closed_form", worst_g <= 1e-11, "max |closed - product| = %.3g", worst_g);
    s.add("chain_crossing_le_1", g_le_1, "G_chain <= 1 everywhere");
}

void check_spine_brackets(Suite& s, const ValidateOptions& o) {
    CriticalData crit = solve_criticality(WeightSpec::uniform(64));
    SamplerTables tables(crit);
    RngStream rng(o.seed ^ 0x1B1Bu, 0);
    double worst_eq = 0.0, worst_out = 0.0;
    std::size_t done = 0;
    while (done < 60) {
        SpineSection sp = sample_spine(tables, 6, 40, rng);
        if (!branches_complete(sp)) continue;
        ++done;
        double x = log_uniform(rng, 0.1, 0.7);
        int L = 2 + static_cast<int>(rng.next_below(4));   // 2..5
        BoundedGF b = p_spine_bounds(sp, x, L);
        if (!(b.lower <= b.upper && b.lower >= 0.0 && b.upper <= 1.0)) worst_out = 1.0;
        if (L >= 2) {
            Tree term = terminated_tree(sp, L);
            double p_exact = p_finite(term, x);
            worst_eq = std::max(worst_eq, std::fabs(p_exact - b.upper));
            auto orc = walk_sum_q(term, x, 0, 0, WalkMode::first_return, t_max_for(x, 1e-12));
            if (orc.value > b.upper + orc.tail_bound + 1e-12 || orc.value + orc.tail_bound < b.lower - 1e-12)
                worst_out = std::max(worst_out, 1.0);
        }
    }
    s.addf("spine_upper_equals_terminated_tree", worst_eq <= 1e-9, "max gap %.3g", worst_eq);
    s.add("spine_bracket_contains_oracle", worst_out == 0.0, "oracle value inside bracket, 60 sections");
}

// --------------------------------------------------------------------------
// pathwise inequality suites
// --------------------------------------------------------------------------

void check_first_return_lower_bound(Suite& s, const ValidateOptions& o) {
    CriticalData crit = solve_criticality(WeightSpec::uniform(64));
    SamplerTables tables(crit);
    RngStream rng(o.seed ^ 0x2C2Cu, 0);
    std::size_t violations = 0;
    for (std::size_t c = 0; c < o.property_cases; ++c) {
        Tree t = random_small_tree(tables, rng, 20);
        double x = log_uniform(rng, 0.05, 0.9);
        if (p_finite(t, x) < 1.0 - static_cast<double>(t.size()) * x - 1e-12) ++violations;
    }
    s.addf("first_return_lower_bound_suite", violations == 0, "%zu violations / %zu cases",
           violations, o.property_cases);
}

void check_spine_lower_bound(Suite& s, const ValidateOptions& o) {
    CriticalData crit = solve_criticality(WeightSpec::uniform(64));
    SamplerTables tables(crit);
    RngStream rng(o.seed ^ 0x3D3Du, 0);
    std::size_t violations = 0;
    for (std::size_t c = 0; c < o.property_cases; ++c) {
        int L = 2 + static_cast<int>(rng.next_below(8));
        SpineSection sp = sample_spine(tables, L + 1, 24, rng);
        double x = log_uniform(rng, 0.01, 0.5);
        BoundedGF b = p_spine_bounds(sp, x, L + 1);   // walks confined to s_1..s_L
        double branch_deficit = 0.0;
        for (int i = 1; i <= L; ++i) {
            const auto& sv = sp.vertices[static_cast<std::size_t>(i - 1)];
            for (const auto& br : sv.left) branch_deficit += 1.0 - p_interval(br, x).lo;
            for (const auto& br : sv.right) branch_deficit += 1.0 - p_interval(br, x).lo;
        }
        double rhs = 1.0 - 1.0 / L - L * x - branch_deficit;
        if (b.lower < rhs - 1e-12) ++violations;
    }
    s.addf("spine_lower_bound_suite", violations == 0, "%zu violations / %zu cases",
           violations, o.property_cases);
}

void check_monotonicity(Suite& s, const ValidateOptions& o) {
    CriticalData crit = solve_criticality(WeightSpec::uniform(64));
    SamplerTables tables(crit);
    RngStream rng(o.seed ^ 0x4E4Eu, 0);
    std::size_t removal_viol = 0, mono_viol = 0;
    for (std::size_t c = 0; c < o.property_cases; ++c) {
        Tree t = random_small_tree(tables, rng, 24);
        double x = log_uniform(rng, 0.05, 0.9);
        // remove the subtree below a random non-root vertex with a parent != root
        std::int32_t v;
        do {
            v = static_cast<std::int32_t>(1 + rng.next_below(static_cast<std::uint32_t>(t.num_vertices() - 1)));
        } while (t.parent(v) == 0);
        Tree pruned;
        // rebuild without the subtree at v
        std::vector<std::int32_t> map(static_cast<std::size_t>(t.num_vertices()), -1);
        std::vector<char> dead(static_cast<std::size_t>(t.num_vertices()), 0);
        dead[static_cast<std::size_t>(v)] = 1;
        map[0] = 0;
        for (std::int32_t u = 1; u < t.num_vertices(); ++u) {
            if (dead[static_cast<std::size_t>(t.parent(u))]) dead[static_cast<std::size_t>(u)] = 1;
            if (dead[static_cast<std::size_t>(u)]) continue;
            map[static_cast<std::size_t>(u)] = pruned.add_child(map[static_cast<std::size_t>(t.parent(u))]);
        }
        if (pruned.child_count(0) != 1 || pruned.size() < 1) continue;
        if (p_finite(pruned, x) < p_finite(t, x) - 1e-12) ++removal_viol;
        double x2 = std::min(1.0, x * (1.0 + rng.next_double()));
        if (p_finite(t, x) < p_finite(t, x2) - 1e-12) ++mono_viol;
    }
    s.addf("branch_removal_monotone_suite", removal_viol == 0, "%zu violations", removal_viol);
    s.addf("p_decreasing_in_x_suite", mono_viol == 0, "%zu violations", mono_viol);
}

void check_pathwise_q_bounds(Suite& s, const ValidateOptions& o) {
    CriticalData crit = solve_criticality(WeightSpec::uniform(128));
    SamplerTables tables(crit);
    std::size_t w7_viol = 0, z29_viol = 0;
    std::size_t case_id = 0;
    for (double x : {0.1, 0.01}) {
        int R = static_cast<int>(std::floor(std::pow(x, -1.0 / 3.0)));
        for (std::size_t c = 0; c < o.property_cases / 2; ++c, ++case_id) {
            NuBallArena arena;
            arena.reset(tables, RngStream(o.seed ^ 0x5F5Fu, case_id));
            auto q = q_bracket_adaptive(arena, tables, x, 1e-3, kDefaultSizeCap, R + 1);
            if (q.hi > 1.0 / std::sqrt(x) + 1e-9) ++w7_viol;
            if (arena.generated_depth() < R) continue;
            if (!q_upper_bound_check(q.hi, x, R, arena.ball_edges(R))) ++z29_viol;
        }
    }
    s.addf("q_sqrt_bound_suite", w7_viol == 0, "%zu violations", w7_viol);
    s.addf("q_ball_bound_suite", z29_viol == 0, "%zu violations", z29_viol);
}

void check_vertex_sum_bound(Suite& s, const ValidateOptions& o) {
    CriticalData crit = solve_criticality(WeightSpec::uniform(64));
    SamplerTables tables(crit);
    RngStream rng(o.seed ^ 0x6A6Au, 0);
    std::size_t violations = 0;
    std::size_t cases = o.property_cases;
    for (std::size_t c = 0; c < cases; ++c) {
        Tree t = random_small_tree(tables, rng, 10);
        double x = log_uniform(rng, 0.2, 0.9);
        int R = 1 + static_cast<int>(rng.next_below(4));
        double total = 0.0;
        int tmax = t_max_for(x, 1e-10);
        for (std::int32_t v = 0; v < t.num_vertices(); ++v) {
            if (t.depth(v) > R) continue;
            auto r = walk_sum_q(t, x, 0, v, WalkMode::all_walks, tmax);
            total += r.value + r.tail_bound;
        }
        if (total > 2.0 / x + 1e-9) ++violations;
    }
    s.addf("ball_vertex_sum_bound_suite", violations == 0, "%zu violations / %zu cases",
           violations, cases);
}

void check_size_biasing(Suite& s, const ValidateOptions& o) {
    CriticalData crit = solve_criticality(WeightSpec::uniform(64));
    SamplerTables tables(crit);
    const int R = 5;
    struct Fn {
        std::string name;
        std::function<double(const Tree&)> u;
    };
    std::vector<Fn> fns;
    fns.push_back({"const_1", [](const Tree&) { return 1.0; }});
    fns.push_back({"ball_volume", [R](const Tree& t) { return static_cast<double>(ball(t, R).size()); }});
    fns.push_back({"profile_is_1", [R](const Tree& t) { return profile(t, R) == 1 ? 1.0 : 0.0; }});
    for (const auto& fn : fns) {
        auto [nu, mu] = size_biasing_check(tables, R, fn.u, 100000, o.seed ^ 0x7B7Bu);
        double se = std::hypot(nu.stderr_, mu.stderr_);
        bool pass = std::fabs(nu.mean - mu.mean) <= std::max(3.0 * se, 1e-12);
        s.addf("size_biasing_identity[" + fn.name + "]", pass,
               "nu=%.5f mu=%.5f (3 combined se = %.5f)", nu.mean, mu.mean, 3.0 * se);
    }
}

// --------------------------------------------------------------------------
// ball-volume series moments and tails
// --------------------------------------------------------------------------

void check_ball_series(Suite& s, const std::vector<Family>& fams) {
    for (const auto& f : fams) {
        double fpp = f.crit.fpp1;
        bool ok = true;
        std::string why;
        for (int R : {1, 2, 5, 20, 200}) {
            auto [m1, m2f] = ball_series(f.crit, R, BallSeriesKind::f_R, BallSeriesEval::moments12);
            if (rel_err(m1, static_cast<double>(R)) > 1e-9) { ok = false; why = "f_R first moment"; }
            auto [y1, y2f] = ball_series(f.crit, R, BallSeriesKind::g_R, BallSeriesEval::moments12);
            if (rel_err(y1, fpp * R) > 1e-9) { ok = false; why = "g_R first moment"; }
            (void)m2f;
            (void)y2f;
        }
        // second moments at R = 200: leading coefficients within 5%
        {
            int R = 200;
            auto [m1, m2f] = ball_series(f.crit, R, BallSeriesKind::f_R, BallSeriesEval::moments12);
            double second = m2f + m1;   // <|B_R|^2>
            double lead = fpp / 3.0 * std::pow(R, 3);
            if (std::fabs(second - lead) > 0.05 * lead) { ok = false; why = "f_R second moment"; }
            auto [y1, y2f] = ball_series(f.crit, R, BallSeriesKind::g_R, BallSeriesEval::moments12);
            double second_y = y2f + y1;
            double lead_y = fpp * fpp / 3.0 * std::pow(R, 3);
            if (std::fabs(second_y - lead_y) > 0.05 * lead_y) { ok = false; why = "g_R second moment"; }
        }
        // height and profile tails at R = 200
        {
            int R = 200;
            double kR1 = ball_series(f.crit, R + 1, BallSeriesKind::k_n, BallSeriesEval::at0).first;
            double height_scaled = (1.0 - kR1) * R * fpp / 2.0;
            if (std::fabs(height_scaled - 1.0) > 0.05) { ok = false; why = "height tail"; }
            double hR = ball_series(f.crit, R, BallSeriesKind::h_n, BallSeriesEval::at0).first;
            double xt = (1.0 - hR) * R / 2.0;
            if (std::fabs(xt - 1.0) > 0.05) { ok = false; why = "profile tail"; }
        }
        s.add("ball_series_moments[" + f.name + "]", ok, ok ? "all closed forms match" : why);
    }
    // uniform: k_n(0) = 1 - 1/n in closed form
    double worst = 0.0;
    for (int n : {2, 5, 17, 100, 200}) {
        double k = ball_series(fams[0].crit, n, BallSeriesKind::k_n, BallSeriesEval::at0).first;
        worst = std::max(worst, std::fabs(k - (1.0 - 1.0 / n)));
    }
    s.addf("generation_tail_closed_form[uniform]", worst <= 1e-12, "max err %.3g", worst);
}

void check_tails(Suite& s, const ValidateOptions& o) {
    CriticalData crit = solve_criticality(WeightSpec::uniform(128));
    SamplerTables tables(crit);
    McOptions mo;
    mo.n_samples = o.tail_samples;
    mo.seed = o.seed ^ 0x8C8Cu;
    mo.workers = o.workers;
    std::vector<double> lambdas;
    for (double l = 0.01; l <= 0.3 + 1e-9; l *= std::pow(30.0, 1.0 / 9.0)) lambdas.push_back(l);
    TailReport rep = tail_checks(tables, 64, lambdas, mo);
    s.addf("ball_lower_tail_shape", rep.correlation <= -0.98 && rep.slope < 0,
           "corr=%.4f slope=%.3f", rep.correlation, rep.slope);
    double ymin = 1e300, ymax = 0.0;
    std::size_t minhits = std::numeric_limits<std::size_t>::max();
    for (std::size_t i = 0; i < rep.y_scaled.size(); ++i) {
        ymin = std::min(ymin, rep.y_scaled[i]);
        ymax = std::max(ymax, rep.y_scaled[i]);
        minhits = std::min(minhits, rep.y_hits[i]);
    }
    s.addf("branch_volume_tail_scaled", minhits >= 30 && ymin > 0 && ymin >= 0.25 * ymax,
           "R*P range [%.3f, %.3f], c'=%.2f, min hits %zu", ymin, ymax, rep.c_prime, minhits);
}

void check_inverse_volume(Suite& s, const ValidateOptions& o) {
    CriticalData crit = solve_criticality(WeightSpec::uniform(128));
    SamplerTables tables(crit);
    McOptions mo;
    mo.n_samples = 20000;
    mo.seed = o.seed ^ 0x9D9Du;
    mo.workers = o.workers;
    VolumeResult vr = estimate_volume(tables, {8, 16, 32, 64, 128}, mo);
    double lo = 1e300, hi = 0.0;
    for (const auto& r : vr.inv_records) {
        double scaled = r.mean * r.abscissa * r.abscissa;
        lo = std::min(lo, scaled);
        hi = std::max(hi, scaled);
    }
    bool slope_ok = vr.inv_fit.exponent >= -2.15 && vr.inv_fit.exponent <= -1.85;
    s.addf("inverse_volume_scaling", slope_ok && hi / lo < 2.5,
           "slope=%.3f R^2<1/|B_R|> in [%.3f, %.3f]", vr.inv_fit.exponent, lo, hi);
}

} // namespace

std::vector<CheckResult> run_validation_suite(const ValidateOptions& opts) {
    Suite s;
    auto fams = test_families();
    check_series(s, fams);
    check_criticality(s, fams);
    check_measure_ball_norm(s);
    check_nu_n(s, fams[0], opts);
    check_nu_n(s, fams[1], opts);
    check_kl_law(s, fams[0], opts);
    check_kl_law(s, fams[1], opts);
    check_b2_shapes(s, fams[0], opts);
    check_b2_shapes(s, fams[1], opts);
    check_acceptance_rate(s, fams[0], opts);
    check_walk_oracle(s, opts);
    check_green_oracle(s, opts);
    check_closed_forms(s);
    check_spine_brackets(s, opts);
    check_first_return_lower_bound(s, opts);
    check_spine_lower_bound(s, opts);
    check_monotonicity(s, opts);
    check_pathwise_q_bounds(s, opts);
    check_vertex_sum_bound(s, opts);
    check_size_biasing(s, opts);
    check_ball_series(s, fams);
    check_tails(s, opts);
    check_inverse_volume(s, opts);
    return s.results;
}

} // namespace gentree
