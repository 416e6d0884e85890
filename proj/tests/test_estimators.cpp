#include "gentree/estimators.hpp"

#include "gentree/criticality.hpp"
#include "gentree/run_config.hpp"
#include "gentree/series.hpp"
#include "gentree/walk_gf.hpp"

#include <doctest.h>

#include <cmath>

using namespace gentree;

namespace {

McOptions small_opts(std::size_t n, std::uint64_t seed = 1) {
    McOptions o;
    o.n_samples = n;
    o.seed = seed;
    o.workers = 2;
    return o;
}

} // namespace

TEST_CASE("fit identity: exact power law comes back to machine precision") {
    std::vector<EstimateRecord> recs;
    for (double x : {1e-2, 1e-3, 1e-4, 1e-5}) {
        EstimateRecord r;
        r.abscissa = x;
        r.mean = std::pow(x, -1.0 / 3.0);
        r.stderr_ = 1e-9 * r.mean;
        r.n_samples = 1;
        recs.push_back(r);
    }
    FitResult f = fit_spectral(recs);
    CHECK(f.exponent == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
    CHECK(2.0 - 2.0 * f.exponent == doctest::Approx(4.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("fit preconditions") {
    std::vector<EstimateRecord> recs(3);
    CHECK_THROWS(fit_spectral(recs));
    recs.resize(4);
    for (std::size_t i = 0; i < 4; ++i) {
        recs[i].abscissa = 0.1 / (1.0 + static_cast<double>(i));   // less than 2 decades
        recs[i].mean = 1.0;
        recs[i].stderr_ = 0.1;
    }
    CHECK_THROWS(fit_spectral(recs));
}

TEST_CASE("x = 1 gives Q = 1 exactly") {
    SamplerTables tables(solve_criticality(WeightSpec::uniform(64)));
    auto recs = estimate_q(tables, {1.0}, small_opts(64));
    CHECK(recs[0].mean == doctest::Approx(1.0));
    CHECK(recs[0].stderr_ == doctest::Approx(0.0));
    CHECK(recs[0].bracket_residual == doctest::Approx(0.0));
}

TEST_CASE("half-line control: Q(x) = x^{-1/2} with collapsing brackets") {
    SamplerTables tables(CriticalData::halfline_control());
    std::vector<double> xs = {0.25, 0.0625, 1.0 / 256};
    auto recs = estimate_q(tables, xs, small_opts(16));
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double exact = 1.0 / std::sqrt(xs[i]);
        CHECK(recs[i].mean == doctest::Approx(exact).epsilon(2e-3));
        // the certified residual really bounds the truncation offset
        CHECK(std::fabs(recs[i].mean - exact) <= recs[i].bracket_residual + 1e-12);
        CHECK(recs[i].stderr_ <= 1e-12 * recs[i].mean);   // every sample identical
        CHECK(recs[i].censored == 0);
    }
}

TEST_CASE("half-line control: mass estimator reproduces the analytic decay rate") {
    SamplerTables tables(CriticalData::halfline_control());
    std::vector<double> xs = {1.0 / 64, 1.0 / 256};
    McOptions o = small_opts(8);
    o.bracket_tol = 1e-9;
    MassResult mr = estimate_mass(tables, xs, {}, o);
    for (std::size_t xi = 0; xi < xs.size(); ++xi) {
        double x = xs[xi];
        double m_exact = -0.5 * std::log1p(-x) + std::log1p(std::sqrt(x));
        CHECK(std::fabs(mr.m_hat[xi] - m_exact) <= 1e-6);
    }
}

TEST_CASE("volume estimator hits the closed form and the quadratic growth") {
    SamplerTables tables(solve_criticality(WeightSpec::uniform(128)));
    McOptions o = small_opts(8000, 17);
    VolumeResult vr = estimate_volume(tables, {4, 8, 16, 32}, o);
    CriticalData crit = solve_criticality(WeightSpec::uniform(128));
    for (const auto& r : vr.mean_records) {
        double want = nu_ball_mean(crit, static_cast<int>(r.abscissa));
        CHECK(std::fabs(r.mean - want) <= 3.0 * r.total_uncertainty());
    }
    CHECK(vr.dh_fit.exponent > 1.8);
    CHECK(vr.dh_fit.exponent < 2.2);
}

TEST_CASE("doubling the sample count moves means by a few standard errors") {
    SamplerTables tables(solve_criticality(WeightSpec::uniform(128)));
    std::vector<double> xs = {0.05, 0.01};
    auto a = estimate_q(tables, xs, small_opts(2000, 7));
    auto b = estimate_q(tables, xs, small_opts(4000, 7));   // same seed prefix
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double se = std::hypot(a[i].stderr_, b[i].stderr_);
        CHECK(std::fabs(a[i].mean - b[i].mean) <= 4.0 * se + a[i].bracket_residual +
                                                     b[i].bracket_residual);
    }
}

TEST_CASE("worker count does not change results") {
    SamplerTables tables(solve_criticality(WeightSpec::uniform(128)));
    std::vector<double> xs = {0.1, 0.02};
    McOptions o1 = small_opts(1000, 23);
    o1.workers = 1;
    McOptions o2 = small_opts(1000, 23);
    o2.workers = 4;
    auto a = estimate_q(tables, xs, o1);
    auto b = estimate_q(tables, xs, o2);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        CHECK(a[i].mean == b[i].mean);         // bitwise
        CHECK(a[i].stderr_ == b[i].stderr_);
    }
}

TEST_CASE("two-point decay obeys the exponential sandwich") {
    SamplerTables tables(solve_criticality(WeightSpec::uniform(128)));
    std::vector<double> xs = {1.0 / 64};
    MassResult mr = estimate_mass(tables, xs, {}, small_opts(2000, 29));
    double m = mr.m_hat[0];
    CHECK(m > 0);
    double x = xs[0];
    for (const auto& r : mr.records[0]) {
        if (!(r.mean > 0) || r.abscissa < 5) continue;
        double n = r.abscissa;
        // lower sandwich arm: sqrt(x) e^{-m n} <= Q(x;n), within uncertainties
        CHECK(std::sqrt(x) * std::exp(-m * n) <= r.mean + 5.0 * r.total_uncertainty() + 1e-12);
    }
}

TEST_CASE("q bracket adaptivity reports depth and convergence") {
    SamplerTables tables(solve_criticality(WeightSpec::uniform(128)));
    NuBallArena arena;
    arena.reset(tables, RngStream(31, 12));
    auto q = q_bracket_adaptive(arena, tables, 0.02, 1e-3, kDefaultSizeCap);
    CHECK(q.converged);
    CHECK(q.lo <= q.hi);
    CHECK(q.hi <= 1.0 / std::sqrt(0.02) + 1e-12);
    CHECK(q.depth >= 8);
}

TEST_CASE("tail report: probabilities increase with lambda") {
    SamplerTables tables(solve_criticality(WeightSpec::uniform(128)));
    McOptions o = small_opts(4000, 37);
    TailReport rep = tail_checks(tables, 32, {0.02, 0.05, 0.1, 0.2, 0.4}, o);
    for (std::size_t i = 1; i < rep.prob.size(); ++i) CHECK(rep.prob[i] >= rep.prob[i - 1]);
    CHECK(rep.y_scaled.size() == 3);
}

TEST_CASE("config round trip and hashing") {
    RunConfig cfg;
    cfg.family = "binary";
    cfg.seed = 42;
    std::string js = config_to_json(cfg);
    CHECK(js.find("\"binary\"") != std::string::npos);
    CHECK(config_hash(cfg) != config_hash(RunConfig{}));
    CHECK(family_crit(cfg).divisor_d == 2);
}
