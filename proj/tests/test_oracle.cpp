#include "gentree/oracle.hpp"

#include "gentree/criticality.hpp"
#include "gentree/rng.hpp"
#include "gentree/samplers.hpp"
#include "gentree/walk_gf.hpp"

#include <doctest.h>

#include <cmath>

using namespace gentree;

TEST_CASE("single edge walk sums by hand") {
    Tree edge = make_chain(1);
    double x = 0.36;
    auto p = walk_sum_q(edge, x, 0, 0, WalkMode::first_return, 400);
    CHECK(std::fabs(p.value - (1.0 - x)) <= p.tail_bound + 1e-15);
    auto q = walk_sum_q(edge, x, 0, 0, WalkMode::all_walks, 400);
    CHECK(std::fabs(q.value - 1.0 / x) <= q.tail_bound + 1e-12);
}

TEST_CASE("three-edge star with stem matches the recursion") {
    Tree star;
    auto v = star.add_child(0);
    star.add_child(v);
    star.add_child(v);
    double x = 0.25;
    auto p = walk_sum_q(star, x, 0, 0, WalkMode::first_return, 1200);
    CHECK(p.value == doctest::Approx(p_finite(star, x)).epsilon(1e-9));
}

TEST_CASE("tail bound brackets the truth") {
    Tree t = make_chain(4);
    double x = 0.3;
    double exact = q_from_p(p_finite(t, x));
    for (int tmax : {10, 50, 200}) {
        auto r = walk_sum_q(t, x, 0, 0, WalkMode::all_walks, tmax);
        CHECK(r.value <= exact + 1e-12);
        CHECK(exact <= r.value + r.tail_bound + 1e-12);
    }
}

TEST_CASE("exact nu_N tables") {
    SUBCASE("uniform N=3: two shapes, probability one half each") {
        auto out = exact_nu_n(WeightSpec::uniform(16), 3);
        REQUIRE(out.size() == 2);
        CHECK(out[0].second == doctest::Approx(0.5));
        CHECK(out[1].second == doctest::Approx(0.5));
    }
    SUBCASE("binary N=3: single cherry-on-stem shape") {
        auto out = exact_nu_n(WeightSpec::binary(), 3);
        REQUIRE(out.size() == 1);
        CHECK(out[0].second == doctest::Approx(1.0));
        CHECK(canonical_code(out[0].first) == "(()())");
    }
    SUBCASE("N=1 is the single edge") {
        auto out = exact_nu_n(WeightSpec::from_list({1.0, 2.0, 3.0}), 1);
        REQUIRE(out.size() == 1);
        CHECK(out[0].second == doctest::Approx(1.0));
        CHECK(canonical_code(out[0].first) == "()");
    }
    SUBCASE("integer weights stay exact: masses sum to Z_N without rounding") {
        for (int n = 1; n <= 8; ++n) {
            WeightSpec spec = WeightSpec::from_list({1.0, 2.0, 1.0, 3.0});
            double z = 0.0;
            for (const Tree& t : enumerate_trees(n)) z += tree_weight(spec, t);
            CHECK(z == oracle_z_n(spec, n));   // bitwise: integer-valued doubles
        }
    }
    SUBCASE("guards") {
        CHECK_THROWS(exact_nu_n(WeightSpec::uniform(16), 9));
        CHECK_THROWS(walk_sum_q(make_chain(1), 1.5, 0, 0, WalkMode::all_walks, 10));
    }
}

TEST_CASE("first return agrees with the recursion over a random corpus") {
    CriticalData crit = solve_criticality(WeightSpec::uniform(64));
    SamplerTables tables(crit);
    RngStream rng(23, 0);
    double worst = 0.0, worst_q = 0.0;
    for (int c = 0; c < 200; ++c) {
        int n = 2 + static_cast<int>(rng.next_below(19));
        Tree t = sample_nu_n(tables, n, rng);
        double x = 0.05 * std::pow(0.9 / 0.05, rng.next_double());
        double step = std::sqrt(1.0 - x);
        int tmax = std::min(2000000, static_cast<int>(std::ceil(
                                          std::log(1e-12 * (1.0 - step)) / std::log(step))));
        auto p = walk_sum_q(t, x, 0, 0, WalkMode::first_return, tmax);
        worst = std::max(worst, std::fabs(p.value - p_finite(t, x)) - p.tail_bound);
        auto q = walk_sum_q(t, x, 0, 0, WalkMode::all_walks, tmax);
        worst_q = std::max(worst_q, std::fabs(q.value - q_from_p(p_finite(t, x))) - q.tail_bound);
    }
    CHECK(worst <= 1e-8);
    CHECK(worst_q <= 1e-8);
}
