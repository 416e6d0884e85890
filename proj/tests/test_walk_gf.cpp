#include "gentree/walk_gf.hpp"

#include "gentree/criticality.hpp"
#include "gentree/oracle.hpp"
#include "gentree/rng.hpp"
#include "gentree/samplers.hpp"

#include <doctest.h>

#include <cmath>

using namespace gentree;

namespace {

SamplerTables uniform_tables() {
    static SamplerTables t(solve_criticality(WeightSpec::uniform(128)));
    return t;
}

SamplerTables halfline_tables() {
    static SamplerTables t(CriticalData::halfline_control());
    return t;
}

} // namespace

TEST_CASE("single link first-return value") {
    for (double x : {0.9, 0.5, 0.1, 1.0})
        CHECK(p_finite(make_chain(1), x) == doctest::Approx(1.0 - x).epsilon(1e-14));
}

TEST_CASE("two-site chain against the walk oracle") {
    double x = 0.19;
    auto p = walk_sum_q(make_chain(2), x, 0, 0, WalkMode::first_return, 3000);
    CHECK(std::fabs(p_finite(make_chain(2), x) - p.value) <= p.tail_bound + 1e-10);
}

TEST_CASE("q from p") {
    CHECK(q_from_p(0.0) == doctest::Approx(1.0));
    CHECK(q_from_p(0.5) == doctest::Approx(2.0));
    double x = 0.2;
    CHECK(q_from_p(1.0 - x) == doctest::Approx(1.0 / x));
    CHECK_THROWS_AS(q_from_p(1.0), std::domain_error);
}

TEST_CASE("half line closed form") {
    CHECK(r_l_closed(0.3, 1) == doctest::Approx(0.0));
    CHECK(r_l_closed(0.25, 2) == doctest::Approx(0.375).epsilon(1e-13));  // (1-x)/2
    CHECK(1.0 / (1.0 - r_l_closed(1e-4, 50)) <= 50.0 + 1e-9);
    // matches the bottom-up chain recursion to full precision
    for (double x : {0.6, 0.2, 0.03, 1e-3}) {
        double f = 0.0;
        for (int L = 1; L <= 64; ++L) {
            CHECK(r_l_closed(x, L) == doctest::Approx(f).epsilon(1e-12));
            f = (1.0 - x) / (2.0 - f);
        }
    }
}

TEST_CASE("chain crossing closed form") {
    CHECK(chain_green_closed(0.37, 0) == doctest::Approx(1.0));
    CHECK(chain_green_closed(0.19, 1) == doctest::Approx(0.9).epsilon(1e-13));
    for (int L : {1, 2, 5, 20}) {
        for (double x : {0.7, 0.3, 0.05}) {
            Tree chain = make_chain(L);
            CHECK(chain_green_closed(x, L) ==
                  doctest::Approx(green_finite(chain, x, chain.num_vertices() - 1)).epsilon(1e-12));
            CHECK(chain_green_closed(x, L) <= 1.0 + 1e-12);
        }
        CHECK(chain_green_closed(1e-9, L) == doctest::Approx(1.0).epsilon(1e-3));
    }
}

TEST_CASE("spine bounds on the bare half line reproduce the closed form") {
    RngStream rng(5, 0);
    SpineSection sp = sample_spine(halfline_tables(), 64, 4, rng);
    for (double x : {0.5, 0.1, 0.01}) {
        for (int L : {1, 2, 5, 20, 64}) {
            BoundedGF b = p_spine_bounds(sp, x, L);
            CHECK(b.lower == doctest::Approx(r_l_closed(x, L)).epsilon(1e-12));
            CHECK(b.lower <= b.upper);
            CHECK(b.upper <= 1.0);
        }
    }
}

TEST_CASE("spine brackets tighten and contain the oracle value") {
    SamplerTables tables = uniform_tables();
    RngStream rng(31, 0);
    int done = 0;
    while (done < 25) {
        SpineSection sp = sample_spine(tables, 8, 48, rng);
        bool complete = true;
        for (const auto& v : sp.vertices) {
            for (const auto& b : v.left)
                if (b.has_open()) complete = false;
            for (const auto& b : v.right)
                if (b.has_open()) complete = false;
        }
        if (!complete) continue;
        ++done;
        double x = 0.3;
        double prev_width = 2.0;
        for (int L : {2, 4, 8}) {
            BoundedGF b = p_spine_bounds(sp, x, L);
            CHECK(b.lower <= b.upper);
            double width = b.upper - b.lower;
            CHECK(width <= prev_width + 1e-15);
            prev_width = width;
        }
    }
}

TEST_CASE("bracket width at x=0.1, L=40 is tiny for typical samples") {
    SamplerTables tables = uniform_tables();
    int narrow = 0, total = 0;
    for (int i = 0; i < 40; ++i) {
        RngStream rng(97, static_cast<std::uint64_t>(i));
        SpineSection sp = sample_spine(tables, 40, 60, rng);
        BoundedGF b = p_spine_bounds(sp, 0.1, 40);
        ++total;
        if (b.upper - b.lower < 1e-6) ++narrow;
    }
    CHECK(narrow >= total * 9 / 10);
}

TEST_CASE("green to a spine vertex: half line against a long-chain oracle") {
    RngStream rng(5, 1);
    SpineSection sp = sample_spine(halfline_tables(), 80, 4, rng);
    Tree chain = make_chain(60);   // indistinguishable from the half line near the root
    for (double x : {0.4, 0.1}) {
        for (int n : {1, 2, 5, 10}) {
            GreenBounds g = green_to_spine_vertex(sp, x, n);
            CHECK(g.lower <= g.upper);
            CHECK(g.upper - g.lower < 1e-8 * g.upper + 1e-300);
            auto orc = walk_sum_q(chain, x, 0, n, WalkMode::first_passage, 4000);
            CHECK(g.lower <= orc.value + orc.tail_bound + 1e-10);
            CHECK(g.upper >= orc.value - 1e-10);
        }
    }
}

TEST_CASE("green product formula against the oracle on small trees") {
    SamplerTables tables = uniform_tables();
    RngStream rng(41, 0);
    double worst = 0.0;
    for (int c = 0; c < 200; ++c) {
        int n = 2 + static_cast<int>(rng.next_below(11));
        Tree t = sample_nu_n(tables, n, rng);
        double x = 0.1 + 0.5 * rng.next_double();
        auto v = static_cast<std::int32_t>(1 + rng.next_below(static_cast<std::uint32_t>(t.num_vertices() - 1)));
        auto orc = walk_sum_q(t, x, 0, v, WalkMode::first_passage, 6000);
        worst = std::max(worst, std::fabs(green_finite(t, x, v) - orc.value) - orc.tail_bound);
    }
    CHECK(worst <= 1e-8);
}

TEST_CASE("walks to a vertex factor through the return function") {
    // Q(x; v) = Q(x) G(x; v) pathwise
    SamplerTables tables = uniform_tables();
    RngStream rng(43, 0);
    for (int c = 0; c < 50; ++c) {
        int n = 2 + static_cast<int>(rng.next_below(8));
        Tree t = sample_nu_n(tables, n, rng);
        double x = 0.3;
        auto v = static_cast<std::int32_t>(1 + rng.next_below(static_cast<std::uint32_t>(t.num_vertices() - 1)));
        auto orc = walk_sum_q(t, x, 0, v, WalkMode::all_walks, 4000);
        double split = q_from_p(p_finite(t, x)) * green_finite(t, x, v);
        CHECK(std::fabs(split - orc.value) <= orc.tail_bound + 1e-10);
    }
}

TEST_CASE("green on a branched spine never beats the bare chain from the far end") {
    // walks from s_n back to the root, never revisiting s_n
    SamplerTables tables = uniform_tables();
    RngStream rng(47, 0);
    int done = 0;
    while (done < 40) {
        int n = 2 + static_cast<int>(rng.next_below(10));
        Tree t = sample_nu_n(tables, n, rng);
        if (t.height() < 2) continue;
        ++done;
        // deepest vertex
        std::int32_t v = 1;
        for (std::int32_t u = 1; u < t.num_vertices(); ++u)
            if (t.depth(u) > t.depth(v)) v = u;
        double x = 0.25;
        auto orc = walk_sum_q(t, x, v, 0, WalkMode::first_passage, 4000);
        CHECK(orc.value <= chain_green_closed(x, t.depth(v)) + orc.tail_bound + 1e-12);
    }
}

TEST_CASE("green bracket needs spine margin") {
    RngStream rng(5, 2);
    SpineSection sp = sample_spine(halfline_tables(), 10, 4, rng);
    CHECK_THROWS_AS(green_to_spine_vertex(sp, 0.3, 10), std::invalid_argument);
    CHECK_THROWS_AS(green_to_spine_vertex(sp, 0.3, 0), std::invalid_argument);
    CHECK_NOTHROW(green_to_spine_vertex(sp, 0.3, 9));
}

TEST_CASE("q upper bound check") {
    // single edge: Q = 2 at x = 0.5 and the bound is R + 2/(x |B_R|) = 5
    CHECK(q_upper_bound_check(2.0, 0.5, 1, 1));
    Tree edge = make_chain(1);
    CHECK(q_upper_bound_check(edge, 0.5, 1));
}

TEST_CASE("x = 1 degenerates to the trivial walk") {
    Tree t = make_chain(5);
    CHECK(p_finite(t, 1.0) == doctest::Approx(0.0));
    CHECK(q_from_p(p_finite(t, 1.0)) == doctest::Approx(1.0));
}

TEST_CASE("arena evaluation matches the spine-section path") {
    SamplerTables tables = uniform_tables();
    for (std::uint64_t s = 0; s < 5; ++s) {
        NuBallArena arena;
        arena.reset(tables, RngStream(1234, s));
        arena.extend(tables, 24);
        ArenaEval eval;
        ArenaEvalScratch scratch;
        double x = 0.15;
        eval_arena(arena, x, eval, scratch);
        CHECK(eval.p_root.lo <= eval.p_root.hi);
        CHECK(eval.p_root.hi <= 1.0 - x + 1e-12);
        CHECK(eval.p_root.lo == eval.spine_sub[0].lo);
        GreenBounds g = arena_green(arena, eval, x, 5);
        CHECK(g.lower <= g.upper);
        CHECK(g.lower >= 0.0);
    }
}
