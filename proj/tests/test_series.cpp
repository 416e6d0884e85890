#include "gentree/series.hpp"

#include "gentree/oracle.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace gentree;

namespace {

struct Fam {
    WeightSpec spec;
    CriticalData crit;
    explicit Fam(WeightSpec s) : spec(s), crit(solve_criticality(s)) {}
};

} // namespace

TEST_CASE("partition coefficients: uniform gives Catalan numbers") {
    Fam f(WeightSpec::uniform(64));
    auto zn = partition_coeffs(f.spec, f.crit, 5);
    CHECK(zn[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(zn[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(zn[2] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(zn[3] == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(zn[4] == doctest::Approx(14.0).epsilon(1e-12));
}

TEST_CASE("partition coefficients agree with exhaustive enumeration") {
    for (auto spec : {WeightSpec::uniform(64), WeightSpec::binary(),
                      WeightSpec::from_list({1.0, 0.0, 0.0, 1.0}),
                      WeightSpec::from_list({1.0, 0.5, 0.25})}) {
        Fam f(spec);
        auto zn = partition_coeffs(f.spec, f.crit, 10);
        for (int n = 1; n <= 10; ++n) {
            double ref = oracle_z_n(f.spec, n);
            if (ref == 0.0)
                CHECK(zn[static_cast<std::size_t>(n - 1)] == 0.0);
            else
                CHECK(zn[static_cast<std::size_t>(n - 1)] ==
                      doctest::Approx(ref).epsilon(1e-9));
        }
    }
}

TEST_CASE("first coefficient is w_1") {
    Fam f(WeightSpec::from_list({2.5, 0.0, 0.125}));
    auto zn = partition_coeffs(f.spec, f.crit, 3);
    CHECK(zn[0] == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("binary zero pattern follows the support divisor") {
    Fam f(WeightSpec::binary());
    auto zn = partition_coeffs(f.spec, f.crit, 200);
    for (int n = 1; n <= 200; ++n) {
        if ((n - 1) % 2 == 0)
            CHECK(zn[static_cast<std::size_t>(n - 1)] > 0.0);
        else
            CHECK(zn[static_cast<std::size_t>(n - 1)] == 0.0);
    }
    CHECK(zn[0] == doctest::Approx(1.0));
    CHECK(zn[2] == doctest::Approx(1.0));   // one tree: cherry on a stem
}

TEST_CASE("asymptotic ratio approaches 1") {
    Fam uni(WeightSpec::uniform(512));
    auto zs = partition_coeffs_scaled(uni.spec, uni.crit, 400);
    double r200 = zn_asymptotic_ratio(uni.crit, zs, 200);
    CHECK(std::fabs(r200 - 1.0) < 0.02);
    double prev = 1e9;
    for (int n : {50, 100, 200, 400}) {
        double d = std::fabs(zn_asymptotic_ratio(uni.crit, zs, n) - 1.0);
        CHECK(d < prev);
        prev = d;
    }
    Fam bin(WeightSpec::binary());
    auto zb = partition_coeffs_scaled(bin.spec, bin.crit, 201);
    CHECK(std::fabs(zn_asymptotic_ratio(bin.crit, zb, 201) - 1.0) < 0.02);
    CHECK_THROWS_AS(zn_asymptotic_ratio(bin.crit, zb, 200), std::invalid_argument);   // Z_200 = 0
}

TEST_CASE("ball series first moments are exact") {
    for (auto spec : {WeightSpec::uniform(64), WeightSpec::binary(),
                      WeightSpec::from_list({1.0, 0.5, 0.25})}) {
        Fam f(spec);
        for (int R : {1, 2, 7, 50, 200}) {
            auto [b1, b2] = ball_series(f.crit, R, BallSeriesKind::f_R, BallSeriesEval::moments12);
            CHECK(b1 == doctest::Approx(static_cast<double>(R)).epsilon(1e-9));
            auto [y1, y2] = ball_series(f.crit, R, BallSeriesKind::g_R, BallSeriesEval::moments12);
            CHECK(y1 == doctest::Approx(f.crit.fpp1 * R).epsilon(1e-9));
            (void)b2;
            (void)y2;
        }
        auto [d1, d2] = ball_series(f.crit, 37, BallSeriesKind::k_n, BallSeriesEval::moments12);
        CHECK(d1 == doctest::Approx(1.0).epsilon(1e-9));   // generation sizes are a martingale
        CHECK(d2 == doctest::Approx(f.crit.fpp1 * 36.0).epsilon(1e-9));
    }
}

TEST_CASE("second moments approach the cubic coefficients") {
    for (auto spec : {WeightSpec::uniform(64), WeightSpec::binary()}) {
        Fam f(spec);
        int R = 200;
        auto [b1, b2f] = ball_series(f.crit, R, BallSeriesKind::f_R, BallSeriesEval::moments12);
        double second = b2f + b1;
        CHECK(std::fabs(second / std::pow(R, 3) - f.crit.fpp1 / 3.0) < 0.05 * f.crit.fpp1 / 3.0);
        auto [y1, y2f] = ball_series(f.crit, R, BallSeriesKind::g_R, BallSeriesEval::moments12);
        double second_y = y2f + y1;
        CHECK(std::fabs(second_y / std::pow(R, 3) - f.crit.fpp1 * f.crit.fpp1 / 3.0) <
              0.05 * f.crit.fpp1 * f.crit.fpp1 / 3.0);
    }
}

TEST_CASE("height and profile tails") {
    // uniform: k_n(0) = 1 - 1/n exactly (Moebius iteration of 1/(2-z))
    Fam uni(WeightSpec::uniform(64));
    for (int n : {2, 3, 10, 100, 200}) {
        double k = ball_series(uni.crit, n, BallSeriesKind::k_n, BallSeriesEval::at0).first;
        CHECK(k == doctest::Approx(1.0 - 1.0 / n).epsilon(1e-12));
    }
    for (auto spec : {WeightSpec::uniform(64), WeightSpec::binary(),
                      WeightSpec::from_list({1.0, 0.5, 0.25})}) {
        Fam f(spec);
        int R = 200;
        double kR1 = ball_series(f.crit, R + 1, BallSeriesKind::k_n, BallSeriesEval::at0).first;
        CHECK(std::fabs((1.0 - kR1) * R * f.crit.fpp1 / 2.0 - 1.0) < 0.05);
        // spine-branch profile tail is 2/n for every generic family
        double hn = ball_series(f.crit, R, BallSeriesKind::h_n, BallSeriesEval::at0).first;
        CHECK(std::fabs((1.0 - hn) * R / 2.0 - 1.0) < 0.05);
    }
}

TEST_CASE("ball volume means under the infinite-tree measure") {
    Fam uni(WeightSpec::uniform(64));
    CHECK(nu_ball_mean(uni.crit, 4) == doctest::Approx(16.0).epsilon(1e-12));
    CHECK(nu_ball_mean(uni.crit, 1) == doctest::Approx(1.0).epsilon(1e-12));
    Fam bin(WeightSpec::binary());
    CHECK(nu_ball_mean(bin.crit, 3) == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(nu_ball_mean(bin.crit, 1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("truncated series arithmetic") {
    TruncatedSeries a(3, 0.0), b(3, 0.0);
    a[0] = 1;
    a[1] = 2;
    a[2] = 1;
    b[1] = 1;
    b[3] = 5;
    TruncatedSeries c = a * b;   // (1 + 2u + u^2)(u + 5u^3) mod u^4
    CHECK(c[0] == 0);
    CHECK(c[1] == 1);
    CHECK(c[2] == 2);
    CHECK(c[3] == 6);
}
