#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "hslab/params.hpp"

using namespace hslab;

TEST_CASE("critical Sobolev exponent") {
    CHECK(critical_sobolev_exponent(4, 2.0) == Catch::Approx(4.0));
    CHECK(critical_sobolev_exponent(3, 2.0) == Catch::Approx(6.0));
    CHECK(critical_sobolev_exponent(5, 2.5) == Catch::Approx(5.0));
    CHECK_THROWS_AS(critical_sobolev_exponent(3, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(critical_sobolev_exponent(3, 3.0), std::invalid_argument);
}

TEST_CASE("weighted critical exponent") {
    CHECK(hardy_sobolev_exponent(4, 2.0, 1.0) == Catch::Approx(3.0));
    CHECK(hardy_sobolev_exponent(4, 2.0, 0.0) == Catch::Approx(4.0));
    CHECK(hardy_sobolev_exponent(3, 2.0, 1.0) == Catch::Approx(4.0));
    CHECK_THROWS_AS(hardy_sobolev_exponent(3, 2.0, 2.5), std::invalid_argument);
    CHECK_THROWS_AS(hardy_sobolev_exponent(3, 2.0, -0.1), std::invalid_argument);
}

TEST_CASE("Hardy constant") {
    CHECK(hardy_best_constant(3, 2.0) == Catch::Approx(0.25));
    CHECK(hardy_best_constant(4, 2.0) == Catch::Approx(1.0));
    CHECK(hardy_best_constant(5, 2.5) == Catch::Approx(1.0));
    CHECK_THROWS_AS(hardy_best_constant(2, 2.0), std::invalid_argument);
}

TEST_CASE("threshold formula") {
    ProblemParams p421(4, 2.0, 1.0, 0.0);
    CHECK(mountain_pass_threshold(p421, 1.0, 1.0) == Catch::Approx(1.0 / 6.0));
    ProblemParams p320(3, 2.0, 0.0, 0.0);
    CHECK(mountain_pass_threshold(p320, 1.0, 1.0) == Catch::Approx(1.0 / 3.0));
    CHECK_THROWS_AS(mountain_pass_threshold(p320, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(ProblemParams(3, 2.0, 0.0, 0.3), std::invalid_argument);  // mu >= mu1
    CHECK_THROWS_AS(ProblemParams(3, 0.9, 0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(ProblemParams(3, 2.0, 2.0, 0.0), std::invalid_argument);  // s >= p
    CHECK_NOTHROW(ProblemParams(3, 2.0, 1.0, -5.0));
    CHECK_NOTHROW(ProblemParams(7, 3.2, 2.1, 0.4, 2.5));
}

TEST_CASE("exponent identities over random parameters") {
    std::mt19937_64 rng(20240801);
    std::uniform_int_distribution<int> dn(2, 12);
    std::uniform_real_distribution<double> ur(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = dn(rng);
        const double p = 1.0 + (n - 1.0) * (0.05 + 0.9 * ur(rng));
        const double s = p * 0.95 * ur(rng);
        ProblemParams pp(n, p, s, 0.0);

        CHECK(std::abs(1.0 / p - 1.0 / pp.p_star - 1.0 / n) <= 1e-12 / n);
        CHECK(pp.p_star / (pp.p_star - p) ==
              Catch::Approx(double(n) / p).epsilon(1e-12));
        CHECK(pp.p_star_s / (pp.p_star_s - p) ==
              Catch::Approx((n - s) / (p - s)).epsilon(1e-12));

        CHECK(p < pp.p_star_s);
        CHECK(pp.p_star_s <= pp.p_star);
        if (s == 0.0) CHECK(pp.p_star_s == pp.p_star);
        if (s > 0.0) CHECK(pp.p_star_s < pp.p_star);
    }
}
