#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "hslab/energy.hpp"
#include "hslab/grid.hpp"
#include "hslab/profile.hpp"

using namespace hslab;

namespace {
RadialGrid default_grid(int n = 3, int m = 4096) {
    return build_log_grid(1e-6, 1e6, m, n);
}
}  // namespace

TEST_CASE("energy breakdown of a closed-form profile") {
    const RadialGrid g = default_grid();
    ProblemParams pp(3, 2.0, 1.0, 0.1);
    const RadialProfile u =
        sample_profile(g, [](double r) { return std::exp(-r); });
    const EnergyBreakdown b = evaluate_energy(pp, g, u);
    CHECK(b.grad_term == Catch::Approx(M_PI).epsilon(1e-6));
    CHECK(b.hardy_term == Catch::Approx(2.0 * M_PI).epsilon(1e-5));
    CHECK(b.triple_norm_p == Catch::Approx(M_PI - 0.1 * 2.0 * M_PI).epsilon(1e-5));
    CHECK(b.phi == Catch::Approx(b.triple_norm_p / 2.0 - b.sobolev_mass / 6.0 -
                                 b.hs_mass / 4.0));
}

TEST_CASE("zero profile gives zero breakdown") {
    const RadialGrid g = default_grid();
    ProblemParams pp(3, 2.0, 1.0, 0.1);
    RadialProfile z;
    z.values.assign(g.size(), 0.0);
    const EnergyBreakdown b = evaluate_energy(pp, g, z);
    CHECK(b.grad_term == 0.0);
    CHECK(b.hardy_term == 0.0);
    CHECK(b.sobolev_mass == 0.0);
    CHECK(b.hs_mass == 0.0);
    CHECK(b.phi == 0.0);
}

TEST_CASE("Hardy inequality on random profiles") {
    const RadialGrid g = default_grid();
    ProblemParams pp(3, 2.0, 1.0, 0.0);
    std::mt19937_64 rng(42);
    for (int k = 0; k < 30; ++k) {
        const RadialProfile u = random_bump_mixture(g, rng);
        const EnergyBreakdown b = evaluate_energy(pp, g, u);
        CHECK(pp.mu1 * b.hardy_term <= b.grad_term * (1.0 + 1e-3));
    }
}

TEST_CASE("norm comparability sandwich") {
    const RadialGrid g = default_grid();
    std::mt19937_64 rng(1234);
    const double mu1 = hardy_best_constant(3, 2.0);
    for (double mu : {-1.0, 0.0, 0.5 * mu1, 0.9 * mu1}) {
        ProblemParams pp(3, 2.0, 1.0, mu);
        for (int k = 0; k < 10; ++k) {
            const RadialProfile u = random_bump_mixture(g, rng);
            const EnergyBreakdown b = evaluate_energy(pp, g, u);
            const double lo = (1.0 - std::max(mu, 0.0) / mu1) * b.grad_term;
            const double hi = (1.0 + std::max(-mu, 0.0) / mu1) * b.grad_term;
            CHECK(b.triple_norm_p >= lo - 1e-10 * b.grad_term);
            CHECK(b.triple_norm_p <= hi + 1e-10 * b.grad_term);
        }
    }
}

TEST_CASE("functional is scale invariant") {
    const RadialGrid g = default_grid();
    ProblemParams pp(3, 2.0, 1.0, 0.1);
    const RadialProfile u = log_bump(g, 0.0, 1.3, 0.9);
    const EnergyBreakdown b0 = evaluate_energy(pp, g, u);
    for (double kappa : {0.125, 8.0}) {
        const EnergyBreakdown bk = evaluate_energy(pp, g, scale(g, pp, u, kappa));
        CHECK(bk.grad_term == Catch::Approx(b0.grad_term).epsilon(1e-6));
        CHECK(bk.hardy_term == Catch::Approx(b0.hardy_term).epsilon(1e-6));
        CHECK(bk.sobolev_mass == Catch::Approx(b0.sobolev_mass).epsilon(1e-6));
        CHECK(bk.hs_mass == Catch::Approx(b0.hs_mass).epsilon(1e-6));
        CHECK(bk.phi == Catch::Approx(b0.phi).epsilon(1e-6));
    }
}

TEST_CASE("quotient homogeneity and trivial input") {
    const RadialGrid g = default_grid();
    ProblemParams pp(3, 2.0, 1.0, 0.1);
    RadialProfile u = log_bump(g, 0.4, 1.0);
    const double q0 = rayleigh_quotient(pp, g, u);
    for (double c : {0.03, -2.0, 41.0}) {
        RadialProfile v = u;
        for (double& x : v.values) x *= c;
        CHECK(rayleigh_quotient(pp, g, v) == Catch::Approx(q0).epsilon(1e-12));
    }
    RadialProfile z;
    z.values.assign(g.size(), 0.0);
    CHECK_THROWS_AS(rayleigh_quotient(pp, g, z), std::domain_error);
}

TEST_CASE("ray maximum closed forms") {
    ProblemParams pp(3, 2.0, 1.0, 0.0);
    // single Sobolev mass: value (1/n) (N / A^{p/p*})^{n/p}
    EnergyBreakdown b;
    b.triple_norm_p = 1.0;
    b.sobolev_mass = 1.0;
    b.hs_mass = 0.0;
    CHECK(fiber_maximum(pp, b).sup_value == Catch::Approx(1.0 / 3.0).epsilon(1e-12));
    // single weighted mass: ((p-s)/(p(n-s))) (N / B^{p/p*(s)})^{(n-s)/(p-s)}
    b.sobolev_mass = 0.0;
    b.hs_mass = 1.0;
    CHECK(fiber_maximum(pp, b).sup_value == Catch::Approx(0.25).epsilon(1e-12));

    // generic single-mass values against the closed forms
    EnergyBreakdown c;
    c.triple_norm_p = 2.31;
    c.sobolev_mass = 0.77;
    c.hs_mass = 0.0;
    const double closed0 =
        (1.0 / 3.0) * std::pow(c.triple_norm_p / std::pow(c.sobolev_mass, 2.0 / 6.0),
                               3.0 / 2.0);
    CHECK(fiber_maximum(pp, c).sup_value == Catch::Approx(closed0).epsilon(1e-8));
    c.sobolev_mass = 0.0;
    c.hs_mass = 1.42;
    const double closeds =
        0.25 * std::pow(c.triple_norm_p / std::pow(c.hs_mass, 2.0 / 4.0), 2.0);
    CHECK(fiber_maximum(pp, c).sup_value == Catch::Approx(closeds).epsilon(1e-8));
}

TEST_CASE("ray maximum with both masses active") {
    ProblemParams pp(3, 2.0, 1.0, 0.0);
    EnergyBreakdown b;
    b.triple_norm_p = 1.7;
    b.sobolev_mass = 0.6;
    b.hs_mass = 0.8;
    const FiberMaximum fm = fiber_maximum(pp, b);

    // first-order condition at the root
    const double t = fm.t_max;
    const double dphi = std::pow(t, pp.p - 1.0) * b.triple_norm_p -
                        std::pow(t, pp.p_star - 1.0) * b.sobolev_mass -
                        std::pow(t, pp.p_star_s - 1.0) * b.hs_mass;
    CHECK(std::abs(dphi) / (std::pow(t, pp.p - 1.0) * b.triple_norm_p) < 1e-10);

    // strictly below each single-mass closed form
    EnergyBreakdown only0 = b;
    only0.hs_mass = 0.0;
    EnergyBreakdown onlys = b;
    onlys.sobolev_mass = 0.0;
    CHECK(fm.sup_value < fiber_maximum(pp, only0).sup_value);
    CHECK(fm.sup_value < fiber_maximum(pp, onlys).sup_value);

    // unimodality of the ray map: increasing before t_max, decreasing after
    auto phi = [&](double tt) {
        return std::pow(tt, 2.0) * b.triple_norm_p / 2.0 -
               std::pow(tt, 6.0) * b.sobolev_mass / 6.0 -
               std::pow(tt, 4.0) * b.hs_mass / 4.0;
    };
    double prev = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double tt = t * k / 100.0;
        CHECK(phi(tt) > prev - 1e-14);
        prev = phi(tt);
    }
    for (int k = 1; k <= 100; ++k) {
        const double tt = t * (1.0 + 2.0 * k / 100.0);
        CHECK(phi(tt) < prev + 1e-14);
        prev = phi(tt);
    }

    EnergyBreakdown trivial;
    trivial.triple_norm_p = 1.0;
    CHECK_THROWS_AS(fiber_maximum(pp, trivial), std::domain_error);
}

TEST_CASE("ray maximum equals the functional at the scaled profile") {
    const RadialGrid g = default_grid();
    ProblemParams pp(3, 2.0, 1.0, 0.1);
    const RadialProfile u = log_bump(g, 0.0, 1.2);
    const EnergyBreakdown b = evaluate_energy(pp, g, u);
    const FiberMaximum fm = fiber_maximum(pp, b);
    RadialProfile tu = u;
    for (double& v : tu.values) v *= fm.t_max;
    const EnergyBreakdown bt = evaluate_energy(pp, g, tu);
    CHECK(bt.phi == Catch::Approx(fm.sup_value).epsilon(1e-9));
}

TEST_CASE("threshold gap and the equality case") {
    const RadialGrid g = default_grid();
    ProblemParams pp(3, 2.0, 1.0, 0.0);
    const RadialProfile u = log_bump(g, 0.0, 1.0);
    const EnergyBreakdown b = evaluate_energy(pp, g, u);

    // choose K0 so the first branch equals the unweighted ray value of u;
    // the weighted term then forces the actual ray strictly below it
    EnergyBreakdown only0 = b;
    only0.hs_mass = 0.0;
    const double sup0 = fiber_maximum(pp, only0).sup_value;
    const double K0 = std::pow(3.0 * sup0, -2.0 / 3.0);
    const double Ks_small = 1e-3;  // pushes the second branch far above the first

    const ThresholdReport tr = threshold_check(pp, g, u, K0, Ks_small);
    CHECK(tr.c_star == Catch::Approx(sup0).epsilon(1e-12));
    CHECK(tr.ray_sup < sup0);
    CHECK(tr.passes);

    RadialProfile z;
    z.values.assign(g.size(), 0.0);
    CHECK_THROWS_AS(threshold_check(pp, g, z, 1.0, 1.0), std::domain_error);
}
