#pragma once

#include <cmath>
#include <stdexcept>

#include "hslab/grid.hpp"
#include "hslab/params.hpp"
#include "hslab/profile.hpp"

namespace hslab {

/// The five integral quantities behind the functional and the quotients.
///
/// Mass terms use the positive part u_+; the quotient path uses |u| instead
/// (see rayleigh_quotient). Both conventions are needed side by side: the
/// functional's critical points and the embedding constants do not mix.
struct EnergyBreakdown {
    double grad_term = 0.0;     // int |grad u|^p
    double hardy_term = 0.0;    // int |u|^p |x|^{-p}
    double triple_norm_p = 0.0; // grad_term - mu * hardy_term
    double sobolev_mass = 0.0;  // int (u_+)^{p*}
    double hs_mass = 0.0;       // int (u_+)^{p*(s)} |x|^{-s}
    double phi = 0.0;           // triple/p - sobolev/p* - hs/p*(s)
};

inline EnergyBreakdown evaluate_energy(const ProblemParams& pp, const RadialGrid& g,
                                       const RadialProfile& u) {
    EnergyBreakdown b;
    b.grad_term = gradient_p_integral(g, u.values, pp.p);
    b.hardy_term = weighted_power_integral(g, u.values, pp.p, pp.p);
    b.triple_norm_p = b.grad_term - pp.mu * b.hardy_term;
    double sob = 0.0, hs = 0.0;
    for (int i = 0; i < g.size(); ++i) {
        const double up = std::max(u.values[i], 0.0);
        if (up == 0.0) continue;
        sob += g.vol_weights[i] * std::pow(up, pp.p_star);
        hs += g.vol_weights[i] * std::pow(g.nodes[i], -pp.s) * std::pow(up, pp.p_star_s);
    }
    b.sobolev_mass = sob;
    b.hs_mass = hs;
    b.phi = b.triple_norm_p / pp.p - b.sobolev_mass / pp.p_star - b.hs_mass / pp.p_star_s;
    return b;
}

/// Rayleigh quotient of the weighted embedding,
///   (int |grad u|^p - mu int |u|^p |x|^{-p}) / (int |u|^{p*(s)} |x|^{-s})^{p/p*(s)},
/// whose infimum is the inverse best constant.
inline double rayleigh_quotient(const ProblemParams& pp, const RadialGrid& g,
                                const RadialProfile& u) {
    const double num = gradient_p_integral(g, u.values, pp.p) -
                       pp.mu * weighted_power_integral(g, u.values, pp.p, pp.p);
    const double den = weighted_power_integral(g, u.values, pp.p_star_s, pp.s);
    if (!(den > 0.0))
        throw std::domain_error("rayleigh_quotient: trivial profile (zero mass)");
    return num / std::pow(den, pp.p / pp.p_star_s);
}

struct FiberMaximum {
    double t_max = 0.0;
    double sup_value = 0.0;
};

namespace detail {

/// Unique positive root of t^{ea} A + t^{eb} B = N (ea, eb > 0), the
/// stationarity condition of the ray map. Newton in log t with a guaranteed
/// bracket; relative accuracy 1e-13.
inline double fiber_root(double N, double A, double ea, double B, double eb) {
    if (A == 0.0) return std::pow(N / B, 1.0 / eb);
    if (B == 0.0) return std::pow(N / A, 1.0 / ea);
    const double thi =
        std::min(std::pow(N / A, 1.0 / ea), std::pow(N / B, 1.0 / eb));
    const double tlo =
        std::min(std::pow(0.5 * N / A, 1.0 / ea), std::pow(0.5 * N / B, 1.0 / eb));
    double llo = std::log(tlo), lhi = std::log(thi);
    auto gv = [&](double lt) {
        return A * std::exp(ea * lt) + B * std::exp(eb * lt) - N;
    };
    double lt = 0.5 * (llo + lhi);
    for (int it = 0; it < 200; ++it) {
        const double f = gv(lt);
        (f < 0.0 ? llo : lhi) = lt;
        const double df = ea * A * std::exp(ea * lt) + eb * B * std::exp(eb * lt);
        double step = f / df;
        double next = lt - step;
        if (!(next > llo && next < lhi)) next = 0.5 * (llo + lhi);
        if (std::abs(next - lt) < 1e-15 * std::max(1.0, std::abs(lt))) { lt = next; break; }
        lt = next;
    }
    return std::exp(lt);
}

}  // namespace detail

/// Maximum of the ray map t -> Phi(t u) from a precomputed breakdown. With a
/// single active mass the value reduces to the closed forms
///   (1/n) (N / A^{p/p*})^{n/p}      and
///   ((p-s)/(p(n-s))) (N / B^{p/p*(s)})^{(n-s)/(p-s)}.
inline FiberMaximum fiber_maximum(const ProblemParams& pp, const EnergyBreakdown& b) {
    const double N = b.triple_norm_p, A = b.sobolev_mass, B = b.hs_mass;
    if (!(N > 0.0)) throw std::domain_error("fiber_maximum: nonpositive norm");
    if (!(A + B > 0.0))
        throw std::domain_error("fiber_maximum: trivial profile, no mountain-pass ray");
    FiberMaximum fm;
    if (B == 0.0) {
        fm.t_max = std::pow(N / A, 1.0 / (pp.p_star - pp.p));
        fm.sup_value = (1.0 / pp.n) *
                       std::pow(N / std::pow(A, pp.p / pp.p_star), double(pp.n) / pp.p);
        return fm;
    }
    if (A == 0.0) {
        const double ns = double(pp.n) - pp.s;
        fm.t_max = std::pow(N / B, 1.0 / (pp.p_star_s - pp.p));
        fm.sup_value = (pp.p - pp.s) / (pp.p * ns) *
                       std::pow(N / std::pow(B, pp.p / pp.p_star_s), ns / (pp.p - pp.s));
        return fm;
    }
    fm.t_max = detail::fiber_root(N, A, pp.p_star - pp.p, B, pp.p_star_s - pp.p);
    const double t = fm.t_max;
    fm.sup_value = std::pow(t, pp.p) * N / pp.p -
                   std::pow(t, pp.p_star) * A / pp.p_star -
                   std::pow(t, pp.p_star_s) * B / pp.p_star_s;
    return fm;
}

struct ThresholdReport {
    double c_star = 0.0;
    double ray_sup = 0.0;
    double gap = 0.0;
    bool passes = false;
};

/// gap = c_star(K0, Ks) - sup_t Phi(t u); positive gap means the ray of u
/// stays strictly below the compactness threshold.
inline ThresholdReport threshold_check(const ProblemParams& pp, const RadialGrid& g,
                                       const RadialProfile& u, double K0, double Ks) {
    const EnergyBreakdown b = evaluate_energy(pp, g, u);
    if (!(b.sobolev_mass + b.hs_mass > 0.0))
        throw std::domain_error("threshold_check: trivial profile");
    ThresholdReport r;
    r.c_star = mountain_pass_threshold(pp, K0, Ks);
    r.ray_sup = fiber_maximum(pp, b).sup_value;
    r.gap = r.c_star - r.ray_sup;
    r.passes = r.gap > 0.0;
    return r;
}

}  // namespace hslab
