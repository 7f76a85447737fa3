#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "hslab/energy.hpp"
#include "hslab/grid.hpp"
#include "hslab/params.hpp"
#include "hslab/profile.hpp"

namespace hslab {

namespace detail {

/// int_{B_delta} f(|x|) |x|^{-a} dx for node-sampled f. Whole panels inside
/// the ball use the grid rule; the panel containing delta is split and the
/// partial piece gets its own two-point Gauss nodes with f interpolated, so
/// the cut radius enters smoothly rather than at node granularity.
inline double ball_integral(const RadialGrid& g, std::span<const double> f, double a,
                            double delta) {
    if (!(delta > g.r_min && delta < g.r_max))
        throw std::invalid_argument("ball_integral: delta outside grid window");
    const int m = g.size();
    const double td = std::log(delta);
    const double t0 = std::log(g.r_min);
    const double ht = (std::log(g.r_max) - t0) / (m / 2);
    const int panel = std::min(int((td - t0) / ht), m / 2 - 1);
    const double n = double(g.dim);

    double acc = 0.0;
    for (int i = 0; i < 2 * panel; ++i)
        acc += g.vol_weights[i] * std::pow(g.nodes[i], -a) * f[i];

    const double ta = t0 + panel * ht;
    const double hw = 0.5 * (td - ta);
    if (hw > 0.0) {
        std::vector<double> ff(f.begin(), f.end());
        PchipInterpolant interp(g.log_nodes, ff);
        const double off = hw / std::sqrt(3.0);
        for (double tq : {ta + hw - off, ta + hw + off}) {
            const double r = std::exp(tq);
            acc += g.surface_factor * hw * std::pow(r, n - a) * interp(tq);
        }
    }
    return acc;
}

}  // namespace detail

/// Ball-localized share of the three blow-up quantities.
struct ConcentrationTriple {
    double alpha = 0.0;  // int_{B_delta} (u_+)^{p*}
    double beta = 0.0;   // int_{B_delta} (u_+)^{p*(s)} |x|^{-s}
    double gamma = 0.0;  // int_{B_delta} (|grad u|^p - mu |u|^p |x|^{-p})
    double delta = 0.0;
};

inline ConcentrationTriple concentration_triple(const ProblemParams& pp,
                                                const RadialGrid& g,
                                                const RadialProfile& u, double delta) {
    const int m = g.size();
    std::vector<double> fa(m), fb(m), fg(m), fh(m);
    const std::vector<double> du = profile_derivative(g, u);
    for (int i = 0; i < m; ++i) {
        const double up = std::max(u.values[i], 0.0);
        fa[i] = up > 0.0 ? std::pow(up, pp.p_star) : 0.0;
        fb[i] = up > 0.0 ? std::pow(up, pp.p_star_s) : 0.0;
        fg[i] = std::pow(std::abs(du[i]), pp.p);
        fh[i] = std::pow(std::abs(u.values[i]), pp.p);
    }
    ConcentrationTriple t;
    t.alpha = detail::ball_integral(g, fa, 0.0, delta);
    t.beta = detail::ball_integral(g, fb, pp.s, delta);
    t.gamma = detail::ball_integral(g, fg, 0.0, delta) -
              pp.mu * detail::ball_integral(g, fh, pp.p, delta);
    t.delta = delta;
    return t;
}

/// Rescaled family [scale(u, r_k)]; concentrating as the rates grow.
inline std::vector<RadialProfile> bubble_sequence(const RadialGrid& g,
                                                  const ProblemParams& pp,
                                                  const RadialProfile& u,
                                                  const std::vector<double>& rates) {
    std::vector<RadialProfile> out;
    double prev = 0.0;
    for (double r : rates) {
        if (!(r > 0.0) || r <= prev)
            throw std::invalid_argument("bubble_sequence: rates must be positive increasing");
        prev = r;
        out.push_back(scale(g, pp, u, r));
    }
    return out;
}

struct ConcentrationRatios {
    double ratio_sobolev = 0.0;  // alpha^{p/p*} / (K0 gamma)
    double ratio_hs = 0.0;       // beta^{p/p*(s)} / (Ks gamma)
    double gamma = 0.0;
};

/// Instances of the localized embedding inequalities on a profile forced
/// into the ball by a smooth cutoff; both ratios are quotient evaluations
/// against the best constants and hence at most one.
inline ConcentrationRatios check_concentration_inequalities(const ProblemParams& pp,
                                                            const RadialGrid& g,
                                                            const RadialProfile& u,
                                                            double delta, double K0,
                                                            double Ks) {
    double umax = 0.0;
    for (double v : u.values) umax = std::max(umax, std::abs(v));
    if (umax == 0.0) return {};  // degenerate input: defined zero ratios

    const RadialProfile cut = multiply(u, ball_cutoff(g, delta));
    const EnergyBreakdown b = evaluate_energy(pp, g, cut);
    if (!(b.triple_norm_p > 0.0))
        throw std::domain_error(
            "check_concentration_inequalities: nonpositive localized norm");
    ConcentrationRatios r;
    r.gamma = b.triple_norm_p;
    r.ratio_sobolev =
        std::pow(b.sobolev_mass, pp.p / pp.p_star) / (K0 * b.triple_norm_p);
    r.ratio_hs =
        std::pow(b.hs_mass, pp.p / pp.p_star_s) / (Ks * b.triple_norm_p);
    return r;
}

struct TranslationRow {
    double alpha = 0.0;
    double quotient = 0.0;
};

struct TranslationSweep {
    double quotient_mu0 = 0.0;  // limit value as the shift grows
    std::vector<TranslationRow> rows;
};

/// Quotients of the shifted profiles u(x - alpha e1) for mu <= 0, s = 0.
/// Gradient and critical mass are translation invariant; only the singular
/// potential term moves, computed by the axisymmetric rule.
inline TranslationSweep translation_sweep(const ProblemParams& pp, const RadialGrid& g,
                                          const RadialProfile& u,
                                          const std::vector<double>& alphas,
                                          int n_theta = 64) {
    if (!(pp.mu <= 0.0) || pp.s != 0.0)
        throw std::invalid_argument("translation_sweep: needs mu <= 0 and s = 0");
    const double G = gradient_p_integral(g, u.values, pp.p);
    const double A = weighted_power_integral(g, u.values, pp.p_star, 0.0);
    if (!(A > 0.0)) throw std::domain_error("translation_sweep: trivial profile");
    const double den = std::pow(A, pp.p / pp.p_star);

    TranslationSweep sw;
    sw.quotient_mu0 = G / den;
    for (double a : alphas) {
        const double H = translated_hardy_integral(g, u.values, a, pp.p, n_theta);
        sw.rows.push_back({a, (G - pp.mu * H) / den});
    }
    return sw;
}

}  // namespace hslab
