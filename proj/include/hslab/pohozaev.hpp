#pragma once

#include <cmath>
#include <future>
#include <vector>

#include "hslab/grid.hpp"
#include "hslab/params.hpp"
#include "hslab/profile.hpp"
#include "hslab/solvers.hpp"

namespace hslab {

struct PohozaevReport {
    double lhs = 0.0;       // dilation-pairing side
    double boundary = 0.0;  // B(u, eta)
    double identity_residual = 0.0;
    double functional_value = 0.0;
    double q_coefficient_check = 0.0;
};

/// Integration-by-parts identity for the dilation pairing: for smooth u and
/// a cutoff eta supported away from 0 and infinity,
///
///   int |grad u|^{p-2} (grad u, grad (x, grad(eta u)))
///     + (n-p)/p int eta |grad u|^p  =  B(u, eta),
///
/// with B the four first/second-derivative boundary-type terms. Specialized
/// to radial u, eta. Holds for every smooth u, which makes it the module's
/// sharpest property test; the residual is pure quadrature/differentiation
/// error.
inline PohozaevReport identity_check(const ProblemParams& pp, const RadialGrid& g,
                                     const RadialProfile& u, const RadialProfile& eta) {
    const int m = g.size();
    // cutoff support must stay clear of the window ends
    if (std::abs(eta.values[0]) > 0.0 || std::abs(eta.values[m - 1]) > 0.0)
        throw std::domain_error("identity_check: cutoff support touches the grid boundary");

    const std::vector<double> du = profile_derivative(g, u);
    const std::vector<double> ddu = profile_second_derivative(g, u);
    const std::vector<double> de = profile_derivative(g, eta);
    const std::vector<double> dde = profile_second_derivative(g, eta);

    const double pprime = pp.p / (pp.p - 1.0);
    double lhs1 = 0.0, lhs2 = 0.0;
    double b1 = 0.0, b2 = 0.0, b3 = 0.0, b4 = 0.0;
    for (int i = 0; i < m; ++i) {
        const double r = g.nodes[i];
        const double w = g.vol_weights[i];
        const double up = du[i], upp = ddu[i];
        const double ev = eta.values[i], ep = de[i], epp = dde[i];
        const double uv = u.values[i];
        const double phip = detail::phi_p(up, pp.p);
        const double gradp = std::pow(std::abs(up), pp.p);

        // (eta u)' and (eta u)''
        const double w1 = ep * uv + ev * up;
        const double w2 = epp * uv + 2.0 * ep * up + ev * upp;

        lhs1 += w * phip * (w1 + r * w2);  // (grad u, grad (x, grad(eta u)))
        lhs2 += w * ev * gradp;

        b1 += w * uv * phip * ep;
        b2 += w * r * uv * epp * phip;
        b3 += w * r * ep * gradp;
        b4 += w * (1.0 / pprime) * r * ep * gradp;
    }
    const double npp = (double(pp.n) - pp.p) / pp.p;

    PohozaevReport rep;
    rep.lhs = lhs1 + npp * lhs2;
    rep.boundary = b1 + b2 + b3 + b4;
    const double scale = std::abs(lhs1) + std::abs(npp * lhs2) + std::abs(b1) +
                         std::abs(b2) + std::abs(b3) + std::abs(b4);
    rep.identity_residual =
        scale > 0.0 ? std::abs(rep.lhs - rep.boundary) / scale : 0.0;
    return rep;
}

/// The dilation-invariance integral for the power nonlinearity family
///   f(x,u) = mu phi_p(u)|x|^{-p} + phi_{p*(s)}(u)|x|^{-s} + phi_q(u):
///
///   int [ (n-p)/p u f - n F - (x, grad_x F) ] dx.
///
/// The Hardy and weighted-critical contributions cancel node by node (their
/// exponents are exactly scale-critical); what survives is
/// n (1/p* - 1/q) int |u|^q, which vanishes precisely at q = p*.
inline double pohozaev_functional(const ProblemParams& pp, const RadialGrid& g,
                                  const RadialProfile& u, double q) {
    if (!(q > 1.0)) throw std::invalid_argument("pohozaev_functional: need q > 1");
    const double n = double(pp.n);
    const double npp = (n - pp.p) / pp.p;
    const double qs = pp.p_star_s;
    double acc = 0.0;
    for (int i = 0; i < g.size(); ++i) {
        const double uv = u.values[i];
        if (uv == 0.0) continue;
        const double r = g.nodes[i];
        const double w = g.vol_weights[i];
        const double au = std::abs(uv);
        const double hardy = std::pow(r, -pp.p) * std::pow(au, pp.p);
        const double hs = std::pow(r, -pp.s) * std::pow(au, qs);
        const double zq = std::pow(au, q);

        const double uf = pp.mu * hardy + hs + zq;            // u f(x, u)
        const double F = pp.mu * hardy / pp.p + hs / qs + zq / q;
        const double xdF = -pp.p * pp.mu * hardy / pp.p - pp.s * hs / qs;

        acc += w * (npp * uf - n * F - xdF);
    }
    return acc;
}

/// One row of the modified-exponent solve diagnostics.
struct QScanRow {
    double q = 0.0;
    double el_residual = 0.0;
    double q_mass_initial = 0.0;
    double q_mass = 0.0;  // final iterate
    double pohozaev_value = 0.0;
    bool collapsed = false;
    int iterations = 0;
};

/// For each q, attempt the fibering solve with the zero-order exponent q in
/// place of the Sobolev-critical one and record the collapse signature. A
/// genuine solution survives only at q = p*; elsewhere the mass of the
/// zero-order term drains as the residual falls.
inline std::vector<QScanRow> nonexistence_scan(const ProblemParams& pp,
                                               const RadialGrid& g,
                                               const std::vector<double>& q_values,
                                               const SolverOptions& opts = {}) {
    std::vector<std::future<QScanRow>> jobs;
    for (double q : q_values) {
        jobs.push_back(std::async(std::launch::async, [&, q] {
            QScanRow row;
            row.q = q;
            FiberingResult fr = fibering_solve(pp, g, q, extremal_init(g, pp), opts);
            row.el_residual = fr.el_residual;
            row.q_mass_initial = fr.q_mass_initial;
            row.q_mass = fr.q_mass_final;
            row.collapsed = fr.collapsed;
            row.iterations = fr.iterations;
            row.pohozaev_value = pohozaev_functional(pp, g, fr.profile, q);
            return row;
        }));
    }
    std::vector<QScanRow> rows;
    rows.reserve(jobs.size());
    for (auto& j : jobs) rows.push_back(j.get());
    return rows;
}

}  // namespace hslab
