#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "hslab/params.hpp"

namespace hslab {

namespace detail {

/// Fornberg weights for the k-th derivative at z from the nodes x.
/// Writes one weight per node into c.
inline void fd_weights(double z, std::span<const double> x, int k, double* c) {
    const int nn = int(x.size());
    // full table: rows = nodes, cols = derivative order 0..k
    std::array<std::array<double, 3>, 8> table{};  // up to 8 nodes, order <= 2
    double c1 = 1.0;
    double c4 = x[0] - z;
    table[0][0] = 1.0;
    for (int i = 1; i < nn; ++i) {
        const int mn = std::min(i, k);
        double c2 = 1.0;
        double c5 = c4;
        c4 = x[i] - z;
        for (int j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int v = mn; v >= 1; --v)
                    table[i][v] = c1 * (v * table[i - 1][v - 1] - c5 * table[i - 1][v]) / c2;
                table[i][0] = -c1 * c5 * table[i - 1][0] / c2;
            }
            for (int v = mn; v >= 1; --v)
                table[j][v] = (c4 * table[j][v] - v * table[j][v - 1]) / c3;
            table[j][0] = c4 * table[j][0] / c3;
        }
        c1 = c2;
    }
    for (int j = 0; j < nn; ++j) c[j] = table[j][k];
}

}  // namespace detail

/// Log-spaced radial quadrature grid on [r_min, r_max].
///
/// Panels are uniform in t = ln r and carry two Gauss-Legendre nodes each,
/// so integrals of smooth radial functions converge at fourth order in the
/// panel width. Radial integrals over R^n are evaluated as
///
///   int g(|x|) dx  ~=  surface_factor * sum_i weights[i] r_i^{n-1} g(r_i).
///
/// A banded differentiation matrix (five-point interior stencils, one-sided
/// second-order stencils at the window ends) is attached for d/dr.
struct RadialGrid {
    int dim = 3;
    double r_min = 0.0, r_max = 0.0;
    double surface_factor = 0.0;  // measure of the unit (n-1)-sphere
    std::vector<double> nodes;       // r_i, strictly increasing
    std::vector<double> log_nodes;   // t_i = ln r_i
    std::vector<double> weights;     // w_i with int f(r) dr ~= sum w_i f(r_i)
    std::vector<double> vol_weights; // surface_factor * w_i * r_i^{n-1}

    // banded d/dt rows (widths <= 5, zero-padded)
    std::vector<int> d1_start;
    std::vector<std::array<double, 5>> d1_coef;
    std::vector<std::array<double, 5>> d2_coef;  // d^2/dt^2, same column layout

    int size() const { return int(nodes.size()); }

    /// du/dr at every node.
    std::vector<double> derivative(std::span<const double> u) const {
        const int m = size();
        std::vector<double> out(m);
        for (int i = 0; i < m; ++i) {
            double acc = 0.0;
            const int s = d1_start[i];
            for (int j = 0; j < 5; ++j) acc += d1_coef[i][j] * u[s + j];
            out[i] = acc / nodes[i];  // d/dr = (d/dt)/r
        }
        return out;
    }

    /// Transpose of the d/dr matrix applied to v; exact adjoint of derivative().
    std::vector<double> derivative_transpose(std::span<const double> v) const {
        const int m = size();
        std::vector<double> out(m, 0.0);
        for (int i = 0; i < m; ++i) {
            const double vi = v[i] / nodes[i];
            const int s = d1_start[i];
            for (int j = 0; j < 5; ++j) out[s + j] += d1_coef[i][j] * vi;
        }
        return out;
    }

    /// d2u/dr2 at every node, via u_rr = (u_tt - u_t)/r^2.
    std::vector<double> second_derivative(std::span<const double> u) const {
        const int m = size();
        std::vector<double> out(m);
        for (int i = 0; i < m; ++i) {
            double ut = 0.0, utt = 0.0;
            const int s = d1_start[i];
            for (int j = 0; j < 5; ++j) {
                ut += d1_coef[i][j] * u[s + j];
                utt += d2_coef[i][j] * u[s + j];
            }
            out[i] = (utt - ut) / (nodes[i] * nodes[i]);
        }
        return out;
    }
};

/// Measure of the unit sphere S^{n-1}.
inline double sphere_surface(int n) {
    return 2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n);
}

/// Volume of the unit ball in R^n.
inline double ball_volume(int n) { return sphere_surface(n) / double(n); }

inline RadialGrid build_log_grid(double r_min, double r_max, int m, int n) {
    if (!(r_min > 0.0) || !(r_max > r_min))
        throw std::invalid_argument("build_log_grid: need 0 < r_min < r_max");
    if (m < 16) throw std::invalid_argument("build_log_grid: need m >= 16");
    if (m % 2 != 0) throw std::invalid_argument("build_log_grid: m must be even");
    if (n < 2) throw std::invalid_argument("build_log_grid: need n >= 2");

    RadialGrid g;
    g.dim = n;
    g.r_min = r_min;
    g.r_max = r_max;
    g.surface_factor = sphere_surface(n);

    const int panels = m / 2;
    const double t0 = std::log(r_min), t1 = std::log(r_max);
    const double ht = (t1 - t0) / panels;
    const double off = 0.5 * ht / std::sqrt(3.0);  // two-point Gauss-Legendre

    g.nodes.resize(m);
    g.log_nodes.resize(m);
    g.weights.resize(m);
    g.vol_weights.resize(m);
    for (int pidx = 0; pidx < panels; ++pidx) {
        const double tc = t0 + (pidx + 0.5) * ht;
        const double ta = tc - off, tb = tc + off;
        g.log_nodes[2 * pidx] = ta;
        g.log_nodes[2 * pidx + 1] = tb;
    }
    for (int i = 0; i < m; ++i) {
        g.nodes[i] = std::exp(g.log_nodes[i]);
        g.weights[i] = 0.5 * ht * g.nodes[i];  // dr = r dt
        g.vol_weights[i] = g.surface_factor * g.weights[i] * std::pow(g.nodes[i], n - 1);
    }

    // differentiation rows in t
    g.d1_start.resize(m);
    g.d1_coef.assign(m, {});
    g.d2_coef.assign(m, {});
    for (int i = 0; i < m; ++i) {
        int start, len;
        if (i == 0) {
            start = 0; len = 3;  // one-sided second order at the ends
        } else if (i == m - 1) {
            start = m - 3; len = 3;
        } else if (i == 1 || i == m - 2) {
            start = std::clamp(i - 1, 0, m - 4); len = 4;
        } else {
            start = std::clamp(i - 2, 0, m - 5); len = 5;
        }
        g.d1_start[i] = start;
        std::array<double, 5> w1{}, w2{};
        std::span<const double> xs(g.log_nodes.data() + start, size_t(len));
        detail::fd_weights(g.log_nodes[i], xs, 1, w1.data());
        detail::fd_weights(g.log_nodes[i], xs, 2, w2.data());
        g.d1_coef[i] = w1;
        g.d2_coef[i] = w2;
    }
    return g;
}

/// int_{R^n} |u|^{m_exp} |x|^{-a} dx on the grid window.
inline double weighted_power_integral(const RadialGrid& g, std::span<const double> u,
                                      double m_exp, double a) {
    if (int(u.size()) != g.size())
        throw std::invalid_argument("weighted_power_integral: size mismatch");
    if (a >= double(g.dim)) {
        double umax = 0.0;
        for (double v : u) umax = std::max(umax, std::abs(v));
        if (std::abs(u[0]) > 1e-14 * umax && umax > 0.0)
            throw std::domain_error("weighted_power_integral: weight |x|^{-a}, a >= n, "
                                    "not integrable against nonvanishing u");
    }
    double acc = 0.0;
    for (int i = 0; i < g.size(); ++i) {
        const double av = std::abs(u[i]);
        if (av == 0.0) continue;
        acc += g.vol_weights[i] * std::pow(g.nodes[i], -a) * std::pow(av, m_exp);
    }
    return acc;
}

/// int_{R^n} |u'(|x|)|^p dx with the grid's finite-difference derivative.
inline double gradient_p_integral(const RadialGrid& g, std::span<const double> u, double p) {
    if (int(u.size()) != g.size())
        throw std::invalid_argument("gradient_p_integral: size mismatch");
    const std::vector<double> du = g.derivative(u);
    double acc = 0.0;
    for (int i = 0; i < g.size(); ++i)
        acc += g.vol_weights[i] * std::pow(std::abs(du[i]), p);
    return acc;
}

/// Same integral from a caller-supplied radial derivative.
inline double gradient_p_integral_from(const RadialGrid& g, std::span<const double> du,
                                       double p) {
    double acc = 0.0;
    for (int i = 0; i < g.size(); ++i)
        acc += g.vol_weights[i] * std::pow(std::abs(du[i]), p);
    return acc;
}

/// int_{R^n} |u(|x|)|^p |x + alpha e1|^{-p} dx for radial u.
///
/// Axisymmetric rule: the grid's radial nodes crossed with a Gauss rule in
/// c = cos(theta). Angular weights absorb the (1-c^2)^{(n-3)/2} surface
/// factor and are normalized to integrate constants exactly, so alpha = 0
/// reproduces weighted_power_integral(u, p, p) to rounding.
inline double translated_hardy_integral(const RadialGrid& g, std::span<const double> u,
                                        double alpha, double p, int n_theta = 64) {
    if (alpha < 0.0) throw std::invalid_argument("translated_hardy_integral: alpha >= 0");
    if (n_theta < 2) throw std::invalid_argument("translated_hardy_integral: n_theta >= 2");
    if (alpha == 0.0) return weighted_power_integral(g, u, p, p);

    // Gauss-Legendre nodes/weights on [-1,1] by Newton on Legendre polynomials
    std::vector<double> c(n_theta), wgl(n_theta);
    for (int i = 0; i < n_theta; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n_theta + 0.5));
        for (int it = 0; it < 100; ++it) {
            double pm1 = 1.0, pk = x;
            for (int k = 2; k <= n_theta; ++k) {
                const double pk1 = ((2 * k - 1) * x * pk - (k - 1) * pm1) / k;
                pm1 = pk;
                pk = pk1;
            }
            const double dp = n_theta * (x * pk - pm1) / (x * x - 1.0);
            const double dx = pk / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double pm1 = 1.0, pk = x;
        for (int k = 2; k <= n_theta; ++k) {
            const double pk1 = ((2 * k - 1) * x * pk - (k - 1) * pm1) / k;
            pm1 = pk;
            pk = pk1;
        }
        const double dp = n_theta * (x * pk - pm1) / (x * x - 1.0);
        c[i] = x;
        wgl[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }

    const int n = g.dim;
    std::vector<double> wang(n_theta);
    double wsum = 0.0;
    for (int j = 0; j < n_theta; ++j) {
        wang[j] = wgl[j] * std::pow(std::max(1.0 - c[j] * c[j], 0.0), 0.5 * (n - 3));
        wsum += wang[j];
    }
    const double norm = sphere_surface(n) / wsum;
    for (double& w : wang) w *= norm;

    double acc = 0.0;
    for (int i = 0; i < g.size(); ++i) {
        const double av = std::abs(u[i]);
        if (av == 0.0) continue;
        const double rho = g.nodes[i];
        double ang = 0.0;
        for (int j = 0; j < n_theta; ++j) {
            const double d2 = rho * rho + alpha * alpha + 2.0 * rho * alpha * c[j];
            ang += wang[j] * std::pow(d2, -0.5 * p);
        }
        acc += g.weights[i] * std::pow(rho, n - 1) * std::pow(av, p) * ang;
    }
    return acc;
}

}  // namespace hslab
