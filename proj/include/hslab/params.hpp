#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

namespace hslab {

/// Validated problem parameters for the singular quasilinear equation
///
///   -div(|grad u|^{p-2} grad u) - mu |u|^{p-2}u / |x|^p
///        = |u|^{pstar-2}u + |u|^{pstar_s-2}u / |x|^s   on R^n.
///
/// All derived exponents are cached at construction. Invariants:
///   1 < p < n,  0 <= s < p,  mu < mu1 = ((n-p)/p)^p.
struct ProblemParams {
    int n = 3;
    double p = 2.0;
    double s = 0.0;
    double mu = 0.0;
    std::optional<double> q;  // alternate zero-order exponent, > 1

    // derived
    double p_star = 0.0;    // n p / (n - p)
    double p_star_s = 0.0;  // p (n - s) / (n - p)
    double mu1 = 0.0;       // ((n - p) / p)^p

    ProblemParams() { finalize(); }

    ProblemParams(int n_, double p_, double s_, double mu_,
                  std::optional<double> q_ = std::nullopt)
        : n(n_), p(p_), s(s_), mu(mu_), q(q_) {
        finalize();
    }

    void finalize() {
        if (n < 2) throw std::invalid_argument("params: dimension n must be >= 2");
        if (!(p > 1.0 && p < double(n)))
            throw std::invalid_argument("params: need 1 < p < n");
        if (!(s >= 0.0 && s < p))
            throw std::invalid_argument("params: need 0 <= s < p");
        p_star = double(n) * p / (double(n) - p);
        p_star_s = p * (double(n) - s) / (double(n) - p);
        mu1 = std::pow((double(n) - p) / p, p);
        if (!(mu < mu1))
            throw std::invalid_argument("params: need mu < mu1 = ((n-p)/p)^p");
        if (q && !(*q > 1.0))
            throw std::invalid_argument("params: exponent q must be > 1");
    }
};

/// n p / (n - p).
inline double critical_sobolev_exponent(int n, double p) {
    if (!(p > 1.0 && p < double(n)))
        throw std::invalid_argument("critical_sobolev_exponent: need 1 < p < n");
    return double(n) * p / (double(n) - p);
}

/// p (n - s) / (n - p); collapses to the Sobolev exponent at s = 0.
inline double hardy_sobolev_exponent(int n, double p, double s) {
    if (!(p > 1.0 && p < double(n)))
        throw std::invalid_argument("hardy_sobolev_exponent: need 1 < p < n");
    if (!(s >= 0.0 && s < p))
        throw std::invalid_argument("hardy_sobolev_exponent: need 0 <= s < p");
    return p * (double(n) - s) / (double(n) - p);
}

/// Optimal constant ((n-p)/p)^p of the Hardy inequality
///   mu1 * int |u|^p |x|^{-p} <= int |grad u|^p.
inline double hardy_best_constant(int n, double p) {
    if (!(p > 1.0 && p < double(n)))
        throw std::invalid_argument("hardy_best_constant: need 1 < p < n");
    return std::pow((double(n) - p) / p, p);
}

/// Energy ceiling below which the min-max level must sit:
///   min{ (1/n) K0^{-n/p},  ((p-s)/(p(n-s))) Ks^{-(n-s)/(p-s)} }.
/// K0 and Ks are the best embedding constants for s = 0 and the given s.
inline double mountain_pass_threshold(const ProblemParams& pp, double K0, double Ks) {
    if (!(K0 > 0.0) || !(Ks > 0.0))
        throw std::invalid_argument("mountain_pass_threshold: constants must be positive");
    const double n = double(pp.n);
    const double b1 = std::pow(K0, -n / pp.p) / n;
    const double b2 = (pp.p - pp.s) / (pp.p * (n - pp.s)) *
                      std::pow(Ks, -(n - pp.s) / (pp.p - pp.s));
    return std::min(b1, b2);
}

}  // namespace hslab
