#ifndef PEULER_GAS_HPP
#define PEULER_GAS_HPP

#include <cmath>
#include <stdexcept>
#include <utility>

#include "peuler/errors.hpp"

namespace peuler {

// Problem-wide constants for the isentropic gamma-law gas with the
// x-dependent invariant region [L - K x, M + K x].
struct ProblemParams {
    double gamma = 5.0 / 3.0; // adiabatic exponent, 1 < gamma <= 5/3
    double theta = 1.0 / 3.0; // (gamma - 1)/2, stored to avoid recomputation drift
    double K = 0.0;           // sup-norm bound of the outer force
    double L = 1.0;           // lower invariant anchor at x = 0
    double M = 1.0;           // upper invariant anchor at x = 0
    double eps = 0.0;         // strictness margin in M >= L >= 1 + K + eps
    double mach_bound = 0.0;  // C in |m| <= C rho; 0 means "use default"

    ProblemParams() = default;
    ProblemParams(double gamma_, double K_, double L_, double M_, double eps_ = 0.0)
        : gamma(gamma_), theta(0.5 * (gamma_ - 1.0)), K(K_), L(L_), M(M_), eps(eps_) {
        if (!(gamma > 1.0 && gamma <= 5.0 / 3.0 + 1e-12))
            throw ConfigError("ProblemParams: gamma must lie in (1, 5/3]");
        if (!(K >= 0.0)) throw ConfigError("ProblemParams: K must be nonnegative");
        if (!(M >= L && L >= 1.0 + K + eps))
            throw ConfigError("ProblemParams: condition-M violated (need M >= L >= 1 + K + eps)");
        mach_bound = std::max(std::abs(L), std::abs(M)) + M;
    }
};

// Conservative pair (density, momentum). Vacuum is rho = 0, m = 0.
struct State {
    double rho = 0.0;
    double m = 0.0;

    bool vacuum() const { return rho == 0.0; }
    double velocity() const { return rho > 0.0 ? m / rho : 0.0; }
    bool operator==(const State& o) const { return rho == o.rho && m == o.m; }
};

// Riemann-invariant coordinates z = v - rho^theta/theta, w = v + rho^theta/theta.
struct Invariants {
    double z = 0.0;
    double w = 0.0;
};

struct EntropyPair {
    double eta = 0.0;
    double q = 0.0;
};

inline double pressure(double rho, const ProblemParams& p) {
    if (rho < 0.0) throw std::domain_error("pressure: negative density");
    return std::pow(rho, p.gamma) / p.gamma;
}

// dp/drho = rho^(gamma-1); sound speed is rho^theta.
inline double pressure_derivative(double rho, const ProblemParams& p) {
    return std::pow(rho, p.gamma - 1.0);
}

inline State flux(const State& u, const ProblemParams& p) {
    if (u.vacuum()) return State{0.0, 0.0};
    return State{u.m, u.m * u.m / u.rho + pressure(u.rho, p)};
}

inline Invariants to_invariants(const State& u, const ProblemParams& p) {
    if (u.vacuum()) return Invariants{0.0, 0.0};
    const double v = u.m / u.rho;
    const double c = std::pow(u.rho, p.theta) / p.theta;
    return Invariants{v - c, v + c};
}

inline State from_invariants(const Invariants& iv, const ProblemParams& p) {
    const double spread = iv.w - iv.z;
    if (spread < 0.0) throw std::domain_error("from_invariants: w < z (unphysical)");
    if (spread == 0.0) return State{0.0, 0.0};
    const double rho = std::pow(0.5 * p.theta * spread, 1.0 / p.theta);
    return State{rho, rho * 0.5 * (iv.w + iv.z)};
}

inline std::pair<double, double> char_speeds(const State& u, const ProblemParams& p) {
    if (u.vacuum()) return {0.0, 0.0};
    const double v = u.m / u.rho;
    const double c = std::pow(u.rho, p.theta);
    return {v - c, v + c};
}

inline double lambda1(const State& u, const ProblemParams& p) { return char_speeds(u, p).first; }
inline double lambda2(const State& u, const ProblemParams& p) { return char_speeds(u, p).second; }

// Mechanical energy pair, the canonical convex weak entropy: vanishes at vacuum.
inline EntropyPair mechanical_entropy(const State& u, const ProblemParams& p) {
    if (u.vacuum()) return EntropyPair{0.0, 0.0};
    const double v = u.m / u.rho;
    const double g = p.gamma;
    const double eta = 0.5 * u.m * v + std::pow(u.rho, g) / (g * (g - 1.0));
    const double q = u.m * (0.5 * v * v + std::pow(u.rho, g - 1.0) / (g - 1.0));
    return EntropyPair{eta, q};
}

// sign(lambda(eta_r - eta_l) - (q_r - q_l)) separates shocks from rarefaction
// shocks; >= 0 is the entropy condition across a discontinuity of speed lambda.
inline double entropy_production(const State& ul, const State& ur, double lambda,
                                 const ProblemParams& p) {
    const EntropyPair el = mechanical_entropy(ul, p);
    const EntropyPair er = mechanical_entropy(ur, p);
    return lambda * (er.eta - el.eta) - (er.q - el.q);
}

} // namespace peuler

#endif
