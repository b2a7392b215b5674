#ifndef PEULER_GRID_HPP
#define PEULER_GRID_HPP

#include <cmath>

#include "peuler/errors.hpp"
#include "peuler/gas.hpp"

namespace peuler {

// Discretization knobs. alpha controls the rarefaction-fan step (dx^alpha),
// beta the near-vacuum trigger (dx^beta), delta_exp the averaging cutoff
// (dx^delta). Negative values select the defaults derived from (gamma, alpha).
struct SchemeParams {
    int Nx = 50;
    double alpha = 0.75;
    double beta = -1.0;
    double delta_exp = -1.0;
    double newton_tol = 1e-12;
    int max_newton_iters = 80;
    // reference density for the cutoff thresholds; <= 0 means "apex of the
    // invariant region at each x", which keeps the thresholds meaningful when
    // the admissible densities are far from O(1)
    double rho_scale = -1.0;

    void finalize(const ProblemParams& p) {
        if (Nx < 1) throw ConfigError("SchemeParams: Nx must be positive");
        if (!(alpha > 0.5 && alpha < 1.0))
            throw ConfigError("SchemeParams: alpha must lie in (1/2, 1)");
        if (beta <= 0.0)
            beta = 0.9 * std::min(std::min(alpha - 0.5, 2.0 / (p.gamma + 5.0)),
                                  std::min(0.5 * (1.0 - alpha),
                                           2.0 * alpha / (9.0 - 3.0 * p.gamma)));
        const bool beta_ok = beta < alpha && 0.5 + 0.5 * beta < alpha &&
                             alpha < 1.0 - 2.0 * beta && beta < 2.0 / (p.gamma + 5.0) &&
                             0.5 * (9.0 - 3.0 * p.gamma) * beta < alpha;
        if (!beta_ok) throw ConfigError("SchemeParams: beta violates the fan-exponent constraints");
        const double dmax = 0.5 / p.theta;
        if (delta_exp <= 0.0) delta_exp = 0.5 * (1.0 + dmax);
        if (!(delta_exp > 1.0 && delta_exp < dmax))
            throw ConfigError("SchemeParams: delta_exp must lie in (1, 1/(2 theta))");
    }
};

// Staggered space-time lattice: dx = 1/(2 Nx), dx/dt = floor(2(M+K)) + 1,
// Nt = Nx q so that 2 Nt dt = 1. Values live at j in J_n = {j : j+n odd}.
struct Grid {
    int Nx = 0;
    int q = 0;
    int Nt = 0;
    double dx = 0.0;
    double dt = 0.0;

    int steps_per_period() const { return 2 * Nt; }
    bool on_lattice(int j, int n) const { return ((j + n) & 1) == 1; }
    int first_j(int n) const { return (n % 2 == 0) ? 1 : 0; }
    int count(int n) const { return (n % 2 == 0) ? Nx : Nx + 1; }
    int slot(int j, int n) const { return (j - first_j(n)) / 2; }
    double x(int j) const { return double(j) / (2.0 * Nx); }
    double t(int n) const { return double(n) / (2.0 * Nt); }
};

inline Grid build_grid(const ProblemParams& p, const SchemeParams& sp) {
    Grid g;
    g.Nx = sp.Nx;
    double val = 2.0 * (p.M + p.K);
    double fl = std::floor(val);
    if (val - fl > 1.0 - 1e-12) fl += 1.0; // snap fp noise at exact integers
    g.q = int(fl) + 1;
    g.Nt = g.Nx * g.q;
    g.dx = 1.0 / (2.0 * g.Nx);
    g.dt = 1.0 / (2.0 * g.Nt);
    return g;
}

// density at the apex of the invariant region at position x (z = L-Kx,
// w = M+Kx); the natural density scale of the problem
inline double apex_density(double x, const ProblemParams& p) {
    const double spread = (p.M - p.L) + 2.0 * p.K * x;
    return std::pow(0.5 * p.theta * spread, 1.0 / p.theta);
}

inline double density_scale(double x, const ProblemParams& p, const SchemeParams& sp) {
    return sp.rho_scale > 0.0 ? sp.rho_scale : apex_density(x, p);
}

// averaging cutoff: averages below this density become vacuum lattice states
inline double vacuum_threshold(double x, const Grid& g, const ProblemParams& p,
                               const SchemeParams& sp) {
    return density_scale(x, p, sp) * std::pow(g.dx, sp.delta_exp);
}

// near-vacuum trigger: middle states below this take the raw-Riemann cell path
inline double nearvac_threshold(double x, const Grid& g, const ProblemParams& p,
                                const SchemeParams& sp) {
    return density_scale(x, p, sp) * std::pow(g.dx, sp.beta);
}

} // namespace peuler

#endif
