#ifndef PEULER_RIEMANN_HPP
#define PEULER_RIEMANN_HPP

#include <utility>
#include <vector>

#include "peuler/gas.hpp"

namespace peuler {

enum class WaveKind {
    Shock1,
    Rarefaction1,
    Shock2,
    Rarefaction2,
    RarefactionShock1,
    RarefactionShock2,
    VacuumFan
};

enum class CurveKind { Shock, InverseShock, Rarefaction };

// One wave of a self-similar fan. [lo, hi] is the speed range; lo == hi for
// discontinuities.
struct Wave {
    WaveKind kind;
    double lo = 0.0;
    double hi = 0.0;
};

// Structured exact Riemann solution. states[i] is the constant state between
// waves[i-1] and waves[i]; states.front()/back() are the data. Vacuum regions
// appear as vacuum states; `vacuum` is set when the solution contains one.
struct WaveFan {
    State left, middle, right;
    bool vacuum = false;
    std::vector<Wave> waves;
    std::vector<State> states;

    double min_speed() const { return waves.empty() ? 0.0 : waves.front().lo; }
    double max_speed() const { return waves.empty() ? 0.0 : waves.back().hi; }
};

// (p(rho) - p(rho0)) / (rho - rho0), continuously extended by p'(rho0).
double pressure_slope(double rho, double rho0, const ProblemParams& p);

// S(rho, rho0) = sqrt(rho (p(rho)-p(rho0)) / (rho0 (rho-rho0))), the mass-flux
// factor in shock speeds, with the removable singularity filled by rho0^theta.
double shock_mass_speed(double rho, double rho0, const ProblemParams& p);

// Velocity on the named wave curve through u0 at density rho. Family 1 curves
// carry the minus sign, family 2 the plus sign; Rarefaction uses the constant
// Riemann invariant of the family. Ordering violations throw std::domain_error.
double wave_curve_velocity(int family, CurveKind kind, double rho, const State& u0,
                           const ProblemParams& p);

// Velocity at density rho on the forward 1-curve through uL (rarefaction for
// rho <= rhoL, shock beyond) and on the backward 2-curve through uR.
double curve1_velocity(const State& uL, double rho, const ProblemParams& p);
double curve2_velocity(const State& uR, double rho, const ProblemParams& p);

// Velocity on the full Rankine-Hugoniot locus through u0 (shock and
// rarefaction-shock branches in one formula); u0 is the left state for family
// 1 and the right state for family 2. Strictly monotone in rho.
double rh_curve_velocity(int family, const State& u0, double rho, const ProblemParams& p);

// Discontinuity speed from the Rankine-Hugoniot relations; uK is the left
// state for family 1 and the right state for family 2... both states given.
double rh_speed(const State& ul, const State& ur, int family, const ProblemParams& p);

// The state connected to uK across a discontinuity of speed sigma on the given
// family branch (uK left for family 1, right for family 2). Exact in the mass
// jump by construction; momentum to solver tolerance.
State rh_connect(const State& uK, double sigma, int family, const ProblemParams& p);

// max of the two Rankine-Hugoniot residual components for (ul, ur, sigma).
double rh_residual(const State& ul, const State& ur, double sigma, const ProblemParams& p);

WaveFan solve_riemann(const State& uL, const State& uR, const ProblemParams& p);

// Self-similar solution value at xi = (x - x0)/t.
State sample_fan(const WaveFan& fan, double xi, const ProblemParams& p);

// integral of (rho, m) over xi in [a, b]; rarefaction interiors by panelled
// Gauss quadrature, constants exactly.
State integrate_fan(const WaveFan& fan, double a, double b, const ProblemParams& p);

// Boundary Riemann problems under the supersonic-inflow assumption
// lambda1 >= 0: the left problem is the full fan restricted to x > 0 (which
// loses nothing), the right problem is free outflow.
WaveFan solve_riemann_boundary_left(const State& ub, const State& uplus,
                                    const ProblemParams& p);
WaveFan solve_riemann_boundary_right(const State& uminus, const ProblemParams& p);

} // namespace peuler

#endif
