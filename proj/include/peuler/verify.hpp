#ifndef PEULER_VERIFY_HPP
#define PEULER_VERIFY_HPP

#include <functional>
#include <string>
#include <vector>

#include "peuler/forcing.hpp"
#include "peuler/grid.hpp"
#include "peuler/period_map.hpp"
#include "peuler/scheme.hpp"

namespace peuler {

// the x-dependent invariant region: lower(x) = L - Kx on z, upper(x) = M + Kx on w
struct RegionBounds {
    double L = 1.0, K = 0.0, M = 1.0;
    double margin = 0.0;

    double lower(double x) const { return L - K * x - margin; }
    double upper(double x) const { return M + K * x + margin; }
};

struct RegionReport {
    double max_viol_z = 0.0;
    double max_viol_w = 0.0;
    int worst_j = -1, worst_n = -1;
    bool pass = true;
    double tol = 0.0;

    double max_violation() const { return std::max(max_viol_z, max_viol_w); }
};

// worst violation of the bounds over a lattice; vacuum entries pass vacuously
// (they sit on the rho = 0 face of the region)
RegionReport check_region(const std::vector<LatticeState>& traj, const Grid& g,
                          const RegionBounds& bounds, const ProblemParams& pp, double tol);
RegionReport check_region(const LatticeState& lattice, const Grid& g, const RegionBounds& bounds,
                          const ProblemParams& pp, double tol);
// GridSolution variant checks the pre-cutoff averages E_j^n: the post-cutoff
// states satisfy the bounds identically by construction
RegionReport check_region(const GridSolution& sol, const RegionBounds& bounds, double tol);

// C^1 test function with analytic derivatives
struct TestFunction {
    std::function<double(double, double)> phi;
    std::function<double(double, double)> phi_x;
    std::function<double(double, double)> phi_t;
};

// (1-x^2)^2 * (a + b sin 2 pi t + c cos 2 pi t): vanishes at x = 1, free elsewhere
TestFunction boundary_test_function(double a, double b, double c);
// product of quartic bumps supported strictly inside (0,1) x (0,1)
TestFunction bump_test_function(double x0, double rx, double t0, double rt);
std::vector<TestFunction> random_bumps(int count, unsigned seed);

// any space-time field sampler on [0,1]^2
using FieldSampler = std::function<State(double, double)>;

// piecewise-constant interpretation of a one-period lattice trajectory
FieldSampler lattice_sampler(const std::vector<LatticeState>& traj, const Grid& g);
FieldSampler grid_solution_sampler(const GridSolution& sol);

struct WeakResidual {
    double mass = 0.0;
    double momentum = 0.0;

    double total() const { return std::abs(mass) + std::abs(momentum); }
};

// the two integral identities of the time-periodic weak formulation, by
// composite Simpson refined twice relative to the lattice
WeakResidual weak_residual(const FieldSampler& u, const Forcing& forcing,
                           const TestFunction& phi1, const TestFunction& phi2, const State& ub,
                           const ProblemParams& pp, int n_quad);

// integral of eta psi_t + q psi_x + F m psi with the mechanical pair;
// nonnegative (up to tolerance) for entropy-consistent fields
double entropy_residual(const FieldSampler& u, const Forcing& forcing, const TestFunction& psi,
                        const ProblemParams& pp, int n_quad);

// L1 distance between the t=0 and t=1 lattice slices in (rho, m)
double periodicity_residual(const std::vector<LatticeState>& traj, const Grid& g);

// |M(1) - M(0) - int m_b dt + int m(1,t) dt| on the lattice trajectory
double mass_balance(const std::vector<LatticeState>& traj, const Grid& g, const State& ub);

struct CheckRow {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    bool pass = false;
    std::string location;
};

struct VerificationReport {
    std::vector<CheckRow> checks;
    bool all_pass() const {
        for (const CheckRow& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

// the standard battery for a fixed-point lattice: region containment,
// periodicity, entropy sign over random bumps, weak residual, mass balance
VerificationReport verify_fixed_point(const LatticeState& fixed, const Forcing& forcing,
                                      const State& ub, const Grid& g, const ProblemParams& pp,
                                      const SchemeParams& sp, double residual_tol,
                                      unsigned seed);

} // namespace peuler

#endif
