#ifndef PEULER_PERIOD_MAP_HPP
#define PEULER_PERIOD_MAP_HPP

#include <vector>

#include "peuler/forcing.hpp"
#include "peuler/grid.hpp"

namespace peuler {

// lattice vector at one time level of the recurrence; slot i holds
// j = first_j(n) + 2i as in the scheme lattice
struct LatticeState {
    int n = 0;
    std::vector<State> u;

    const State& at(int j, const Grid& g) const { return u[g.slot(j, n)]; }
};

// F(x_j, t_n) tabulated for j in [-1, 2Nx+1] (ghost columns included) and
// n in [0, 2Nt]; the recurrence reuses it across fixed-point iterations
struct ForcingTable {
    int Nx = 0, cols = 0;
    std::vector<double> vals;

    double at(int j, int n) const { return vals[std::size_t(n) * cols + (j + 1)]; }
};
ForcingTable tabulate_forcing(const Forcing& forcing, const Grid& g);

// the per-node correction terms of the recurrence formula
double R_source(double x, double t, const State& u, const Forcing& forcing,
                const ProblemParams& p, const Grid& g, const SchemeParams& sp);
double S_source(double x, double t, const State& u, const Forcing& forcing,
                const ProblemParams& p, const Grid& g, const SchemeParams& sp);

struct LfStats {
    long negative_density_clips = 0;
    long bound_clamps = 0;
};

// one staggered Lax-Friedrichs step of the recurrence with the R/S corrections
// and the averaged forcing term; u_b ghost on the left, copy-out on the right
LatticeState lf_step(const LatticeState& prev, const ForcingTable& table,
                     const Forcing& forcing, const State& ub, const Grid& g,
                     const ProblemParams& pp, const SchemeParams& sp,
                     LfStats* stats = nullptr);

struct FixedPointConfig {
    double delta_dx = -1.0;    // invariant shift delta(dx); < 0 selects dx^0.9
    bool apply_shift = true;   // apply the +/- delta shift of the period map
    bool clamp_to_bounds = true; // clamp iterates into the delta-margin region
    double relaxation = 0.5;   // Krasnoselskii-Mann weight on the new iterate
    int max_iters = 5000;
    double residual_tol = 1e-6; // sup-norm in (z, w) over the lattice
};

double resolve_delta(const FixedPointConfig& cfg, const Grid& g);

// the one-period map F: evolve 2 Nt recurrence steps, then shift the
// invariants inward by delta(dx)
LatticeState period_map(const LatticeState& u0, const ForcingTable& table,
                        const Forcing& forcing, const State& ub, const Grid& g,
                        const ProblemParams& pp, const SchemeParams& sp,
                        const FixedPointConfig& cfg, LfStats* stats = nullptr);

struct ResidualRow {
    int iter = 0;
    double residual = 0.0;
    long clamp_count = 0;
};

struct FixedPointResult {
    LatticeState state;          // best iterate (at n = 0)
    std::vector<ResidualRow> history;
    bool converged = false;
    int iterations = 0;
    double final_residual = 0.0;
    double certificate_residual = 0.0; // independent re-check of the fixed point
    LfStats stats;
};

// relaxed iteration u <- (1-lambda) u + lambda F(u) in (z, w) coordinates
FixedPointResult find_fixed_point(const LatticeState& guess, const Forcing& forcing,
                                  const State& ub, const Grid& g, const ProblemParams& pp,
                                  const SchemeParams& sp, const FixedPointConfig& cfg);

// the steady-profile extension of ub across [0, 1] on the J_0 lattice: the
// default initial guess, inside the region bounds by construction
LatticeState steady_guess(const State& ub, const Grid& g, const ProblemParams& pp);

// full one-period trajectory of the recurrence from a level-0 lattice
std::vector<LatticeState> lf_trajectory(const LatticeState& u0, const ForcingTable& table,
                                        const Forcing& forcing, const State& ub, const Grid& g,
                                        const ProblemParams& pp, const SchemeParams& sp);

} // namespace peuler

#endif
