#ifndef PEULER_SCHEME_HPP
#define PEULER_SCHEME_HPP

#include <functional>
#include <vector>

#include "peuler/cell.hpp"

namespace peuler {

// lattice values on J_n = {j : j + n odd}; slot i holds j = first_j(n) + 2i
struct LatticeLevel {
    int n = 0;
    std::vector<State> u;   // post-cutoff states u_j^n
    std::vector<State> avg; // pre-cutoff averages E_j^n (empty at n = 0 unless averaged)

    const State& at(int j, const Grid& g) const { return u[g.slot(j, n)]; }
};

struct StepStats {
    double max_viol_z = 0.0; // pre-cutoff averages vs the region bounds
    double max_viol_w = 0.0;
    int worst_j = -1, worst_n = -1;
    long vacuum_cutoffs = 0; // averages sent to vacuum by the density cutoff
    long frac_clips = 0;     // fractional-step vacuum crossings while sampling
};

// cells built for one step n -> n+1 with the x-ranges they own
struct BuiltCell {
    CellSolution cell;
    double kept_lo = 0.0, kept_hi = 0.0;
};

struct StepCells {
    int n = 0;
    std::vector<BuiltCell> cells; // ordered by kept_lo, tiling [0, 1]

    State sample(double x, double t, const SourceFrame& frame, const ProblemParams& p) const;
};

// average over ((j-1)dx, (j+1)dx) [half cells at the odd-level boundary indices]
State cell_average(const StepCells& cells, int j, const Grid& g, const SourceFrame& frame,
                   const ProblemParams& p);

// the averaging cutoff of eqn-style clamps: small densities to vacuum, then z
// clamped up to L - K x_j and w clamped down to M + K x_j
State cutoff(const State& avg, int j, int n, const Grid& g, const ProblemParams& p,
             const SchemeParams& sp, StepStats* stats = nullptr);

StepCells build_step(const LatticeLevel& level, const State& ub, const Grid& g,
                     const ProblemParams& pp, const SchemeParams& sp, const Forcing& forcing,
                     int workers = 1);

LatticeLevel average_and_cutoff(const StepCells& cells, const Grid& g, const ProblemParams& pp,
                                const SchemeParams& sp, const Forcing& forcing,
                                StepStats* stats = nullptr);

// one full scheme step: build cells, sample at (n+1)dt - 0, average, cut off
LatticeLevel advance(const LatticeLevel& level, const State& ub, const Grid& g,
                     const ProblemParams& pp, const SchemeParams& sp, const Forcing& forcing,
                     StepStats* stats = nullptr, StepCells* keep_cells = nullptr,
                     int workers = 1);

// full approximate solution over one period
struct GridSolution {
    Grid grid;
    ProblemParams params;
    SchemeParams scheme;
    Forcing forcing;
    State ub;
    std::vector<LatticeLevel> levels; // 0 .. 2 Nt
    std::vector<StepCells> steps;     // size 2 Nt when retained
    bool cells_retained = false;
    StepStats stats;

    State sample(double x, double t) const; // requires retained cells
};

LatticeLevel initial_level(const std::function<State(double)>& u0, const Grid& g,
                           const ProblemParams& pp, const SchemeParams& sp,
                           StepStats* stats = nullptr);

GridSolution evolve_one_period(const std::function<State(double)>& u0, const State& ub,
                               const Grid& g, const ProblemParams& pp, const SchemeParams& sp,
                               const Forcing& forcing, bool retain_cells, int workers = 1);

} // namespace peuler

#endif
