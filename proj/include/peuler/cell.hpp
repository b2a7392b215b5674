#ifndef PEULER_CELL_HPP
#define PEULER_CELL_HPP

#include <vector>

#include "peuler/forcing.hpp"
#include "peuler/grid.hpp"
#include "peuler/riemann.hpp"
#include "peuler/steady.hpp"

namespace peuler {

enum class CellCase {
    Constant,  // single quasi-steady profile (right-boundary outflow cell)
    Case1,     // 1-rarefaction + 2-shock
    Case2,     // 1-shock + 2-rarefaction
    Case3,     // two rarefactions
    Case4,     // two shocks
    Appendix1,
    Appendix2,
    Appendix3,
    Appendix4
};

// One region of a cell between two rays from (xc, t0). Steady pieces carry the
// fractional-step source at sampling time; Fan pieces are raw self-similar
// Riemann solutions, used near vacuum, with no source applied.
struct CellPiece {
    enum Kind { Steady, Fan } kind = Steady;
    SteadyProfile bar;
    WaveFan fan;
};

// Which Rankine-Hugoniot pairing a separator ray carries. Chain waves relate
// the perturbed neighbor value to the new constant state; the patch waves
// relate two perturbed profile values; glue rays toward raw-Riemann regions
// are continuity seams with no jump condition.
enum class SeparatorKind { ChainWave1, ChainWave2, PatchLeft, PatchRight, Glue };

// The discrete construction inside one space-time cell: constant-in-similarity
// regions separated by straight rays, Rankine-Hugoniot exact at the middle time
// t_M = t0 + dt/2 across every internal discontinuity.
struct CellSolution {
    double xc = 0.0; // ray origin
    double t0 = 0.0;
    double dt = 0.0;
    double x_lo = 0.0, x_hi = 0.0; // kept extent within [0, 1]
    std::vector<double> speeds;    // separators, strictly increasing
    std::vector<SeparatorKind> sep_kinds;
    std::vector<CellPiece> pieces; // speeds.size() + 1 entries
    CellCase tag = CellCase::Constant;
    bool appendix = false;
    int fan1_size = 0; // p
    int fan2_size = 0; // q
    bool has_patch = false;
    State middle;                      // u_M^diamond (patched) or exact middle
    double sigma_p = 0.0, sigma_s = 0.0;

    State sample(double x, double t, const SourceFrame& frame, const ProblemParams& p) const;

    // positions of every discontinuity / kink of x -> u(x, t), for quadrature
    std::vector<double> breakpoints(double t) const;
};

struct CellGeometry {
    double xc = 0.0;
    double t0 = 0.0;
    double dt = 0.0;
    double x_left_anchor = 0.0;
    double x_right_anchor = 0.0;
    double x_lo = 0.0, x_hi = 0.0;
    int j_index = 0; // lattice index of the center (thresholds, L_j/U_j)
};

// The unperturbed rarefaction-fan ladder of Step 1: invariants stepped by
// dx^alpha from z(uL) to zM at constant w, with the separating rarefaction-
// shock speeds. Also used for the 2-family fans through the mirror symmetry.
struct FanLadder {
    std::vector<double> targets; // z_1* .. z_p* (family 1) or w_1* .. w_q* (family 2)
    std::vector<double> speeds;  // p - 1 separating speeds
    int p = 0;
};
FanLadder rarefaction_fan(const State& uL, double zM, const SchemeParams& sp, const Grid& g,
                          const ProblemParams& p);

CellSolution build_cell(const State& uL, const State& uR, const CellGeometry& g,
                        const Forcing& forcing, const ProblemParams& pp,
                        const SchemeParams& sp, const Grid& grid);

// outflow cell: the steady extension of u anchored at anchor_x
CellSolution build_constant_cell(const State& u, double anchor_x, const CellGeometry& g,
                                 const ProblemParams& pp);

// average of (rho, m) over [a, b] at time t, splitting at all breakpoints;
// exact for piecewise-constant values, Gauss-5 per smooth piece otherwise
State cell_average_over(const CellSolution& cell, double a, double b, double t,
                        const SourceFrame& frame, const ProblemParams& p);

// max Rankine-Hugoniot residual at the middle time across internal rays
double cell_rh_residual_at_tm(const CellSolution& cell, const SourceFrame& frame,
                              const ProblemParams& p);

} // namespace peuler

#endif
