#include "peuler/cell.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "peuler/roots.hpp"

namespace peuler {

namespace {

const double kGaussX[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                           0.5384693101056831, 0.9061798459386640};
const double kGaussW[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                           0.4786286704993665, 0.2369268850561891};

State mirror_state(const State& u) { return State{u.rho, -u.m}; }

WaveKind mirror_kind(WaveKind k) {
    switch (k) {
        case WaveKind::Shock1: return WaveKind::Shock2;
        case WaveKind::Shock2: return WaveKind::Shock1;
        case WaveKind::Rarefaction1: return WaveKind::Rarefaction2;
        case WaveKind::Rarefaction2: return WaveKind::Rarefaction1;
        case WaveKind::RarefactionShock1: return WaveKind::RarefactionShock2;
        case WaveKind::RarefactionShock2: return WaveKind::RarefactionShock1;
        default: return k;
    }
}

WaveFan mirror_fan(const WaveFan& fan) {
    WaveFan out;
    out.left = mirror_state(fan.right);
    out.right = mirror_state(fan.left);
    out.middle = mirror_state(fan.middle);
    out.vacuum = fan.vacuum;
    out.states.reserve(fan.states.size());
    for (auto it = fan.states.rbegin(); it != fan.states.rend(); ++it)
        out.states.push_back(mirror_state(*it));
    out.waves.reserve(fan.waves.size());
    for (auto it = fan.waves.rbegin(); it != fan.waves.rend(); ++it)
        out.waves.push_back(Wave{mirror_kind(it->kind), -it->hi, -it->lo});
    return out;
}

SteadyProfile mirror_profile(const SteadyProfile& bar, double xc) {
    SteadyProfile out;
    out.xd = 2.0 * xc - bar.xd;
    out.zd = -bar.wd;
    out.wd = -bar.zd;
    out.kappa = -bar.kappa;
    out.anchor = mirror_state(bar.anchor);
    return out;
}

CellPiece steady_piece(const SteadyProfile& bar) {
    CellPiece piece;
    piece.kind = CellPiece::Steady;
    piece.bar = bar;
    return piece;
}

CellPiece fan_piece(const WaveFan& fan) {
    CellPiece piece;
    piece.kind = CellPiece::Fan;
    piece.fan = fan;
    return piece;
}

CellPiece mirror_cell_piece(const CellPiece& piece, double xc) {
    if (piece.kind == CellPiece::Steady) return steady_piece(mirror_profile(piece.bar, xc));
    return fan_piece(mirror_fan(piece.fan));
}

// state on the 1-family Rankine-Hugoniot locus through the left state uA with
// prescribed 1-invariant; z is strictly decreasing in rho along the locus
State curve_state_z(const State& uA, double z_target, const ProblemParams& p) {
    auto g = [&](double rho) {
        return rh_curve_velocity(1, uA, rho, p) - std::pow(rho, p.theta) / p.theta - z_target;
    };
    double hi = 2.0 * uA.rho;
    if (g(hi) > 0.0) {
        const double lo = hi;
        hi *= 2.0;
        expand_bracket_up([&](double r) { return -g(r); }, lo, hi, 400, "curve_state_z");
    }
    RootOpts opt;
    opt.tol = 1e-14 * (1.0 + std::abs(z_target));
    opt.what = "curve_state_z";
    const double rho = solve_bracketed(g, 1e-300, hi, opt);
    const double v = rh_curve_velocity(1, uA, rho, p);
    return State{rho, rho * v};
}

// state on the 2-family locus through the right state uD with prescribed w
State curve_state_w(const State& uD, double w_target, const ProblemParams& p) {
    auto g = [&](double rho) {
        return rh_curve_velocity(2, uD, rho, p) + std::pow(rho, p.theta) / p.theta - w_target;
    };
    double hi = 2.0 * uD.rho;
    if (g(hi) < 0.0) {
        const double lo = hi;
        hi *= 2.0;
        expand_bracket_up(g, lo, hi, 400, "curve_state_w");
    }
    RootOpts opt;
    opt.tol = 1e-14 * (1.0 + std::abs(w_target));
    opt.what = "curve_state_w";
    const double rho = solve_bracketed(g, 1e-300, hi, opt);
    const double v = rh_curve_velocity(2, uD, rho, p);
    return State{rho, rho * v};
}

struct BuildCtx {
    const CellGeometry* g;
    SourceFrame frame;
    const ProblemParams* pp;
    const SchemeParams* sp;
    const Grid* grid;
    double tM;

    double xray(double sigma) const { return g->xc + 0.5 * sigma * g->dt; }
};

State profile_value_at_tm(const BuildCtx& ctx, const SteadyProfile& bar, double sigma) {
    bool clipped = false;
    const State u =
        fractional_step(bar, ctx.xray(sigma), ctx.tM, ctx.g->t0, ctx.frame, *ctx.pp, &clipped);
    if (clipped || u.vacuum()) {
        std::ostringstream os;
        os << "cell build: profile hit vacuum at x=" << ctx.xray(sigma) << " (j=" << ctx.g->j_index
           << ", t0=" << ctx.g->t0 << ")";
        throw SolverError(os.str());
    }
    return u;
}

// conditions (k.a)-(k.c): the wave speed sigma, left value taken from the
// neighbor profile at (x_sigma, t_M), and the new constant state with the
// prescribed invariant, coupled through x_sigma = xc + sigma dt/2. The map
// sigma -> RH speed is a strong contraction (the profile varies on the K dt
// scale), so fixed-point iteration resolves it.
struct ChainWave {
    double sigma;
    State u;
};

ChainWave solve_chain_wave(const BuildCtx& ctx, const SteadyProfile& neighbor, int family,
                           double target_invariant, double sigma_guess) {
    double sigma = sigma_guess;
    State cand;
    const double tol = 0.5 * ctx.sp->newton_tol;
    for (int it = 0; it < ctx.sp->max_newton_iters; ++it) {
        const State uN = profile_value_at_tm(ctx, neighbor, sigma);
        cand = family == 1 ? curve_state_z(uN, target_invariant, *ctx.pp)
                           : curve_state_w(uN, target_invariant, *ctx.pp);
        const double next = family == 1 ? rh_speed(uN, cand, 1, *ctx.pp)
                                        : rh_speed(cand, uN, 2, *ctx.pp);
        const double change = std::abs(next - sigma);
        sigma = next;
        if (change <= tol * (1.0 + std::abs(sigma))) return ChainWave{sigma, cand};
    }
    std::ostringstream os;
    os << "cell build: chain wave iteration stalled (j=" << ctx.g->j_index << ", t0=" << ctx.g->t0
       << ", family=" << family << ", target=" << target_invariant << ")";
    throw SolverError(os.str());
}

// recover the patch anchor state u_M from its required perturbed value at
// (x_eval, t_M); the profile is anchored at the cell center
Invariants invert_profile(const BuildCtx& ctx, const State& value, double x_eval) {
    const Invariants ivB = to_invariants(value, *ctx.pp);
    const double d = x_eval - ctx.g->xc;
    const double kappa = ctx.pp->K;
    const double f = ctx.frame.feval(x_eval, ctx.tM);
    const double half_dt = 0.5 * ctx.g->dt;
    double z = ivB.z, w = ivB.w;
    for (int it = 0; it < 60; ++it) {
        const Invariants at_eval{z - kappa * d, w + kappa * d};
        if (at_eval.w - at_eval.z <= 0.0)
            throw SolverError("cell build: patch inversion crossed vacuum");
        const State ub = from_invariants(at_eval, *ctx.pp);
        const auto [l1, l2] = char_speeds(ub, *ctx.pp);
        const double zn = ivB.z - (f + kappa * l1) * half_dt + kappa * d;
        const double wn = ivB.w - (f - kappa * l2) * half_dt - kappa * d;
        const double change = std::abs(zn - z) + std::abs(wn - w);
        z = zn;
        w = wn;
        if (change <= 1e-15 * (1.0 + std::abs(z) + std::abs(w))) break;
    }
    return Invariants{z, w};
}

struct PatchResult {
    double sigma_p, sigma_s;
    SteadyProfile bar; // anchored at the cell center
    State uM;
};

// conditions (M.a)-(M.c): both patch boundary waves satisfy RH at t_M against
// the flanking profiles; unknowns reduce to the two speeds once each side
// determines the patch anchor through the RH connection + profile inversion
PatchResult solve_patch(const BuildCtx& ctx, const SteadyProfile& left_end,
                        const SteadyProfile& right_end, double sp0, double ss0) {
    auto from_left = [&](double sp) {
        const State uA = profile_value_at_tm(ctx, left_end, sp);
        const State uB = rh_connect(uA, sp, 1, *ctx.pp);
        return invert_profile(ctx, uB, ctx.xray(sp));
    };
    auto from_right = [&](double ss) {
        const State uD = profile_value_at_tm(ctx, right_end, ss);
        const State uC = rh_connect(uD, ss, 2, *ctx.pp);
        return invert_profile(ctx, uC, ctx.xray(ss));
    };
    auto residual = [&](double sp, double ss) -> std::array<double, 2> {
        try {
            const Invariants a = from_left(sp);
            const Invariants b = from_right(ss);
            return {a.z - b.z, a.w - b.w};
        } catch (const SolverError&) {
            return {1e6, 1e6}; // infeasible trial: rejected by the damping loop
        }
    };
    const Newton2dResult r = solve_newton2d(residual, sp0, ss0, ctx.sp->newton_tol,
                                            ctx.sp->max_newton_iters, "cell patch");
    const Invariants a = from_left(r.x);
    const Invariants b = from_right(r.y);
    const Invariants ivM{0.5 * (a.z + b.z), 0.5 * (a.w + b.w)};
    const State uM = from_invariants(ivM, *ctx.pp);
    PatchResult out;
    out.sigma_p = r.x;
    out.sigma_s = r.y;
    out.uM = uM;
    out.bar = SteadyProfile{ctx.g->xc, ivM.z, ivM.w, ctx.pp->K, uM};
    return out;
}

// ---------------------------------------------------------------------------
// near-vacuum (appendix) constructions

struct SideBuild {
    std::vector<CellPiece> pieces; // left-to-right
    std::vector<double> speeds;    // separators between pieces
    std::vector<SeparatorKind> kinds;
    double lambda_star = 0.0;      // ray toward the raw-Riemann region
    State u_star;
    bool has_side = false;
};

// Invariant ladder from `from` to `to` (either direction) with |step| <=
// dx^alpha. A remainder below half a step is merged into the previous rung:
// the profile perturbations are O(K dt) and a shorter rung would let them
// flip the wave ordering.
FanLadder ladder_targets(double from, double to, const Grid& grid, const SchemeParams& sp) {
    FanLadder lad;
    const double step = std::pow(grid.dx, sp.alpha);
    const double span = std::abs(to - from);
    const double dir = to >= from ? 1.0 : -1.0;
    lad.p = std::max(int(std::floor(span / step)) + 1, 2);
    lad.targets.resize(lad.p);
    for (int i = 0; i + 1 < lad.p; ++i) lad.targets[i] = from + dir * i * step;
    lad.targets[lad.p - 1] = to;
    if (lad.p >= 3) {
        const double last = std::abs(to - lad.targets[lad.p - 2]);
        if (last < 0.5 * step)
            lad.targets[lad.p - 2] = 0.5 * (lad.targets[lad.p - 3] + to);
    }
    return lad;
}

// fan chain from uL up to z_end (inclusive): states u_2..u_p with their wave
// speeds; used by the appendix where the fan runs to the density threshold
struct FullChain {
    std::vector<CellPiece> pieces;
    std::vector<double> speeds;
    std::vector<SeparatorKind> kinds;
    State last;
    SteadyProfile last_bar;
};

FullChain run_chain_1(const BuildCtx& ctx, const State& uL, double z_end, double kappa) {
    FullChain out;
    const Invariants ivL = to_invariants(uL, *ctx.pp);
    SteadyProfile bar{ctx.g->x_left_anchor, ivL.z, ivL.w, kappa, uL};
    out.pieces.push_back(steady_piece(bar));
    out.last = uL;
    out.last_bar = bar;
    const FanLadder lad = ladder_targets(ivL.z, z_end, *ctx.grid, *ctx.sp);
    State prev = uL;
    double prev_sigma = -1e300;
    for (int k = 1; k < lad.p; ++k) {
        const double ztar = lad.targets[k];
        const State guess_state = curve_state_z(prev, ztar, *ctx.pp);
        const double sguess = rh_speed(prev, guess_state, 1, *ctx.pp);
        const ChainWave cw = solve_chain_wave(ctx, out.last_bar, 1, ztar, sguess);
        if (cw.sigma <= prev_sigma)
            throw SolverError("cell build: fan speeds not increasing (appendix chain)");
        prev_sigma = cw.sigma;
        const Invariants iv = to_invariants(cw.u, *ctx.pp);
        SteadyProfile nb{ctx.xray(cw.sigma), iv.z, iv.w, kappa, cw.u};
        out.pieces.push_back(steady_piece(nb));
        out.speeds.push_back(cw.sigma);
        out.kinds.push_back(SeparatorKind::ChainWave1);
        out.last = cw.u;
        out.last_bar = nb;
        prev = cw.u;
    }
    return out;
}

// Appendix left side for Cases 1/3: a rarefaction fan run down to the density
// threshold (Case x.1), or nothing when the left datum itself is near vacuum
// (Case x.2); u_star is the datum for the raw Riemann region.
SideBuild build_left_near_vacuum(const BuildCtx& ctx, const State& uL, double L_floor,
                                 double thr, double kappa) {
    SideBuild side;
    const ProblemParams& pp = *ctx.pp;
    const double min_rung = 0.5 * std::pow(ctx.grid->dx, ctx.sp->alpha);
    if (uL.rho > thr) {
        // Case x.1: fan from uL down to density thr at constant w
        const Invariants ivL = to_invariants(uL, pp);
        const double z1 = ivL.w - 2.0 * std::pow(thr, pp.theta) / pp.theta;
        if (z1 - ivL.z < min_rung) {
            // the datum is within one rung of the threshold: no fan fits
            // between them, treat it like the near-vacuum datum case below
            Invariants iv = ivL;
            if (iv.z < L_floor) {
                iv.w += L_floor - iv.z;
                iv.z = L_floor;
            }
            side.pieces.push_back(steady_piece(
                SteadyProfile{ctx.g->x_left_anchor, ivL.z, ivL.w, kappa, uL}));
            side.lambda_star = lambda1(uL, pp);
            side.u_star = from_invariants(iv, pp);
            side.has_side = true;
            return side;
        }
        const FullChain chain = run_chain_1(ctx, uL, z1, kappa);
        side.pieces = chain.pieces;
        side.speeds = chain.speeds;
        side.kinds = chain.kinds;
        side.lambda_star = lambda1(chain.last, pp);
        Invariants iv2 = to_invariants(chain.last, pp);
        if (iv2.z < L_floor) {
            // shift both invariants up to the floor; density is unchanged
            iv2.w += L_floor - iv2.z;
            iv2.z = L_floor;
        }
        side.u_star = from_invariants(iv2, pp);
        side.has_side = true;
        return side;
    }
    // Case x.2
    const Invariants ivL = to_invariants(uL, pp);
    if (uL.vacuum() || ivL.z >= L_floor || pp.K == 0.0) {
        // (i): the raw Riemann solution covers the whole side
        side.u_star = uL;
        side.has_side = false;
        return side;
    }
    // (ii): extend the steady profile until its 1-invariant reaches the floor.
    // Unreachable for data obeying the lattice bounds (z_L >= L_floor + 2K dx);
    // kept for completeness with the crossing clamped into the cell.
    const double x4 = std::min(ctx.g->x_left_anchor + (ivL.z - L_floor) / kappa,
                               ctx.g->xc + ctx.grid->dx);
    SteadyProfile bar{ctx.g->x_left_anchor, ivL.z, ivL.w, kappa, uL};
    const State u4 = bar.state_at(x4, pp);
    side.pieces.push_back(steady_piece(bar));
    side.lambda_star = lambda1(u4, pp);
    side.u_star = u4;
    side.has_side = true;
    return side;
}

SideBuild build_right_near_vacuum(const BuildCtx& ctx, const State& uR, double U_ceil,
                                  double thr) {
    // reflect, run the left construction, reflect back
    BuildCtx mctx = ctx;
    CellGeometry mg = *ctx.g;
    mg.x_left_anchor = 2.0 * ctx.g->xc - ctx.g->x_right_anchor;
    mctx.g = &mg;
    mctx.frame.mirrored = !ctx.frame.mirrored;
    mctx.frame.mirror_center = ctx.g->xc;
    const SideBuild ms =
        build_left_near_vacuum(mctx, mirror_state(uR), -U_ceil, thr, -ctx.pp->K);
    SideBuild side;
    side.has_side = ms.has_side;
    side.u_star = mirror_state(ms.u_star);
    side.lambda_star = -ms.lambda_star;
    side.pieces.reserve(ms.pieces.size());
    for (auto it = ms.pieces.rbegin(); it != ms.pieces.rend(); ++it)
        side.pieces.push_back(mirror_cell_piece(*it, ctx.g->xc));
    side.speeds.reserve(ms.speeds.size());
    for (auto it = ms.speeds.rbegin(); it != ms.speeds.rend(); ++it)
        side.speeds.push_back(-*it);
    side.kinds.reserve(ms.kinds.size());
    for (auto it = ms.kinds.rbegin(); it != ms.kinds.rend(); ++it)
        side.kinds.push_back(*it == SeparatorKind::ChainWave1 ? SeparatorKind::ChainWave2
                                                              : *it);
    return side;
}

CellSolution assemble(const BuildCtx& ctx, std::vector<CellPiece> pieces,
                      std::vector<double> speeds, std::vector<SeparatorKind> kinds,
                      CellCase tag) {
    CellSolution cell;
    cell.xc = ctx.g->xc;
    cell.t0 = ctx.g->t0;
    cell.dt = ctx.g->dt;
    cell.x_lo = ctx.g->x_lo;
    cell.x_hi = ctx.g->x_hi;
    cell.pieces = std::move(pieces);
    cell.speeds = std::move(speeds);
    cell.sep_kinds = std::move(kinds);
    cell.tag = tag;
    if (cell.sep_kinds.size() != cell.speeds.size() ||
        cell.pieces.size() != cell.speeds.size() + 1)
        throw SolverError("cell build: piece/separator bookkeeping mismatch");
    for (std::size_t i = 0; i + 1 < cell.speeds.size(); ++i) {
        if (!(cell.speeds[i] < cell.speeds[i + 1])) {
            std::ostringstream os;
            os << "cell build: speed ordering violated at j=" << ctx.g->j_index
               << " t0=" << ctx.g->t0 << " (" << cell.speeds[i] << " !< " << cell.speeds[i + 1]
               << ", kinds " << int(cell.sep_kinds[i]) << "/" << int(cell.sep_kinds[i + 1])
               << ", tag " << int(cell.tag) << ")";
            throw SolverError(os.str());
        }
    }
    return cell;
}

CellSolution build_appendix_cell(const BuildCtx& ctx, const State& uL, const State& uR,
                                 const WaveFan& fan0, double thr) {
    const ProblemParams& pp = *ctx.pp;
    const int j = ctx.g->j_index;
    const double L_floor = pp.L - pp.K * (j + 1) * ctx.grid->dx;
    const double U_ceil = pp.M + pp.K * (j - 1) * ctx.grid->dx;

    bool shock1 = false, shock2 = false;
    for (const Wave& w : fan0.waves) {
        shock1 = shock1 || w.kind == WaveKind::Shock1;
        shock2 = shock2 || w.kind == WaveKind::Shock2;
    }

    CellSolution cell;
    if (shock1 && shock2) {
        cell = assemble(ctx, {fan_piece(fan0)}, {}, {}, CellCase::Appendix4);
    } else if (!shock1 && shock2) {
        const SideBuild left = build_left_near_vacuum(ctx, uL, L_floor, thr, pp.K);
        std::vector<CellPiece> pieces = left.pieces;
        std::vector<double> speeds = left.speeds;
        std::vector<SeparatorKind> kinds = left.kinds;
        if (left.has_side) {
            speeds.push_back(left.lambda_star);
            kinds.push_back(SeparatorKind::Glue);
        }
        pieces.push_back(fan_piece(solve_riemann(left.u_star, uR, pp)));
        cell = assemble(ctx, std::move(pieces), std::move(speeds), std::move(kinds),
                        CellCase::Appendix1);
    } else if (shock1 && !shock2) {
        const SideBuild right = build_right_near_vacuum(ctx, uR, U_ceil, thr);
        std::vector<CellPiece> pieces{fan_piece(solve_riemann(uL, right.u_star, pp))};
        std::vector<double> speeds;
        std::vector<SeparatorKind> kinds;
        if (right.has_side) {
            speeds.push_back(right.lambda_star);
            kinds.push_back(SeparatorKind::Glue);
        }
        pieces.insert(pieces.end(), right.pieces.begin(), right.pieces.end());
        speeds.insert(speeds.end(), right.speeds.begin(), right.speeds.end());
        kinds.insert(kinds.end(), right.kinds.begin(), right.kinds.end());
        cell = assemble(ctx, std::move(pieces), std::move(speeds), std::move(kinds),
                        CellCase::Appendix2);
    } else {
        const SideBuild left = build_left_near_vacuum(ctx, uL, L_floor, thr, pp.K);
        const SideBuild right = build_right_near_vacuum(ctx, uR, U_ceil, thr);
        std::vector<CellPiece> pieces = left.pieces;
        std::vector<double> speeds = left.speeds;
        std::vector<SeparatorKind> kinds = left.kinds;
        if (left.has_side) {
            speeds.push_back(left.lambda_star);
            kinds.push_back(SeparatorKind::Glue);
        }
        pieces.push_back(fan_piece(solve_riemann(left.u_star, right.u_star, pp)));
        if (right.has_side) {
            speeds.push_back(right.lambda_star);
            kinds.push_back(SeparatorKind::Glue);
        }
        pieces.insert(pieces.end(), right.pieces.begin(), right.pieces.end());
        speeds.insert(speeds.end(), right.speeds.begin(), right.speeds.end());
        kinds.insert(kinds.end(), right.kinds.begin(), right.kinds.end());
        cell = assemble(ctx, std::move(pieces), std::move(speeds), std::move(kinds),
                        CellCase::Appendix3);
    }
    cell.appendix = true;
    cell.middle = fan0.middle;
    return cell;
}

} // namespace

FanLadder rarefaction_fan(const State& uL, double zM, const SchemeParams& sp, const Grid& g,
                          const ProblemParams& p) {
    const Invariants ivL = to_invariants(uL, p);
    if (zM < ivL.z - 1e-14 * (1.0 + std::abs(zM)))
        throw std::domain_error("rarefaction_fan: zM below z(uL)");
    FanLadder lad = ladder_targets(ivL.z, std::max(zM, ivL.z), g, sp);
    lad.speeds.resize(lad.p - 1);
    for (int i = 0; i + 1 < lad.p; ++i) {
        const double zi = lad.targets[i], zn = lad.targets[i + 1];
        const State a = from_invariants(Invariants{zi, ivL.w}, p);
        const State b = from_invariants(Invariants{zn, ivL.w}, p);
        lad.speeds[i] = a.velocity() - shock_mass_speed(b.rho, a.rho, p);
    }
    return lad;
}

CellSolution build_cell(const State& uL, const State& uR, const CellGeometry& g,
                        const Forcing& forcing, const ProblemParams& pp,
                        const SchemeParams& sp, const Grid& grid) {
    BuildCtx ctx;
    ctx.g = &g;
    ctx.frame.forcing = &forcing;
    ctx.pp = &pp;
    ctx.sp = &sp;
    ctx.grid = &grid;
    ctx.tM = g.t0 + 0.5 * g.dt;

    const WaveFan fan0 = solve_riemann(uL, uR, pp);
    const double thr = nearvac_threshold(g.xc, grid, pp, sp);
    if (fan0.vacuum || uL.vacuum() || uR.vacuum() || fan0.middle.rho <= thr)
        return build_appendix_cell(ctx, uL, uR, fan0, thr);

    bool shock1 = false, shock2 = false;
    for (const Wave& w : fan0.waves) {
        shock1 = shock1 || w.kind == WaveKind::Shock1;
        shock2 = shock2 || w.kind == WaveKind::Shock2;
    }
    const CellCase tag = shock1 ? (shock2 ? CellCase::Case4 : CellCase::Case2)
                                : (shock2 ? CellCase::Case1 : CellCase::Case3);

    const Invariants ivL = to_invariants(uL, pp);
    const Invariants ivR = to_invariants(uR, pp);
    const Invariants ivM = to_invariants(fan0.middle, pp);

    std::vector<CellPiece> pieces;
    std::vector<double> speeds;
    std::vector<SeparatorKind> kinds;

    // left flank: rarefaction fan chain (conditions (k.a)-(k.c)) or plain profile
    SteadyProfile left_end{g.x_left_anchor, ivL.z, ivL.w, pp.K, uL};
    State left_state = uL;
    pieces.push_back(steady_piece(left_end));
    int p_count = 0;
    if (!shock1) {
        const FanLadder lad = ladder_targets(ivL.z, ivM.z, grid, sp);
        p_count = lad.p;
        double prev_sigma = -1e300;
        for (int k = 1; k + 1 < lad.p; ++k) {
            const State gs = curve_state_z(left_state, lad.targets[k], pp);
            const double sg = rh_speed(left_state, gs, 1, pp);
            const ChainWave cw = solve_chain_wave(ctx, left_end, 1, lad.targets[k], sg);
            if (cw.sigma <= prev_sigma)
                throw SolverError("cell build: 1-fan speeds not increasing");
            if (cw.u.rho <= 0.5 * thr)
                throw SolverError("cell build: 1-fan density fell below the lower bound");
            prev_sigma = cw.sigma;
            const Invariants iv = to_invariants(cw.u, pp);
            left_end = SteadyProfile{ctx.xray(cw.sigma), iv.z, iv.w, pp.K, cw.u};
            left_state = cw.u;
            pieces.push_back(steady_piece(left_end));
            speeds.push_back(cw.sigma);
            kinds.push_back(SeparatorKind::ChainWave1);
        }
    }

    // right flank, mirror-symmetric chain on the 2-family
    SteadyProfile right_end{g.x_right_anchor, ivR.z, ivR.w, pp.K, uR};
    State right_state = uR;
    std::vector<CellPiece> right_pieces{steady_piece(right_end)};
    std::vector<double> right_speeds;
    std::vector<SeparatorKind> right_kinds;
    int q_count = 0;
    if (!shock2) {
        // descending ladder: w targets from w_R down toward w_M
        const FanLadder lad = ladder_targets(ivR.w, ivM.w, grid, sp);
        q_count = lad.p;
        double prev_tau = 1e300;
        for (int k = 1; k + 1 < lad.p; ++k) {
            const double wtar = lad.targets[k];
            const State gs = curve_state_w(right_state, wtar, pp);
            const double tg = rh_speed(gs, right_state, 2, pp);
            const ChainWave cw = solve_chain_wave(ctx, right_end, 2, wtar, tg);
            if (cw.sigma >= prev_tau)
                throw SolverError("cell build: 2-fan speeds not decreasing");
            if (cw.u.rho <= 0.5 * thr)
                throw SolverError("cell build: 2-fan density fell below the lower bound");
            prev_tau = cw.sigma;
            const Invariants iv = to_invariants(cw.u, pp);
            right_end = SteadyProfile{ctx.xray(cw.sigma), iv.z, iv.w, pp.K, cw.u};
            right_state = cw.u;
            right_pieces.insert(right_pieces.begin(), steady_piece(right_end));
            right_speeds.insert(right_speeds.begin(), cw.sigma);
            right_kinds.insert(right_kinds.begin(), SeparatorKind::ChainWave2);
        }
    }

    // middle patch (M.a)-(M.c)
    const double sp0 = rh_speed(left_state, fan0.middle, 1, pp);
    const double ss0 = rh_speed(fan0.middle, right_state, 2, pp);
    const PatchResult patch = solve_patch(ctx, left_end, right_end, sp0, ss0);
    if (!(patch.sigma_p < patch.sigma_s))
        throw SolverError("cell build: patch speeds out of order (M.a)");

    pieces.push_back(steady_piece(patch.bar));
    speeds.push_back(patch.sigma_p);
    kinds.push_back(SeparatorKind::PatchLeft);
    speeds.push_back(patch.sigma_s);
    kinds.push_back(SeparatorKind::PatchRight);
    pieces.insert(pieces.end(), right_pieces.begin(), right_pieces.end());
    speeds.insert(speeds.end(), right_speeds.begin(), right_speeds.end());
    kinds.insert(kinds.end(), right_kinds.begin(), right_kinds.end());

    CellSolution cell = assemble(ctx, std::move(pieces), std::move(speeds), std::move(kinds),
                                 tag);
    cell.fan1_size = p_count;
    cell.fan2_size = q_count;
    cell.has_patch = true;
    cell.middle = patch.uM;
    cell.sigma_p = patch.sigma_p;
    cell.sigma_s = patch.sigma_s;
    return cell;
}

CellSolution build_constant_cell(const State& u, double anchor_x, const CellGeometry& g,
                                 const ProblemParams& pp) {
    CellSolution cell;
    cell.xc = g.xc;
    cell.t0 = g.t0;
    cell.dt = g.dt;
    cell.x_lo = g.x_lo;
    cell.x_hi = g.x_hi;
    cell.tag = CellCase::Constant;
    cell.middle = u;
    if (u.vacuum()) {
        cell.pieces = {fan_piece(solve_riemann(u, u, pp))};
        return cell;
    }
    const Invariants iv = to_invariants(u, pp);
    cell.pieces = {CellPiece{CellPiece::Steady, SteadyProfile{anchor_x, iv.z, iv.w, pp.K, u},
                             WaveFan{}}};
    return cell;
}

State CellSolution::sample(double x, double t, const SourceFrame& frame,
                           const ProblemParams& p) const {
    const double tau = t - t0;
    std::size_t idx;
    if (tau <= 0.0) {
        idx = (x < xc) ? 0 : (pieces.size() - 1);
    } else {
        const double xi = (x - xc) / tau;
        idx = std::upper_bound(speeds.begin(), speeds.end(), xi) - speeds.begin();
    }
    const CellPiece& piece = pieces[idx];
    if (piece.kind == CellPiece::Steady)
        return fractional_step(piece.bar, x, t, t0, frame, p);
    const double xi = tau > 0.0 ? (x - xc) / tau : (x < xc ? -1e300 : 1e300);
    return sample_fan(piece.fan, xi, p);
}

std::vector<double> CellSolution::breakpoints(double t) const {
    const double tau = std::max(t - t0, 0.0);
    std::vector<double> pts;
    for (double s : speeds) pts.push_back(xc + s * tau);
    for (const CellPiece& piece : pieces) {
        if (piece.kind != CellPiece::Fan) continue;
        for (const Wave& w : piece.fan.waves) {
            pts.push_back(xc + w.lo * tau);
            if (w.hi != w.lo) pts.push_back(xc + w.hi * tau);
        }
    }
    std::sort(pts.begin(), pts.end());
    return pts;
}

State cell_average_over(const CellSolution& cell, double a, double b, double t,
                        const SourceFrame& frame, const ProblemParams& p) {
    std::vector<double> cuts{a, b};
    for (double x : cell.breakpoints(t))
        if (x > a && x < b) cuts.push_back(x);
    std::sort(cuts.begin(), cuts.end());
    double ir = 0.0, im = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double lo = cuts[i], hi = cuts[i + 1];
        if (!(hi > lo)) continue;
        const State um = cell.sample(0.5 * (lo + hi), t, frame, p);
        const State ua = cell.sample(lo + 1e-12 * (hi - lo), t, frame, p);
        const State ub = cell.sample(hi - 1e-12 * (hi - lo), t, frame, p);
        if (um == ua && um == ub) { // constant piece: keep averages bit-exact
            ir += um.rho * (hi - lo);
            im += um.m * (hi - lo);
            continue;
        }
        const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        for (int k = 0; k < 5; ++k) {
            const State u = cell.sample(mid + half * kGaussX[k], t, frame, p);
            ir += kGaussW[k] * half * u.rho;
            im += kGaussW[k] * half * u.m;
        }
    }
    return State{ir / (b - a), im / (b - a)};
}

double cell_rh_residual_at_tm(const CellSolution& cell, const SourceFrame& frame,
                              const ProblemParams& p) {
    const double tM = cell.t0 + 0.5 * cell.dt;
    double worst = 0.0;
    for (std::size_t i = 0; i < cell.speeds.size(); ++i) {
        const CellPiece& lp = cell.pieces[i];
        const CellPiece& rp = cell.pieces[i + 1];
        const SeparatorKind kind = cell.sep_kinds[i];
        if (kind == SeparatorKind::Glue) continue;
        const double xm = cell.xc + 0.5 * cell.speeds[i] * cell.dt;
        State ul, ur;
        switch (kind) {
            case SeparatorKind::ChainWave1:
                // (k.c): perturbed left value against the new constant state
                ul = fractional_step(lp.bar, xm, tM, cell.t0, frame, p);
                ur = rp.bar.anchor;
                break;
            case SeparatorKind::ChainWave2:
                ul = lp.bar.anchor;
                ur = fractional_step(rp.bar, xm, tM, cell.t0, frame, p);
                break;
            default:
                // (M.b)/(M.c): both sides are perturbed profile values
                ul = fractional_step(lp.bar, xm, tM, cell.t0, frame, p);
                ur = fractional_step(rp.bar, xm, tM, cell.t0, frame, p);
                break;
        }
        worst = std::max(worst, rh_residual(ul, ur, cell.speeds[i], p));
    }
    for (const CellPiece& piece : cell.pieces) {
        if (piece.kind != CellPiece::Fan) continue;
        for (std::size_t i = 0; i < piece.fan.waves.size(); ++i) {
            const Wave& w = piece.fan.waves[i];
            if (w.kind == WaveKind::Shock1 || w.kind == WaveKind::Shock2)
                worst = std::max(worst, rh_residual(piece.fan.states[i], piece.fan.states[i + 1],
                                                    w.lo, p));
        }
    }
    return worst;
}

} // namespace peuler
