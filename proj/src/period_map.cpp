#include "peuler/period_map.hpp"

#include <algorithm>
#include <cmath>

#include "peuler/errors.hpp"

namespace peuler {

ForcingTable tabulate_forcing(const Forcing& forcing, const Grid& g) {
    ForcingTable table;
    table.Nx = g.Nx;
    table.cols = 2 * g.Nx + 3;
    table.vals.resize(std::size_t(g.steps_per_period() + 1) * table.cols);
    for (int n = 0; n <= g.steps_per_period(); ++n) {
        const double t = g.t(n);
        for (int j = -1; j <= 2 * g.Nx + 1; ++j)
            table.vals[std::size_t(n) * table.cols + (j + 1)] = forcing(j * g.dx, t);
    }
    return table;
}

namespace {

// The correction formulas carry negative powers of rho and are only
// subordinate to the state itself at O(1) densities; below dx^delta they are
// switched off (the same exponent that sends averages to vacuum).
bool source_active(const State& u, const Grid& g, const SchemeParams& sp) {
    return u.rho >= std::pow(g.dx, sp.delta_exp);
}

// the derivation assumes the corrections are lower order than the state;
// outside that regime they are dropped rather than allowed to dominate
bool subordinate(double R, double S, const State& u) {
    return std::abs(R) <= 0.5 * u.rho && std::abs(S) <= 0.5 * (std::abs(u.m) + u.rho);
}

double r_value(double f, const State& u, const ProblemParams& p, const Grid& g) {
    const double th = p.theta;
    const double lead = -0.25 * g.dx * p.K * std::pow(u.rho, 1.0 - th);
    const double brace = f * u.rho - p.K * std::pow(u.rho, th + 1.0) +
                         p.K * u.m / std::pow(u.rho, th + 1.0);
    return lead + 0.25 * g.dt * g.dt / g.dx * brace;
}

double s_value(double f, const State& u, const ProblemParams& p, const Grid& g) {
    const double th = p.theta;
    const double lead = -g.dt * f * u.m - 0.25 * g.dx * p.K * u.m / std::pow(u.rho, th);
    const double brace = 2.0 * f * u.m - p.K * std::pow(u.rho, th) * u.m +
                         p.K * u.m * u.m * u.m / std::pow(u.rho, th + 2.0);
    return lead + 0.25 * g.dt * g.dt / g.dx * brace;
}

} // namespace

double R_source(double x, double t, const State& u, const Forcing& forcing,
                const ProblemParams& p, const Grid& g, const SchemeParams& sp) {
    if (u.vacuum() || !source_active(u, g, sp)) return 0.0;
    const double R = r_value(forcing(x, t), u, p, g);
    const double S = s_value(forcing(x, t), u, p, g);
    return subordinate(R, S, u) ? R : 0.0;
}

double S_source(double x, double t, const State& u, const Forcing& forcing,
                const ProblemParams& p, const Grid& g, const SchemeParams& sp) {
    if (u.vacuum() || !source_active(u, g, sp)) return 0.0;
    const double R = r_value(forcing(x, t), u, p, g);
    const double S = s_value(forcing(x, t), u, p, g);
    return subordinate(R, S, u) ? S : 0.0;
}

LatticeState lf_step(const LatticeState& prev, const ForcingTable& table,
                     const Forcing& forcing, const State& ub, const Grid& g,
                     const ProblemParams& pp, const SchemeParams& sp, LfStats* stats) {
    (void)forcing;
    const int n = prev.n;
    const int n1 = n + 1;
    LatticeState next;
    next.n = n1;
    const int cnt = g.count(n1);
    next.u.resize(cnt);
    const double lam = 0.5 * g.dt / g.dx;

    auto fetch = [&](int j) -> State {
        if (j < 0) return ub;                                  // inflow ghost
        if (j > 2 * g.Nx) return prev.at(2 * g.Nx - 1, g);     // copy-out ghost
        return prev.at(j, g);
    };
    auto fval = [&](const State& u) {
        if (u.vacuum()) return 0.0;
        return u.m * u.m / u.rho + pressure(u.rho, pp);
    };

    for (int i = 0; i < cnt; ++i) {
        const int j = g.first_j(n1) + 2 * i;
        const State um = fetch(j - 1);
        const State up = fetch(j + 1);
        const double fm = table.at(j - 1, n), fp = table.at(j + 1, n);

        double Rm = 0.0, Rp = 0.0, Sm = 0.0, Sp = 0.0;
        if (!um.vacuum() && source_active(um, g, sp)) {
            const double R = r_value(fm, um, pp, g), S = s_value(fm, um, pp, g);
            if (subordinate(R, S, um)) { Rm = R; Sm = S; }
        }
        if (!up.vacuum() && source_active(up, g, sp)) {
            const double R = r_value(fp, up, pp, g), S = s_value(fp, up, pp, g);
            if (subordinate(R, S, up)) { Rp = R; Sp = S; }
        }

        double rho = 0.5 * (up.rho + um.rho) - lam * (up.m - um.m) + Rp - Rm;
        double m = 0.5 * (up.m + um.m) - lam * (fval(up) - fval(um)) + Sp - Sm +
                   0.5 * g.dt * (fp * up.rho + fm * um.rho);
        if (rho <= 0.0) {
            if (stats) ++stats->negative_density_clips;
            rho = 0.0;
            m = 0.0;
        }
        next.u[i] = State{rho, m};
    }
    return next;
}

double resolve_delta(const FixedPointConfig& cfg, const Grid& g) {
    if (cfg.delta_dx >= 0.0) return cfg.delta_dx;
    return std::pow(g.dx, 0.9);
}

LatticeState period_map(const LatticeState& u0, const ForcingTable& table,
                        const Forcing& forcing, const State& ub, const Grid& g,
                        const ProblemParams& pp, const SchemeParams& sp,
                        const FixedPointConfig& cfg, LfStats* stats) {
    if (u0.n != 0) throw std::logic_error("period_map: input must be at level 0");
    LatticeState cur = u0;
    for (int n = 0; n < g.steps_per_period(); ++n)
        cur = lf_step(cur, table, forcing, ub, g, pp, sp, stats);
    cur.n = 0; // one full period: same lattice parity as the input

    const double delta = resolve_delta(cfg, g);
    const bool shifting = cfg.apply_shift && delta > 0.0;
    for (int i = 0; i < int(cur.u.size()); ++i) {
        State& u = cur.u[i];
        if (u.vacuum()) continue;
        Invariants iv = to_invariants(u, pp);
        bool touched = false;
        if (shifting) {
            iv.z += delta;
            iv.w -= delta;
            touched = true;
        }
        if (cfg.clamp_to_bounds) {
            const double xj = g.x(1 + 2 * i);
            const double zfloor = pp.L - pp.K * xj - delta;
            const double wceil = pp.M + pp.K * xj + delta;
            if (iv.z < zfloor || iv.w > wceil) {
                iv.z = std::max(iv.z, zfloor);
                iv.w = std::min(iv.w, wceil);
                touched = true;
                if (stats) ++stats->bound_clamps;
            }
        }
        if (!touched) continue;
        if (iv.w - iv.z <= 0.0)
            u = State{0.0, 0.0};
        else
            u = from_invariants(iv, pp);
    }
    return cur;
}

LatticeState steady_guess(const State& ub, const Grid& g, const ProblemParams& pp) {
    const Invariants ivb = to_invariants(ub, pp);
    LatticeState out;
    out.n = 0;
    out.u.resize(g.count(0));
    for (int i = 0; i < g.count(0); ++i) {
        const double x = g.x(1 + 2 * i);
        out.u[i] = from_invariants(Invariants{ivb.z - pp.K * x, ivb.w + pp.K * x}, pp);
    }
    return out;
}

std::vector<LatticeState> lf_trajectory(const LatticeState& u0, const ForcingTable& table,
                                        const Forcing& forcing, const State& ub, const Grid& g,
                                        const ProblemParams& pp, const SchemeParams& sp) {
    std::vector<LatticeState> out;
    out.reserve(g.steps_per_period() + 1);
    out.push_back(u0);
    for (int n = 0; n < g.steps_per_period(); ++n)
        out.push_back(lf_step(out.back(), table, forcing, ub, g, pp, sp, nullptr));
    return out;
}

namespace {

double lattice_residual(const LatticeState& a, const LatticeState& b, const ProblemParams& pp) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.u.size(); ++i) {
        const Invariants ia = to_invariants(a.u[i], pp);
        const Invariants ib = to_invariants(b.u[i], pp);
        worst = std::max(worst, std::max(std::abs(ia.z - ib.z), std::abs(ia.w - ib.w)));
    }
    return worst;
}

LatticeState relax(const LatticeState& old_state, const LatticeState& new_state, double lambda,
                   const ProblemParams& pp) {
    LatticeState out = old_state;
    for (std::size_t i = 0; i < out.u.size(); ++i) {
        const Invariants ia = to_invariants(old_state.u[i], pp);
        const Invariants ib = to_invariants(new_state.u[i], pp);
        const Invariants mix{(1.0 - lambda) * ia.z + lambda * ib.z,
                             (1.0 - lambda) * ia.w + lambda * ib.w};
        out.u[i] = mix.w - mix.z <= 0.0 ? State{0.0, 0.0} : from_invariants(mix, pp);
    }
    return out;
}

} // namespace

FixedPointResult find_fixed_point(const LatticeState& guess, const Forcing& forcing,
                                  const State& ub, const Grid& g, const ProblemParams& pp,
                                  const SchemeParams& sp, const FixedPointConfig& cfg) {
    const ForcingTable table = tabulate_forcing(forcing, g);
    FixedPointResult res;
    LatticeState cur = guess;
    double best_residual = 1e300;
    for (int iter = 1; iter <= cfg.max_iters; ++iter) {
        LfStats iter_stats;
        const LatticeState mapped = period_map(cur, table, forcing, ub, g, pp, sp, cfg,
                                               &iter_stats);
        const double r = lattice_residual(cur, mapped, pp);
        res.history.push_back(ResidualRow{iter, r, iter_stats.bound_clamps});
        res.stats.negative_density_clips += iter_stats.negative_density_clips;
        res.stats.bound_clamps += iter_stats.bound_clamps;
        res.iterations = iter;
        if (r < best_residual) {
            best_residual = r;
            res.state = cur;
        }
        if (r <= cfg.residual_tol) {
            res.converged = true;
            res.state = cur;
            res.final_residual = r;
            break;
        }
        cur = relax(cur, mapped, cfg.relaxation, pp);
    }
    if (!res.converged) res.final_residual = best_residual;
    // certificate: one fresh application of the map, outside the loop above
    const LatticeState re = period_map(res.state, table, forcing, ub, g, pp, sp, cfg, nullptr);
    res.certificate_residual = lattice_residual(res.state, re, pp);
    return res;
}

} // namespace peuler
