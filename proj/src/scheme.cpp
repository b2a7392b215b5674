#include "peuler/scheme.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace peuler {

namespace {

const double kGaussX[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                           0.5384693101056831, 0.9061798459386640};
const double kGaussW[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                           0.4786286704993665, 0.2369268850561891};

void run_parallel(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
    if (workers <= 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    const int nthreads = std::min<std::size_t>(workers, count);
    std::vector<std::thread> pool;
    std::atomic_size_t next{0};
    std::vector<std::exception_ptr> errors(nthreads);
    for (int t = 0; t < nthreads; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace

State StepCells::sample(double x, double t, const SourceFrame& frame,
                        const ProblemParams& p) const {
    // cells are ordered by kept range; locate the owner of x
    std::size_t lo = 0, hi = cells.size();
    while (lo + 1 < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (x < cells[mid].kept_lo)
            hi = mid;
        else
            lo = mid;
    }
    return cells[lo].cell.sample(x, t, frame, p);
}

State cell_average(const StepCells& cells, int j, const Grid& g, const SourceFrame& frame,
                   const ProblemParams& p) {
    const int n1 = cells.n + 1;
    double a = g.x(j - 1), b = g.x(j + 1);
    if ((n1 % 2) != 0) { // odd level: half cells at the boundary indices
        a = std::max(a, 0.0);
        b = std::min(b, 1.0);
    }
    const double t = g.t(n1);
    double ir = 0.0, im = 0.0;
    for (const BuiltCell& bc : cells.cells) {
        const double lo = std::max(a, bc.kept_lo), hi = std::min(b, bc.kept_hi);
        if (!(hi > lo)) continue;
        const State part = cell_average_over(bc.cell, lo, hi, t, frame, p);
        ir += part.rho * (hi - lo);
        im += part.m * (hi - lo);
    }
    // exact average for a bitwise-constant neighborhood, avoiding drift
    const State probe = cells.sample(0.5 * (a + b), t, frame, p);
    if (std::abs(ir / (b - a) - probe.rho) <= 4e-16 * (std::abs(probe.rho) + 1e-300) &&
        std::abs(im / (b - a) - probe.m) <= 4e-16 * (std::abs(probe.m) + 1e-300)) {
        const State edge1 = cells.sample(a + 1e-12 * (b - a), t, frame, p);
        const State edge2 = cells.sample(b - 1e-12 * (b - a), t, frame, p);
        if (probe == edge1 && probe == edge2) return probe;
    }
    return State{ir / (b - a), im / (b - a)};
}

State cutoff(const State& avg, int j, int n, const Grid& g, const ProblemParams& p,
             const SchemeParams& sp, StepStats* stats) {
    const double xj = g.x(j);
    if (avg.rho < vacuum_threshold(xj, g, p, sp)) {
        if (stats) ++stats->vacuum_cutoffs;
        return State{0.0, 0.0};
    }
    const Invariants iv = to_invariants(avg, p);
    const double zfloor = p.L - p.K * xj;
    const double wceil = p.M + p.K * xj;
    if (stats) {
        const double vz = zfloor - iv.z, vw = iv.w - wceil;
        if (vz > stats->max_viol_z || vw > stats->max_viol_w) {
            stats->worst_j = j;
            stats->worst_n = n;
        }
        stats->max_viol_z = std::max(stats->max_viol_z, vz);
        stats->max_viol_w = std::max(stats->max_viol_w, vw);
    }
    if (iv.z >= zfloor && iv.w <= wceil) return avg; // clamps inactive
    const Invariants clamped{std::max(iv.z, zfloor), std::min(iv.w, wceil)};
    if (clamped.w - clamped.z <= 0.0) {
        if (stats) ++stats->vacuum_cutoffs;
        return State{0.0, 0.0};
    }
    return from_invariants(clamped, p);
}

StepCells build_step(const LatticeLevel& level, const State& ub, const Grid& g,
                     const ProblemParams& pp, const SchemeParams& sp, const Forcing& forcing,
                     int workers) {
    const int n = level.n;
    const double t0 = g.t(n);
    StepCells out;
    out.n = n;

    struct Plan {
        State uL, uR;
        CellGeometry geom;
        bool constant = false;
        State cu;
        double canchor = 0.0;
    };
    std::vector<Plan> plans;

    auto base_geom = [&](int j) {
        CellGeometry geom;
        geom.xc = g.x(j);
        geom.t0 = t0;
        geom.dt = g.dt;
        geom.j_index = j;
        geom.x_left_anchor = g.x(j - 1);
        geom.x_right_anchor = g.x(j + 1);
        geom.x_lo = geom.xc - g.dx;
        geom.x_hi = geom.xc + g.dx;
        return geom;
    };

    if (n % 2 == 0) {
        // data at odd j; fans at even j including both walls
        {
            Plan bl; // inflow fan at x = 0 with ghost u_b anchored at the wall
            bl.geom = base_geom(0);
            bl.geom.x_left_anchor = 0.0;
            bl.geom.x_lo = 0.0;
            bl.geom.x_hi = g.dx;
            bl.uL = ub;
            bl.uR = level.at(1, g);
            plans.push_back(bl);
        }
        for (int j = 2; j <= 2 * g.Nx - 2; j += 2) {
            Plan in;
            in.geom = base_geom(j);
            in.uL = level.at(j - 1, g);
            in.uR = level.at(j + 1, g);
            plans.push_back(in);
        }
        {
            Plan br; // outflow: steady extension of the last interior value
            br.geom = base_geom(2 * g.Nx);
            br.geom.x_lo = 1.0 - g.dx;
            br.geom.x_hi = 1.0;
            br.constant = true;
            br.cu = level.at(2 * g.Nx - 1, g);
            br.canchor = g.x(2 * g.Nx - 1);
            plans.push_back(br);
        }
    } else {
        // data at even j (walls included); fans at odd j, plus the inflow fan
        {
            Plan bl;
            bl.geom = base_geom(0);
            bl.geom.x_left_anchor = 0.0;
            bl.geom.x_right_anchor = 0.0; // u_0^n lives at the wall itself
            bl.geom.x_lo = 0.0;
            bl.geom.x_hi = g.dx;
            bl.uL = ub;
            bl.uR = level.at(0, g);
            plans.push_back(bl);
        }
        for (int j = 1; j <= 2 * g.Nx - 1; j += 2) {
            Plan in;
            in.geom = base_geom(j);
            in.uL = level.at(j - 1, g);
            in.uR = level.at(j + 1, g);
            if (j == 1) in.geom.x_lo = g.dx; // the inflow fan owns [0, dx)
            if (j == 2 * g.Nx - 1) in.geom.x_hi = 1.0;
            plans.push_back(in);
        }
    }

    out.cells.resize(plans.size());
    run_parallel(plans.size(), workers, [&](std::size_t i) {
        const Plan& plan = plans[i];
        BuiltCell bc;
        if (plan.constant)
            bc.cell = build_constant_cell(plan.cu, plan.canchor, plan.geom, pp);
        else
            bc.cell = build_cell(plan.uL, plan.uR, plan.geom, forcing, pp, sp, g);
        bc.kept_lo = plan.geom.x_lo;
        bc.kept_hi = plan.geom.x_hi;
        out.cells[i] = std::move(bc);
    });
    return out;
}

LatticeLevel average_and_cutoff(const StepCells& cells, const Grid& g, const ProblemParams& pp,
                                const SchemeParams& sp, const Forcing& forcing,
                                StepStats* stats) {
    const int n1 = cells.n + 1;
    LatticeLevel next;
    next.n = n1;
    const int cnt = g.count(n1);
    next.u.resize(cnt);
    next.avg.resize(cnt);
    int clips = 0;
    SourceFrame frame;
    frame.forcing = &forcing;
    frame.clip_count = &clips;
    for (int i = 0; i < cnt; ++i) {
        const int j = g.first_j(n1) + 2 * i;
        const State avg = cell_average(cells, j, g, frame, pp);
        next.avg[i] = avg;
        next.u[i] = cutoff(avg, j, n1, g, pp, sp, stats);
    }
    if (stats) stats->frac_clips += clips;
    return next;
}

LatticeLevel advance(const LatticeLevel& level, const State& ub, const Grid& g,
                     const ProblemParams& pp, const SchemeParams& sp, const Forcing& forcing,
                     StepStats* stats, StepCells* keep_cells, int workers) {
    StepCells cells = build_step(level, ub, g, pp, sp, forcing, workers);
    LatticeLevel next = average_and_cutoff(cells, g, pp, sp, forcing, stats);
    if (keep_cells) *keep_cells = std::move(cells);
    return next;
}

LatticeLevel initial_level(const std::function<State(double)>& u0, const Grid& g,
                           const ProblemParams& pp, const SchemeParams& sp, StepStats* stats) {
    LatticeLevel lvl;
    lvl.n = 0;
    const int cnt = g.count(0);
    lvl.u.resize(cnt);
    lvl.avg.resize(cnt);
    for (int i = 0; i < cnt; ++i) {
        const int j = 1 + 2 * i;
        const double a = g.x(j - 1), b = g.x(j + 1);
        // panelled Gauss; u0 may be merely piecewise smooth
        double ir = 0.0, im = 0.0;
        const int panels = 8;
        const double h = (b - a) / panels;
        bool constant = true;
        const State first = u0(a + 0.5 * h);
        for (int kp = 0; kp < panels; ++kp) {
            const double mid = a + (kp + 0.5) * h, half = 0.5 * h;
            for (int q = 0; q < 5; ++q) {
                const State s = u0(mid + half * kGaussX[q]);
                constant = constant && s == first;
                ir += kGaussW[q] * half * s.rho;
                im += kGaussW[q] * half * s.m;
            }
        }
        const State avg = constant ? first : State{ir / (b - a), im / (b - a)};
        lvl.avg[i] = avg;
        lvl.u[i] = cutoff(avg, j, 0, g, pp, sp, stats);
    }
    return lvl;
}

State GridSolution::sample(double x, double t) const {
    if (!(x >= 0.0 && x <= 1.0 && t >= 0.0 && t <= 1.0))
        throw std::domain_error("GridSolution::sample: (x, t) outside [0,1]^2");
    if (!cells_retained) throw std::logic_error("GridSolution::sample: cells not retained");
    int n = std::min(int(t / grid.dt), grid.steps_per_period() - 1);
    SourceFrame frame;
    frame.forcing = &forcing;
    return steps[n].sample(std::min(x, 1.0 - 1e-15), t, frame, params);
}

GridSolution evolve_one_period(const std::function<State(double)>& u0, const State& ub,
                               const Grid& g, const ProblemParams& pp, const SchemeParams& sp,
                               const Forcing& forcing, bool retain_cells, int workers) {
    GridSolution sol;
    sol.grid = g;
    sol.params = pp;
    sol.scheme = sp;
    sol.forcing = forcing;
    sol.ub = ub;
    sol.cells_retained = retain_cells;
    sol.levels.reserve(g.steps_per_period() + 1);
    sol.levels.push_back(initial_level(u0, g, pp, sp, &sol.stats));
    if (retain_cells) sol.steps.reserve(g.steps_per_period());
    for (int n = 0; n < g.steps_per_period(); ++n) {
        StepCells cells;
        LatticeLevel next =
            advance(sol.levels.back(), ub, g, pp, sp, forcing, &sol.stats, &cells, workers);
        if (retain_cells) sol.steps.push_back(std::move(cells));
        sol.levels.push_back(std::move(next));
    }
    return sol;
}

} // namespace peuler
