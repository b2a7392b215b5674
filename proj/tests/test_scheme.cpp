#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "peuler/scheme.hpp"
#include "test_support.hpp"

using namespace peuler;

namespace {

// O(1)-density setup used throughout this suite
const ProblemParams PP(5.0 / 3.0, 0.2, 1.5, 8.0);

Forcing one_mode(double c) {
    Forcing f;
    f.terms.push_back(ForcingTerm{c, 1.0, 0.3, 1, 0.0, true});
    return f;
}

SchemeParams scheme_params(int Nx) {
    SchemeParams sp;
    sp.Nx = Nx;
    sp.finalize(PP);
    return sp;
}

State state_zw(double z, double w, const ProblemParams& p) {
    return from_invariants(Invariants{z, w}, p);
}

CellGeometry interior_geom(int j, const Grid& g, int n = 0) {
    CellGeometry geom;
    geom.xc = g.x(j);
    geom.t0 = g.t(n);
    geom.dt = g.dt;
    geom.j_index = j;
    geom.x_left_anchor = g.x(j - 1);
    geom.x_right_anchor = g.x(j + 1);
    geom.x_lo = geom.xc - g.dx;
    geom.x_hi = geom.xc + g.dx;
    return geom;
}

const State UB = state_zw(1.5, 8.0, PP); // on the region apex at x = 0

State steady_data(double x) {
    return state_zw(1.5 - PP.K * x, 8.0 + PP.K * x, PP);
}

} // namespace

TEST_CASE("build_grid: ratio and period identities") {
    {
        const ProblemParams p(1.4, 0.5, 1.5, 4.0);
        SchemeParams sp;
        sp.Nx = 10;
        sp.finalize(p);
        const Grid g = build_grid(p, sp);
        CHECK(g.q == 10); // floor(2 * 4.5) + 1
        CHECK(g.dx == doctest::Approx(1.0 / 20.0).epsilon(1e-15));
        CHECK(g.dt == doctest::Approx(1.0 / 200.0).epsilon(1e-15));
        CHECK(g.Nt == 100);
        CHECK(2.0 * g.Nt * g.dt == 1.0);
    }
    {
        const ProblemParams p(5.0 / 3.0, 0.0, 2.0, 2.0);
        SchemeParams sp;
        sp.Nx = 1;
        sp.finalize(p);
        const Grid g = build_grid(p, sp);
        CHECK(g.q == 5);
        CHECK(g.dx == 0.5);
        CHECK(g.dt == doctest::Approx(0.1).epsilon(1e-15));
        CHECK(g.Nt == 5);
        CHECK(2.0 * g.Nt * g.dt == 1.0);
    }
    // CFL: all characteristic speeds in the region stay below dx/dt
    const Grid g = build_grid(PP, scheme_params(8));
    CHECK(PP.M + PP.K < double(g.q));
}

TEST_CASE("initial averaging: constants exactly, linear data to midpoint") {
    const SchemeParams sp = scheme_params(10);
    const Grid g = build_grid(PP, sp);
    const State c = state_zw(2.0, 7.5, PP);
    const LatticeLevel lc = initial_level([&](double) { return c; }, g, PP, sp);
    for (const State& u : lc.u) CHECK(u == c); // bit-exact for constants

    // rho, m linear in x: the cell mean equals the midpoint value
    auto linear = [](double x) { return State{1.0 + 0.5 * x, 3.0 + 0.25 * x}; };
    const LatticeLevel ll = initial_level(linear, g, PP, sp);
    for (std::size_t i = 0; i < ll.avg.size(); ++i) {
        const double xj = g.x(1 + 2 * int(i));
        CHECK(ll.avg[i].rho == doctest::Approx(linear(xj).rho).epsilon(1e-13));
        CHECK(ll.avg[i].m == doctest::Approx(linear(xj).m).epsilon(1e-13));
    }
}

TEST_CASE("cutoff: clamps, threshold, and pass-through") {
    const SchemeParams sp = scheme_params(10);
    const Grid g = build_grid(PP, sp);
    const int j = 5;
    const double xj = g.x(j);

    const State inside = state_zw(PP.L - PP.K * xj + 0.3, PP.M + PP.K * xj - 0.3, PP);
    CHECK(cutoff(inside, j, 0, g, PP, sp) == inside); // untouched, bit-exact

    const State tiny{0.5 * vacuum_threshold(xj, g, PP, sp), 0.0};
    CHECK(cutoff(tiny, j, 0, g, PP, sp).vacuum());

    const double s = 0.12;
    const State low_z = state_zw(PP.L - PP.K * xj - s, PP.M + PP.K * xj - 0.3, PP);
    const State cut = cutoff(low_z, j, 0, g, PP, sp);
    CHECK(to_invariants(cut, PP).z == doctest::Approx(PP.L - PP.K * xj).epsilon(1e-13));

    const State high_w = state_zw(PP.L - PP.K * xj + 0.3, PP.M + PP.K * xj + s, PP);
    const State cut2 = cutoff(high_w, j, 0, g, PP, sp);
    CHECK(to_invariants(cut2, PP).w == doctest::Approx(PP.M + PP.K * xj).epsilon(1e-13));
}

TEST_CASE("rarefaction_fan: ladder counts and increasing speeds") {
    const SchemeParams sp = scheme_params(10);
    const Grid g = build_grid(PP, sp);
    const State uL = state_zw(2.0, 8.0, PP);
    const double zL = to_invariants(uL, PP).z;

    const FanLadder degenerate = rarefaction_fan(uL, zL, sp, g, PP);
    CHECK(degenerate.p == 2);
    CHECK(degenerate.targets.front() == doctest::Approx(zL));
    CHECK(degenerate.targets.back() == doctest::Approx(zL));

    const double step = std::pow(g.dx, sp.alpha);
    const FanLadder lad = rarefaction_fan(uL, zL + 10.0 * step, sp, g, PP);
    CHECK(lad.p == 11);
    for (std::size_t i = 0; i + 1 < lad.speeds.size(); ++i)
        CHECK(lad.speeds[i] < lad.speeds[i + 1]);

    CHECK_THROWS_AS(rarefaction_fan(uL, zL - 0.1, sp, g, PP), std::domain_error);
}

TEST_CASE("steady_profile: anchoring and invariant slopes") {
    const State ud = state_zw(2.0, 7.0, PP);
    const SteadyProfile bar = steady_profile(0.4, ud, PP);
    CHECK(bar.state_at(0.4, PP) == ud);

    const double vd = ud.velocity();
    for (double x : {0.2, 0.4, 0.6, 0.9}) {
        const Invariants iv = bar.invariants_at(x);
        CHECK(iv.z == doctest::Approx(bar.zd - PP.K * (x - 0.4)).epsilon(1e-14));
        CHECK(iv.w == doctest::Approx(bar.wd + PP.K * (x - 0.4)).epsilon(1e-14));
        // v stays constant while rho^theta/theta grows at rate K
        const State u = bar.state_at(x, PP);
        CHECK(u.velocity() == doctest::Approx(vd).epsilon(1e-12));
        const double c = std::pow(u.rho, PP.theta) / PP.theta;
        const double c0 = std::pow(ud.rho, PP.theta) / PP.theta;
        CHECK(c - c0 == doctest::Approx(PP.K * (x - 0.4)).epsilon(1e-10));
    }

    const ProblemParams p0(5.0 / 3.0, 0.0, 2.0, 8.0);
    const SteadyProfile flat = steady_profile(0.4, ud, p0);
    CHECK(flat.state_at(0.9, p0) == ud);
}

TEST_CASE("fractional_step: identity cases and the sign property at the bound") {
    const Forcing f = one_mode(0.2);
    const State ud = state_zw(1.6, 7.8, PP);
    const SteadyProfile bar = steady_profile(0.3, ud, PP);

    const State at_t0 = fractional_step(bar, 0.3, 0.5, 0.5, f, PP);
    CHECK(at_t0 == ud);

    const ProblemParams p0(5.0 / 3.0, 0.0, 2.0, 8.0);
    const Forcing none;
    const SteadyProfile flat = steady_profile(0.3, ud, p0);
    CHECK(fractional_step(flat, 0.44, 0.52, 0.5, none, p0) == ud);

    // on the lower bound z = L - Kx with lambda1 >= z >= 1 and F >= -K, the
    // z-source is nonnegative
    auto rng = testsup::make_rng(3);
    std::uniform_real_distribution<double> ux(0.0, 0.9);
    for (int i = 0; i < 50; ++i) {
        const double x0 = ux(rng);
        const State u0 = state_zw(PP.L - PP.K * x0, 5.0, PP);
        const SteadyProfile b0 = steady_profile(x0, u0, PP);
        const double t0 = 0.25, tau = 0.001;
        const State after = fractional_step(b0, x0, t0 + tau, t0, f, PP);
        CHECK(to_invariants(after, PP).z >= to_invariants(u0, PP).z - 1e-12);
    }
}

TEST_CASE("build_cell: constant data without sources give the constant cell") {
    const ProblemParams p0(5.0 / 3.0, 0.0, 2.0, 8.0);
    SchemeParams sp;
    sp.Nx = 10;
    sp.finalize(p0);
    const Grid g = build_grid(p0, sp);
    const Forcing none;
    const State c = state_zw(3.0, 7.0, p0);
    const CellSolution cell = build_cell(c, c, interior_geom(8, g), none, p0, sp, g);
    SourceFrame frame;
    frame.forcing = &none;
    for (double dxfrac : {-0.9, -0.3, 0.05, 0.4, 0.95}) {
        const double x = cell.xc + dxfrac * g.dx;
        for (double tfrac : {0.0, 0.3, 0.99}) {
            const State s = cell.sample(x, cell.t0 + tfrac * g.dt, frame, p0);
            CHECK(s.rho == doctest::Approx(c.rho).epsilon(1e-13));
            CHECK(s.m == doctest::Approx(c.m).epsilon(1e-13));
        }
    }
}

TEST_CASE("build_cell: Rankine-Hugoniot at the middle time across random cells") {
    const SchemeParams sp = scheme_params(12);
    const Grid g = build_grid(PP, sp);
    const Forcing f = one_mode(0.2);
    SourceFrame frame;
    frame.forcing = &f;
    auto rng = testsup::make_rng(31);
    std::uniform_real_distribution<double> uz(0.0, 0.45);
    int built = 0, with_fans = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const int j = 2 + 2 * (trial % (g.Nx - 2));
        const double xj = g.x(j);
        // data near the apex so the middle state stays away from the vacuum path
        const double zl = PP.L - PP.K * g.x(j - 1) + uz(rng) * 0.5;
        const double wl = PP.M + PP.K * g.x(j - 1) - uz(rng) * 0.1;
        const double zr = PP.L - PP.K * g.x(j + 1) + uz(rng);
        const double wr = PP.M + PP.K * g.x(j + 1) - uz(rng) * 0.2;
        const State uL = state_zw(zl, wl, PP);
        const State uR = state_zw(zr, wr, PP);
        CellGeometry geom = interior_geom(j, g, 2 * (trial % 3));
        const CellSolution cell = build_cell(uL, uR, geom, f, PP, sp, g);
        if (cell.appendix) continue;
        ++built;
        with_fans += (cell.fan1_size > 2 || cell.fan2_size > 2) ? 1 : 0;
        CHECK(cell_rh_residual_at_tm(cell, frame, PP) < 1e-9);
        for (std::size_t i = 0; i + 1 < cell.speeds.size(); ++i)
            CHECK(cell.speeds[i] < cell.speeds[i + 1]);
        for (double s : cell.speeds) CHECK(std::abs(s) <= double(g.q));
        // every piece anchors its own data exactly
        for (const CellPiece& piece : cell.pieces)
            if (piece.kind == CellPiece::Steady)
                CHECK(piece.bar.state_at(piece.bar.xd, PP) == piece.bar.anchor);
        (void)xj;
    }
    CHECK(built > 30);
}

TEST_CASE("build_cell: fan cells respect the density floor and the p-bound") {
    const SchemeParams sp = scheme_params(12);
    const Grid g = build_grid(PP, sp);
    const Forcing f = one_mode(0.2);
    // a genuine 1-rarefaction spanning several ladder steps, middle away from vacuum
    const State uL = state_zw(1.425, 8.075, PP);
    const State uR = state_zw(1.875, 8.083, PP);
    const CellSolution cell = build_cell(uL, uR, interior_geom(10, g), f, PP, sp, g);
    CHECK_FALSE(cell.appendix);
    CHECK(cell.fan1_size >= 4);
    CHECK(double(cell.fan1_size) * std::pow(g.dx, sp.alpha) <= 2.0 * (PP.M + PP.K) + 2.0);
    const double floor_rho = 0.5 * nearvac_threshold(cell.xc, g, PP, sp);
    for (const CellPiece& piece : cell.pieces)
        if (piece.kind == CellPiece::Steady) CHECK(piece.bar.anchor.rho > floor_rho);
}

TEST_CASE("build_cell: near-vacuum two-shock data reduce to the raw Riemann fan") {
    ProblemParams p(1.4, 0.2, 1.3, 2.5);
    SchemeParams sp;
    sp.Nx = 25;
    sp.finalize(p);
    const Grid g = build_grid(p, sp);
    const Forcing f = one_mode(0.2);
    const State uL = state_zw(1.6, 2.5, p);  // v = 2.05
    const State uR = state_zw(1.35, 2.35, p); // v = 1.85, converging
    const WaveFan raw = solve_riemann(uL, uR, p);
    REQUIRE(raw.middle.rho <= nearvac_threshold(g.x(10), g, p, sp));

    const CellSolution cell = build_cell(uL, uR, interior_geom(10, g), f, p, sp, g);
    CHECK(cell.appendix);
    CHECK(cell.tag == CellCase::Appendix4);
    SourceFrame frame;
    frame.forcing = &f;
    for (double dxfrac : {-0.8, -0.2, 0.1, 0.6}) {
        for (double tfrac : {0.2, 0.7}) {
            const double x = cell.xc + dxfrac * g.dx;
            const double t = cell.t0 + tfrac * g.dt;
            const State a = cell.sample(x, t, frame, p);
            const State b = sample_fan(raw, (x - cell.xc) / (t - cell.t0), p);
            CHECK(a.rho == doctest::Approx(b.rho).epsilon(1e-12));
            CHECK(a.m == doctest::Approx(b.m).epsilon(1e-12));
        }
    }
}

TEST_CASE("build_cell: smooth-piece PDE residual decays linearly in dx") {
    const Forcing f = one_mode(0.2);
    SourceFrame frame;
    frame.forcing = &f;
    auto residual_at = [&](const CellSolution& cell, double x, double t) {
        const double h = 2e-6;
        auto fv = [&](double xx, double tt) { return cell.sample(xx, tt, frame, PP); };
        const State uxp = fv(x + h, t), uxm = fv(x - h, t);
        const State utp = fv(x, t + h), utm = fv(x, t - h);
        const State u0 = fv(x, t);
        const double rho_t = (utp.rho - utm.rho) / (2 * h);
        const double m_x = (uxp.m - uxm.m) / (2 * h);
        const double m_t = (utp.m - utm.m) / (2 * h);
        const double f2_x = (flux(uxp, PP).m - flux(uxm, PP).m) / (2 * h);
        const double r1 = rho_t + m_x;
        const double r2 = m_t + f2_x - f(x, t) * u0.rho;
        return std::max(std::abs(r1), std::abs(r2));
    };
    double res[2];
    int idx = 0;
    for (int Nx : {12, 24}) {
        SchemeParams sp = scheme_params(Nx);
        const Grid g = build_grid(PP, sp);
        const State uL = steady_data(g.x(9));
        const State uR = steady_data(g.x(11));
        const CellSolution cell = build_cell(uL, uR, interior_geom(10, g), f, PP, sp, g);
        // probe strictly inside the leftmost piece, away from all rays
        const double t = cell.t0 + 0.5 * g.dt;
        const double x = cell.xc - 0.8 * g.dx;
        res[idx++] = residual_at(cell, x, t);
    }
    const double ratio = res[0] / res[1];
    CHECK(ratio > 1.5);
    CHECK(ratio < 2.5);
}

TEST_CASE("advance: trivial data are preserved bit-for-bit over a period") {
    const ProblemParams p0(5.0 / 3.0, 0.0, 2.0, 8.0);
    SchemeParams sp;
    sp.Nx = 4;
    sp.finalize(p0);
    const Grid g = build_grid(p0, sp);
    const Forcing none;
    const State c = state_zw(3.0, 7.0, p0);
    LatticeLevel lvl = initial_level([&](double) { return c; }, g, p0, sp);
    for (const State& u : lvl.u) REQUIRE(u == c);
    StepStats stats;
    for (int n = 0; n < g.steps_per_period(); ++n)
        lvl = advance(lvl, c, g, p0, sp, none, &stats);
    for (const State& u : lvl.u) {
        CHECK(std::abs(u.rho - c.rho) <= 1e-13);
        CHECK(std::abs(u.m - c.m) <= 1e-13);
    }
    CHECK(stats.max_viol_z <= 1e-13);
    CHECK(stats.max_viol_w <= 1e-13);
}

TEST_CASE("advance: one step keeps the pre-cutoff averages near the region") {
    const SchemeParams sp = scheme_params(20);
    const Grid g = build_grid(PP, sp);
    const Forcing f = one_mode(0.2);
    LatticeLevel lvl = initial_level(steady_data, g, PP, sp);
    StepStats stats;
    advance(lvl, UB, g, PP, sp, f, &stats);
    CHECK(std::max(stats.max_viol_z, stats.max_viol_w) <= 3.0 * std::pow(g.dx, 0.9));
}

TEST_CASE("advance: mass defect against the boundary flux is second order") {
    const Forcing f = one_mode(0.2);
    double defect[2];
    int idx = 0;
    for (int Nx : {10, 20}) {
        SchemeParams sp = scheme_params(Nx);
        const Grid g = build_grid(PP, sp);
        LatticeLevel lvl = initial_level(steady_data, g, PP, sp);
        StepCells cells = build_step(lvl, UB, g, PP, sp, f);
        LatticeLevel next = average_and_cutoff(cells, g, PP, sp, f);

        SourceFrame frame;
        frame.forcing = &f;
        // mass at t0+0 from the built profiles, and at t1-0 from the averages
        double m_before = 0.0;
        for (const BuiltCell& bc : cells.cells)
            m_before += cell_average_over(bc.cell, bc.kept_lo, bc.kept_hi, g.t(lvl.n), frame, PP)
                            .rho *
                        (bc.kept_hi - bc.kept_lo);
        double m_after = 0.0;
        for (std::size_t i = 0; i < next.avg.size(); ++i) {
            const int j = g.first_j(next.n) + 2 * int(i);
            double a = std::max(g.x(j - 1), 0.0), b = std::min(g.x(j + 1), 1.0);
            m_after += next.avg[i].rho * (b - a);
        }
        // Gauss-5 in t for the boundary momentum fluxes
        const double gx[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                              0.5384693101056831, 0.9061798459386640};
        const double gw[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                              0.4786286704993665, 0.2369268850561891};
        double influx = 0.0, outflux = 0.0;
        for (int k = 0; k < 5; ++k) {
            const double t = g.t(lvl.n) + 0.5 * g.dt * (1.0 + gx[k]);
            influx += 0.5 * g.dt * gw[k] * cells.sample(1e-12, t, frame, PP).m;
            outflux += 0.5 * g.dt * gw[k] * cells.sample(1.0 - 1e-12, t, frame, PP).m;
        }
        defect[idx++] = std::abs(m_after - m_before - influx + outflux);
    }
    CHECK(defect[1] < defect[0]);
    CHECK(defect[0] / defect[1] > 2.5); // second-order decay under halving
}

TEST_CASE("sample: averages of samples reproduce the stored E_j") {
    const SchemeParams sp = scheme_params(10);
    const Grid g = build_grid(PP, sp);
    const Forcing f = one_mode(0.2);
    LatticeLevel lvl = initial_level(steady_data, g, PP, sp);
    StepCells cells = build_step(lvl, UB, g, PP, sp, f);
    LatticeLevel next = average_and_cutoff(cells, g, PP, sp, f);
    SourceFrame frame;
    frame.forcing = &f;
    for (std::size_t i = 0; i < next.avg.size(); ++i) {
        const int j = g.first_j(next.n) + 2 * int(i);
        const State again = cell_average(cells, j, g, frame, PP);
        CHECK(std::abs(again.rho - next.avg[i].rho) <= 1e-10 * (1.0 + next.avg[i].rho));
        CHECK(std::abs(again.m - next.avg[i].m) <= 1e-10 * (1.0 + std::abs(next.avg[i].m)));
    }
}

TEST_CASE("evolve_one_period: retained cells sample consistently") {
    SchemeParams sp = scheme_params(6);
    const Grid g = build_grid(PP, sp);
    const Forcing f = one_mode(0.2);
    const GridSolution sol = evolve_one_period(steady_data, UB, g, PP, sp, f, true);
    REQUIRE(sol.cells_retained);
    REQUIRE(int(sol.steps.size()) == g.steps_per_period());
    // lattice states reappear as cell anchors of the following step
    const State mid = sol.sample(0.5, 0.5);
    CHECK(mid.rho > 0.0);
    CHECK_THROWS_AS(sol.sample(1.5, 0.5), std::domain_error);
}

TEST_CASE("build_step: worker count does not change the result") {
    const SchemeParams sp = scheme_params(16);
    const Grid g = build_grid(PP, sp);
    const Forcing f = one_mode(0.2);
    LatticeLevel lvl = initial_level(steady_data, g, PP, sp);
    const LatticeLevel a = advance(lvl, UB, g, PP, sp, f, nullptr, nullptr, 1);
    const LatticeLevel b = advance(lvl, UB, g, PP, sp, f, nullptr, nullptr, 2);
    REQUIRE(a.u.size() == b.u.size());
    for (std::size_t i = 0; i < a.u.size(); ++i) CHECK(a.u[i] == b.u[i]);
}
