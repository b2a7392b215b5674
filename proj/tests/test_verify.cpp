#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "peuler/verify.hpp"
#include "test_support.hpp"

using namespace peuler;

namespace {

const ProblemParams PP(5.0 / 3.0, 0.2, 1.5, 8.0);

Forcing one_mode(double c) {
    Forcing f;
    f.terms.push_back(ForcingTerm{c, 1.0, 0.3, 1, 0.0, true});
    return f;
}

SchemeParams scheme_params(const ProblemParams& p, int Nx) {
    SchemeParams sp;
    sp.Nx = Nx;
    sp.finalize(p);
    return sp;
}

State state_zw(double z, double w, const ProblemParams& p) {
    return from_invariants(Invariants{z, w}, p);
}

const State UB = state_zw(1.5, 8.0, PP);

} // namespace

TEST_CASE("check_region: interior and boundary states pass with zero violation") {
    const SchemeParams sp = scheme_params(PP, 10);
    const Grid g = build_grid(PP, sp);
    const RegionBounds bounds{PP.L, PP.K, PP.M, 0.0};

    LatticeState inside;
    inside.n = 0;
    inside.u.resize(g.count(0));
    for (int i = 0; i < g.count(0); ++i) {
        const double x = g.x(1 + 2 * i);
        inside.u[i] = state_zw(PP.L - PP.K * x + 0.2, PP.M + PP.K * x - 0.2, PP);
    }
    const RegionReport rin = check_region(inside, g, bounds, PP, 0.0);
    CHECK(rin.pass);
    CHECK(rin.max_violation() == 0.0);

    LatticeState on_bound;
    on_bound.n = 0;
    on_bound.u.resize(g.count(0));
    for (int i = 0; i < g.count(0); ++i) {
        const double x = g.x(1 + 2 * i);
        on_bound.u[i] = state_zw(PP.L - PP.K * x, PP.M + PP.K * x, PP);
    }
    const RegionReport rb = check_region(on_bound, g, bounds, PP, 1e-12);
    CHECK(rb.pass); // the boundary counts as inside

    LatticeState out = inside;
    {
        Invariants iv = to_invariants(out.u[3], PP);
        iv.z -= 0.5;
        out.u[3] = from_invariants(iv, PP);
    }
    const RegionReport rout = check_region(out, g, bounds, PP, 1e-12);
    CHECK_FALSE(rout.pass);
    CHECK(rout.max_viol_z == doctest::Approx(0.3).epsilon(1e-10));
    CHECK(rout.worst_j == 1 + 2 * 3);
}

TEST_CASE("check_region: scheme violations shrink under refinement") {
    const Forcing f = one_mode(0.2);
    auto apex = [&](double x) { return state_zw(PP.L - PP.K * x, PP.M + PP.K * x, PP); };
    double viol[2];
    int idx = 0;
    for (int Nx : {10, 20}) {
        const SchemeParams sp = scheme_params(PP, Nx);
        const Grid g = build_grid(PP, sp);
        const GridSolution sol = evolve_one_period(apex, UB, g, PP, sp, f, false);
        const RegionReport rep =
            check_region(sol, RegionBounds{PP.L, PP.K, PP.M, 0.0}, 1e9);
        viol[idx++] = rep.max_violation();
    }
    CHECK(viol[0] > 0.0);
    CHECK(viol[1] < viol[0]);
}

TEST_CASE("weak_residual: exact constant steady throughput telescopes to zero") {
    const ProblemParams p0(5.0 / 3.0, 0.0, 2.0, 8.0);
    const Forcing none;
    const State c = state_zw(2.5, 7.5, p0);
    const FieldSampler constant = [&](double, double) { return c; };
    const TestFunction phi = boundary_test_function(1.0, 0.4, -0.3);
    const WeakResidual wr = weak_residual(constant, none, phi, phi, c, p0, 128);
    CHECK(std::abs(wr.mass) < 1e-8);
    CHECK(std::abs(wr.momentum) < 1e-8);
}

TEST_CASE("weak_residual: first-order decay over three halvings") {
    const ProblemParams pp(1.4, 0.2, 1.3, 2.5);
    Forcing f;
    f.terms.push_back(ForcingTerm{0.2, 1.0, 0.3, 1, 0.0, true});
    const State ub = state_zw(1.3, 2.5, pp);
    const TestFunction phis[3] = {boundary_test_function(1.0, 0.35, 0.2),
                                  boundary_test_function(0.6, -0.25, 0.4),
                                  boundary_test_function(1.2, 0.0, -0.5)};
    std::vector<double> totals;
    for (int Nx : {25, 50, 100, 200}) {
        SchemeParams sp;
        sp.Nx = Nx;
        sp.finalize(pp);
        const Grid g = build_grid(pp, sp);
        FixedPointConfig cfg;
        cfg.apply_shift = false;
        cfg.residual_tol = 1e-8;
        const FixedPointResult res =
            find_fixed_point(steady_guess(ub, g, pp), f, ub, g, pp, sp, cfg);
        REQUIRE(res.converged);
        const ForcingTable table = tabulate_forcing(f, g);
        const auto traj = lf_trajectory(res.state, table, f, ub, g, pp, sp);
        double total = 0.0;
        for (const TestFunction& phi : phis)
            total += weak_residual(lattice_sampler(traj, g), f, phi, phi, ub, pp, 4 * Nx)
                         .total();
        totals.push_back(total);
    }
    for (std::size_t i = 0; i + 1 < totals.size(); ++i) {
        const double ratio = totals[i] / totals[i + 1];
        CHECK(ratio >= 1.4);
        CHECK(ratio <= 2.6);
    }
}

TEST_CASE("entropy_residual: zero on smooth fields, positive across a shock") {
    const ProblemParams p(1.4, 0.0, 1.0, 1.0);
    const Forcing none;
    const TestFunction psi = bump_test_function(0.5, 0.3, 0.5, 0.3);

    const State c{1.2, 1.8};
    const FieldSampler constant = [&](double, double) { return c; };
    CHECK(std::abs(entropy_residual(constant, none, psi, p, 100)) < 1e-12);

    // stationary 1-shock: left (1, S(2,1)), right (2, S(2,1))
    const double S = shock_mass_speed(2.0, 1.0, p);
    const State ul{1.0, S};
    const State ur{2.0, S};
    REQUIRE(testsup::oracle_rh_residual(ul, ur, 0.0, p.gamma) < 1e-12);
    const FieldSampler shock = [&](double x, double) { return x < 0.5 ? ul : ur; };
    const double dissipation = entropy_residual(shock, none, psi, p, 200);
    CHECK(dissipation > 1e-4);
}

TEST_CASE("periodicity_residual: discriminates steady from drifting data") {
    const SchemeParams sp = scheme_params(PP, 6);
    const Grid g = build_grid(PP, sp);
    const Forcing none;
    const ForcingTable table = tabulate_forcing(none, g);
    const LatticeState steady = steady_guess(UB, g, PP);
    SchemeParams sp0 = sp;
    {
        // with F = 0 and K = 0 a constant lattice is exactly periodic
        const ProblemParams p0(5.0 / 3.0, 0.0, 2.0, 8.0);
        SchemeParams spp = scheme_params(p0, 6);
        const Grid g0 = build_grid(p0, spp);
        const Forcing empty;
        const ForcingTable t0 = tabulate_forcing(empty, g0);
        const State c = state_zw(2.5, 7.5, p0);
        LatticeState lat;
        lat.n = 0;
        lat.u.assign(g0.count(0), c);
        const auto traj = lf_trajectory(lat, t0, empty, c, g0, p0, spp);
        CHECK(periodicity_residual(traj, g0) == 0.0);
    }
    // an unconverged transient is measurably non-periodic
    LatticeState bumped = steady;
    for (std::size_t i = 0; i < bumped.u.size(); ++i) {
        Invariants iv = to_invariants(bumped.u[i], PP);
        iv.z += 0.3 * std::sin(2.0 * kPi * g.x(1 + 2 * int(i)));
        bumped.u[i] = from_invariants(iv, PP);
    }
    const auto traj = lf_trajectory(bumped, table, none, UB, g, PP, sp0);
    CHECK(periodicity_residual(traj, g) > 1e-4);
}

TEST_CASE("mass_balance: constant supersonic throughput balances") {
    const ProblemParams p0(5.0 / 3.0, 0.0, 2.0, 8.0);
    const SchemeParams sp = scheme_params(p0, 6);
    const Grid g = build_grid(p0, sp);
    const Forcing none;
    const ForcingTable table = tabulate_forcing(none, g);
    const State c = state_zw(2.5, 7.5, p0);
    LatticeState lat;
    lat.n = 0;
    lat.u.assign(g.count(0), c);
    const auto traj = lf_trajectory(lat, table, none, c, g, p0, sp);
    CHECK(mass_balance(traj, g, c) < 1e-12);
}

TEST_CASE("verify_fixed_point: the standard battery passes on a converged run") {
    const Forcing f = one_mode(0.2);
    const SchemeParams sp = scheme_params(PP, 10);
    const Grid g = build_grid(PP, sp);
    FixedPointConfig cfg;
    cfg.apply_shift = false;
    cfg.residual_tol = 1e-8;
    const FixedPointResult res =
        find_fixed_point(steady_guess(UB, g, PP), f, UB, g, PP, sp, cfg);
    REQUIRE(res.converged);
    const VerificationReport rep =
        verify_fixed_point(res.state, f, UB, g, PP, sp, cfg.residual_tol, 42);
    for (const CheckRow& row : rep.checks) {
        INFO(row.name, " value=", row.value, " threshold=", row.threshold);
        CHECK(row.pass);
    }
    CHECK(rep.all_pass());
}
