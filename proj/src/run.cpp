#include "peuler/run.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "peuler/io.hpp"
#include "peuler/riemann.hpp"
#include "peuler/scheme.hpp"
#include "peuler/verify.hpp"

namespace peuler {

namespace {

std::string join(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

ordered_json config_echo(const RunConfig& cfg, const Grid& g) {
    ordered_json j;
    j["mode"] = cfg.mode;
    j["seed"] = cfg.seed;
    j["gamma"] = format_double(cfg.problem.gamma);
    j["K"] = format_double(cfg.problem.K);
    j["L"] = format_double(cfg.problem.L);
    j["M"] = format_double(cfg.problem.M);
    j["Nx"] = g.Nx;
    j["q"] = g.q;
    j["dx"] = format_double(g.dx);
    j["dt"] = format_double(g.dt);
    j["steps_per_period"] = g.steps_per_period();
    return j;
}

int run_riemann(const RunConfig& cfg) {
    const WaveFan fan = solve_riemann(cfg.riemann_left, cfg.riemann_right, cfg.problem);
    ordered_json j = fan_to_json(fan, cfg.problem);
    write_json(join(cfg.out_dir, "riemann_fan.json"), j);

    // sampled self-similar profile about x0 = 1/2 at the requested time
    const double t = cfg.riemann_time;
    const double lo = fan.min_speed() - 1.0, hi = fan.max_speed() + 1.0;
    std::vector<FieldRow> rows;
    const int n = 400;
    for (int i = 0; i <= n; ++i) {
        const double xi = lo + (hi - lo) * i / n;
        rows.push_back(FieldRow{0.5 + xi * t, t, sample_fan(fan, xi, cfg.problem)});
    }
    write_field_csv(join(cfg.out_dir, "riemann_profile.csv"), rows, cfg.problem);
    std::cout << "riemann: " << fan.waves.size() << " wave(s), vacuum="
              << (fan.vacuum ? "yes" : "no") << "\n";
    return kExitOk;
}

int run_evolve(const RunConfig& cfg) {
    const Grid g = build_grid(cfg.problem, cfg.scheme);
    std::vector<double> snap_times = cfg.snapshots;
    std::sort(snap_times.begin(), snap_times.end());

    StepStats stats;
    std::vector<LatticeState> levels;
    std::vector<FieldRow> snap_rows;
    LatticeLevel lvl = initial_level(cfg.initial_data(), g, cfg.problem, cfg.scheme, &stats);
    auto push_level = [&](const LatticeLevel& l) {
        LatticeState lat;
        lat.n = l.n;
        lat.u = l.u;
        levels.push_back(std::move(lat));
    };
    push_level(lvl);

    SourceFrame frame;
    frame.forcing = &cfg.forcing;
    auto snapshot_in_step = [&](int n, double& t_out) {
        for (double t : snap_times) {
            const double lo = g.t(n), hi = g.t(n + 1);
            if ((t >= lo && t < hi) || (n + 1 == g.steps_per_period() && t == 1.0)) {
                t_out = t;
                return true;
            }
        }
        return false;
    };

    for (int n = 0; n < g.steps_per_period(); ++n) {
        StepCells cells;
        LatticeLevel next = advance(lvl, cfg.ub, g, cfg.problem, cfg.scheme, cfg.forcing,
                                    &stats, &cells, cfg.workers);
        double ts;
        if (snapshot_in_step(n, ts)) {
            for (double t : snap_times) {
                if (!(t >= g.t(n) && (t < g.t(n + 1) || (n + 1 == g.steps_per_period() && t == 1.0))))
                    continue;
                const int samples = 4 * g.Nx;
                for (int i = 0; i <= samples; ++i) {
                    const double x = double(i) / samples;
                    snap_rows.push_back(FieldRow{
                        x, t, cells.sample(std::min(x, 1.0 - 1e-15), t, frame, cfg.problem)});
                }
            }
        }
        lvl = std::move(next);
        push_level(lvl);
    }

    write_field_csv(join(cfg.out_dir, "snapshots.csv"), snap_rows, cfg.problem);
    write_lattice_csv(join(cfg.out_dir, "lattice.csv"), levels, g, cfg.problem);

    ordered_json j = config_echo(cfg, g);
    j["max_violation_z"] = format_double(stats.max_viol_z);
    j["max_violation_w"] = format_double(stats.max_viol_w);
    j["worst_j"] = stats.worst_j;
    j["worst_n"] = stats.worst_n;
    j["vacuum_cutoffs"] = stats.vacuum_cutoffs;
    j["fractional_clips"] = stats.frac_clips;
    write_json(join(cfg.out_dir, "summary.json"), j);
    std::cout << "evolve: max bound violation "
              << format_double(std::max(stats.max_viol_z, stats.max_viol_w)) << "\n";
    return kExitOk;
}

LatticeState initial_lattice(const RunConfig& cfg, const Grid& g) {
    const LatticeLevel lvl = initial_level(cfg.initial_data(), g, cfg.problem, cfg.scheme);
    LatticeState lat;
    lat.n = 0;
    lat.u = lvl.u;
    return lat;
}

int run_fixed_point(const RunConfig& cfg) {
    const Grid g = build_grid(cfg.problem, cfg.scheme);
    const FixedPointResult res = find_fixed_point(initial_lattice(cfg, g), cfg.forcing, cfg.ub,
                                                  g, cfg.problem, cfg.scheme, cfg.fixed_point);
    write_residual_history_csv(join(cfg.out_dir, "residual_history.csv"), res.history);
    write_lattice_csv(join(cfg.out_dir, "fixed_point_lattice.csv"), {res.state}, g,
                      cfg.problem);

    const VerificationReport rep =
        verify_fixed_point(res.state, cfg.forcing, cfg.ub, g, cfg.problem, cfg.scheme,
                           cfg.fixed_point.residual_tol, cfg.seed);

    ordered_json j = config_echo(cfg, g);
    j["converged"] = res.converged;
    j["iterations"] = res.iterations;
    j["final_residual"] = format_double(res.final_residual);
    j["certificate_residual"] = format_double(res.certificate_residual);
    j["bound_clamps"] = res.stats.bound_clamps;
    j["negative_density_clips"] = res.stats.negative_density_clips;
    j["delta_dx"] = format_double(resolve_delta(cfg.fixed_point, g));
    j["apply_shift"] = cfg.fixed_point.apply_shift;
    j["verification"] = report_to_json(rep);
    write_json(join(cfg.out_dir, "run_summary.json"), j);

    std::cout << "fixed-point: converged=" << (res.converged ? "true" : "false")
              << " iterations=" << res.iterations
              << " residual=" << format_double(res.final_residual) << "\n";
    if (!res.converged) return kExitVerification;
    return rep.all_pass() ? kExitOk : kExitVerification;
}

int run_verify(const RunConfig& cfg) {
    const Grid g = build_grid(cfg.problem, cfg.scheme);
    const std::string path = cfg.verify_lattice.empty()
                                 ? join(cfg.out_dir, "fixed_point_lattice.csv")
                                 : cfg.verify_lattice;
    const std::vector<LatticeState> levels = read_lattice_csv(path, g);
    if (levels.empty() || levels.front().u.empty())
        throw ConfigError("verify: no level-0 lattice in " + path);
    const VerificationReport rep =
        verify_fixed_point(levels.front(), cfg.forcing, cfg.ub, g, cfg.problem, cfg.scheme,
                           cfg.fixed_point.residual_tol, cfg.seed);
    write_json(join(cfg.out_dir, "verification.json"), report_to_json(rep));
    std::cout << "verify: " << (rep.all_pass() ? "all checks pass" : "checks FAILED") << "\n";
    return rep.all_pass() ? kExitOk : kExitVerification;
}

int run_study(const RunConfig& cfg) {
    std::ofstream out(join(cfg.out_dir, "study.csv"));
    if (!out) throw ConfigError("io: cannot write study.csv");
    out << "Nx,dx,max_violation,weak_mass,weak_momentum,weak_total,periodicity,"
           "violation_ratio,weak_ratio\n";
    double prev_viol = -1.0, prev_weak = -1.0;
    for (int Nx : cfg.study_Nx) {
        RunConfig c = cfg;
        c.scheme.Nx = Nx;
        const Grid g = build_grid(c.problem, c.scheme);

        GridSolution sol = evolve_one_period(c.initial_data(), c.ub, g, c.problem, c.scheme,
                                             c.forcing, false, c.workers);
        const double viol = std::max(sol.stats.max_viol_z, sol.stats.max_viol_w);

        const FixedPointResult res = find_fixed_point(initial_lattice(c, g), c.forcing, c.ub,
                                                      g, c.problem, c.scheme, c.fixed_point);
        const ForcingTable table = tabulate_forcing(c.forcing, g);
        const auto traj =
            lf_trajectory(res.state, table, c.forcing, c.ub, g, c.problem, c.scheme);
        const FieldSampler sampler = lattice_sampler(traj, g);
        WeakResidual wr{};
        const TestFunction phis[3] = {boundary_test_function(1.0, 0.35, 0.2),
                                      boundary_test_function(0.6, -0.25, 0.4),
                                      boundary_test_function(1.2, 0.0, -0.5)};
        for (const TestFunction& phi : phis) {
            const WeakResidual one =
                weak_residual(sampler, c.forcing, phi, phi, c.ub, c.problem, 4 * Nx);
            wr.mass += std::abs(one.mass);
            wr.momentum += std::abs(one.momentum);
        }
        const double per = periodicity_residual(traj, g);

        out << Nx << ',' << format_double(g.dx) << ',' << format_double(viol) << ','
            << format_double(wr.mass) << ',' << format_double(wr.momentum) << ','
            << format_double(wr.total()) << ',' << format_double(per) << ','
            << (prev_viol > 0 ? format_double(prev_viol / viol) : "") << ','
            << (prev_weak > 0 ? format_double(prev_weak / wr.total()) : "") << '\n';
        prev_viol = viol;
        prev_weak = wr.total();
        std::cout << "study Nx=" << Nx << ": violation " << format_double(viol)
                  << ", weak residual " << format_double(wr.total()) << "\n";
    }
    return kExitOk;
}

} // namespace

int run(const RunConfig& cfg) {
    std::filesystem::create_directories(cfg.out_dir);
    if (cfg.mode == "riemann") return run_riemann(cfg);
    if (cfg.mode == "evolve") return run_evolve(cfg);
    if (cfg.mode == "fixed-point") return run_fixed_point(cfg);
    if (cfg.mode == "verify") return run_verify(cfg);
    if (cfg.mode == "study") return run_study(cfg);
    throw ConfigError("run: unknown mode '" + cfg.mode +
                      "' (want riemann|evolve|fixed-point|verify|study)");
}

} // namespace peuler
