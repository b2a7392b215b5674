#include "peuler/riemann.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "peuler/roots.hpp"

namespace peuler {

namespace {

// classification tolerance: jumps below this relative density difference are
// treated as zero-strength and omitted from the fan
constexpr double kClassifyTol = 1e-11;
constexpr double kVacuumSpread = 1e-14; // on w - z

const double kGaussX[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                           0.5384693101056831, 0.9061798459386640};
const double kGaussW[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                           0.4786286704993665, 0.2369268850561891};

// state inside a 1-rarefaction with invariant w0 at similarity speed xi
State raref1_interior(double w0, double xi, const ProblemParams& p) {
    const double cth = p.theta * (w0 - xi) / (1.0 + p.theta); // rho^theta
    if (cth <= 0.0) return State{0.0, 0.0};
    const double rho = std::pow(cth, 1.0 / p.theta);
    return State{rho, rho * (xi + cth)};
}

// state inside a 2-rarefaction with invariant z0
State raref2_interior(double z0, double xi, const ProblemParams& p) {
    const double cth = p.theta * (xi - z0) / (1.0 + p.theta);
    if (cth <= 0.0) return State{0.0, 0.0};
    const double rho = std::pow(cth, 1.0 / p.theta);
    return State{rho, rho * (xi - cth)};
}

State gauss_state_integral(double a, double b, const std::function<State(double)>& f) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double ir = 0.0, im = 0.0;
    for (int i = 0; i < 5; ++i) {
        const State u = f(mid + half * kGaussX[i]);
        ir += kGaussW[i] * u.rho;
        im += kGaussW[i] * u.m;
    }
    return State{ir * half, im * half};
}

} // namespace

double pressure_slope(double rho, double rho0, const ProblemParams& p) {
    if (rho == rho0) return pressure_derivative(rho0, p);
    if (rho0 <= 0.0) throw std::domain_error("pressure_slope: rho0 = 0 with rho != rho0");
    const double d = (rho - rho0) / rho0;
    if (std::abs(d) < 1e-4) {
        // (rho^g - rho0^g)/(g (rho-rho0)) via expm1/log1p, stable for small jumps
        return std::pow(rho0, p.gamma - 1.0) * std::expm1(p.gamma * std::log1p(d)) /
               (p.gamma * d);
    }
    return (pressure(rho, p) - pressure(rho0, p)) / (rho - rho0);
}

double shock_mass_speed(double rho, double rho0, const ProblemParams& p) {
    if (rho < 0.0 || rho0 < 0.0) throw std::domain_error("shock_mass_speed: negative density");
    if (rho0 == 0.0) {
        if (rho == 0.0) return 0.0; // continuous extension at joint vacuum
        throw std::domain_error("shock_mass_speed: rho0 = 0 with rho > 0");
    }
    if (rho == rho0) return std::pow(rho0, p.theta);
    const double s2 = (rho / rho0) * pressure_slope(rho, rho0, p);
    return std::sqrt(std::max(s2, 0.0));
}

double wave_curve_velocity(int family, CurveKind kind, double rho, const State& u0,
                           const ProblemParams& p) {
    if (family != 1 && family != 2) throw std::domain_error("wave_curve_velocity: family");
    const double rho0 = u0.rho;
    const double v0 = u0.velocity();
    if (kind == CurveKind::Rarefaction) {
        const Invariants iv = to_invariants(u0, p);
        const double c = std::pow(rho, p.theta) / p.theta;
        return family == 1 ? iv.w - c : iv.z + c;
    }
    const bool forward = (kind == CurveKind::Shock);
    if (family == 1) {
        if (forward && !(rho > rho0 && rho0 > 0.0))
            throw std::domain_error("wave_curve_velocity: S1 requires rho > rho0 > 0");
        if (!forward && !(rho < rho0 && rho > 0.0))
            throw std::domain_error("wave_curve_velocity: S1^-1 requires 0 < rho < rho0");
    } else {
        if (forward && !(rho < rho0 && rho > 0.0))
            throw std::domain_error("wave_curve_velocity: S2 requires 0 < rho < rho0");
        if (!forward && !(rho > rho0 && rho0 > 0.0))
            throw std::domain_error("wave_curve_velocity: S2^-1 requires rho > rho0 > 0");
    }
    const double dr = rho - rho0;
    const double h = std::abs(dr) * std::sqrt(pressure_slope(rho, rho0, p) / (rho * rho0));
    const double sgn = dr > 0.0 ? 1.0 : -1.0;
    return family == 1 ? v0 - sgn * h : v0 + sgn * h;
}

double curve1_velocity(const State& uL, double rho, const ProblemParams& p) {
    if (rho <= uL.rho) {
        const double w = to_invariants(uL, p).w;
        return w - std::pow(rho, p.theta) / p.theta;
    }
    const double dr = rho - uL.rho;
    return uL.velocity() - dr * std::sqrt(pressure_slope(rho, uL.rho, p) / (rho * uL.rho));
}

double curve2_velocity(const State& uR, double rho, const ProblemParams& p) {
    if (rho <= uR.rho) {
        const double z = to_invariants(uR, p).z;
        return z + std::pow(rho, p.theta) / p.theta;
    }
    const double dr = rho - uR.rho;
    return uR.velocity() + dr * std::sqrt(pressure_slope(rho, uR.rho, p) / (rho * uR.rho));
}

double rh_curve_velocity(int family, const State& u0, double rho, const ProblemParams& p) {
    if (u0.rho <= 0.0) throw std::domain_error("rh_curve_velocity: vacuum anchor");
    if (rho == u0.rho) return u0.velocity();
    if (rho <= 0.0) throw std::domain_error("rh_curve_velocity: rho must be positive");
    const double dr = rho - u0.rho;
    const double h = std::abs(dr) * std::sqrt(pressure_slope(rho, u0.rho, p) / (rho * u0.rho));
    const double sgn = dr > 0.0 ? 1.0 : -1.0;
    return family == 1 ? u0.velocity() - sgn * h : u0.velocity() + sgn * h;
}

double rh_speed(const State& ul, const State& ur, int family, const ProblemParams& p) {
    if (family == 1) return ul.velocity() - shock_mass_speed(ur.rho, ul.rho, p);
    return ur.velocity() + shock_mass_speed(ul.rho, ur.rho, p);
}

State rh_connect(const State& uK, double sigma, int family, const ProblemParams& p) {
    const double rho0 = uK.rho;
    if (rho0 <= 0.0) throw SolverError("rh_connect: vacuum side state");
    const double j = rho0 * (uK.velocity() - sigma); // mass flux through the discontinuity
    if (family == 1 ? (j <= 0.0) : (j >= 0.0))
        throw SolverError("rh_connect: mass flux sign inconsistent with family");
    const double j2 = j * j;
    auto psi = [&](double rho) { return rho0 * rho * pressure_slope(rho, rho0, p) - j2; };
    double hi = 2.0 * rho0 + 1e-30;
    expand_bracket_up(psi, 1e-300, hi, 2000, "rh_connect");
    RootOpts opt;
    opt.tol = 1e-13 * j2;
    opt.what = "rh_connect";
    const double rho = solve_bracketed(psi, 1e-300, hi, opt);
    const double v = sigma + j / rho;
    return State{rho, rho * v};
}

double rh_residual(const State& ul, const State& ur, double sigma, const ProblemParams& p) {
    const State fl = flux(ul, p), fr = flux(ur, p);
    const double r1 = sigma * (ur.rho - ul.rho) - (fr.rho - fl.rho);
    const double r2 = sigma * (ur.m - ul.m) - (fr.m - fl.m);
    return std::max(std::abs(r1), std::abs(r2));
}

WaveFan solve_riemann(const State& uL, const State& uR, const ProblemParams& p) {
    WaveFan fan;
    fan.left = uL;
    fan.right = uR;

    if (uL.vacuum() && uR.vacuum()) {
        fan.vacuum = true;
        fan.middle = State{0.0, 0.0};
        fan.states = {State{0.0, 0.0}};
        return fan;
    }
    if (uL.vacuum()) {
        fan.vacuum = true;
        fan.middle = State{0.0, 0.0};
        const Invariants ivR = to_invariants(uR, p);
        fan.states = {State{0.0, 0.0}, uR};
        fan.waves = {Wave{WaveKind::Rarefaction2, ivR.z, lambda2(uR, p)}};
        return fan;
    }
    if (uR.vacuum()) {
        fan.vacuum = true;
        fan.middle = State{0.0, 0.0};
        const Invariants ivL = to_invariants(uL, p);
        fan.states = {uL, State{0.0, 0.0}};
        fan.waves = {Wave{WaveKind::Rarefaction1, lambda1(uL, p), ivL.w}};
        return fan;
    }

    const Invariants ivL = to_invariants(uL, p);
    const Invariants ivR = to_invariants(uR, p);

    if (ivL.w - ivR.z <= kVacuumSpread) {
        // curves meet only at rho <= 0: expanding vacuum between the two fans.
        // Both regions flanking the vacuum interval are degenerate vacuum edges.
        fan.vacuum = true;
        fan.middle = State{0.0, 0.0};
        fan.states = {uL, State{0.0, 0.0}, State{0.0, 0.0}, uR};
        fan.waves = {Wave{WaveKind::Rarefaction1, lambda1(uL, p), ivL.w},
                     Wave{WaveKind::VacuumFan, ivL.w, ivR.z},
                     Wave{WaveKind::Rarefaction2, ivR.z, lambda2(uR, p)}};
        return fan;
    }

    auto phi = [&](double rho) {
        return curve1_velocity(uL, rho, p) - curve2_velocity(uR, rho, p);
    };
    double hi = std::max(uL.rho, uR.rho);
    const double lo = 0.0;
    if (phi(hi) > 0.0) {
        hi *= 2.0;
        expand_bracket_up(phi, 0.5 * hi, hi, 400, "solve_riemann");
    }
    RootOpts opt;
    opt.tol = 1e-13 * (1.0 + std::abs(ivL.w) + std::abs(ivR.z));
    opt.what = "solve_riemann";
    double rhoM;
    try {
        rhoM = solve_bracketed(phi, lo, hi, opt);
    } catch (const SolverError& e) {
        std::ostringstream os;
        os << e.what() << " [uL=(" << uL.rho << "," << uL.m << ") uR=(" << uR.rho << ","
           << uR.m << ")]";
        throw SolverError(os.str());
    }
    const double vM = 0.5 * (curve1_velocity(uL, rhoM, p) + curve2_velocity(uR, rhoM, p));
    const State uM{rhoM, rhoM * vM};
    fan.middle = uM;

    const double scale = std::max({rhoM, uL.rho, uR.rho});
    fan.states.push_back(uL);
    if (rhoM > uL.rho + kClassifyTol * scale) {
        const double s = rh_speed(uL, uM, 1, p);
        fan.waves.push_back(Wave{WaveKind::Shock1, s, s});
        fan.states.push_back(uM);
    } else if (rhoM < uL.rho - kClassifyTol * scale) {
        fan.waves.push_back(Wave{WaveKind::Rarefaction1, lambda1(uL, p), lambda1(uM, p)});
        fan.states.push_back(uM);
    }
    if (rhoM > uR.rho + kClassifyTol * scale) {
        const double s = rh_speed(uM, uR, 2, p);
        fan.waves.push_back(Wave{WaveKind::Shock2, s, s});
        fan.states.push_back(uR);
    } else if (rhoM < uR.rho - kClassifyTol * scale) {
        fan.waves.push_back(Wave{WaveKind::Rarefaction2, lambda2(uM, p), lambda2(uR, p)});
        fan.states.push_back(uR);
    }
    return fan;
}

State sample_fan(const WaveFan& fan, double xi, const ProblemParams& p) {
    std::size_t region = 0;
    for (std::size_t i = 0; i < fan.waves.size(); ++i) {
        const Wave& w = fan.waves[i];
        if (xi < w.lo) break;
        if (xi <= w.hi) {
            switch (w.kind) {
                case WaveKind::Rarefaction1:
                    return raref1_interior(to_invariants(fan.states[i], p).w, xi, p);
                case WaveKind::Rarefaction2:
                    return raref2_interior(to_invariants(fan.states[i + 1], p).z, xi, p);
                case WaveKind::VacuumFan:
                    return State{0.0, 0.0};
                default:
                    return fan.states[i + 1]; // on a discontinuity: right limit
            }
        }
        region = i + 1;
    }
    return fan.states[region];
}

State integrate_fan(const WaveFan& fan, double a, double b, const ProblemParams& p) {
    if (!(b > a)) return State{0.0, 0.0};
    // collect breakpoints: wave edges inside (a, b)
    std::vector<double> cuts;
    cuts.push_back(a);
    for (const Wave& w : fan.waves) {
        if (w.lo > a && w.lo < b) cuts.push_back(w.lo);
        if (w.hi > a && w.hi < b && w.hi != w.lo) cuts.push_back(w.hi);
    }
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    State total{0.0, 0.0};
    auto f = [&](double xi) { return sample_fan(fan, xi, p); };
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double lo = cuts[i], hiq = cuts[i + 1];
        if (!(hiq > lo)) continue;
        const double mid = 0.5 * (lo + hiq);
        const State um = sample_fan(fan, mid, p);
        // constant region shortcut keeps averages of constants bit-exact
        const State ua = sample_fan(fan, lo + 1e-13 * (hiq - lo), p);
        const State ub = sample_fan(fan, hiq - 1e-13 * (hiq - lo), p);
        if (um == ua && um == ub) {
            total.rho += um.rho * (hiq - lo);
            total.m += um.m * (hiq - lo);
            continue;
        }
        const int panels = 16;
        const double h = (hiq - lo) / panels;
        for (int k = 0; k < panels; ++k) {
            const State s = gauss_state_integral(lo + k * h, lo + (k + 1) * h, f);
            total.rho += s.rho;
            total.m += s.m;
        }
    }
    return total;
}

WaveFan solve_riemann_boundary_left(const State& ub, const State& uplus,
                                    const ProblemParams& p) {
    if (!ub.vacuum() && lambda1(ub, p) < 0.0)
        throw std::domain_error("solve_riemann_boundary_left: lambda1(ub) < 0");
    if (!uplus.vacuum() && lambda1(uplus, p) < 0.0)
        throw std::domain_error("solve_riemann_boundary_left: lambda1(u+) < 0");
    return solve_riemann(ub, uplus, p);
}

WaveFan solve_riemann_boundary_right(const State& uminus, const ProblemParams& p) {
    (void)p;
    WaveFan fan;
    fan.left = fan.middle = fan.right = uminus;
    fan.vacuum = uminus.vacuum();
    fan.states = {uminus};
    return fan;
}

} // namespace peuler
