#ifndef PEULER_ROOTS_HPP
#define PEULER_ROOTS_HPP

#include <array>
#include <cmath>
#include <functional>
#include <string>

#include "peuler/errors.hpp"

namespace peuler {

struct RootOpts {
    double tol = 1e-14;      // on |f|
    double xtol = 1e-15;     // on bracket width, relative
    int max_iters = 200;
    const char* what = "root";
};

// Safeguarded Newton (secant update from f-values) inside a sign-changing
// bracket [a, b]. f(a) and f(b) must have opposite signs or one endpoint must
// already be a root. Monotone f is the intended use; bisection guarantees
// termination either way.
inline double solve_bracketed(const std::function<double(double)>& f, double a, double b,
                              const RootOpts& opt = RootOpts{}) {
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (fa * fb > 0.0)
        throw SolverError(std::string(opt.what) + ": bracket does not change sign");
    double x = 0.5 * (a + b), fx = f(x);
    for (int it = 0; it < opt.max_iters; ++it) {
        if (std::abs(fx) <= opt.tol) return x;
        if (fa * fx <= 0.0) {
            b = x; fb = fx;
        } else {
            a = x; fa = fx;
        }
        if (b - a <= opt.xtol * (std::abs(a) + std::abs(b) + 1e-300)) return 0.5 * (a + b);
        // secant proposal clipped to the interior; every other step bisects so the
        // bracket provably halves at least once per two iterations
        double xs = 0.5 * (a + b);
        if (it % 2 == 0 && std::abs(fb - fa) > 0.0) {
            const double sec = a - fa * (b - a) / (fb - fa);
            const double lo = a + 0.05 * (b - a), hi = b - 0.05 * (b - a);
            if (sec > lo && sec < hi) xs = sec;
        }
        x = xs; fx = f(x);
    }
    if (std::abs(fx) <= 1e3 * opt.tol) return x;
    throw SolverError(std::string(opt.what) + ": no convergence, residual " + std::to_string(fx));
}

// Expands [lo, hi] upward until f changes sign; f(lo) must be the reference sign.
inline double expand_bracket_up(const std::function<double(double)>& f, double lo, double& hi,
                                int max_doublings = 200, const char* what = "bracket") {
    double flo = f(lo);
    double fhi = f(hi);
    int n = 0;
    while (flo * fhi > 0.0) {
        if (++n > max_doublings) throw SolverError(std::string(what) + ": bracket expansion failed");
        hi *= 2.0;
        fhi = f(hi);
    }
    return flo;
}

struct Newton2dResult {
    double x = 0.0, y = 0.0;
    double res = 0.0;
    int iters = 0;
};

// Damped Newton with finite-difference Jacobian for F: R^2 -> R^2.
inline Newton2dResult solve_newton2d(const std::function<std::array<double, 2>(double, double)>& F,
                                     double x0, double y0, double tol, int max_iters,
                                     const char* what = "newton2d") {
    auto norm = [](const std::array<double, 2>& r) {
        return std::max(std::abs(r[0]), std::abs(r[1]));
    };
    double x = x0, y = y0;
    std::array<double, 2> r = F(x, y);
    double rn = norm(r);
    for (int it = 0; it < max_iters; ++it) {
        if (rn <= tol) return {x, y, rn, it};
        const double hx = 1e-7 * (std::abs(x) + 1.0);
        const double hy = 1e-7 * (std::abs(y) + 1.0);
        const std::array<double, 2> rx = F(x + hx, y);
        const std::array<double, 2> ry = F(x, y + hy);
        const double a = (rx[0] - r[0]) / hx, b = (ry[0] - r[0]) / hy;
        const double c = (rx[1] - r[1]) / hx, d = (ry[1] - r[1]) / hy;
        const double det = a * d - b * c;
        if (det == 0.0 || !std::isfinite(det))
            throw SolverError(std::string(what) + ": singular Jacobian");
        double dx = -(d * r[0] - b * r[1]) / det;
        double dy = -(-c * r[0] + a * r[1]) / det;
        // damping: halve until the residual does not grow
        double step = 1.0;
        for (int k = 0; k < 8; ++k) {
            const std::array<double, 2> rt = F(x + step * dx, y + step * dy);
            const double rtn = norm(rt);
            if (rtn < rn || rtn <= tol) {
                x += step * dx; y += step * dy; r = rt; rn = rtn;
                break;
            }
            step *= 0.5;
            if (k == 7) { x += step * dx; y += step * dy; r = F(x, y); rn = norm(r); }
        }
    }
    if (rn <= 1e3 * tol) return {x, y, rn, max_iters};
    throw SolverError(std::string(what) + ": no convergence, residual " + std::to_string(rn));
}

} // namespace peuler

#endif
