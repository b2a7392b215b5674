#ifndef PEULER_STEADY_HPP
#define PEULER_STEADY_HPP

#include "peuler/forcing.hpp"
#include "peuler/gas.hpp"

namespace peuler {

// Quasi-steady profile through (x_d, u_d): z decreases and w increases at rate
// kappa, so v stays constant while rho^theta/theta grows by kappa (x - x_d).
// kappa is +K in the standard orientation and -K inside mirrored constructions.
struct SteadyProfile {
    double xd = 0.0;
    double zd = 0.0;
    double wd = 0.0;
    double kappa = 0.0;
    State anchor; // exact state at xd, returned verbatim when kappa == 0

    Invariants invariants_at(double x) const {
        return Invariants{zd - kappa * (x - xd), wd + kappa * (x - xd)};
    }

    bool vacuum_at(double x) const {
        const Invariants iv = invariants_at(x);
        return iv.w - iv.z <= 0.0;
    }

    State state_at(double x, const ProblemParams& p) const {
        if (kappa == 0.0 || x == xd) return anchor;
        return from_invariants(invariants_at(x), p);
    }
};

inline SteadyProfile steady_profile(double xd, const State& ud, const ProblemParams& p,
                                    double kappa) {
    const Invariants iv = to_invariants(ud, p);
    return SteadyProfile{xd, iv.z, iv.w, kappa, ud};
}

inline SteadyProfile steady_profile(double xd, const State& ud, const ProblemParams& p) {
    return steady_profile(xd, ud, p, p.K);
}

// Evaluation frame for a cell build: forwards forcing values, optionally through
// the reflection x -> 2 xc - x, F -> -F used by the mirrored constructions.
struct SourceFrame {
    const Forcing* forcing = nullptr;
    double mirror_center = 0.0;
    bool mirrored = false;
    int* clip_count = nullptr; // vacuum-crossing clips recorded here when set

    double feval(double x, double t) const {
        if (forcing == nullptr) return 0.0;
        return mirrored ? -(*forcing)(2.0 * mirror_center - x, t) : (*forcing)(x, t);
    }

    void note_clip() const {
        if (clip_count != nullptr) ++(*clip_count);
    }
};

// Fractional-step value on top of a steady profile:
//   z = zbar(x) + {F(x,t) + kappa lambda1(ubar(x))} (t - t0)
//   w = wbar(x) + {F(x,t) - kappa lambda2(ubar(x))} (t - t0)
// A drive below the vacuum line clips to vacuum and reports it.
inline State fractional_step(const SteadyProfile& bar, double x, double t, double t0,
                             const SourceFrame& frame, const ProblemParams& p,
                             bool* clipped = nullptr) {
    const Invariants base = bar.invariants_at(x);
    if (base.w - base.z <= 0.0) {
        if (clipped) *clipped = true;
        frame.note_clip();
        return State{0.0, 0.0};
    }
    const double tau = t - t0;
    if (tau == 0.0) return bar.state_at(x, p);
    const State ub = bar.state_at(x, p);
    const auto [l1, l2] = char_speeds(ub, p);
    const double f = frame.feval(x, t);
    if (f == 0.0 && bar.kappa == 0.0) return ub;
    const Invariants iv{base.z + (f + bar.kappa * l1) * tau,
                        base.w + (f - bar.kappa * l2) * tau};
    if (iv.w - iv.z < 0.0) {
        if (clipped) *clipped = true;
        frame.note_clip();
        return State{0.0, 0.0};
    }
    return from_invariants(iv, p);
}

// convenience overload in the standard frame
inline State fractional_step(const SteadyProfile& bar, double x, double t, double t0,
                             const Forcing& forcing, const ProblemParams& p,
                             bool* clipped = nullptr) {
    SourceFrame fr;
    fr.forcing = &forcing;
    return fractional_step(bar, x, t, t0, fr, p, clipped);
}

} // namespace peuler

#endif
