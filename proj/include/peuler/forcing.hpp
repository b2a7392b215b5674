#ifndef PEULER_FORCING_HPP
#define PEULER_FORCING_HPP

#include <cmath>
#include <cstdlib>
#include <vector>

namespace peuler {

inline constexpr double kPi = 3.14159265358979323846;

// One separable term c * cos(a pi x + b) * trig(2 pi f t + phase). Integer f
// keeps F(x,0) = F(x,1); the catalogue is C^1 in both variables.
struct ForcingTerm {
    double c = 0.0;
    double a = 0.0;
    double b = 0.0;
    int freq = 1;
    double phase = 0.0;
    bool use_sin = true;

    double eval(double x, double t) const {
        const double sx = std::cos(a * kPi * x + b);
        const double arg = 2.0 * kPi * freq * t + phase;
        return c * sx * (use_sin ? std::sin(arg) : std::cos(arg));
    }
};

// Time-periodic outer force F(x, t) with period 1.
struct Forcing {
    std::vector<ForcingTerm> terms;

    double operator()(double x, double t) const {
        double s = 0.0;
        for (const ForcingTerm& term : terms) s += term.eval(x, t);
        return s;
    }

    // sup |F| <= sum |c_k|
    double sup_bound() const {
        double s = 0.0;
        for (const ForcingTerm& term : terms) s += std::abs(term.c);
        return s;
    }

    // measured sup over a sampling grid, for validating |F| <= K
    double measured_sup(int n = 400) const {
        double s = 0.0;
        for (int i = 0; i <= n; ++i)
            for (int k = 0; k <= n; ++k)
                s = std::max(s, std::abs((*this)(double(i) / n, double(k) / n)));
        return s;
    }
};

} // namespace peuler

#endif
