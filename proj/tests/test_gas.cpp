#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "peuler/gas.hpp"
#include "test_support.hpp"

using namespace peuler;

namespace {
const ProblemParams g53(5.0 / 3.0, 0.0, 1.0, 1.0);
}

TEST_CASE("pressure: values and derivative") {
    CHECK(pressure(0.0, g53) == 0.0);
    CHECK(pressure(1.0, g53) == doctest::Approx(0.6).epsilon(1e-14));
    CHECK(pressure(2.0, g53) == doctest::Approx(0.6 * std::pow(2.0, 5.0 / 3.0)).epsilon(1e-14));
    CHECK_THROWS_AS(pressure(-1.0, g53), std::domain_error);

    // finite-difference oracle for p'(rho) = rho^(gamma-1)
    for (double rho : {0.3, 1.0, 2.5}) {
        const double h = 1e-6 * rho;
        const double fd = (pressure(rho + h, g53) - pressure(rho - h, g53)) / (2.0 * h);
        CHECK(fd == doctest::Approx(std::pow(rho, g53.gamma - 1.0)).epsilon(1e-6));
    }
}

TEST_CASE("invariants: examples and vacuum convention") {
    const Invariants iv = to_invariants(State{1.0, 0.0}, g53);
    CHECK(iv.z == doctest::Approx(-3.0).epsilon(1e-14));
    CHECK(iv.w == doctest::Approx(3.0).epsilon(1e-14));

    const Invariants vac = to_invariants(State{0.0, 0.0}, g53);
    CHECK(vac.z == 0.0);
    CHECK(vac.w == 0.0);

    const State u = from_invariants(Invariants{-3.0, 3.0}, g53);
    CHECK(u.rho == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(u.m == doctest::Approx(0.0).epsilon(1e-14));

    CHECK(from_invariants(Invariants{0.7, 0.7}, g53).vacuum());
    CHECK_THROWS_AS(from_invariants(Invariants{1.0, 0.5}, g53), std::domain_error);

    const State u2 = from_invariants(Invariants{-2.0, 3.0}, g53);
    CHECK(u2.rho == doctest::Approx(std::pow(5.0 / 6.0, 3.0)).epsilon(1e-13));
}

TEST_CASE("invariants: roundtrip to 1e-12 relative") {
    auto rng = testsup::make_rng(42);
    for (double gamma : {1.2, 1.4, 5.0 / 3.0}) {
        const ProblemParams p(gamma, 0.0, 1.0, 1.0);
        for (int i = 0; i < 100; ++i) {
            // keep a nondegenerate invariant spread: the reconstruction exponent
            // 1/theta amplifies the w-z cancellation near the vacuum line
            const State u = testsup::random_state_in_sigma(rng, p, -2.0, 7.0);
            const Invariants iv = to_invariants(u, p);
            if (iv.w - iv.z < 0.05) continue;
            const State back = from_invariants(iv, p);
            CHECK(back.rho == doctest::Approx(u.rho).epsilon(1e-12));
            CHECK(std::abs(back.velocity() - u.velocity()) <=
                  1e-12 * (1.0 + std::abs(u.velocity())));
        }
    }
}

TEST_CASE("invariants: monotonicity of rho in (z, w)") {
    const ProblemParams p(1.4, 0.0, 1.0, 1.0);
    const double w = 3.0;
    double prev = from_invariants(Invariants{-2.0, w}, p).rho;
    for (double z = -1.5; z < w; z += 0.5) {
        const double rho = from_invariants(Invariants{z, w}, p).rho;
        CHECK(rho < prev); // decreasing in z at fixed w
        prev = rho;
    }
    const double z0 = -1.0;
    prev = from_invariants(Invariants{z0, -0.5}, p).rho;
    for (double ww = 0.0; ww < 4.0; ww += 0.5) {
        const double rho = from_invariants(Invariants{z0, ww}, p).rho;
        CHECK(rho > prev); // increasing in w at fixed z
        prev = rho;
    }
}

TEST_CASE("char_speeds: examples and spread identity") {
    const auto [l1, l2] = char_speeds(State{1.0, 0.0}, g53);
    CHECK(l1 == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(l2 == doctest::Approx(1.0).epsilon(1e-14));

    const auto [v1, v2] = char_speeds(State{0.0, 0.0}, g53);
    CHECK(v1 == 0.0);
    CHECK(v2 == 0.0);

    auto rng = testsup::make_rng(7);
    for (int i = 0; i < 50; ++i) {
        const State u = testsup::random_state_in_sigma(rng, g53, -1.0, 6.0);
        const auto [a, b] = char_speeds(u, g53);
        CHECK(b - a == doctest::Approx(2.0 * std::pow(u.rho, g53.theta)).epsilon(1e-12));
    }
}

TEST_CASE("mechanical entropy: examples") {
    const EntropyPair e = mechanical_entropy(State{1.0, 0.0}, g53);
    CHECK(e.eta == doctest::Approx(0.9).epsilon(1e-14));
    CHECK(e.q == 0.0);

    const EntropyPair v = mechanical_entropy(State{0.0, 0.0}, g53);
    CHECK(v.eta == 0.0);
    CHECK(v.q == 0.0);
}

TEST_CASE("mechanical entropy: weak entropy vanishes toward vacuum") {
    const ProblemParams p(1.4, 0.0, 1.0, 1.0);
    const double v = 2.0;
    double prev = 1e30;
    for (double rho = 1e-2; rho > 1e-10; rho *= 1e-2) {
        const double eta = mechanical_entropy(State{rho, rho * v}, p).eta;
        CHECK(eta < prev);
        prev = eta;
    }
    CHECK(prev < 1e-9);
}

TEST_CASE("mechanical entropy: grad q = grad eta * grad f by finite differences") {
    auto rng = testsup::make_rng(99);
    for (double gamma : {1.2, 5.0 / 3.0}) {
        const ProblemParams p(gamma, 0.0, 1.0, 1.0);
        for (int i = 0; i < 100; ++i) {
            const State u = testsup::random_state_in_sigma(rng, p, -1.0, 6.0);
            if (u.rho < 1e-3) continue;
            const double hr = 1e-6 * u.rho;
            const double hm = 1e-6 * (std::abs(u.m) + u.rho);
            auto eta = [&](double r, double m) {
                return mechanical_entropy(State{r, m}, p).eta;
            };
            auto q = [&](double r, double m) { return mechanical_entropy(State{r, m}, p).q; };
            auto f2 = [&](double r, double m) { return testsup::oracle_f2(State{r, m}, gamma); };
            const double eta_r = (eta(u.rho + hr, u.m) - eta(u.rho - hr, u.m)) / (2 * hr);
            const double eta_m = (eta(u.rho, u.m + hm) - eta(u.rho, u.m - hm)) / (2 * hm);
            const double q_r = (q(u.rho + hr, u.m) - q(u.rho - hr, u.m)) / (2 * hr);
            const double q_m = (q(u.rho, u.m + hm) - q(u.rho, u.m - hm)) / (2 * hm);
            const double f1_r = 0.0, f1_m = 1.0;
            const double f2_r = (f2(u.rho + hr, u.m) - f2(u.rho - hr, u.m)) / (2 * hr);
            const double f2_m = (f2(u.rho, u.m + hm) - f2(u.rho, u.m - hm)) / (2 * hm);
            const double scale = std::abs(q_r) + std::abs(q_m) + 1.0;
            CHECK(std::abs(q_r - (eta_r * f1_r + eta_m * f2_r)) <= 1e-6 * scale);
            CHECK(std::abs(q_m - (eta_r * f1_m + eta_m * f2_m)) <= 1e-6 * scale);
        }
    }
}

TEST_CASE("params: condition-M validation") {
    CHECK_THROWS_AS(ProblemParams(1.4, 0.2, 2.5, 1.3), ConfigError); // M < L
    CHECK_THROWS_AS(ProblemParams(1.4, 0.5, 1.2, 2.0), ConfigError); // L < 1 + K
    CHECK_THROWS_AS(ProblemParams(2.0, 0.0, 1.0, 1.0), ConfigError); // gamma > 5/3
    CHECK_NOTHROW(ProblemParams(1.4, 0.2, 1.3, 2.5));
}

TEST_CASE("invariants: sign relations at nonnegative velocity") {
    auto rng = testsup::make_rng(123);
    const ProblemParams p(1.4, 0.0, 1.0, 1.0);
    std::uniform_real_distribution<double> ur(1e-6, 3.0);
    std::uniform_real_distribution<double> uv(0.0, 4.0);
    for (int i = 0; i < 200; ++i) {
        const double rho = ur(rng), v = uv(rng);
        const Invariants iv = to_invariants(State{rho, rho * v}, p);
        CHECK(std::abs(iv.w) >= std::abs(iv.z) - 1e-14);
        CHECK(iv.w >= -1e-14);
        // and the mirror statement at v <= 0
        const Invariants im = to_invariants(State{rho, -rho * v}, p);
        CHECK(std::abs(im.w) <= std::abs(im.z) + 1e-14);
        CHECK(im.z <= 1e-14);
    }
}
