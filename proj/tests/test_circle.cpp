#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "test_util.hpp"
#include "twistlab/circle.hpp"

using namespace twistlab;

namespace {
constexpr double kTwoPi = 2.0 * M_PI;
constexpr double kGolden = 0.6180339887498949;
}  // namespace

TEST_CASE("monotonicity is enforced at construction") {
    // Displacement slope below -1 somewhere: not a homeomorphism lift.
    CHECK_THROWS_AS(CircleLift::from_function(
                        [](double x) { return x + 0.2 * std::sin(kTwoPi * x); }, 128),
                    std::invalid_argument);
    CHECK_NOTHROW(CircleLift::from_function(
        [](double x) { return x + 0.3 + std::sin(kTwoPi * x) / 10.0; }, 128));
}

TEST_CASE("inverse: rigid rotation and self-consistency") {
    const CircleLift g = CircleLift::rigid(0.37, 64);
    const CircleLift h = g.inverse();
    for (int i = 0; i < 64; ++i) {
        CHECK(h.displacement().sample(i) == doctest::Approx(-0.37).epsilon(1e-12));
    }

    const int n = 512;
    const CircleLift f = CircleLift::from_function(
        [n](double x) { return x + 0.3 + std::sin(kTwoPi * x) / n; }, n);
    const CircleLift finv = f.inverse(1e-13);
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = static_cast<double>(i) / n;
        worst = std::max(worst, std::abs(f(finv(x)) - x));
    }
    CHECK(worst < 2e-13 + 1e-9);  // node tolerance plus interpolation between nodes
}

TEST_CASE("inverse is two-sided up to the grid representation") {
    const int n = 256;
    const CircleLift f = CircleLift::from_function(
        [](double x) { return x + 0.11 + 0.05 * std::sin(kTwoPi * x); }, n);
    const CircleLift finv = f.inverse(1e-13);
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = static_cast<double>(i) / n;
        worst = std::max(worst, std::abs(finv(f(x)) - x));
    }
    // This direction evaluates the sampled inverse between its nodes, so the
    // piecewise-linear error |(g^{-1})''| / (8 n^2) with
    // (g^{-1})'' = -g''/(g')^3 dominates the node tolerance.
    const double curv = 0.05 * kTwoPi * kTwoPi / std::pow(1.0 - 0.05 * kTwoPi, 3.0);
    CHECK(worst < curv / (8.0 * n * n) + 2e-13);

    double worst_nodes = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = static_cast<double>(i) / n;
        worst_nodes = std::max(worst_nodes, std::abs(f(finv(x)) - x));
    }
    CHECK(worst_nodes < 2e-13);
}

TEST_CASE("iterate: rigid steps, identity, fixed points") {
    const CircleLift g = CircleLift::rigid(0.25, 32);
    CHECK(g.iterate(0.0, 10) == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(g.iterate(0.625, 0) == 0.625);
    CHECK_THROWS_AS(g.iterate(0.0, -1), std::invalid_argument);

    // g(x) = x + 0.05 + 0.1 sin(2 pi x) has a fixed point where the kick
    // cancels the drift; iterating from it stays put.
    const CircleLift f = CircleLift::from_function(
        [](double x) { return x + 0.05 + 0.1 * std::sin(kTwoPi * x); }, 4096);
    const double xstar = std::asin(-0.5) / kTwoPi + 1.0;  // sin = -1/2 branch in (0.9, 1)
    const double fixed = f.iterate(xstar, 7);
    CHECK(fixed == doctest::Approx(xstar).epsilon(5e-4));
}

TEST_CASE("rotation_number: rigid rotations are exact") {
    const CircleLift g = CircleLift::rigid(0.381966, 64);
    const RotationEstimate est = rotation_number(g, 0.0, 2000, 1e-9);
    CHECK(est.converged);
    CHECK(est.rho == doctest::Approx(0.381966).epsilon(1e-9));
    CHECK_THROWS_AS(rotation_number(g, 0.0, 10, 1e-6), std::invalid_argument);
}

TEST_CASE("rotation_number vanishes when fixed points exist") {
    // The orbit travels a bounded distance to the attracting fixed point, so
    // the Birkhoff quotient decays like (distance)/n.
    const CircleLift f = CircleLift::from_function(
        [](double x) { return x + 0.1 * std::sin(kTwoPi * x); }, 1024);
    const RotationEstimate est = rotation_number(f, 0.1234, 50000, 1e-4);
    CHECK(est.converged);
    CHECK(std::abs(est.rho) < 1e-4);
}

TEST_CASE("rotation number is monotone in rigid shifts") {
    testutil::Rng rng(11);
    const PeriodicFn kick = testutil::bounded(testutil::random_trig(rng, 512, 3, 1.0), 0.5, 0.5);
    double prev = -1e9;
    for (double c = 0.05; c < 0.6; c += 0.07) {
        const CircleLift g{PeriodicFn::from_function(
            [&](double x) { return c + kick(x); }, 512)};
        const double rho = rotation_number(g, 0.0, 40000, 1e-6).rho;
        CHECK(rho >= prev - 1e-7);
        prev = rho;
    }
}

TEST_CASE("mode_lock_detect: exact rationals, kicked locking, rigid irrational") {
    const CircleLift third = CircleLift::rigid(1.0 / 3.0, 64);
    auto ml = mode_lock_detect(third, 50, 1e-9);
    REQUIRE(ml.has_value());
    CHECK(ml->p == 1);
    CHECK(ml->q == 3);
    CHECK(ml->residual < 1e-9);

    // Drift below the kick amplitude: a fixed point exists, rho = 0/1.
    const CircleLift locked = CircleLift::from_function(
        [](double x) { return x + 0.05 + 0.1 * std::sin(kTwoPi * x); }, 2048);
    auto ml0 = mode_lock_detect(locked, 50, 1e-9);
    REQUIRE(ml0.has_value());
    CHECK(ml0->p == 0);
    CHECK(ml0->q == 1);

    const CircleLift golden = CircleLift::rigid(kGolden, 64);
    CHECK_FALSE(mode_lock_detect(golden, 50, 1e-9).has_value());
}
