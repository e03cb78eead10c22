#include <doctest.h>

#include <cmath>
#include <algorithm>
#include <sstream>

#include "test_util.hpp"
#include "twistlab/periodic.hpp"

using namespace twistlab;

namespace {
constexpr double kTwoPi = 2.0 * M_PI;
PeriodicFn sine(int n, double amp = 1.0) {
    return PeriodicFn::from_function([amp](double x) { return amp * std::sin(kTwoPi * x); }, n);
}
}  // namespace

TEST_CASE("eval interpolates the periodic extension") {
    const PeriodicFn f = sine(256);
    CHECK(f(0.25) == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(f(1.25) == f(0.25));
    CHECK(f(-0.75) == f(0.25));

    const PeriodicFn c = PeriodicFn::constant(0.7, 64);
    CHECK(c(0.123456) == doctest::Approx(0.7).epsilon(1e-15));

    // Exact at nodes.
    for (int i = 0; i < f.size(); i += 17) {
        CHECK(f(static_cast<double>(i) / f.size()) == f.sample(i));
    }
}

TEST_CASE("eval is exactly 1-periodic at dyadic points") {
    testutil::Rng rng(7);
    const PeriodicFn f = testutil::random_trig(rng, 128, 4, 0.8);
    for (int t = 0; t < 200; ++t) {
        const double x = rng.dyadic();
        CHECK(f(x) == f(x + 1.0));
        CHECK(f(x) == f(x - 1.0));
    }
}

TEST_CASE("mean: rectangle rule on one period") {
    CHECK(mean(sine(64)) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(mean(PeriodicFn::constant(0.3, 32)) == 0.3);

    // Independent oracle: analytic integral of sin^2 over a period is 1/2.
    const int n = 512;
    const PeriodicFn f = PeriodicFn::from_function(
        [](double x) { return std::sin(kTwoPi * x) * std::sin(kTwoPi * x); }, n);
    CHECK(std::abs(mean(f) - 0.5) < 1.0 / (n * n));
}

TEST_CASE("lip_seminorm matches analytic slopes") {
    // max |phi'| = kappa for the standard-map kick.
    const double kappa = 0.2;
    const PeriodicFn f = PeriodicFn::from_function(
        [kappa](double x) { return kappa / kTwoPi * std::sin(kTwoPi * x); }, 4096);
    CHECK(lip_seminorm(f) == doctest::Approx(kappa).epsilon(1e-3));

    CHECK(lip_seminorm(PeriodicFn::constant(1.0, 16)) == 0.0);

    // Piecewise-linear tent of slope +-2 measured exactly.
    const PeriodicFn tent = PeriodicFn::from_function(
        [](double x) { return x < 0.5 ? 2.0 * x : 2.0 * (1.0 - x); }, 64);
    CHECK(lip_seminorm(tent) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("lip_seminorm is monotone under refinement toward sup|f'|") {
    double prev = 0.0;
    for (int n : {64, 128, 256, 512, 1024}) {
        const double cur = lip_seminorm(sine(n));
        CHECK(cur >= prev - 1e-15);
        prev = cur;
    }
    CHECK(prev == doctest::Approx(kTwoPi).epsilon(1e-4));
}

TEST_CASE("holder_norm: domain, constants, analytic window") {
    CHECK_THROWS_AS(holder_norm(sine(64), 0.0), std::domain_error);
    CHECK_THROWS_AS(holder_norm(sine(64), 1.0), std::domain_error);

    CHECK(holder_norm(PeriodicFn::constant(-0.4, 32), 0.3) == doctest::Approx(0.4).epsilon(1e-15));

    // Small sine at eps = 1/2: bounded via the interpolation inequality with
    // measured C0 and Lipschitz norms.
    const PeriodicFn f = sine(512, 0.01);
    const double v = holder_norm(f, 0.5);
    CHECK(v > 0.0);
    CHECK(v <= 0.01 + std::sqrt(kTwoPi * 0.01) * std::sqrt(0.01) * 2.0 + 1e-12);
}

TEST_CASE("holder_norm bounded by C0 and Lipschitz data on random grids") {
    testutil::Rng rng(21);
    for (int t = 0; t < 12; ++t) {
        const int n = 64 << (t % 3);
        const PeriodicFn f = testutil::random_trig(rng, n, 5, 1.0);
        const double eps = rng.uniform(0.05, 0.95);
        const double bound = (1.0 + std::pow(2.0, 1.0 - eps)) * (c0_norm(f) + lip_seminorm(f));
        CHECK(holder_norm(f, eps) <= bound + 1e-12);
    }
    // Dyadic-stride path for large grids obeys the same bound.
    const PeriodicFn big = testutil::random_trig(rng, 4096, 5, 1.0);
    CHECK(holder_norm(big, 0.1) <=
          (1.0 + std::pow(2.0, 0.9)) * (c0_norm(big) + lip_seminorm(big)) + 1e-12);
}

TEST_CASE("mean-zero functions satisfy C0 <= Lip") {
    testutil::Rng rng(5);
    for (int t = 0; t < 10; ++t) {
        PeriodicFn f = testutil::random_trig(rng, 128, 4, 1.0);
        std::vector<double> v = f.samples();
        const double m = mean(f);
        for (double& x : v) x -= m;
        const PeriodicFn g{std::move(v)};
        CHECK(c0_norm(g) <= lip_seminorm(g) + 1e-12);
    }
}

TEST_CASE("derivative: central differences") {
    const int n = 1024;
    const PeriodicFn f = sine(n);
    const PeriodicFn d = derivative(f);
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        worst = std::max(worst,
                         std::abs(d.sample(i) - kTwoPi * std::cos(kTwoPi * i / n)));
    }
    CHECK(worst < 40.0 / (n * n) * kTwoPi * kTwoPi);

    CHECK(c0_norm(derivative(PeriodicFn::constant(2.0, 16))) == 0.0);
    CHECK(std::abs(mean(derivative(f))) < 1e-10);

    // Sawtooth input: the derivative is still returned (nearest symmetric
    // quotient); no smoothness is claimed.
    const PeriodicFn saw = PeriodicFn::from_function([](double x) { return x; }, 64);
    CHECK(derivative(saw).size() == 64);
}

TEST_CASE("grid size is validated") {
    CHECK_THROWS_AS(PeriodicFn::constant(0.0, 8), std::invalid_argument);
}

TEST_CASE("csv emission: header, one row per node, LF endings") {
    std::ostringstream os;
    write_csv(os, PeriodicFn::constant(1.5, 16));
    const std::string text = os.str();
    CHECK(text.substr(0, 8) == "x,value\n");
    CHECK(std::count(text.begin(), text.end(), '\n') == 17);
    CHECK(text.find('\r') == std::string::npos);
}
