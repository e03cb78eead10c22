#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "test_util.hpp"
#include "twistlab/arnold.hpp"
#include "twistlab/graphsolve.hpp"

using namespace twistlab;

TEST_CASE("family guards the monotonicity range") {
    CHECK_THROWS_AS(arnold::Family(5, 0.1, 0.5), std::invalid_argument);
    CHECK_NOTHROW(arnold::Family(8, 0.1, 0.5));
}

TEST_CASE("functional residual of the closed-form construction is tiny") {
    for (int n : {50, 200}) {
        for (double lambda : {0.25, 0.5}) {
            const arnold::Family fam(n, 0.3171, lambda);
            CHECK(fam.functional_residual() < 1e-12);
        }
    }
}

TEST_CASE("perturbation has zero mean and satisfies the invariance relation") {
    const arnold::Family fam(100, 0.2241, 0.25);
    const int samples = 20000;
    double acc = 0.0;
    for (int i = 0; i < samples; ++i) acc += fam.perturbation((i + 0.5) / samples);
    CHECK(std::abs(acc / samples) < 1e-8);

    // Psi(g(x)) - lambda Psi(x) = psi_n(x) pointwise.
    testutil::Rng rng(31);
    for (int t = 0; t < 200; ++t) {
        const double x = rng.uniform();
        const double lhs = fam.graph(fam.g(x)) - fam.lambda * fam.graph(x);
        CHECK(lhs == doctest::Approx(fam.perturbation(x)).epsilon(1e-11));
    }
}

TEST_CASE("grid build matches what the graph solver finds") {
    const int n = 60;
    const double lambda = 0.25;
    const arnold::Family fam(n, 0.2617, lambda);
    const arnold::Build b = arnold::build(fam, 2048);

    CHECK(lip_seminorm(b.perturbation) <= ThresholdSet::for_lambda(lambda).lip_threshold);
    std::vector<double> v = b.perturbation.samples();
    const double m = mean(b.perturbation);
    for (double& x : v) x -= m;  // exact zero mean on the grid
    const TwistParams p(lambda, fam.alpha1, 0.0, PeriodicFn(std::move(v)));
    const InvariantGraph g = solve(p);
    double worst = 0.0;
    for (int i = 0; i < 2048; ++i) {
        worst = std::max(worst, std::abs(g.psi.sample(i) - b.graph.sample(i)));
    }
    CHECK(worst < 1e-5);
}

TEST_CASE("norm decay across n follows 1/n") {
    const arnold::DecayTable t = arnold::norm_decay(0.25, {50, 100, 200, 400}, 4096);
    CHECK(t.c1_exponent > -1.2);
    CHECK(t.c1_exponent < -0.8);
    CHECK(t.c0_exponent > -1.2);
    CHECK(t.c0_exponent < -0.8);
    // Doubling n roughly halves the C0 norm.
    for (std::size_t i = 0; i + 1 < t.rows.size(); ++i) {
        const double ratio = t.rows[i + 1].c0 / t.rows[i].c0;
        CHECK(ratio > 0.4);
        CHECK(ratio < 0.6);
    }
}

TEST_CASE("plateau at rho = 0 spans [-1/n, 1/n]") {
    const int n = 40;
    const int steps = 161;
    const double lo = -2.0 / n, hi = 2.0 / n;
    const auto plateaus = arnold::plateau_scan(n, lo, hi, steps);
    const double step = (hi - lo) / (steps - 1);
    bool found = false;
    for (const auto& pl : plateaus) {
        if (pl.p == 0 && pl.q == 1) {
            found = true;
            CHECK(std::abs(pl.a1_lo - (-1.0 / n)) <= 2 * step);
            CHECK(std::abs(pl.a1_hi - (1.0 / n)) <= 2 * step);
        }
    }
    CHECK(found);
}

TEST_CASE("plateaus leave room for unlocked parameters") {
    const int n = 40;
    const auto plateaus = arnold::plateau_scan(n, 0.1, 0.4, 121);
    double locked_len = 0.0;
    for (const auto& pl : plateaus) locked_len += pl.a1_hi - pl.a1_lo;
    CHECK(locked_len < 0.3);
}
