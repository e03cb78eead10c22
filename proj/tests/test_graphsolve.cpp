#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "test_util.hpp"
#include "twistlab/graphsolve.hpp"

using namespace twistlab;

namespace {
constexpr double kTwoPi = 2.0 * M_PI;
}

TEST_CASE("threshold constants and their orderings") {
    for (double lambda : {0.04, 0.25, 0.5, 0.81, 0.97}) {
        const ThresholdSet t = ThresholdSet::for_lambda(lambda);
        CHECK(t.k2 < std::min(t.k1, t.k3));
        CHECK(t.contraction == doctest::Approx(std::sqrt(lambda)).epsilon(1e-14));
        CHECK(t.contraction == doctest::Approx(lambda * (1.0 + t.k2)).epsilon(1e-14));
        CHECK(t.lip_threshold < t.beta / (1.0 + t.beta));
        CHECK(t.bohr > t.lip_threshold);  // the gap between breakdown and existence
    }
    CHECK(ThresholdSet::for_lambda(0.25).lip_threshold == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(ThresholdSet::for_lambda(0.25).bohr == doctest::Approx(2.5 / 2.25).epsilon(1e-14));
}

TEST_CASE("graph_transform: pure contraction and fixed-point consistency") {
    // phi == 0, alpha2 = 0: the transform contracts constants by lambda.
    const TwistParams p(0.5, 0.2, 0.0, PeriodicFn::zero(256));
    const PeriodicFn img = graph_transform(p, PeriodicFn::constant(0.8, 256));
    for (int i = 0; i < img.size(); ++i) {
        CHECK(img.sample(i) == doctest::Approx(0.4).epsilon(1e-11));
    }

    // A solved graph is (numerically) a fixed point.
    const TwistParams q(0.25, 0.38, 0.0, standard_map_phi(0.2, 1024));
    const InvariantGraph g = solve(q);
    const PeriodicFn pushed = graph_transform(q, g.psi);
    // Fixed point up to the grid's interpolation scale 1/n^2.
    CHECK(testutil::sup_diff(pushed, g.psi) < 3e-6);
}

TEST_CASE("graph_transform contraction factor matches lambda(1 + lip)") {
    const double lambda = 0.25, kappa = 0.2;
    const TwistParams p(lambda, 0.1, 0.0, standard_map_phi(kappa, 512));
    const ThresholdSet t = ThresholdSet::for_lambda(lambda);
    testutil::Rng rng(13);
    for (int trial = 0; trial < 8; ++trial) {
        const PeriodicFn psi1 =
            testutil::bounded(testutil::random_trig(rng, 512, 4, 1.0), 0.9, t.k2);
        const PeriodicFn psi2 =
            testutil::bounded(testutil::random_trig(rng, 512, 4, 1.0), 0.9, t.k2);
        const double num = testutil::sup_diff(graph_transform(p, psi1), graph_transform(p, psi2));
        const double den = testutil::sup_diff(psi1, psi2);
        const double k = std::max(lip_seminorm(psi1), lip_seminorm(psi2));
        CHECK(num <= (lambda * (1.0 + k)) * den + 1e-3 * den + 1e-9);
        CHECK(num <= std::sqrt(lambda) * den + 1e-3 * den + 1e-9);  // k <= K2
    }
}

TEST_CASE("graph_transform keeps the Lipschitz class and the unit band") {
    const double lambda = 0.25;
    const ThresholdSet t = ThresholdSet::for_lambda(lambda);
    const double kappa = 0.99 * t.lip_threshold;
    const TwistParams p(lambda, 0.0, 0.0, standard_map_phi(kappa, 512));
    testutil::Rng rng(19);
    for (int trial = 0; trial < 8; ++trial) {
        const PeriodicFn psi =
            testutil::bounded(testutil::random_trig(rng, 512, 4, 1.0), 1.0, t.k2);
        const PeriodicFn img = graph_transform(p, psi);
        CHECK(lip_seminorm(img) <= t.k2 + 2e-3);
        CHECK(c0_norm(img) < 1.0);
    }
}

TEST_CASE("graph_transform enforces the invertibility budget") {
    // lambda*lip(psi) + ||phi||_Lip >= 1 must be refused.
    const TwistParams p(0.5, 0.0, 0.0, standard_map_phi(0.2, 256));
    const PeriodicFn steep = PeriodicFn::from_function(
        [](double x) { return 0.3 * std::sin(kTwoPi * x) / kTwoPi * 10.0; }, 256);
    CHECK(lip_seminorm(steep) * 0.5 + 0.2 >= 1.0);
    CHECK_THROWS_AS(graph_transform(p, steep), std::invalid_argument);
}

TEST_CASE("inverse-parametrization Lipschitz bound") {
    const double lambda = 0.25, kappa = 0.2;
    const TwistParams p(lambda, 0.3, 0.0, standard_map_phi(kappa, 1024));
    const ThresholdSet t = ThresholdSet::for_lambda(lambda);
    testutil::Rng rng(23);
    const PeriodicFn psi = testutil::bounded(testutil::random_trig(rng, 1024, 3, 1.0), 1.0, t.k2);

    // Measure lip of z -> x(z) through the pushed graph: reconstruct the
    // preimages by inverting X(x) = x + a1 + lambda psi + phi on the grid.
    const CircleLift X = CircleLift::from_function(
        [&](double x) { return x + p.alpha1 + lambda * psi(x) + p.phi(x); }, 1024);
    const CircleLift Xinv = X.inverse(1e-13);
    const double lip_inv = 1.0 + lip_seminorm(Xinv.displacement());
    const double budget = 1.0 / (1.0 - lambda * lip_seminorm(psi) - lip_seminorm(p.phi));
    CHECK(lip_inv <= budget + 1e-2);
}

TEST_CASE("solve: unperturbed closed form") {
    const TwistParams p(0.5, 0.3, 0.15, PeriodicFn::zero(256));
    const InvariantGraph g = solve(p);
    CHECK(g.status == SolveStatus::converged);
    for (int i = 0; i < g.psi.size(); ++i) {
        CHECK(g.psi.sample(i) == doctest::Approx(0.3).epsilon(1e-10));
        CHECK(g.g->displacement().sample(i) == doctest::Approx(0.45).epsilon(1e-10));
    }
    CHECK(rotation_number(*g.g, 0.0, 10000, 1e-9).rho == doctest::Approx(0.45).epsilon(1e-9));
    CHECK(g.residual_inv < 1e-12);
}

TEST_CASE("solve at the exact threshold still converges") {
    const double lambda = 0.25;
    const double kappa = ThresholdSet::for_lambda(lambda).lip_threshold;  // 0.25
    const TwistParams p(lambda, 0.1, 0.0, standard_map_phi(kappa, 2048));
    const InvariantGraph g = solve(p);
    CHECK(g.status == SolveStatus::converged);
    CHECK(g.lip_cert <= ThresholdSet::for_lambda(lambda).k2 + 1e-3);
    CHECK(g.residual_inv < 2e-7);  // grid floor at n = 2048 for this kick
}

TEST_CASE("solve refuses above threshold without force") {
    const TwistParams p(0.25, 0.0, 0.0, standard_map_phi(1.2, 512));
    CHECK_THROWS_AS(solve(p), ThresholdError);
    SolveOptions opts;
    opts.force = true;
    opts.max_iter = 200;
    CHECK_NOTHROW(solve(p, opts));  // classification instead of refusal
}

TEST_CASE("solve: uniqueness with respect to the seed") {
    const TwistParams p(0.25, 0.38, 0.0, standard_map_phi(0.2, 1024));
    SolveOptions a;
    SolveOptions b;
    b.initial = PeriodicFn::constant(0.4, 1024);
    const InvariantGraph ga = solve(p, a);
    const InvariantGraph gb = solve(p, b);
    // Both seeds land on the same graph; the polish floor, not the Cauchy
    // tolerance, limits the agreement.
    CHECK(testutil::sup_diff(ga.psi, gb.psi) < 5e-9);
}

TEST_CASE("invariance residual after the collocation polish") {
    // The reachable node residual is limited by the grid: where the induced
    // map compresses several image points into one cell, the piecewise-linear
    // interpolant cannot satisfy all the node equations at once. The floor
    // grows with the kick amplitude; lambda = 0.04 carries kappa ~ 0.63.
    struct Row {
        double lambda, bound;
    };
    for (const Row row : {Row{0.04, 1e-6}, Row{0.25, 5e-9}, Row{0.5, 1e-11}, Row{0.81, 1e-12}}) {
        const double kappa = 0.99 * ThresholdSet::for_lambda(row.lambda).lip_threshold;
        const TwistParams p(row.lambda, 0.38, 0.0, standard_map_phi(kappa, 2048));
        const InvariantGraph g = solve(p);
        CHECK(g.residual_inv < row.bound);
    }
}

TEST_CASE("invariance residual of a constant shift (phi == 0)") {
    const double lambda = 0.5, delta = 0.01;
    const TwistParams p(lambda, 0.3, 0.15, PeriodicFn::zero(256));
    const InvariantGraph g = solve(p);
    std::vector<double> shifted = g.psi.samples();
    for (double& v : shifted) v += delta;
    const double r = invariance_residual(p, PeriodicFn(std::move(shifted)));
    CHECK(r == doctest::Approx(delta * (1.0 - lambda)).epsilon(1e-9));
}

TEST_CASE("closed-form identity psi = x - g^{-1} - a1 + a2") {
    const TwistParams p(0.25, 0.38, 0.05, standard_map_phi(0.2, 2048));
    const InvariantGraph g = solve(p);
    const CircleLift ginv = g.g->inverse(1e-13);
    double worst = 0.0;
    for (int i = 0; i < g.psi.size(); ++i) {
        const double x = static_cast<double>(i) / g.psi.size();
        const double closed = x - ginv(x) - p.alpha1 + p.alpha2;
        worst = std::max(worst, std::abs(closed - g.psi.sample(i)));
    }
    CHECK(worst < 1e-6);  // limited by the grid, not the solver
}

TEST_CASE("functional equation residual for solved graphs and rigid maps") {
    const TwistParams p(0.25, 0.38, 0.0, standard_map_phi(0.2, 2048));
    const InvariantGraph g = solve(p);
    CHECK(g.residual_fe < 1e-6);

    // Rigid rotation solves the equation iff a1 + lambda a2/(1-lambda) = rho.
    const double lambda = 0.5, a1 = 0.3, a2 = 0.15;
    const double rho = a1 + lambda * a2 / (1.0 - lambda);
    const CircleLift rigid = CircleLift::rigid(rho, 256);
    const TwistParams q(lambda, a1, a2, PeriodicFn::zero(256));
    CHECK(functional_eq_residual(rigid, q) < 1e-12);
    // Shifting g by c shifts g^{-1} by -c, so the defect is c(1-lambda)/(1+lambda).
    const CircleLift off = CircleLift::rigid(rho + 0.01, 256);
    CHECK(functional_eq_residual(off, q) ==
          doctest::Approx(0.01 * (1.0 - lambda) / (1.0 + lambda)).epsilon(1e-9));
}

TEST_CASE("cone diagnostics: unperturbed slope field is horizontal") {
    const TwistParams p(0.25, 0.3, 0.0, PeriodicFn::zero(256));
    const InvariantGraph g = solve(p);
    const ConeReport rep = cone_check(p, g);
    CHECK(rep.analytic_pass);
    CHECK(c0_norm(rep.slope_field) < 1e-9);
    CHECK(rep.final_aperture < 1e-6);
    // Aperture decays monotonically once contraction sets in.
    CHECK(rep.max_aperture.back() < rep.max_aperture.front());
}

TEST_CASE("cone analytic bound and slope field for the kicked map") {
    const TwistParams p(0.25, 0.38, 0.0, standard_map_phi(0.2, 1024));
    const InvariantGraph g = solve(p);
    const ConeReport rep = cone_check(p, g);
    CHECK(rep.zeta_hat == doctest::Approx(0.2).epsilon(1e-3));
    CHECK(rep.aperture_bound == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(rep.analytic_pass);
    // The limiting slope field is the graph's derivative.
    const PeriodicFn dpsi = derivative(g.psi);
    double worst = 0.0;
    for (int i = 0; i < dpsi.size(); ++i) {
        worst = std::max(worst, std::abs(dpsi.sample(i) - rep.slope_field.sample(i)));
    }
    CHECK(worst < 5e-3);
}

TEST_CASE("slope jump scan: smooth graphs are clean, corners are found") {
    const TwistParams p(0.25, 0.38, 0.0, standard_map_phi(0.2, 2048));
    const InvariantGraph g = solve(p);
    CHECK(slope_discontinuity_scan(g.psi, 0.05).empty());

    // Insert a synthetic corner of slope jump 0.5.
    const int n = 2048;
    PeriodicFn corner = PeriodicFn::from_function(
        [](double x) {
            const double d = std::min(std::abs(x - 0.5), 1.0 - std::abs(x - 0.5));
            return -0.125 * (2.0 * d - 0.5);  // tent: slopes -+0.25 around x = 1/2
        },
        n);
    const auto jumps = slope_discontinuity_scan(corner, 0.3);
    bool found = false;
    for (const auto& j : jumps) {
        if (std::abs(j.x - 0.5) < 3.0 / n) {
            found = true;
            CHECK(std::abs(j.left_slope - j.right_slope) == doctest::Approx(0.5).epsilon(0.2));
        }
    }
    CHECK(found);
}

TEST_CASE("force mode classifies far-supercritical kicks as diverged") {
    // Far beyond the known destruction bound for the standard map.
    const TwistParams p(0.25, 0.38, 0.0, standard_map_phi(2.2, 512));
    SolveOptions opts;
    opts.force = true;
    opts.max_iter = 400;
    const InvariantGraph g = solve(p, opts);
    CHECK(g.status != SolveStatus::converged);
}
