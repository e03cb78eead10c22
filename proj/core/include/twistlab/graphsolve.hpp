#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "twistlab/circle.hpp"
#include "twistlab/twist.hpp"

namespace twistlab {

/// The constants attached to one dissipation value. All follow from lambda.
struct ThresholdSet {
    double lambda;
    double k1;             // 2/sqrt(lambda) - 1   (invertibility budget)
    double k2;             // 1/sqrt(lambda) - 1   (Lipschitz class kept by the transform)
    double k3;             // 1/lambda - 1         (contraction budget)
    double contraction;    // lambda * (1 + k2) == sqrt(lambda)
    double lip_threshold;  // (1 - sqrt(lambda))^2 (existence threshold on ||phi||_Lip)
    double bohr;           // 2(1+lambda)/(2+lambda) (known destruction bound, standard map)
    double beta;           // 1/sqrt(lambda)       (cone aperture)

    static ThresholdSet for_lambda(double lambda);
};

struct ThresholdError : std::runtime_error {
    double lip_phi, threshold;
    ThresholdError(double lip, double thr);
};

struct NonConvergenceError : std::runtime_error {
    std::vector<double> increments;
    explicit NonConvergenceError(std::vector<double> inc);
};

enum class SolveStatus { converged, diverged, max_iter };

struct InvariantGraph {
    PeriodicFn psi;        // the graph, original (uncentered) coordinates
    // Induced circle map g(x) = x + alpha1 + lambda*psi(x) + phi(x); absent
    // when a forced run diverged so badly that the displacement lost
    // monotonicity.
    std::optional<CircleLift> g;
    double residual_inv;   // sup over nodes of |psi(g(x)) - lambda*psi(x) - phi(x) - alpha2|
    double residual_fe;    // sup-norm defect of the averaged functional equation in g
    double lip_cert;       // measured Lipschitz seminorm of psi
    int iterations;
    SolveStatus status;
    std::vector<double> increments;  // C0 step sizes of the fixed-point iteration
};

struct SolveOptions {
    double tol = 1e-10;
    int max_iter = 2000;
    bool force = false;     // run past the existence threshold, report divergence
    bool polish = true;     // finish with Newton steps on the node-collocation system
    std::optional<PeriodicFn> initial;  // warm start (uncentered); default psi == 0 centered
};

/// One application of the graph transform: push the graph of psi forward by F
/// and re-parametrize over the base. Requires ||phi||_Lip + lambda*lip(psi) < 1.
PeriodicFn graph_transform(const TwistParams& p, const PeriodicFn& psi);

/// Fixed-point iteration of the graph transform from psi == 0 (in coordinates
/// centered on the unperturbed graph), Cauchy-stopped so the fixed-point error
/// is below tol, then optionally polished so the invariance equation holds at
/// the nodes to near machine precision.
///
/// Refuses ||phi||_Lip above the existence threshold unless opts.force.
InvariantGraph solve(const TwistParams& p, const SolveOptions& opts = {});

double invariance_residual(const TwistParams& p, const PeriodicFn& psi);

/// Defect of (g + lambda*g^{-1})/(1+lambda) = Id + ((1-lambda)a1 + lambda*a2 + phi)/(1+lambda).
double functional_eq_residual(const CircleLift& g, const TwistParams& p);

struct ConeViolation {
    int node;
    double margin;  // beta*|v1'| - |v2'|, negative at a violation
};

struct ConeReport {
    double zeta_hat;       // measured max(||phi||_C0, sup|phi'|)
    double beta;           // 1/sqrt(lambda)
    double aperture_bound; // beta/(1+beta)
    bool analytic_pass;    // zeta_hat < beta/(1+beta)
    std::vector<ConeViolation> violations;  // nodes failing the boundary-vector check
    bool pointwise_pass;
    PeriodicFn slope_field;          // limiting slope per node after k_max pushforwards
    std::vector<double> max_aperture;  // max over nodes of |s+ - s-| after k pushforwards
    double final_aperture;
};

struct ConeOptions {
    int k_max = 40;
};

/// Cone diagnostics along a solved graph: the closed-form aperture test, the
/// per-node boundary-vector images, and the pushed-forward slope field.
ConeReport cone_check(const TwistParams& p, const InvariantGraph& graph,
                      const ConeOptions& opts = {});

struct SlopeJump {
    int node;
    double x;
    double left_slope;
    double right_slope;
};

/// Nodes where one-sided difference quotients (averaged over spans of 1, 2
/// and 4 cells) differ by more than jump_tol.
std::vector<SlopeJump> slope_discontinuity_scan(const PeriodicFn& psi, double jump_tol);

}  // namespace twistlab
