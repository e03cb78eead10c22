#pragma once

#include <string>
#include <vector>

#include "twistlab/graphsolve.hpp"

namespace twistlab {

struct SweepSpec {
    std::vector<double> lambdas;
    std::vector<double> kappas;
    double alpha1 = 0.38;
    int grid_n = 1024;
    double tol = 1e-8;
    int max_iter = 600;
};

struct SweepCell {
    double lambda, kappa;
    SolveStatus status;
    int iterations;
    double lip_cert;
    double residual_inv;
};

struct Atlas {
    SweepSpec spec;
    std::vector<SweepCell> cells;  // ordered by (lambda, kappa)

    /// True when every cell with kappa <= (1-sqrt(lambda))^2 converged.
    bool no_false_breakdown() const;
    /// True when, per lambda row, the converged kappas form a downward-closed
    /// interval up to at most one boundary cell of noise.
    bool rows_monotone(int allowed_noise = 1) const;
};

double existence_threshold(double lambda);  // (1 - sqrt(lambda))^2
double bohr_bound(double lambda);           // 2(1+lambda)/(2+lambda)
double threshold_gap(double lambda);        // bohr - existence threshold

/// Runs solve with force over the (lambda, kappa) grid of standard-map
/// perturbations, one cell per task on the worker pool, output ordered by
/// (lambda, kappa) regardless of scheduling.
Atlas run_sweep(const SweepSpec& spec);

}  // namespace twistlab
