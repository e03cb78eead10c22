#pragma once

#include <vector>

#include "twistlab/circle.hpp"
#include "twistlab/periodic.hpp"

namespace twistlab::arnold {

/// The sine family g_{n,a1}(x) = x + a1 + (1/n) sin(2 pi x), together with its
/// explicit invariant graph Psi(x) = (1/n) sin(2 pi g^{-1}(x)) and the induced
/// perturbation psi(x) = (1/n) sin(2 pi x) - (lambda/n) sin(2 pi g^{-1}(x)).
struct Family {
    int n;
    double alpha1;
    double lambda;

    Family(int n_, double alpha1_, double lambda_);

    double g(double x) const;
    double g_deriv(double x) const;
    double g_inv(double x) const;  // Newton on the closed form, machine precision
    double graph(double x) const;  // Psi_{n,alpha1}
    double perturbation(double x) const;  // psi_n, mean zero

    /// Sup over `samples` points of the defect of the averaged functional
    /// equation (g + lambda g^{-1})/(1+lambda) = Id + ((1-lambda) a1 + psi)/(1+lambda),
    /// evaluated on the closed forms.
    double functional_residual(int samples = 4096) const;
};

/// Grid snapshots for interop with the rest of the library.
struct Build {
    CircleLift g;
    PeriodicFn graph;
    PeriodicFn perturbation;
};
Build build(const Family& fam, int grid_n);

struct DecayRow {
    int n;
    double c0;      // ||psi_n||_C0
    double c1;      // ||psi_n||_C0 + ||D psi_n||_C0 (finite differences)
    double holder;  // C^{1-eps} norm
};
struct DecayTable {
    std::vector<DecayRow> rows;
    double c0_exponent;  // least-squares slope of log c0 vs log n
    double c1_exponent;
};

/// Measures the decay of the perturbation norms across a list of n values.
DecayTable norm_decay(double lambda, const std::vector<int>& n_list, int grid_n,
                      double holder_eps = 0.1);

struct Plateau {
    double a1_lo, a1_hi;
    long p, q;
};

struct ScanOptions {
    long q_max = 40;
    double tol = 1e-9;
    int grid_n = 2048;
};

/// Scans alpha1 over [lo, hi] with `steps` points, classifies each by
/// mode-locking of g_{n,alpha1} and merges adjacent points locked to the same
/// fraction into plateaus.
std::vector<Plateau> plateau_scan(int n, double lo, double hi, int steps,
                                  const ScanOptions& opts = {});

}  // namespace twistlab::arnold
