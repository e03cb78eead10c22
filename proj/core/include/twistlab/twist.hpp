#pragma once

#include <utility>

#include "twistlab/periodic.hpp"

namespace twistlab {

/// One member of the two-parameter dissipative twist family
///   F(x, y) = (x + alpha1 + lambda*y + phi(x),  alpha2 + lambda*y + phi(x)),
/// with 0 < lambda < 1 and mean-zero periodic phi.
struct TwistParams {
    double lambda;
    double alpha1;
    double alpha2;
    PeriodicFn phi;

    TwistParams(double lambda_, double alpha1_, double alpha2_, PeriodicFn phi_);
};

/// phi(x) = (kappa / 2*pi) * sin(2*pi*x) on an n-point grid.
PeriodicFn standard_map_phi(double kappa, int n);

std::pair<double, double> apply(const TwistParams& p, double x, double y);

struct Mat2 {
    double a11, a12, a21, a22;
    double det() const { return a11 * a22 - a12 * a21; }
};

/// [[1 + phi'(x), lambda], [phi'(x), lambda]] with phi' by central difference
/// at grid resolution. det == lambda up to finite-difference error.
Mat2 jacobian(const TwistParams& p, double x);

struct OracleOptions {
    long n_points = 32768;        // seeds on a uniform lattice in [0,1) x [y_lo,y_hi]
    long n_iter = 0;              // 0 -> chosen from lambda so the tail error is ~1e-4
    int n_y = 4;                  // lattice rows; columns = n_points / n_y
    double y_lo = -1.0, y_hi = 1.0;
    double transient_fraction = 0.9;  // discarded prefix of each orbit
};

/// Forward-iteration attractor sampler, independent of the graph-transform
/// solver: iterate a seed cloud, drop the transient, bin surviving points by
/// x mod 1 into phi.size()/8 bins and return the binned-mean graph.
/// Throws if any bin ends up empty (ask for more points).
PeriodicFn attractor_oracle(const TwistParams& p, const OracleOptions& opts = {});

}  // namespace twistlab
