#pragma once

#include <optional>

#include "twistlab/periodic.hpp"

namespace twistlab {

/// Lift of an orientation-preserving degree-one circle map, stored as the
/// periodic displacement g - Id. Reconstruction: g(x) = x + disp(x).
///
/// Construction checks strict monotonicity at adjacent nodes, which for the
/// piecewise-linear representative is equivalent to monotonicity everywhere.
/// Immutable after construction.
class CircleLift {
public:
    explicit CircleLift(PeriodicFn displacement);

    static CircleLift from_function(const std::function<double(double)>& g, int n);
    static CircleLift rigid(double omega, int n);

    const PeriodicFn& displacement() const { return disp_; }
    int size() const { return disp_.size(); }

    double operator()(double x) const { return x + disp_(x); }

    /// Inverse lift h with |g(h(x_i)) - x_i| <= tol at every node. Bisection
    /// on the monotone lift bracketed by the displacement range, then two
    /// secant polish steps.
    CircleLift inverse(double tol = 1e-13) const;

    /// k-fold composition by repeated evaluation; orbits stay on the lift
    /// (no mod-1 reduction mid-orbit). Requires k >= 0.
    double iterate(double x0, long k) const;

private:
    PeriodicFn disp_;
    double disp_min_ = 0.0, disp_max_ = 0.0;
};

struct RotationEstimate {
    double rho = 0.0;
    bool converged = false;  // Birkhoff quotients at n and n/2 agree within tol
};

/// Birkhoff quotient (g^n(x0) - x0)/n with a dyadic self-consistency check.
/// Requires n_iter >= 1000. Non-convergence is reported via the flag.
RotationEstimate rotation_number(const CircleLift& g, double x0, long n_iter, double tol);

struct ModeLock {
    long p = 0;
    long q = 1;
    double residual = 0.0;   // |g^q(x*) - x* - p| at the refined periodic point
    double x_periodic = 0.0; // the refined point
};

/// Detects a genuine periodic orbit: candidates p/q come from the
/// continued-fraction convergents of the measured rotation number; a
/// candidate is accepted only if the refined orbit residual
/// min_x |g^q(x) - x - p| drops below tol. Returns the lowest-denominator
/// accepted fraction, or nothing.
std::optional<ModeLock> mode_lock_detect(const CircleLift& g, long q_max, double tol);

}  // namespace twistlab
