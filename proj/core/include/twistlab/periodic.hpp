#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <vector>

namespace twistlab {

/// A 1-periodic real function sampled on the uniform grid x_i = i/n,
/// evaluated by piecewise-linear interpolation of the periodic extension.
///
/// Piecewise-linear is deliberate: the functions this library manipulates are
/// in general only Lipschitz, and a higher-order interpolant would invent
/// smoothness that is not there.
///
/// Immutable after construction; all operations on it are pure.
class PeriodicFn {
public:
    static constexpr int kMinGrid = 16;

    explicit PeriodicFn(std::vector<double> samples);

    /// Sample `fn` (a function on [0,1)) at n uniform nodes.
    static PeriodicFn from_function(const std::function<double(double)>& fn, int n);
    static PeriodicFn constant(double c, int n);
    static PeriodicFn zero(int n) { return constant(0.0, n); }

    int size() const { return static_cast<int>(values_.size()); }
    const std::vector<double>& samples() const { return values_; }
    double sample(int i) const;  // index taken mod n

    /// Piecewise-linear evaluation of the periodic extension; exact at nodes.
    double operator()(double x) const;

private:
    std::vector<double> values_;
};

/// Mean over one period (rectangle rule, exact for the trapezoid mean of a
/// periodic piecewise-linear function). Compensated summation.
double mean(const PeriodicFn& f);

/// max_i |f(x_i)|; for the piecewise-linear representative this is the sup norm.
double c0_norm(const PeriodicFn& f);

/// sup_{x != y} |f(x)-f(y)| / |x-y| of the piecewise-linear representative,
/// i.e. the largest adjacent-node difference quotient.
double lip_seminorm(const PeriodicFn& f);

/// C^{1-eps} norm: ||f||_C0 plus the Hoelder seminorm
///   sup |f(x)-f(y)| / d(x,y)^{1-eps}
/// over grid pairs at periodic distance d <= 1/2. All pairs are used for
/// n <= 1024; beyond that only dyadic strides {1,2,4,...}/n, which is within
/// a bounded factor of the full sup for the functions in scope here.
/// Requires 0 < eps < 1.
double holder_norm(const PeriodicFn& f, double eps);

/// Central-difference derivative at the nodes. For smooth samples the node
/// error is O(1/n^2); for merely Lipschitz data it is the nearest symmetric
/// difference quotient, nothing more.
PeriodicFn derivative(const PeriodicFn& f);

/// Resample onto a different grid size by evaluating the interpolant.
PeriodicFn resample(const PeriodicFn& f, int n);

/// Two columns `x,value`, one row per node, header included, LF endings.
void write_csv(std::ostream& os, const PeriodicFn& f);

/// Compensated (Neumaier) sum of a vector.
double neumaier_sum(const std::vector<double>& xs);

}  // namespace twistlab
