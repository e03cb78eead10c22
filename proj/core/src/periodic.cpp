#include "twistlab/periodic.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace twistlab {

PeriodicFn::PeriodicFn(std::vector<double> samples) : values_(std::move(samples)) {
    if (static_cast<int>(values_.size()) < kMinGrid) {
        throw std::invalid_argument("PeriodicFn: grid size must be >= 16, got " +
                                    std::to_string(values_.size()));
    }
    for (double v : values_) {
        if (!std::isfinite(v)) throw std::invalid_argument("PeriodicFn: non-finite sample");
    }
}

PeriodicFn PeriodicFn::from_function(const std::function<double(double)>& fn, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = fn(static_cast<double>(i) / n);
    return PeriodicFn(std::move(v));
}

PeriodicFn PeriodicFn::constant(double c, int n) {
    return PeriodicFn(std::vector<double>(static_cast<std::size_t>(n), c));
}

double PeriodicFn::sample(int i) const {
    const int n = size();
    int j = i % n;
    if (j < 0) j += n;
    return values_[static_cast<std::size_t>(j)];
}

double PeriodicFn::operator()(double x) const {
    const int n = size();
    double u = x - std::floor(x);
    if (u >= 1.0) u = 0.0;  // rounding of x - floor(x) for x just below an integer
    double s = u * n;
    int i = static_cast<int>(s);
    if (i >= n) i = n - 1;
    const double t = s - i;
    const double a = values_[static_cast<std::size_t>(i)];
    const double b = values_[static_cast<std::size_t>((i + 1) % n)];
    return a + t * (b - a);
}

double neumaier_sum(const std::vector<double>& xs) {
    double sum = 0.0, comp = 0.0;
    for (double x : xs) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    return sum + comp;
}

double mean(const PeriodicFn& f) { return neumaier_sum(f.samples()) / f.size(); }

double c0_norm(const PeriodicFn& f) {
    double m = 0.0;
    for (double v : f.samples()) m = std::max(m, std::abs(v));
    return m;
}

double lip_seminorm(const PeriodicFn& f) {
    const auto& v = f.samples();
    const int n = f.size();
    double m = 0.0;
    for (int i = 0; i < n; ++i) {
        const double d = std::abs(v[static_cast<std::size_t>((i + 1) % n)] - v[static_cast<std::size_t>(i)]);
        m = std::max(m, d);
    }
    return m * n;
}

double holder_norm(const PeriodicFn& f, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) {
        throw std::domain_error("holder_norm: eps must lie in (0,1), got " + std::to_string(eps));
    }
    const auto& v = f.samples();
    const int n = f.size();
    const double expo = 1.0 - eps;

    double semi = 0.0;
    auto stride_quot = [&](int s) {
        const double d = static_cast<double>(s) / n;
        double m = 0.0;
        for (int i = 0; i < n; ++i) {
            const double diff = std::abs(v[static_cast<std::size_t>((i + s) % n)] - v[static_cast<std::size_t>(i)]);
            m = std::max(m, diff);
        }
        return m / std::pow(d, expo);
    };

    if (n <= 1024) {
        for (int s = 1; s <= n / 2; ++s) semi = std::max(semi, stride_quot(s));
    } else {
        for (int s = 1; s <= n / 2; s *= 2) semi = std::max(semi, stride_quot(s));
    }
    return c0_norm(f) + semi;
}

PeriodicFn derivative(const PeriodicFn& f) {
    const auto& v = f.samples();
    const int n = f.size();
    std::vector<double> d(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double fwd = v[static_cast<std::size_t>((i + 1) % n)];
        const double bwd = v[static_cast<std::size_t>((i + n - 1) % n)];
        d[static_cast<std::size_t>(i)] = 0.5 * (fwd - bwd) * n;
    }
    return PeriodicFn(std::move(d));
}

PeriodicFn resample(const PeriodicFn& f, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = f(static_cast<double>(i) / n);
    return PeriodicFn(std::move(v));
}

void write_csv(std::ostream& os, const PeriodicFn& f) {
    os << "x,value\n";
    char buf[64];
    const int n = f.size();
    for (int i = 0; i < n; ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", static_cast<double>(i) / n, f.sample(i));
        os << buf;
    }
}

}  // namespace twistlab
