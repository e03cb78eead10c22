#include "twistlab/twist.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "twistlab/parallel.hpp"

namespace twistlab {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

TwistParams::TwistParams(double lambda_, double alpha1_, double alpha2_, PeriodicFn phi_)
    : lambda(lambda_), alpha1(alpha1_), alpha2(alpha2_), phi(std::move(phi_)) {
    if (!(lambda > 0.0 && lambda < 1.0)) {
        throw std::invalid_argument("TwistParams: lambda must lie in (0,1), got " +
                                    std::to_string(lambda));
    }
    const double m = mean(phi);
    if (std::abs(m) > 1e-10) {
        throw std::invalid_argument("TwistParams: phi must have zero mean (|mean| = " +
                                    std::to_string(std::abs(m)) +
                                    "); subtract mean(phi) before constructing");
    }
}

PeriodicFn standard_map_phi(double kappa, int n) {
    return PeriodicFn::from_function(
        [kappa](double x) { return kappa / kTwoPi * std::sin(kTwoPi * x); }, n);
}

std::pair<double, double> apply(const TwistParams& p, double x, double y) {
    const double kick = p.phi(x);
    const double ly = p.lambda * y;
    return {x + p.alpha1 + ly + kick, p.alpha2 + ly + kick};
}

Mat2 jacobian(const TwistParams& p, double x) {
    const double h = 1.0 / p.phi.size();
    const double dphi = (p.phi(x + h) - p.phi(x - h)) / (2.0 * h);
    return {1.0 + dphi, p.lambda, dphi, p.lambda};
}

PeriodicFn attractor_oracle(const TwistParams& p, const OracleOptions& opts) {
    const int bins = p.phi.size() / 8;
    if (bins < PeriodicFn::kMinGrid) throw std::invalid_argument("attractor_oracle: grid too small");

    long n_iter = opts.n_iter;
    if (n_iter <= 0) {
        // Graphs contract in C0 at rate sqrt(lambda) per step; run until the
        // discarded transient leaves a tail error around 1e-4.
        const double rate = std::sqrt(p.lambda);
        n_iter = static_cast<long>(std::ceil(std::log(2.5e-4) / std::log(rate) /
                                             opts.transient_fraction)) + 2;
        n_iter = std::max<long>(n_iter, 20);
    }
    const long t0 = static_cast<long>(std::floor(opts.transient_fraction * n_iter));

    const int n_y = std::max(1, opts.n_y);
    const long n_x = std::max<long>(1, opts.n_points / n_y);

    // Fixed chunk count so the reduction order is independent of pool width.
    const int chunks = 64;
    std::vector<std::vector<double>> sums(chunks, std::vector<double>(bins, 0.0));
    std::vector<std::vector<long>> counts(chunks, std::vector<long>(bins, 0));

    parallel_for(chunks, [&](long c) {
        auto& sum = sums[static_cast<std::size_t>(c)];
        auto& cnt = counts[static_cast<std::size_t>(c)];
        const long col_lo = n_x * c / chunks, col_hi = n_x * (c + 1) / chunks;
        for (long cx = col_lo; cx < col_hi; ++cx) {
            const double x0 = static_cast<double>(cx) / n_x;
            for (int cy = 0; cy < n_y; ++cy) {
                const double y0 =
                    opts.y_lo + (opts.y_hi - opts.y_lo) * (cy + 0.5) / n_y;
                double x = x0, y = y0;
                for (long t = 0; t < n_iter; ++t) {
                    const auto [xn, yn] = apply(p, x, y);
                    x = xn - std::floor(xn);
                    y = yn;
                    if (t + 1 >= t0) {
                        int b = static_cast<int>(x * bins);
                        if (b >= bins) b = bins - 1;
                        sum[static_cast<std::size_t>(b)] += y;
                        cnt[static_cast<std::size_t>(b)] += 1;
                    }
                }
            }
        }
    });

    std::vector<double> graph(static_cast<std::size_t>(bins), 0.0);
    for (int b = 0; b < bins; ++b) {
        double s = 0.0;
        long k = 0;
        for (int c = 0; c < chunks; ++c) {
            s += sums[static_cast<std::size_t>(c)][static_cast<std::size_t>(b)];
            k += counts[static_cast<std::size_t>(c)][static_cast<std::size_t>(b)];
        }
        if (k == 0) {
            throw std::runtime_error("attractor_oracle: bin " + std::to_string(b) +
                                     " received no points; increase n_points");
        }
        graph[static_cast<std::size_t>(b)] = s / static_cast<double>(k);
    }
    return PeriodicFn(std::move(graph));
}

}  // namespace twistlab
