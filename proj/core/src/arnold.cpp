#include "twistlab/arnold.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "twistlab/parallel.hpp"

namespace twistlab::arnold {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

Family::Family(int n_, double alpha1_, double lambda_) : n(n_), alpha1(alpha1_), lambda(lambda_) {
    if (kTwoPi / n > 0.9) {
        throw std::invalid_argument("arnold::Family: n = " + std::to_string(n) +
                                    " too small, need 2*pi/n <= 0.9 for a safely monotone map");
    }
    if (!(lambda > 0.0 && lambda < 1.0)) {
        throw std::invalid_argument("arnold::Family: lambda must lie in (0,1)");
    }
}

double Family::g(double x) const { return x + alpha1 + std::sin(kTwoPi * x) / n; }

double Family::g_deriv(double x) const { return 1.0 + kTwoPi / n * std::cos(kTwoPi * x); }

double Family::g_inv(double x) const {
    double w = x - alpha1;
    for (int it = 0; it < 60; ++it) {
        const double f = g(w) - x;
        const double step = f / g_deriv(w);
        w -= step;
        if (std::abs(step) < 1e-16) break;
    }
    return w;
}

double Family::graph(double x) const { return std::sin(kTwoPi * g_inv(x)) / n; }

double Family::perturbation(double x) const {
    return std::sin(kTwoPi * x) / n - lambda / n * std::sin(kTwoPi * g_inv(x));
}

double Family::functional_residual(int samples) const {
    const double w = 1.0 / (1.0 + lambda);
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double x = static_cast<double>(i) / samples;
        const double lhs = w * g(x) + lambda * w * g_inv(x);
        const double rhs = x + w * ((1.0 - lambda) * alpha1 + perturbation(x));
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

Build build(const Family& fam, int grid_n) {
    return Build{
        CircleLift::from_function([&](double x) { return fam.g(x); }, grid_n),
        PeriodicFn::from_function([&](double x) { return fam.graph(x); }, grid_n),
        PeriodicFn::from_function([&](double x) { return fam.perturbation(x); }, grid_n),
    };
}

DecayTable norm_decay(double lambda, const std::vector<int>& n_list, int grid_n, double holder_eps) {
    DecayTable table{};
    for (int n : n_list) {
        const Family fam(n, 0.0, lambda);
        const PeriodicFn psi =
            PeriodicFn::from_function([&](double x) { return fam.perturbation(x); }, grid_n);
        DecayRow row{};
        row.n = n;
        row.c0 = c0_norm(psi);
        row.c1 = row.c0 + c0_norm(derivative(psi));
        row.holder = holder_norm(psi, holder_eps);
        table.rows.push_back(row);
    }
    auto fit = [&](auto value) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double m = static_cast<double>(table.rows.size());
        for (const auto& r : table.rows) {
            const double x = std::log(static_cast<double>(r.n));
            const double y = std::log(value(r));
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        return (m * sxy - sx * sy) / (m * sxx - sx * sx);
    };
    if (table.rows.size() >= 2) {
        table.c0_exponent = fit([](const DecayRow& r) { return r.c0; });
        table.c1_exponent = fit([](const DecayRow& r) { return r.c1; });
    }
    return table;
}

std::vector<Plateau> plateau_scan(int n, double lo, double hi, int steps, const ScanOptions& opts) {
    if (steps < 2) throw std::invalid_argument("plateau_scan: need at least 2 steps");

    struct Point {
        bool locked = false;
        long p = 0, q = 1;
    };
    std::vector<Point> points(static_cast<std::size_t>(steps));
    std::vector<double> a1s(static_cast<std::size_t>(steps));
    for (int i = 0; i < steps; ++i) {
        a1s[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (steps - 1);
    }

    parallel_for(steps, [&](long i) {
        const Family fam(n, a1s[static_cast<std::size_t>(i)], 0.5);  // lambda irrelevant to g
        const CircleLift lift =
            CircleLift::from_function([&](double x) { return fam.g(x); }, opts.grid_n);
        if (auto ml = mode_lock_detect(lift, opts.q_max, opts.tol)) {
            points[static_cast<std::size_t>(i)] = {true, ml->p, ml->q};
        }
    });

    std::vector<Plateau> out;
    int i = 0;
    while (i < steps) {
        if (!points[static_cast<std::size_t>(i)].locked) {
            ++i;
            continue;
        }
        int j = i;
        while (j + 1 < steps && points[static_cast<std::size_t>(j + 1)].locked &&
               points[static_cast<std::size_t>(j + 1)].p == points[static_cast<std::size_t>(i)].p &&
               points[static_cast<std::size_t>(j + 1)].q == points[static_cast<std::size_t>(i)].q) {
            ++j;
        }
        out.push_back({a1s[static_cast<std::size_t>(i)], a1s[static_cast<std::size_t>(j)],
                       points[static_cast<std::size_t>(i)].p, points[static_cast<std::size_t>(i)].q});
        i = j + 1;
    }
    return out;
}

}  // namespace twistlab::arnold
