#include "twistlab/circle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace twistlab {

CircleLift::CircleLift(PeriodicFn displacement) : disp_(std::move(displacement)) {
    const auto& d = disp_.samples();
    const int n = disp_.size();
    for (int i = 0; i < n; ++i) {
        const double step = d[static_cast<std::size_t>((i + 1) % n)] - d[static_cast<std::size_t>(i)];
        if (!(step > -1.0 / n)) {
            throw std::invalid_argument(
                "CircleLift: monotonicity violated between nodes " + std::to_string(i) + " and " +
                std::to_string((i + 1) % n) + " (displacement step " + std::to_string(step) + ")");
        }
    }
    disp_min_ = *std::min_element(d.begin(), d.end());
    disp_max_ = *std::max_element(d.begin(), d.end());
}

CircleLift CircleLift::from_function(const std::function<double(double)>& g, int n) {
    return CircleLift(PeriodicFn::from_function([&](double x) { return g(x) - x; }, n));
}

CircleLift CircleLift::rigid(double omega, int n) {
    return CircleLift(PeriodicFn::constant(omega, n));
}

CircleLift CircleLift::inverse(double tol) const {
    const int n = size();
    std::vector<double> inv_disp(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double z = static_cast<double>(i) / n;
        double lo = z - disp_max_, hi = z - disp_min_;
        double flo = (*this)(lo)-z, fhi = (*this)(hi)-z;
        // Bisection on the monotone lift.
        double w = 0.5 * (lo + hi);
        for (int it = 0; it < 200; ++it) {
            w = 0.5 * (lo + hi);
            const double fw = (*this)(w)-z;
            if (std::abs(fw) <= 0.25 * tol || hi - lo < 1e-17) break;
            if (fw > 0.0) {
                hi = w;
                fhi = fw;
            } else {
                lo = w;
                flo = fw;
            }
        }
        // Two secant polish steps.
        double a = lo, b = hi, fa = flo, fb = fhi;
        for (int it = 0; it < 2; ++it) {
            if (fb == fa) break;
            const double c = b - fb * (b - a) / (fb - fa);
            const double fc = (*this)(c)-z;
            a = b;
            fa = fb;
            b = c;
            fb = fc;
        }
        w = std::abs(fb) <= std::abs((*this)(w)-z) ? b : w;
        inv_disp[static_cast<std::size_t>(i)] = w - z;
    }
    return CircleLift(PeriodicFn(std::move(inv_disp)));
}

double CircleLift::iterate(double x0, long k) const {
    if (k < 0) throw std::invalid_argument("CircleLift::iterate: k must be >= 0");
    double x = x0;
    for (long i = 0; i < k; ++i) x = (*this)(x);
    return x;
}

RotationEstimate rotation_number(const CircleLift& g, double x0, long n_iter, double tol) {
    if (n_iter < 1000) throw std::invalid_argument("rotation_number: n_iter must be >= 1000");
    const long half = n_iter / 2;
    double x = x0, x_half = x0;
    for (long i = 0; i < n_iter; ++i) {
        if (i == half) x_half = x;
        x = g(x);
    }
    const double rho_full = (x - x0) / static_cast<double>(n_iter);
    const double rho_half = (x_half - x0) / static_cast<double>(half);
    return {rho_full, std::abs(rho_full - rho_half) < tol};
}

namespace {

// Continued-fraction convergents of rho with denominators up to q_max.
std::vector<std::pair<long, long>> convergents(double rho, long q_max) {
    std::vector<std::pair<long, long>> out;
    long p_prev = 1, q_prev = 0;  // p_{-1}/q_{-1}
    long p = static_cast<long>(std::floor(rho)), q = 1;
    out.emplace_back(p, q);
    double frac = rho - std::floor(rho);
    for (int level = 0; level < 64; ++level) {
        if (frac < 1e-14) break;
        const double inv = 1.0 / frac;
        const long a = static_cast<long>(std::floor(inv));
        frac = inv - std::floor(inv);
        const long p_next = a * p + p_prev;
        const long q_next = a * q + q_prev;
        if (q_next > q_max || q_next <= 0) break;
        p_prev = p;
        q_prev = q;
        p = p_next;
        q = q_next;
        out.emplace_back(p, q);
    }
    return out;
}

double orbit_residual(const CircleLift& g, double x, long q, long p) {
    return g.iterate(x, q) - x - static_cast<double>(p);
}

}  // namespace

std::optional<ModeLock> mode_lock_detect(const CircleLift& g, long q_max, double tol) {
    if (q_max < 1) throw std::invalid_argument("mode_lock_detect: q_max must be >= 1");
    const RotationEstimate est = rotation_number(g, 0.0, 100000, 1e-7);

    auto cands = convergents(est.rho, q_max);
    std::sort(cands.begin(), cands.end(),
              [](const auto& a, const auto& b) { return a.second < b.second; });

    const int scan = std::max(1024, g.size());
    for (const auto& [p, q] : cands) {
        // Coarse scan for the node minimizing |g^q(x) - x - p|.
        double best = 1e300;
        double best_x = 0.0;
        for (int i = 0; i < scan; ++i) {
            const double x = static_cast<double>(i) / scan;
            const double r = std::abs(orbit_residual(g, x, q, p));
            if (r < best) {
                best = r;
                best_x = x;
            }
        }
        // Refine: bisection on a sign change if present, else golden-section
        // minimization of |residual| around the coarse minimizer.
        double lo = best_x - 1.0 / scan, hi = best_x + 1.0 / scan;
        double flo = orbit_residual(g, lo, q, p), fhi = orbit_residual(g, hi, q, p);
        double x_star = best_x, r_star = best;
        if (flo == 0.0) {
            x_star = lo;
            r_star = 0.0;
        } else if (fhi == 0.0) {
            x_star = hi;
            r_star = 0.0;
        } else if ((flo < 0.0) != (fhi < 0.0)) {
            for (int it = 0; it < 100; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fm = orbit_residual(g, mid, q, p);
                if ((fm < 0.0) == (flo < 0.0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                    fhi = fm;
                }
            }
            x_star = 0.5 * (lo + hi);
            r_star = std::abs(orbit_residual(g, x_star, q, p));
        } else {
            const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
            double a = lo, b = hi;
            double c = b - gr * (b - a), d = a + gr * (b - a);
            double fc = std::abs(orbit_residual(g, c, q, p));
            double fd = std::abs(orbit_residual(g, d, q, p));
            for (int it = 0; it < 120; ++it) {
                if (fc < fd) {
                    b = d;
                    d = c;
                    fd = fc;
                    c = b - gr * (b - a);
                    fc = std::abs(orbit_residual(g, c, q, p));
                } else {
                    a = c;
                    c = d;
                    fc = fd;
                    d = a + gr * (b - a);
                    fd = std::abs(orbit_residual(g, d, q, p));
                }
            }
            x_star = fc < fd ? c : d;
            r_star = std::min(fc, fd);
        }
        if (r_star < tol) {
            long pp = p, qq = q;
            // Convergents are already reduced; keep the defensive gcd cheap.
            long a = std::abs(pp), b = qq;
            while (b != 0) {
                const long t = a % b;
                a = b;
                b = t;
            }
            if (a > 1) {
                pp /= a;
                qq /= a;
            }
            return ModeLock{pp, qq, r_star, x_star - std::floor(x_star)};
        }
    }
    return std::nullopt;
}

}  // namespace twistlab
