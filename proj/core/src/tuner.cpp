#include "twistlab/tuner.hpp"

#include <cmath>
#include <stdexcept>

namespace twistlab {

namespace {

double rho_at(const TwistParams& base, double a1, double a2, const RhoOptions& opts,
              std::optional<PeriodicFn>* warm, int* solves) {
    TwistParams p(base.lambda, a1, a2, base.phi);
    SolveOptions so = opts.solve;
    if (warm && *warm) so.initial = *warm;
    InvariantGraph g = solve(p, so);
    if (warm) *warm = g.psi;
    if (solves) ++*solves;
    return rotation_number(*g.g, opts.x0, opts.n_iter, opts.tol).rho;
}

struct Bracket {
    double lo, hi;
};

// [omega - delta, omega + delta] mapped through the phi == 0 closed form,
// doubled on failure up to 8 times.
template <typename RhoFn>
Bracket expand_bracket(double center, double delta, double omega, RhoFn&& rho) {
    double lo = center - delta, hi = center + delta;
    for (int attempt = 0; attempt < 8; ++attempt) {
        if (rho(lo) <= omega && omega <= rho(hi)) return {lo, hi};
        const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        lo = mid - 2.0 * half;
        hi = mid + 2.0 * half;
    }
    throw std::runtime_error("tune: could not bracket the target rotation number");
}

template <typename RhoFn>
TuneResult bisect(double lo, double hi, double omega, double tol, RhoFn&& rho, int* solves) {
    TuneResult res{0.5 * (lo + hi), 0.0, 0, 0};
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double r = rho(mid);
        ++res.bisections;
        res.value = mid;
        res.achieved_rho = r;
        if (std::abs(r - omega) <= tol) break;
        if (hi - lo < 1e-14) break;  // plateau boundary at parameter resolution
        if (r < omega)
            lo = mid;
        else
            hi = mid;
    }
    res.solves = *solves;
    return res;
}

}  // namespace

double rho_of(const TwistParams& p, const RhoOptions& opts) {
    InvariantGraph g = solve(p, opts.solve);
    return rotation_number(*g.g, opts.x0, opts.n_iter, opts.tol).rho;
}

TuneResult tune_alpha1(const TwistParams& p, double omega, double tol, const RhoOptions& opts) {
    const ThresholdSet th = ThresholdSet::for_lambda(p.lambda);
    const double delta = c0_norm(p.phi) + p.lambda * th.k2 + 0.1;
    const double center = omega - p.lambda * p.alpha2 / (1.0 - p.lambda);
    std::optional<PeriodicFn> warm;
    int solves = 0;
    auto rho = [&](double a1) { return rho_at(p, a1, p.alpha2, opts, &warm, &solves); };
    const Bracket b = expand_bracket(center, delta, omega, rho);
    return bisect(b.lo, b.hi, omega, tol, rho, &solves);
}

TuneResult tune_alpha2(const TwistParams& p, double omega, double tol, const RhoOptions& opts) {
    const ThresholdSet th = ThresholdSet::for_lambda(p.lambda);
    const double slope = p.lambda / (1.0 - p.lambda);  // d rho / d alpha2 at phi == 0
    const double delta = (c0_norm(p.phi) + p.lambda * th.k2 + 0.1) / slope;
    const double center = (omega - p.alpha1) / slope;
    std::optional<PeriodicFn> warm;
    int solves = 0;
    auto rho = [&](double a2) { return rho_at(p, p.alpha1, a2, opts, &warm, &solves); };
    const Bracket b = expand_bracket(center, delta, omega, rho);
    return bisect(b.lo, b.hi, omega, tol, rho, &solves);
}

LipDependenceResult lipschitz_dependence_check(const TwistParams& p,
                                               const std::vector<double>& alpha2s,
                                               const SolveOptions& opts) {
    if (alpha2s.size() < 2) {
        throw std::invalid_argument("lipschitz_dependence_check: need at least two alpha2 values");
    }
    std::vector<PeriodicFn> graphs;
    graphs.reserve(alpha2s.size());
    for (double a2 : alpha2s) {
        graphs.push_back(solve(TwistParams(p.lambda, p.alpha1, a2, p.phi), opts).psi);
    }
    LipDependenceResult res{0.0, 1.0 / (1.0 - p.lambda), {}};
    for (std::size_t i = 0; i < alpha2s.size(); ++i) {
        for (std::size_t j = i + 1; j < alpha2s.size(); ++j) {
            const double da = std::abs(alpha2s[i] - alpha2s[j]);
            if (da == 0.0) continue;
            double sup = 0.0;
            for (int k = 0; k < graphs[i].size(); ++k) {
                sup = std::max(sup, std::abs(graphs[i].sample(k) - graphs[j].sample(k)));
            }
            res.pair_ratios.push_back(sup / da);
            res.max_ratio = std::max(res.max_ratio, sup / da);
        }
    }
    return res;
}

double alpha1_graph_spread(const TwistParams& p, const std::vector<double>& alpha1s,
                           const SolveOptions& opts) {
    if (alpha1s.size() < 2) {
        throw std::invalid_argument("alpha1_graph_spread: need at least two alpha1 values");
    }
    std::vector<PeriodicFn> graphs;
    graphs.reserve(alpha1s.size());
    for (double a1 : alpha1s) {
        graphs.push_back(solve(TwistParams(p.lambda, a1, p.alpha2, p.phi), opts).psi);
    }
    double spread = 0.0;
    for (std::size_t i = 0; i + 1 < graphs.size(); ++i) {
        for (std::size_t j = i + 1; j < graphs.size(); ++j) {
            for (int k = 0; k < graphs[i].size(); ++k) {
                spread = std::max(spread, std::abs(graphs[i].sample(k) - graphs[j].sample(k)));
            }
        }
    }
    return spread;
}

RotationIdentityResult rotation_identity_check(const TwistParams& p, long n_iter,
                                               const RhoOptions& opts) {
    InvariantGraph g = solve(p, opts.solve);

    RotationIdentityResult res{};
    res.seed = 0.3737;  // generic seed for the averages; rho uses opts.x0
    res.rho = rotation_number(*g.g, opts.x0, opts.n_iter, opts.tol).rho;

    double x = res.seed;
    double sum_psi = 0.0, sum_phi = 0.0;
    double c_psi = 0.0, c_phi = 0.0;  // Kahan compensation
    for (long i = 0; i < n_iter; ++i) {
        const double vp = g.psi(x);
        const double vf = p.phi(x);
        double y = vp - c_psi, t = sum_psi + y;
        c_psi = (t - sum_psi) - y;
        sum_psi = t;
        y = vf - c_phi;
        t = sum_phi + y;
        c_phi = (t - sum_phi) - y;
        sum_phi = t;
        x = (*g.g)(x);
    }
    res.avg_psi = sum_psi / static_cast<double>(n_iter);
    res.avg_phi = sum_phi / static_cast<double>(n_iter);
    res.defect = std::abs(res.rho - (p.alpha1 + p.lambda * res.avg_psi + res.avg_phi));
    return res;
}

}  // namespace twistlab
