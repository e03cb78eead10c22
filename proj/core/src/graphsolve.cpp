#include "twistlab/graphsolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "twistlab/parallel.hpp"

namespace twistlab {

ThresholdSet ThresholdSet::for_lambda(double lambda) {
    if (!(lambda > 0.0 && lambda < 1.0)) {
        throw std::invalid_argument("ThresholdSet: lambda must lie in (0,1)");
    }
    const double rt = std::sqrt(lambda);
    ThresholdSet t{};
    t.lambda = lambda;
    t.k1 = 2.0 / rt - 1.0;
    t.k2 = 1.0 / rt - 1.0;
    t.k3 = 1.0 / lambda - 1.0;
    t.contraction = lambda * (1.0 + t.k2);
    t.lip_threshold = (1.0 - rt) * (1.0 - rt);
    t.bohr = 2.0 * (1.0 + lambda) / (2.0 + lambda);
    t.beta = 1.0 / rt;
    return t;
}

ThresholdError::ThresholdError(double lip, double thr)
    : std::runtime_error("||phi||_Lip = " + std::to_string(lip) +
                         " exceeds the existence threshold (1-sqrt(lambda))^2 = " +
                         std::to_string(thr) + "; pass force to iterate anyway"),
      lip_phi(lip),
      threshold(thr) {}

NonConvergenceError::NonConvergenceError(std::vector<double> inc)
    : std::runtime_error("graph transform iteration did not converge after " +
                         std::to_string(inc.size()) + " steps"),
      increments(std::move(inc)) {}

namespace {

// Pushes the graph of psi forward once for the centered-form map
//   X(x) = x + a1 + lambda*psi(x) + phi(x),  Y(x) = a2 + lambda*psi(x) + phi(x),
// sampling the image graph at the nodes of phi's grid. Per-node monotone
// bisection bracketed by the displacement range, then two secant steps.
PeriodicFn push_graph(const PeriodicFn& phi, double lambda, double a1, double a2,
                      const PeriodicFn& psi) {
    const int n = phi.size();
    auto shift = [&](double x) { return a1 + lambda * psi(x) + phi(x); };

    double cmin = 1e300, cmax = -1e300;
    for (int i = 0; i < n; ++i) {
        const double c = a1 + lambda * psi.sample(i * psi.size() / n) + phi.sample(i);
        cmin = std::min(cmin, c);
        cmax = std::max(cmax, c);
    }
    // Interpolation can overshoot node values only between kinks; widen a bit.
    const double pad = 1e-6 + 1e-3 * (cmax - cmin);
    cmin -= pad;
    cmax += pad;

    std::vector<double> out(static_cast<std::size_t>(n));
    parallel_for(n, [&](long i) {
        const double z = static_cast<double>(i) / n;
        double lo = z - cmax, hi = z - cmin;
        double w = 0.5 * (lo + hi);
        for (int it = 0; it < 64; ++it) {
            w = 0.5 * (lo + hi);
            const double f = w + shift(w) - z;
            if (std::abs(f) < 1e-13 || hi - lo < 1e-15) break;
            if (f > 0.0)
                hi = w;
            else
                lo = w;
        }
        double a = lo, b = hi;
        double fa = a + shift(a) - z, fb = b + shift(b) - z;
        for (int it = 0; it < 2; ++it) {
            if (fb == fa) break;
            const double c = b - fb * (b - a) / (fb - fa);
            const double fc = c + shift(c) - z;
            a = b;
            fa = fb;
            b = c;
            fb = fc;
        }
        const double x = std::abs(fb) < std::abs(w + shift(w) - z) ? b : w;
        out[static_cast<std::size_t>(i)] = a2 + lambda * psi(x) + phi(x);
    });
    return PeriodicFn(std::move(out));
}

double sup_diff(const PeriodicFn& a, const PeriodicFn& b) {
    double m = 0.0;
    for (int i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.sample(i) - b.sample(i)));
    return m;
}

bool all_finite(const PeriodicFn& f) {
    for (double v : f.samples())
        if (!std::isfinite(v)) return false;
    return true;
}

// Newton-type iterations on the node-collocation system
//   r_i = P(z_i) - lambda*psi_i - phi_i,   z_i = x_i + a1 + lambda*psi_i + phi_i,
// where P is the piecewise-linear interpolant of the unknowns. Plain pull-back
// iteration cannot make these node defects small: its fixed point satisfies
// the equation at the preimages of the nodes instead.
//
// The linearized system is nearly rank-deficient: wherever the induced map
// compresses several image points into one grid cell, zeroing the defect
// exactly would demand a sawtooth at grid scale. Each step therefore runs
// CGNR only until semi-convergence, checkpointing candidate corrections and
// keeping the best actual sup-residual; the unreachable component is the
// honest interpolation floor of the grid.
class CollocationPolisher {
public:
    CollocationPolisher(const PeriodicFn& phi, double lambda, double a1)
        : phi_(phi), lambda_(lambda), a1_(a1), n_(phi.size()) {}

    PeriodicFn run(PeriodicFn psi, int max_newton, double target) {
        std::vector<double> s = psi.samples();
        double best = residual_inf(s);
        std::vector<double> best_s = s;
        // The ill-conditioned tail of the corrections is a sawtooth at grid
        // scale; cap the roughness so polishing never manufactures corners.
        const double rough_cap = std::max(1.25 * roughness(s), roughness(s) + 1e-3);
        for (int step = 0; step < max_newton && best > target; ++step) {
            refresh(s);
            bool improved = false;
            for (const auto& delta : candidate_steps()) {
                double scale = 1.0;
                for (int bt = 0; bt < 6; ++bt) {
                    std::vector<double> trial = s;
                    for (int i = 0; i < n_; ++i)
                        trial[static_cast<std::size_t>(i)] +=
                            scale * delta[static_cast<std::size_t>(i)];
                    const double r = residual_inf(trial);
                    if (r < best * 0.999999 && roughness(trial) <= rough_cap) {
                        best = r;
                        best_s = trial;
                        improved = true;
                        break;
                    }
                    scale *= 0.5;
                }
                if (improved) break;
            }
            if (!improved) break;
            s = best_s;
        }
        return PeriodicFn(std::move(best_s));
    }

    // Largest mismatch of one-sided slopes averaged over spans of 1, 2 and 4
    // cells; the same statistic the discontinuity scan thresholds against.
    double roughness(const std::vector<double>& s) const {
        const int n = n_;
        auto at = [&](int i) { return s[static_cast<std::size_t>(((i % n) + n) % n)]; };
        double worst = 0.0;
        for (int i = 0; i < n; ++i) {
            double left = 0.0, right = 0.0;
            for (int sp : {1, 2, 4}) {
                left += (at(i) - at(i - sp)) * n / sp;
                right += (at(i + sp) - at(i)) * n / sp;
            }
            worst = std::max(worst, std::abs(left - right) / 3.0);
        }
        return worst;
    }

private:
    const PeriodicFn& phi_;
    double lambda_, a1_;
    int n_;
    // Linearization state at the current iterate.
    std::vector<double> psi_, res_, slope_, t_;
    std::vector<int> cell_;

    static double interp(const std::vector<double>& v, int n, double z) {
        double u = z - std::floor(z);
        if (u >= 1.0) u = 0.0;
        double spos = u * n;
        int i = static_cast<int>(spos);
        if (i >= n) i = n - 1;
        const double t = spos - i;
        return v[static_cast<std::size_t>(i)] * (1.0 - t) + v[static_cast<std::size_t>((i + 1) % n)] * t;
    }

    double residual_inf(const std::vector<double>& s) const {
        double m = 0.0;
        for (int i = 0; i < n_; ++i) {
            const double z = static_cast<double>(i) / n_ + a1_ +
                             lambda_ * s[static_cast<std::size_t>(i)] + phi_.sample(i);
            const double r = interp(s, n_, z) - lambda_ * s[static_cast<std::size_t>(i)] - phi_.sample(i);
            m = std::max(m, std::abs(r));
        }
        return m;
    }

    void refresh(const std::vector<double>& s) {
        psi_ = s;
        res_.assign(static_cast<std::size_t>(n_), 0.0);
        slope_.assign(static_cast<std::size_t>(n_), 0.0);
        t_.assign(static_cast<std::size_t>(n_), 0.0);
        cell_.assign(static_cast<std::size_t>(n_), 0);
        for (int i = 0; i < n_; ++i) {
            const double z = static_cast<double>(i) / n_ + a1_ +
                             lambda_ * s[static_cast<std::size_t>(i)] + phi_.sample(i);
            double u = z - std::floor(z);
            if (u >= 1.0) u = 0.0;
            double spos = u * n_;
            int c = static_cast<int>(spos);
            if (c >= n_) c = n_ - 1;
            const double t = spos - c;
            cell_[static_cast<std::size_t>(i)] = c;
            t_[static_cast<std::size_t>(i)] = t;
            const double va = s[static_cast<std::size_t>(c)];
            const double vb = s[static_cast<std::size_t>((c + 1) % n_)];
            slope_[static_cast<std::size_t>(i)] = (vb - va) * n_;
            res_[static_cast<std::size_t>(i)] =
                va * (1.0 - t) + vb * t - lambda_ * s[static_cast<std::size_t>(i)] - phi_.sample(i);
        }
    }

    std::vector<double> apply_j(const std::vector<double>& v) const {
        std::vector<double> out(static_cast<std::size_t>(n_));
        for (int i = 0; i < n_; ++i) {
            const int c = cell_[static_cast<std::size_t>(i)];
            const double t = t_[static_cast<std::size_t>(i)];
            const double pv = v[static_cast<std::size_t>(c)] * (1.0 - t) +
                              v[static_cast<std::size_t>((c + 1) % n_)] * t;
            out[static_cast<std::size_t>(i)] =
                pv + lambda_ * (slope_[static_cast<std::size_t>(i)] - 1.0) * v[static_cast<std::size_t>(i)];
        }
        return out;
    }

    std::vector<double> apply_jt(const std::vector<double>& w) const {
        std::vector<double> out(static_cast<std::size_t>(n_), 0.0);
        for (int i = 0; i < n_; ++i) {
            const int c = cell_[static_cast<std::size_t>(i)];
            const double t = t_[static_cast<std::size_t>(i)];
            out[static_cast<std::size_t>(c)] += (1.0 - t) * w[static_cast<std::size_t>(i)];
            out[static_cast<std::size_t>((c + 1) % n_)] += t * w[static_cast<std::size_t>(i)];
            out[static_cast<std::size_t>(i)] +=
                lambda_ * (slope_[static_cast<std::size_t>(i)] - 1.0) * w[static_cast<std::size_t>(i)];
        }
        return out;
    }

    // CGNR toward J*delta = -res, snapshotting the Krylov iterates: early
    // snapshots are the regularized corrections, late ones chase the
    // ill-conditioned tail. Ordered from most to least converged.
    std::vector<std::vector<double>> candidate_steps() const {
        const std::size_t n = static_cast<std::size_t>(n_);
        std::vector<double> x(n, 0.0);
        std::vector<double> s = res_;  // J x + res at x = 0
        std::vector<double> g = apply_jt(s);
        std::vector<double> p(n);
        for (std::size_t j = 0; j < n; ++j) p[j] = -g[j];
        double gamma = 0.0;
        for (double v : g) gamma += v * v;
        const double gamma0 = gamma;
        std::vector<std::vector<double>> snaps;
        for (int it = 1; it <= 320 && gamma > 1e-30 * std::max(1.0, gamma0); ++it) {
            const std::vector<double> q = apply_j(p);
            double qq = 0.0;
            for (double v : q) qq += v * v;
            if (qq == 0.0) break;
            const double alpha = gamma / qq;
            for (std::size_t j = 0; j < n; ++j) {
                x[j] += alpha * p[j];
                s[j] += alpha * q[j];
            }
            g = apply_jt(s);
            double gamma_new = 0.0;
            for (double v : g) gamma_new += v * v;
            const double beta = gamma_new / gamma;
            for (std::size_t j = 0; j < n; ++j) p[j] = -g[j] + beta * p[j];
            gamma = gamma_new;
            if (it == 8 || it == 20 || it == 48 || it == 120 || it == 320) snaps.push_back(x);
        }
        if (snaps.empty()) snaps.push_back(x);
        std::reverse(snaps.begin(), snaps.end());
        return snaps;
    }
};

}  // namespace

PeriodicFn graph_transform(const TwistParams& p, const PeriodicFn& psi) {
    const double budget = lip_seminorm(p.phi) + p.lambda * lip_seminorm(psi);
    if (!(budget < 1.0)) {
        throw std::invalid_argument(
            "graph_transform: ||phi||_Lip + lambda*lip(psi) = " + std::to_string(budget) +
            " >= 1; the base projection of the pushed graph is not invertible");
    }
    return push_graph(p.phi, p.lambda, p.alpha1, p.alpha2, psi);
}

InvariantGraph solve(const TwistParams& p, const SolveOptions& opts) {
    const ThresholdSet th = ThresholdSet::for_lambda(p.lambda);
    const double lip_phi = lip_seminorm(p.phi);
    if (lip_phi > th.lip_threshold && !opts.force) throw ThresholdError(lip_phi, th.lip_threshold);

    const int n = p.phi.size();
    const double center = p.alpha2 / (1.0 - p.lambda);
    const double a1_hat = p.alpha1 + p.lambda * center;

    PeriodicFn psi = opts.initial ? PeriodicFn::from_function(
                                        [&](double x) { return (*opts.initial)(x)-center; }, n)
                                  : PeriodicFn::zero(n);

    std::vector<double> increments;
    const double stop = opts.tol * (1.0 - std::sqrt(p.lambda));
    SolveStatus status = SolveStatus::max_iter;
    int iterations = 0;
    int growing = 0;

    for (int k = 0; k < opts.max_iter; ++k) {
        PeriodicFn next = push_graph(p.phi, p.lambda, a1_hat, 0.0, psi);
        if (!all_finite(next)) {
            status = SolveStatus::diverged;
            break;
        }
        const double inc = sup_diff(next, psi);
        increments.push_back(inc);
        psi = std::move(next);
        iterations = k + 1;
        if (inc < stop) {
            status = SolveStatus::converged;
            break;
        }
        if (opts.force) {
            if (lip_seminorm(psi) > th.k1) {
                status = SolveStatus::diverged;
                break;
            }
            const std::size_t m = increments.size();
            growing = (m >= 2 && increments[m - 1] > increments[m - 2]) ? growing + 1 : 0;
            if (growing >= 20) {
                status = SolveStatus::diverged;
                break;
            }
        }
    }

    if (status != SolveStatus::converged && !opts.force) throw NonConvergenceError(increments);

    if (status == SolveStatus::converged && opts.polish) {
        CollocationPolisher polisher(p.phi, p.lambda, a1_hat);
        psi = polisher.run(std::move(psi), 8, 1e-13);
    }

    std::vector<double> unc(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) unc[static_cast<std::size_t>(i)] = psi.sample(i) + center;
    PeriodicFn psi_unc(std::move(unc));

    std::optional<CircleLift> g;
    try {
        std::vector<double> gd(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            gd[static_cast<std::size_t>(i)] =
                p.alpha1 + p.lambda * psi_unc.sample(i) + p.phi.sample(i);
        }
        g.emplace(PeriodicFn(std::move(gd)));
    } catch (const std::invalid_argument&) {
        // Forced run left a non-monotone displacement; no induced circle map.
    }

    InvariantGraph out{std::move(psi_unc), std::move(g), 0.0, 0.0, 0.0,
                       iterations,         status,       std::move(increments)};
    out.lip_cert = lip_seminorm(out.psi);
    out.residual_inv = invariance_residual(p, out.psi);
    out.residual_fe = out.g ? functional_eq_residual(*out.g, p)
                            : std::numeric_limits<double>::infinity();
    return out;
}

double invariance_residual(const TwistParams& p, const PeriodicFn& psi) {
    const int n = psi.size();
    double m = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = static_cast<double>(i) / n;
        const double gx = x + p.alpha1 + p.lambda * psi.sample(i) + p.phi(x);
        const double r = psi(gx) - p.lambda * psi.sample(i) - p.phi(x) - p.alpha2;
        m = std::max(m, std::abs(r));
    }
    return m;
}

double functional_eq_residual(const CircleLift& g, const TwistParams& p) {
    const CircleLift ginv = g.inverse(1e-13);
    const int n = g.size();
    const double w = 1.0 / (1.0 + p.lambda);
    double m = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = static_cast<double>(i) / n;
        const double lhs = w * g(x) + p.lambda * w * ginv(x);
        const double rhs =
            x + w * ((1.0 - p.lambda) * p.alpha1 + p.lambda * p.alpha2 + p.phi(x));
        m = std::max(m, std::abs(lhs - rhs));
    }
    return m;
}

ConeReport cone_check(const TwistParams& p, const InvariantGraph& graph, const ConeOptions& opts) {
    const int n = p.phi.size();
    const ThresholdSet th = ThresholdSet::for_lambda(p.lambda);
    const PeriodicFn dphi = derivative(p.phi);

    ConeReport rep{0.0,  th.beta, th.beta / (1.0 + th.beta), false, {}, true,
                   PeriodicFn::zero(n), {}, 0.0};
    rep.zeta_hat = std::max(c0_norm(p.phi), c0_norm(dphi));
    rep.analytic_pass = rep.zeta_hat < rep.aperture_bound;

    // One-step boundary-vector images at every node.
    for (int i = 0; i < n; ++i) {
        const double d = dphi.sample(i);
        double worst = 1e300;
        for (double sgn : {1.0, -1.0}) {
            const double v1 = 1.0 + d + p.lambda * sgn * th.beta;
            const double v2 = d + p.lambda * sgn * th.beta;
            worst = std::min(worst, th.beta * std::abs(v1) - std::abs(v2));
        }
        if (!(worst > 0.0)) {
            rep.violations.push_back({i, worst});
            rep.pointwise_pass = false;
        }
    }

    // Slope field: pull each node back k_max steps, push the cone boundary
    // forward along the orbit, watch the aperture close onto a line.
    if (!graph.g) throw std::invalid_argument("cone_check: graph has no induced circle map");
    const CircleLift ginv = graph.g->inverse(1e-13);
    const int kmax = std::max(1, opts.k_max);
    std::vector<std::vector<double>> apertures(static_cast<std::size_t>(n));
    std::vector<double> slopes(static_cast<std::size_t>(n), 0.0);

    parallel_for(n, [&](long i) {
        std::vector<double> orbit(static_cast<std::size_t>(kmax) + 1);
        orbit[0] = static_cast<double>(i) / n;
        for (int k = 1; k <= kmax; ++k) orbit[static_cast<std::size_t>(k)] = ginv(orbit[static_cast<std::size_t>(k - 1)]);

        double up1 = 1.0, up2 = th.beta;    // boundary vector (1, +beta)
        double dn1 = 1.0, dn2 = -th.beta;   // boundary vector (1, -beta)
        auto& hist = apertures[static_cast<std::size_t>(i)];
        hist.resize(static_cast<std::size_t>(kmax), 0.0);
        for (int k = kmax; k >= 1; --k) {
            const double x = orbit[static_cast<std::size_t>(k)];
            const double d = dphi(x);
            auto step = [&](double& v1, double& v2) {
                const double w1 = (1.0 + d) * v1 + p.lambda * v2;
                const double w2 = d * v1 + p.lambda * v2;
                const double sc = std::max(std::abs(w1), std::abs(w2));
                v1 = w1 / sc;
                v2 = w2 / sc;
            };
            step(up1, up2);
            step(dn1, dn2);
            const double su = up1 != 0.0 ? up2 / up1 : 1e300;
            const double sd = dn1 != 0.0 ? dn2 / dn1 : 1e300;
            hist[static_cast<std::size_t>(kmax - k)] = std::abs(su - sd);
        }
        const double su = up1 != 0.0 ? up2 / up1 : 1e300;
        const double sd = dn1 != 0.0 ? dn2 / dn1 : 1e300;
        slopes[static_cast<std::size_t>(i)] = 0.5 * (su + sd);
    });

    rep.max_aperture.assign(static_cast<std::size_t>(kmax), 0.0);
    for (int k = 0; k < kmax; ++k) {
        double m = 0.0;
        for (int i = 0; i < n; ++i) m = std::max(m, apertures[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)]);
        rep.max_aperture[static_cast<std::size_t>(k)] = m;
    }
    rep.final_aperture = rep.max_aperture.back();
    rep.slope_field = PeriodicFn(std::move(slopes));
    return rep;
}

std::vector<SlopeJump> slope_discontinuity_scan(const PeriodicFn& psi, double jump_tol) {
    const int n = psi.size();
    std::vector<SlopeJump> out;
    for (int i = 0; i < n; ++i) {
        double left = 0.0, right = 0.0;
        for (int s : {1, 2, 4}) {
            left += (psi.sample(i) - psi.sample(i - s)) * n / s;
            right += (psi.sample(i + s) - psi.sample(i)) * n / s;
        }
        left /= 3.0;
        right /= 3.0;
        if (std::abs(left - right) > jump_tol) {
            out.push_back({i, static_cast<double>(i) / n, left, right});
        }
    }
    return out;
}

}  // namespace twistlab
