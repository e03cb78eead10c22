#include "twistlab/denjoy.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace twistlab::denjoy {

namespace {

// ---------------------------------------------------------------------------
// Bump function: the standard mollifier kernel exp(-1/(1-u^2)) rescaled to
// [1/4, 3/4] and normalized to unit integral. The cumulative is tabulated once
// (composite Simpson per cell, Hermite-cubic in between) and symmetrized so
// that H(1/2) = 1/2 holds exactly.
// ---------------------------------------------------------------------------

double kernel(double t) {
    if (t <= 0.25 || t >= 0.75) return 0.0;
    const double u = 4.0 * t - 2.0;
    return std::exp(-1.0 / (1.0 - u * u));
}

struct BumpTables {
    static constexpr int cells = 4096;
    double c = 0.0;  // normalization, eta = c * kernel
    std::vector<double> cum;  // unnormalized cumulative at nodes of [1/4, 3/4]
    std::vector<double> ker;  // kernel at nodes

    BumpTables() {
        cum.resize(cells + 1, 0.0);
        ker.resize(cells + 1, 0.0);
        const double h = 0.5 / cells;
        for (int i = 0; i <= cells; ++i) ker[static_cast<std::size_t>(i)] = kernel(0.25 + h * i);
        for (int i = 0; i < cells; ++i) {
            const double t0 = 0.25 + h * i;
            const double simpson =
                h / 6.0 * (ker[static_cast<std::size_t>(i)] + 4.0 * kernel(t0 + 0.5 * h) + ker[static_cast<std::size_t>(i + 1)]);
            cum[static_cast<std::size_t>(i + 1)] = cum[static_cast<std::size_t>(i)] + simpson;
        }
        c = 1.0 / cum.back();
    }

    double eta(double t) const { return c * kernel(t); }

    double H_raw(double t) const {
        if (t <= 0.25) return 0.0;
        if (t >= 0.75) return 1.0;
        const double s = (t - 0.25) / 0.5 * cells;
        int i = static_cast<int>(s);
        if (i >= cells) i = cells - 1;
        const double x = s - i;
        const double h = 0.5 / cells;
        const double y0 = cum[static_cast<std::size_t>(i)] * c, y1 = cum[static_cast<std::size_t>(i + 1)] * c;
        const double d0 = ker[static_cast<std::size_t>(i)] * c, d1 = ker[static_cast<std::size_t>(i + 1)] * c;
        const double x2 = x * x, x3 = x2 * x;
        return y0 * (2 * x3 - 3 * x2 + 1) + y1 * (-2 * x3 + 3 * x2) +
               h * (d0 * (x3 - 2 * x2 + x) + d1 * (x3 - x2));
    }

    double H(double t) const { return 0.5 * (H_raw(t) + 1.0 - H_raw(1.0 - t)); }

    double peak() const { return c * std::exp(-1.0); }
};

const BumpTables& bump() {
    static const BumpTables tables;
    return tables;
}

// Quintic smoothstep and its integral.
double smooth(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}
double smooth_int(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return t - 0.5;
    const double t4 = t * t * t * t;
    return t4 * (2.5 + t * (-3.0 + t));
}

double frac(double x) {
    double u = x - std::floor(x);
    if (u >= 1.0) u = 0.0;
    return u;
}

// Monotone scalar solve of f(u) = target on [lo, hi] by bisection.
template <typename F>
double bisect_monotone(F&& f, double lo, double hi, double target) {
    double flo = f(lo) - target;
    for (int it = 0; it < 90; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid) - target;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

double slope_floor(const Config& cfg) {
    const double rt = std::sqrt(cfg.lambda);
    const double lo_raw = 2.0 * rt - cfg.lambda;
    const double budget = (1.0 - rt) * (1.0 - rt);
    const double ceil = 1.0 - 1.0 / std::sqrt(static_cast<double>(cfg.N));
    double margin = std::min(0.2 * budget, 0.75 * (ceil - lo_raw));
    if (margin < 0.0) margin = 0.0;
    return lo_raw + margin;
}

double Config::beta0_or_default() const {
    if (beta0 != 0.0) return beta0;
    const double rs = 1.0 / std::sqrt(static_cast<double>(N));
    const double ceil = 1.0 - rs;
    const double lo = slope_floor(*this);
    if (lo + 1e-12 < ceil) return lo + 0.25 * (ceil - lo);
    return 0.5 * (1.0 + lambda);
}

void Config::validate() const {
    if (K < 1) throw std::invalid_argument("denjoy: K must be >= 1");
    if (grid_n < PeriodicFn::kMinGrid) throw std::invalid_argument("denjoy: grid_n too small");
    if (!(lambda > 0.0 && lambda < 1.0)) throw std::invalid_argument("denjoy: lambda must lie in (0,1)");
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("denjoy: eps must lie in (0,1)");
    const double rt = std::sqrt(lambda);
    const double rs = 1.0 / std::sqrt(static_cast<double>(N));
    if (!(rs < std::min(lambda, 0.5 * (rt - lambda)))) {
        throw std::invalid_argument(
            "denjoy: need 1/sqrt(N) < min(lambda, (sqrt(lambda)-lambda)/2); N = " +
            std::to_string(N) + " is too small for lambda = " + std::to_string(lambda));
    }
    const double n_min = std::max(1.0 / (lambda * lambda), 4.0 / (rt * (1.0 - rt) * (1.0 - rt)));
    if (!(static_cast<double>(N) > n_min)) {
        throw std::invalid_argument("denjoy: need N > max(1/lambda^2, 4/(sqrt(lambda)(1-sqrt(lambda))^2)) = " +
                                    std::to_string(n_min));
    }
    const double b0 = beta0_or_default();
    if (!(b0 > lambda + rs && b0 < 1.0 - rs)) {
        throw std::invalid_argument("denjoy: beta0 = " + std::to_string(b0) +
                                    " outside the admissible window (lambda + 1/sqrt(N), 1 - 1/sqrt(N))");
    }
}

// ---------------------------------------------------------------------------
// Lengths and arrangement
// ---------------------------------------------------------------------------

std::vector<double> lengths(const Config& cfg) {
    const int K = cfg.K;
    std::vector<double> raw(static_cast<std::size_t>(2 * K + 1));
    for (int k = -K; k <= K; ++k) {
        const double base = std::abs(k) + cfg.N;
        raw[static_cast<std::size_t>(k + K)] = 1.0 / (base * std::pow(std::log(base), 1.0 + cfg.eps));
    }
    const double total = neumaier_sum(raw);
    for (double& v : raw) v /= total;
    return raw;
}

Arrangement arrange(const Config& cfg, const std::vector<double>& len) {
    const int K = cfg.K;
    const int count = 2 * K + 1;
    Arrangement arr;
    arr.theta.resize(static_cast<std::size_t>(count));
    for (int k = -K; k <= K; ++k) arr.theta[static_cast<std::size_t>(k + K)] = frac(k * cfg.omega);

    arr.spatial.resize(static_cast<std::size_t>(count));
    std::iota(arr.spatial.begin(), arr.spatial.end(), 0);
    std::sort(arr.spatial.begin(), arr.spatial.end(),
              [&](int a, int b) { return arr.theta[static_cast<std::size_t>(a)] < arr.theta[static_cast<std::size_t>(b)]; });

    for (int i = 0; i + 1 < count; ++i) {
        const double gap = arr.theta[static_cast<std::size_t>(arr.spatial[static_cast<std::size_t>(i + 1)])] -
                           arr.theta[static_cast<std::size_t>(arr.spatial[static_cast<std::size_t>(i)])];
        if (gap < 1e-12) {
            throw std::invalid_argument(
                "denjoy: orbit points of omega collide at machine precision; omega is rational "
                "to within 1e-12 for this K");
        }
    }

    arr.rank.resize(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) arr.rank[static_cast<std::size_t>(arr.spatial[static_cast<std::size_t>(i)])] = i;

    arr.endpoint.resize(static_cast<std::size_t>(count));
    double acc = 0.0;
    for (int i = 0; i < count; ++i) {
        arr.endpoint[static_cast<std::size_t>(arr.spatial[static_cast<std::size_t>(i)])] = acc;
        acc += len[static_cast<std::size_t>(arr.spatial[static_cast<std::size_t>(i)])];
    }

    // The index shift k -> k+1 (with K wrapping to -K) must commute with the
    // spatial successor, otherwise the truncated system cannot close up into
    // a continuous circle map.
    auto succ_j = [&](int j) {
        const int k = j - K;
        return (k < K ? k + 1 : -K) + K;
    };
    auto next_spatial = [&](int j) {
        return arr.spatial[static_cast<std::size_t>((arr.rank[static_cast<std::size_t>(j)] + 1) % count)];
    };
    for (int j = 0; j < count; ++j) {
        if (next_spatial(succ_j(j)) != succ_j(next_spatial(j))) {
            throw std::runtime_error("denjoy: truncation at K = " + std::to_string(K) +
                                     " does not close into a circle map for this omega");
        }
    }
    return arr;
}

int closing_truncation(const Config& cfg) {
    Config probe = cfg;
    for (int K = cfg.K; K <= 4 * cfg.K + 4000; ++K) {
        probe.K = K;
        try {
            arrange(probe, lengths(probe));
            return K;
        } catch (const std::runtime_error&) {
            // shift does not close at this K; try the next one
        }
    }
    throw std::runtime_error("denjoy: no closing truncation found above K = " +
                             std::to_string(cfg.K) + " for this omega");
}

// ---------------------------------------------------------------------------
// Profile
// ---------------------------------------------------------------------------

double Profile::value(double uu) const {
    const double b = right_slope;
    if (uu <= 0.0) return b;
    if (uu < delta) return b + (top - b) * smooth(uu / delta);
    if (uu < delta + blend_w) return top + (base - top) * smooth((uu - delta) / blend_w);
    if (uu < L - ramp_w) return base;
    if (uu < L) return base + (1.0 - base) * smooth((uu - (L - ramp_w)) / ramp_w);
    return 1.0;
}

double Profile::integral(double uu) const {
    const double b = right_slope;
    if (uu <= 0.0) return 0.0;
    const double c1 = delta * 0.5 * (b + top);
    if (uu <= delta) return b * uu + (top - b) * delta * smooth_int(uu / delta);
    const double c2 = c1 + blend_w * 0.5 * (top + base);
    if (uu <= delta + blend_w) {
        const double s = (uu - delta) / blend_w;
        return c1 + top * (uu - delta) + (base - top) * blend_w * smooth_int(s);
    }
    const double bulk_end = L - ramp_w;
    if (uu <= bulk_end) return c2 + base * (uu - delta - blend_w);
    const double c3 = c2 + base * (bulk_end - delta - blend_w);
    if (uu < L) {
        const double s = (uu - bulk_end) / ramp_w;
        return c3 + base * (uu - bulk_end) + (1.0 - base) * ramp_w * smooth_int(s);
    }
    return c3 + ramp_w * 0.5 * (base + 1.0);
}

double Profile::total() const { return integral(L); }

double Profile::invert_integral(double target) const {
    if (target <= 0.0) return 0.0;
    const double tot = total();
    if (target >= tot) return L;
    return bisect_monotone([&](double u) { return integral(u); }, 0.0, L, target);
}

// ---------------------------------------------------------------------------
// Map
// ---------------------------------------------------------------------------

int Map::interval_at(double u) const {
    const int count = 2 * K_ + 1;
    // Binary search over spatially-ordered left endpoints.
    int lo = 0, hi = count;  // invariant: a[spatial[lo]] <= u < a[spatial[hi]]
    while (hi - lo > 1) {
        const int mid = (lo + hi) / 2;
        if (a_[static_cast<std::size_t>(spatial_[static_cast<std::size_t>(mid)])] <= u)
            lo = mid;
        else
            hi = mid;
    }
    return spatial_[static_cast<std::size_t>(lo)];
}

double Map::zeta(int j, double t) const {
    const int k = j - K_;
    const double l = len_[static_cast<std::size_t>(j)];
    const double ls = len_[jdx(succ(k))];
    return t + (ls - l) * bump().H(t / l);
}

double Map::zeta_deriv(int j, double t) const {
    const int k = j - K_;
    const double l = len_[static_cast<std::size_t>(j)];
    const double ls = len_[jdx(succ(k))];
    return 1.0 + (ls / l - 1.0) * bump().eta(t / l);
}

double Map::zeta_inv(int j, double y) const {
    const int k = j - K_;
    const double l = len_[static_cast<std::size_t>(j)];
    const double ls = len_[jdx(succ(k))];
    double t = std::clamp(y * l / ls, 0.0, l);
    for (int it = 0; it < 40; ++it) {
        const double f = zeta(j, t) - y;
        const double d = zeta_deriv(j, t);
        const double step = f / d;
        t = std::clamp(t - step, 0.0, l);
        if (std::abs(step) < 1e-17) break;
    }
    if (std::abs(zeta(j, t) - y) > 1e-12) {
        t = bisect_monotone([&](double s) { return zeta(j, s); }, 0.0, l, y);
    }
    return t;
}

double Map::circ(double u) const {
    const int j = interval_at(u);
    const int k = j - K_;
    const double t = u - a_[static_cast<std::size_t>(j)];
    const double A = a_[jdx(succ(k))];
    const auto& prof = profiles_[static_cast<std::size_t>(j)];
    if (prof) {
        const double half = 0.5 * len_[static_cast<std::size_t>(j)];
        const double tu = t - half;
        if (tu >= 0.0 && tu < prof->L) {
            return A + 0.5 * len_[jdx(succ(k))] + prof->integral(tu);
        }
    }
    return A + zeta(j, t);
}

double Map::lift(double x) const {
    const double u = frac(x);
    const int j = interval_at(u);
    return (x - u) + circ(u) + lift_offset_[static_cast<std::size_t>(j)];
}

double Map::derivative(double u) const {
    const int j = interval_at(u);
    const double t = u - a_[static_cast<std::size_t>(j)];
    const auto& prof = profiles_[static_cast<std::size_t>(j)];
    if (prof) {
        const double tu = t - 0.5 * len_[static_cast<std::size_t>(j)];
        if (tu >= 0.0 && tu < prof->L) return prof->value(tu);
    }
    return zeta_deriv(j, t);
}

double Map::inverse_circ(double u) const {
    const int jm = interval_at(u);
    const int km = jm - K_;
    const int k = pred(km);
    const int j = static_cast<int>(jdx(k));
    const double t_img = u - a_[static_cast<std::size_t>(jm)];
    const double half_img = 0.5 * len_[static_cast<std::size_t>(jm)];
    const auto& prof = profiles_[static_cast<std::size_t>(j)];
    if (prof && t_img >= half_img) {
        const double off = t_img - half_img;
        const double tot = prof->total();
        if (off <= tot) {
            return a_[static_cast<std::size_t>(j)] + 0.5 * len_[static_cast<std::size_t>(j)] +
                   prof->invert_integral(off);
        }
    }
    return a_[static_cast<std::size_t>(j)] + zeta_inv(j, t_img);
}

double Map::inverse_lift_disp(double u) const {
    const double p = inverse_circ(frac(u));
    const int jp = interval_at(p);
    return p - circ(p) - lift_offset_[static_cast<std::size_t>(jp)];
}

// ---------------------------------------------------------------------------
// Builder
// ---------------------------------------------------------------------------

struct Builder {
    static Map make(int K, const std::vector<double>& len, const Arrangement& arr,
                    std::vector<std::optional<Profile>> profiles) {
        Map m;
        m.K_ = K;
        m.len_ = len;
        m.a_ = arr.endpoint;
        m.theta_ = arr.theta;
        m.spatial_ = arr.spatial;
        m.rank_ = arr.rank;
        m.profiles_ = std::move(profiles);
        if (m.profiles_.empty()) m.profiles_.resize(static_cast<std::size_t>(2 * K + 1));

        // Integer lift offsets: walk the circle once so the lift is continuous,
        // then check that it closes with degree one.
        const int count = 2 * K + 1;
        m.lift_offset_.assign(static_cast<std::size_t>(count), 0.0);
        double running = 0.0;
        for (int i = 0; i < count; ++i) {
            const int j = m.spatial_[static_cast<std::size_t>(i)];
            if (i > 0) {
                const int jp = m.spatial_[static_cast<std::size_t>(i - 1)];
                const int kp = jp - K;
                const double right_end =
                    m.a_[m.jdx(m.succ(kp))] + m.len_[m.jdx(m.succ(kp))];
                const double next_left = m.a_[m.jdx(m.succ(j - K))];
                running += std::round(right_end - next_left);
            }
            m.lift_offset_[static_cast<std::size_t>(j)] = running;
        }
        {
            // Degree-one closure: the seam wrapping through 1 must also be
            // continuous once the lift gains +1.
            const int j_last = m.spatial_[static_cast<std::size_t>(count - 1)];
            const int k_last = j_last - K;
            const double right_end = m.a_[m.jdx(m.succ(k_last))] + m.len_[m.jdx(m.succ(k_last))];
            const int j_first = m.spatial_[0];
            const double first_left = m.a_[m.jdx(m.succ(j_first - K))];
            const double defect = (right_end + m.lift_offset_[static_cast<std::size_t>(j_last)]) -
                                  (first_left + m.lift_offset_[static_cast<std::size_t>(j_first)] + 1.0);
            if (std::abs(defect) > 1e-9) {
                throw std::runtime_error("denjoy: lift offsets fail to close with degree one (defect " +
                                         std::to_string(defect) + ")");
            }
        }
        return m;
    }
};

// ---------------------------------------------------------------------------
// Mobius orbit
// ---------------------------------------------------------------------------

MobiusOrbit mobius_orbit(const Config& cfg, const std::vector<double>& m, double beta0) {
    const int K = cfg.K;
    const double lambda = cfg.lambda;
    MobiusOrbit out;
    out.beta.assign(static_cast<std::size_t>(2 * K + 1), 0.0);
    auto idx = [K](int k) { return static_cast<std::size_t>(k + K); };
    out.beta[idx(0)] = beta0;
    for (int k = 1; k <= K; ++k) {
        const double mk = m[idx(k)];
        const double prev = out.beta[idx(k - 1)];
        if (prev <= 0.0) throw std::runtime_error("mobius_orbit: beta_" + std::to_string(k - 1) + " <= 0");
        const double b = mk - lambda / prev;
        out.beta[idx(k)] = b;
        if (!(b > 0.0 && b < mk)) out.flagged.push_back(k);
        if (b <= 0.0) throw std::runtime_error("mobius_orbit: beta_" + std::to_string(k) + " <= 0 (seed outside basin)");
    }
    for (int k = -1; k >= -K; --k) {
        const double mk1 = m[idx(k + 1)];
        const double next = out.beta[idx(k + 1)];
        const double denom = mk1 - next;
        if (denom <= 0.0) throw std::runtime_error("mobius_orbit: beta_" + std::to_string(k + 1) + " >= m (backward step undefined)");
        const double b = lambda / denom;
        out.beta[idx(k)] = b;
        if (!(b > 0.0 && b < mk1)) out.flagged.push_back(k);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Artifact evaluators
// ---------------------------------------------------------------------------

double Artifact::psi_exact(double x) const {
    const double u = frac(x);
    return (h.lift(u) - u) + cfg.lambda * h.inverse_lift_disp(u);
}

double Artifact::dpsi_exact(double x) const {
    const double u = frac(x);
    const double d1 = h.derivative(u);
    const double p = h.inverse_circ(u);
    const double d2 = h.derivative(p);
    return d1 + cfg.lambda / d2 - (1.0 + cfg.lambda);
}

double Artifact::graph_exact(double x) const {
    const double u = frac(x);
    return -h.inverse_lift_disp(u) - alphaN;
}

double Artifact::dh_right(int k) const {
    const std::size_t j = static_cast<std::size_t>(k + cfg.K);
    return right_slope[j] != 0.0 ? right_slope[j] : dg_orbit[j];
}

// ---------------------------------------------------------------------------
// build
// ---------------------------------------------------------------------------

Artifact build(const Config& cfg_in) {
    const auto t_start = std::chrono::steady_clock::now();
    cfg_in.validate();
    Config cfg = cfg_in;
    cfg.K = closing_truncation(cfg_in);
    const int K = cfg.K;
    const double lambda = cfg.lambda;
    auto idx = [K](int k) { return static_cast<std::size_t>(k + K); };

    Artifact art{cfg,
                 lengths(cfg),
                 {},
                 {},
                 {},
                 {},
                 {},
                 {},
                 0.0,
                 0,
                 Map{},
                 Map{},
                 CircleLift::rigid(0.0, cfg.grid_n),
                 CircleLift::rigid(0.0, cfg.grid_n),
                 PeriodicFn::zero(cfg.grid_n),
                 PeriodicFn::zero(cfg.grid_n),
                 0.0,
                 0.0};

    const Arrangement arr = arrange(cfg, art.len);
    art.endpoint = arr.endpoint;

    // Orbit through the interval centers: the bump is symmetric, so the
    // relative position 1/2 is preserved by every interval map.
    art.orbit.resize(static_cast<std::size_t>(2 * K + 1));
    art.dg_orbit.resize(static_cast<std::size_t>(2 * K + 1));
    const double peak = bump().peak();
    for (int k = -K; k <= K; ++k) {
        art.orbit[idx(k)] = art.endpoint[idx(k)] + 0.5 * art.len[idx(k)];
        const int ks = k < K ? k + 1 : -K;
        art.dg_orbit[idx(k)] = 1.0 + (art.len[idx(ks)] / art.len[idx(k)] - 1.0) * peak;
    }

    art.m.assign(static_cast<std::size_t>(2 * K + 1), 0.0);
    for (int k = -K + 1; k <= K; ++k) {
        art.m[idx(k)] = art.dg_orbit[idx(k)] + lambda / art.dg_orbit[idx(k - 1)];
    }

    const MobiusOrbit mo = mobius_orbit(cfg, art.m, cfg.beta0_or_default());
    art.beta = mo.beta;

    art.g = Builder::make(K, art.len, arr, {});

    // Surgery: one profile per J_k, k in [-K+1, K-1]. Right-hand slope targets
    // are the Moebius orbit values clipped from below at the pairing-safe
    // floor; a sub-floor slope would need a matched dip in every backward
    // predecessor, which no finite construction can carry.
    const double floor_val = slope_floor(cfg);
    art.slope_floor = floor_val;
    art.right_slope.assign(static_cast<std::size_t>(2 * K + 1), 0.0);
    art.k_lo = K;
    std::vector<std::optional<Profile>> profiles(static_cast<std::size_t>(2 * K + 1));
    for (int k = -K + 1; k <= K - 1; ++k) {
        const double b = std::max(art.beta[idx(k)], floor_val);
        art.right_slope[idx(k)] = b;

        Profile prof;
        const double l = art.len[idx(k)];
        const int ks = k + 1;
        prof.L = 0.25 * l;
        prof.delta = prof.L / 8.0;  // wide enough that grid-scale scans see the corner
        prof.blend_w = prof.delta;
        prof.ramp_w = prof.L / 8.0;
        prof.top = 1.0;
        prof.right_slope = b;
        // Value glue: integral over J_k must equal g(c_k) - x_{k+1}.
        const double M = 0.5 * art.len[idx(ks)] - 0.25 * l;
        const double numer = M - prof.delta * 0.5 * (b + prof.top) - prof.delta * 0.5 * prof.top -
                             prof.ramp_w * 0.5;
        const double denom = prof.L - 1.5 * prof.delta - 0.5 * prof.ramp_w;
        prof.base = numer / denom;
        if (!(prof.base > 0.5 && prof.base < 1.5)) {
            throw std::runtime_error("denjoy: value glue produced an implausible level " +
                                     std::to_string(prof.base) + " at k = " + std::to_string(k));
        }
        profiles[static_cast<std::size_t>(idx(k))] = std::move(prof);
    }
    // Contiguous certified range: smallest k such that the slope target is the
    // unclipped beta from k upward.
    {
        int klo = -K + 1;
        for (int k = K - 1; k >= -K + 1; --k) {
            if (art.beta[idx(k)] < floor_val) {
                klo = k + 1;
                break;
            }
        }
        art.k_lo = klo;
    }

    art.h = Builder::make(K, art.len, arr, std::move(profiles));

    // Consistency: the surgery keeps the orbit and the interval images.
    for (int k = -K; k <= K - 1; ++k) {
        const double img = art.h.circ(art.orbit[idx(k)]);
        const double want = art.orbit[idx(k + 1)];
        if (std::abs(img - want) > 1e-10) {
            throw std::runtime_error("denjoy: h(x_k) != x_{k+1} at k = " + std::to_string(k));
        }
    }

    // Grid exports.
    const int n = cfg.grid_n;
    std::vector<double> dg(static_cast<std::size_t>(n)), dh(static_cast<std::size_t>(n)),
        psi(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double u = static_cast<double>(i) / n;
        dg[static_cast<std::size_t>(i)] = art.g.lift(u) - u;
        const double dhu = art.h.lift(u) - u;
        dh[static_cast<std::size_t>(i)] = dhu;
        psi[static_cast<std::size_t>(i)] = dhu + lambda * art.h.inverse_lift_disp(u);
    }
    art.g_grid = CircleLift(PeriodicFn(std::move(dg)));
    art.h_grid = CircleLift(PeriodicFn(std::move(dh)));
    PeriodicFn psi_fn(std::move(psi));
    const double psi_mean = mean(psi_fn);
    art.alphaN = psi_mean / (1.0 - lambda);
    std::vector<double> phi(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) phi[static_cast<std::size_t>(i)] = psi_fn.sample(i) - psi_mean;
    art.psi = std::move(psi_fn);
    art.phi = PeriodicFn(std::move(phi));

    art.build_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return art;
}

// ---------------------------------------------------------------------------
// certify
// ---------------------------------------------------------------------------

Report certify(const Artifact& art) {
    const auto t_start = std::chrono::steady_clock::now();
    const Config& cfg = art.cfg;
    const int K = cfg.K;
    const double lambda = cfg.lambda;
    const double rt = std::sqrt(lambda);
    auto idx = [K](int k) { return static_cast<std::size_t>(k + K); };

    Report rep{};
    rep.lip_threshold = (1.0 - rt) * (1.0 - rt);

    // Derivative audit: sample every interval region, including the dips.
    double lip = 0.0, dh_min = 1e300, dh_max = -1e300;
    auto audit_point = [&](double u) {
        const double d1 = art.h.derivative(u);
        const double p = art.h.inverse_circ(u);
        const double d2 = art.h.derivative(p);
        const double w = d1 + lambda / d2 - (1.0 + lambda);
        lip = std::max(lip, std::abs(w));
        dh_min = std::min(dh_min, d1);
        dh_max = std::max(dh_max, d1);
    };
    for (int k = -K; k <= K; ++k) {
        const double a = art.endpoint[idx(k)];
        const double l = art.len[idx(k)];
        for (int s = 1; s < 8; ++s) audit_point(a + l * (0.5 * s / 8.0));  // left g-part
        const auto& prof = art.h.profile(static_cast<int>(idx(k)));
        if (prof) {
            const double x0 = a + 0.5 * l;
            for (int s = 0; s <= 16; ++s) audit_point(x0 + prof->delta * (s / 16.0) * 0.999 + 1e-18);
            for (int s = 1; s <= 8; ++s) audit_point(x0 + prof->delta + prof->blend_w * s / 9.0);
            for (int s = 0; s <= 4; ++s)
                audit_point(x0 + prof->delta * 2.0 +
                            (prof->L - prof->ramp_w - 2.0 * prof->delta) * (0.1 + 0.2 * s));
            for (int s = 1; s <= 8; ++s)
                audit_point(x0 + prof->L - prof->ramp_w * (1.0 - s / 9.0));
        }
        for (int s = 1; s < 8; ++s) audit_point(a + l * (0.75 + 0.25 * s / 8.0));  // right g-part
    }
    rep.lip_psi_exact = lip;
    rep.lip_phi_grid = lip_seminorm(art.phi);
    rep.lip_pass = rep.lip_psi_exact <= rep.lip_threshold + 1e-3;
    rep.dh_min = dh_min;
    rep.dh_max = dh_max;

    // Rotation number of the lift.
    {
        const long n_iter = 200000;
        double x = 0.0;
        for (long i = 0; i < n_iter; ++i) x = art.h.lift(x);
        rep.rho = x / static_cast<double>(n_iter);
        rep.rho_err = std::abs(rep.rho - cfg.omega);
        rep.rho_pass = rep.rho_err <= 1e-3;
    }

    // Moebius limits.
    rep.beta_plus_err = std::abs(art.beta[idx(K)] - 1.0);
    rep.beta_minus_err = std::abs(art.beta[idx(-K)] - lambda);
    rep.beta_pass = rep.beta_plus_err <= 1e-3 && rep.beta_minus_err <= 1e-3;
    {
        const double mK = art.m[idx(K)];
        const double pplus = 0.5 * (mK + std::sqrt(mK * mK - 4.0 * lambda));
        rep.beta_plus_tracking = std::abs(art.beta[idx(K)] - pplus);
        const double mmK = art.m[idx(-K + 1)];
        const double pminus = 0.5 * (mmK - std::sqrt(mmK * mmK - 4.0 * lambda));
        rep.beta_minus_tracking = std::abs(art.beta[idx(-K)] - pminus);
    }

    // One-sided slope agreement of psi_N at the orbit points: the realized
    // right-hand slopes follow the Moebius recurrence on [k_lo, ...], which is
    // exactly the condition Dpsi^R(x_k) = Dpsi^L(x_k).
    {
        double worst = 0.0;
        const int lo = std::max(art.k_lo + 1, -K / 2);
        const int hi = std::min(K / 2, K - 1);
        for (int k = lo; k <= hi; ++k) {
            const double lhs = art.dh_right(k) + lambda / art.dh_right(k - 1);
            const double rhs = art.m[idx(k)];
            worst = std::max(worst, std::abs(lhs - rhs));
        }
        rep.slope_agree_max = worst;
        rep.slope_agree_pass = worst <= 1e-3;
    }

    // Graph slope jump produced by the first surgery corner.
    rep.psi_jump_x0 = std::abs(1.0 / art.dh_right(0) - 1.0 / art.dg_orbit[idx(0)]);
    rep.psi_jump_floor = 0.5 / std::sqrt(static_cast<double>(cfg.N));
    rep.jump_pass = rep.psi_jump_x0 > rep.psi_jump_floor;

    // Right difference quotients of h at sampled orbit points.
    {
        double worst = 0.0;
        for (int k : {0, 1, 5, 25, K / 4, K / 2, -1, -5, -K / 2}) {
            if (k < -K + 1 || k > K - 1) continue;
            const auto& prof = art.h.profile(static_cast<int>(idx(k)));
            if (!prof) continue;
            const double sigma = prof->delta / 256.0;
            const double quot = prof->integral(sigma) / sigma;
            worst = std::max(worst, std::abs(quot - art.right_slope[idx(k)]));
        }
        rep.quotient_err_max = worst;
    }

    // Exact invariance of the closed-form graph under the twist map built from
    // (phi_N, alpha_N).
    {
        double worst = 0.0;
        const int samples = 4096;
        for (int i = 0; i < samples; ++i) {
            const double x = (i + 0.31) / samples;
            const double gp = art.graph_exact(art.h.circ(x));
            const double here = art.graph_exact(x);
            const double phix = (art.h.lift(x) - x) + lambda * art.h.inverse_lift_disp(x) -
                                (1.0 - lambda) * art.alphaN;
            worst = std::max(worst, std::abs(gp - lambda * here - phix));
        }
        rep.invariance_exact = worst;
    }

    // Structural checks: seams, interval images, mean preservation.
    {
        double seam = 0.0, image = 0.0;
        for (int k = -K; k <= K; ++k) {
            const double a = art.endpoint[idx(k)];
            const double l = art.len[idx(k)];
            const double left_img = art.h.circ(a);
            const int ks = k < K ? k + 1 : -K;
            double want = art.endpoint[idx(ks)];
            double diff = std::abs(left_img - want);
            diff = std::min(diff, std::abs(diff - 1.0));
            image = std::max(image, diff);
            const double end_in = art.h.circ(a + l * (1.0 - 1e-13));
            const double end_want = art.endpoint[idx(ks)] + art.len[idx(ks)];
            seam = std::max(seam, std::abs(end_in - end_want));
        }
        rep.interval_image_defect = image;
        rep.seam_defect = seam;
    }
    {
        const int q = 1 << 17;
        double sg = 0.0, sh = 0.0;
        for (int i = 0; i < q; ++i) {
            const double u = (i + 0.5) / q;
            sg += art.g.lift(u) - u;
            sh += art.h.lift(u) - u;
        }
        rep.mean_defect_Ah_Ag = std::abs(sh / q - sg / q);
    }

    // m-window and the beta sandwich with the honest epsilon.
    {
        double eps_hat = 0.0;
        for (int k = -K + 1; k <= K; ++k) eps_hat = std::max(eps_hat, std::abs(art.m[idx(k)] - (1.0 + lambda)));
        rep.m_window_scaled = eps_hat * cfg.N;
        rep.m_window_1_over_N = eps_hat <= 1.0 / cfg.N;
        const double np = 1.0 + lambda + eps_hat, nm = 1.0 + lambda - eps_hat;
        double lo = art.beta[idx(0)], hi = art.beta[idx(0)];
        bool ok = true;
        for (int k = 1; k <= K; ++k) {
            lo = nm - lambda / lo;
            hi = np - lambda / hi;
            const double b = art.beta[idx(k)];
            if (!(b >= lo - 1e-12 && b <= hi + 1e-12)) {
                ok = false;
                break;
            }
        }
        rep.beta_sandwich_pass = ok;
    }

    rep.phi_c0 = c0_norm(art.phi);
    rep.phi_holder09 = holder_norm(art.phi, 0.1);
    rep.phi_mean = mean(art.phi);
    rep.build_seconds = art.build_seconds;
    rep.certify_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return rep;
}

DecayFit decay_fit(const std::vector<Report>& reports, const std::vector<int>& Ns) {
    DecayFit fit;
    fit.Ns = Ns;
    for (const auto& r : reports) {
        fit.phi_c0.push_back(r.phi_c0);
        fit.phi_holder09.push_back(r.phi_holder09);
    }
    const std::size_t n = fit.phi_c0.size();
    if (n >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double x = std::log(static_cast<double>(Ns[i]));
            const double y = std::log(fit.phi_c0[i]);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        fit.c0_exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        fit.holder_monotone = true;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (!(fit.phi_holder09[i + 1] < fit.phi_holder09[i])) fit.holder_monotone = false;
        }
    }
    return fit;
}

}  // namespace twistlab::denjoy
