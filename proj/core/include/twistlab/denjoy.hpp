#pragma once

#include <optional>
#include <vector>

#include "twistlab/circle.hpp"
#include "twistlab/periodic.hpp"

namespace twistlab::denjoy {

/// Parameters of the wandering-interval construction. Indices k run over
/// [-K, K]; interval I_K is glued to I_{-K} by a translation bridge so the
/// truncated system closes up into a circle map (the bridge is excluded from
/// certificates).
struct Config {
    double omega = 0.6180339887498949;  // golden-mean conjugate
    double eps = 0.1;                   // exponent in the interval-length law
    int N = 200;                        // length-law offset
    int K = 400;                        // index truncation |k| <= K
    double lambda = 0.25;
    double beta0 = 0.0;                 // 0 -> a default inside the admissible window, above the dip floor
    int grid_n = 4096;                  // export grid

    double beta0_or_default() const;

    /// Throws listing the violated admissibility inequality.
    void validate() const;
};

/// Derivative floor for the surgery dips: right-hand slopes are clipped to it
/// so that every pair of derivative values stays inside the Lipschitz budget
/// of the assembled perturbation regardless of how the intervals map onto
/// each other. Slightly above 2*sqrt(lambda) - lambda.
double slope_floor(const Config& cfg);

/// Interval lengths l_k = a_N / ((|k|+N) (log(|k|+N))^{1+eps}), indexed by
/// j = k + K, normalized so the truncated sum is exactly 1.
std::vector<double> lengths(const Config& cfg);

struct Arrangement {
    std::vector<double> endpoint;   // a_k (left endpoint), indexed j = k + K
    std::vector<int> spatial;       // interval j-indices in circular spatial order
    std::vector<int> rank;          // inverse of spatial: rank[j] = position on the circle
    std::vector<double> theta;      // frac(k*omega), indexed j = k + K
};

/// Places the intervals on the circle in the cyclic order of frac(k*omega).
/// Throws if two orbit points coincide to 1e-12 (omega rational to machine
/// precision) or if the truncation fails to close into a circle map.
Arrangement arrange(const Config& cfg, const std::vector<double>& len);

/// Smallest K' >= cfg.K for which the index shift (with K' wrapping to -K')
/// is a cyclic-order automorphism of {frac(k*omega)}, i.e. the truncated
/// system closes into a continuous circle map. These are the denominators of
/// the best rational approximations of omega; build() uses this value.
int closing_truncation(const Config& cfg);

/// Derivative surgery profile on J_k = (x_k, c_k): a narrow quintic dip from
/// the prescribed right-hand slope back up to the ambient level, a short
/// blend, a flat stretch solving the value glue, and a ramp meeting the outer
/// derivative at c_k. Everything is closed form in the local coordinate.
struct Profile {
    double L = 0.0;        // c_k - x_k
    double delta = 0.0;    // dip width
    double blend_w = 0.0;  // blend width (== delta)
    double ramp_w = 0.0;   // ramp width (== L/8)
    double base = 1.0;     // flat level from the value glue
    double top = 1.0;      // dip top / blend start value
    double right_slope = 1.0;  // one-sided derivative realized at x_k

    double value(double uu) const;
    double integral(double uu) const;
    double invert_integral(double target) const;
    double total() const;  // integral over [0, L]
};

/// Exact piecewise representation of the circle map (g, or h after surgery).
class Map {
public:
    double circ(double u) const;   // image of u in [0,1), as a point of [0,1)
    double lift(double x) const;   // continuous degree-one lift
    double derivative(double u) const;
    double inverse_circ(double u) const;
    double inverse_lift_disp(double u) const;  // h^{-1}(u) - u on the matching lift branch

    int interval_at(double u) const;  // j-index of the interval containing u

    const std::optional<Profile>& profile(int j) const { return profiles_[static_cast<std::size_t>(j)]; }

private:
    friend struct Builder;
    int K_ = 0;
    std::vector<double> len_, a_, theta_;
    std::vector<int> spatial_, rank_;
    std::vector<double> lift_offset_;           // per j-index, integer-valued
    std::vector<std::optional<Profile>> profiles_;

    int succ(int k) const { return k < K_ ? k + 1 : -K_; }
    int pred(int k) const { return k > -K_ ? k - 1 : K_; }
    double zeta(int j, double t) const;       // forward branch on the g-part
    double zeta_deriv(int j, double t) const;
    double zeta_inv(int j, double y) const;
    std::size_t jdx(int k) const { return static_cast<std::size_t>(k + K_); }
};

struct Artifact {
    Config cfg;
    std::vector<double> len;        // l_k, j-indexed
    std::vector<double> endpoint;   // a_k
    std::vector<double> orbit;      // x_k = a_k + l_k/2
    std::vector<double> dg_orbit;   // Dg(x_k)
    std::vector<double> m;          // m_k = Dg(x_k) + lambda/Dg(x_{k-1}), j-indexed (undefined at k=-K)
    std::vector<double> beta;       // Moebius orbit, j-indexed
    std::vector<double> right_slope;  // realized one-sided derivative at x_k (j-indexed, 0 where no surgery)
    double slope_floor = 0.0;       // derivative floor the dips are clipped to
    int k_lo = 0;                   // smallest k whose realized slope equals the beta target
    Map g, h;
    CircleLift g_grid, h_grid;
    PeriodicFn psi, phi;            // psi_N, phi_N on the export grid
    double alphaN = 0.0;
    double build_seconds = 0.0;

    // Exact evaluators.
    double psi_exact(double x) const;
    double dpsi_exact(double x) const;
    double graph_exact(double x) const;       // x - h^{-1}(x) - alphaN
    double dh_right(int k) const;             // realized right slope at x_k
};

/// Builds the full artifact: intervals, the unmodified map, the Moebius
/// orbit of slope targets, the derivative surgery, and the assembled
/// perturbation psi_N / phi_N / alpha_N.
Artifact build(const Config& cfg);

/// Two-sided Moebius slope recurrence from beta_0: forward
/// beta_k = m_k - lambda/beta_{k-1}, backward beta_k = lambda/(m_{k+1} - beta_{k+1}).
/// Flags entries leaving (0, m_k); throws if some beta_k <= 0.
struct MobiusOrbit {
    std::vector<double> beta;  // j-indexed
    std::vector<int> flagged;  // k values with beta_k outside (0, m_k)
};
MobiusOrbit mobius_orbit(const Config& cfg, const std::vector<double>& m, double beta0);

struct Report {
    // Lipschitz certificate for the perturbation.
    double lip_psi_exact;   // sup |Dpsi| over the audit samples
    double lip_phi_grid;    // grid seminorm of phi_N
    double lip_threshold;   // (1 - sqrt(lambda))^2
    bool lip_pass;

    double rho;             // rotation number of h
    double rho_err;         // |rho - omega|
    bool rho_pass;          // within 1e-3

    double beta_plus_err;   // |beta_K - 1|
    double beta_minus_err;  // |beta_{-K} - lambda|
    bool beta_pass;         // both within 1e-3
    double beta_plus_tracking;   // |beta_K - p_+(m_K)| (distance to the local fixed point)
    double beta_minus_tracking;  // |beta_{-K} - p_-(m_{-K+1})|

    double slope_agree_max;  // max_k |Dpsi^R(x_k) - Dpsi^L(x_k)| over certified k
    bool slope_agree_pass;   // within 1e-3

    double psi_jump_x0;      // graph slope jump at x_0
    double psi_jump_floor;   // 1/(2 sqrt(N))
    bool jump_pass;

    double quotient_err_max;  // right difference quotients of h at sampled x_k vs targets
    double invariance_exact;  // sup over samples, exact evaluators
    double seam_defect;       // worst continuity defect of h across interval seams
    double interval_image_defect;  // max_k |h(a_k) - a_{succ(k)}| on the circle
    double mean_defect_Ah_Ag;  // |mean(h - id) - mean(g - id)|
    double m_window_scaled;    // max_k |m_k - (1+lambda)| * N
    bool m_window_1_over_N;    // the literal 1/N window (fails at the bump-peak constant)
    bool beta_sandwich_pass;   // Phi^k_{n-}(b0) <= beta_k <= Phi^k_{n+}(b0) with n± = 1+lambda±eps_hat
    double dh_min, dh_max;     // measured derivative window of h
    double phi_c0, phi_holder09, phi_mean;
    double build_seconds, certify_seconds;
};

Report certify(const Artifact& art);

struct DecayFit {
    std::vector<int> Ns;
    std::vector<double> phi_c0, phi_holder09;
    double c0_exponent = 0.0;     // least-squares slope of log c0 vs log N
    bool holder_monotone = false; // non-increasing across the N sequence
};
DecayFit decay_fit(const std::vector<Report>& reports, const std::vector<int>& Ns);

}  // namespace twistlab::denjoy
