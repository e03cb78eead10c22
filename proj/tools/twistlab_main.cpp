// twistlab: invariant graphs of dissipative twist maps from the command line.
//
// Subcommands: solve, rotnum, tune, cone-check, arnold, denjoy, sweep, rerun.
// Every run drops a manifest.json next to its outputs; `twistlab rerun
// <manifest>` replays it byte-for-byte. TWISTLAB_THREADS caps the worker pool
// (outputs do not depend on it).

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <algorithm>
#include <filesystem>
#include <limits>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "twistlab/arnold.hpp"
#include "twistlab/denjoy.hpp"
#include "twistlab/graphsolve.hpp"
#include "twistlab/sweep.hpp"
#include "twistlab/tuner.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace twistlab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitThreshold = 2;
constexpr int kExitNoConverge = 3;
constexpr int kExitUsage = 64;

struct CommonSolveArgs {
    double lambda = 0.25;
    double kappa = 0.2;
    std::string phi_file;
    double alpha1 = 0.38;
    double alpha2 = 0.0;
    int grid = 4096;
    double tol = 1e-10;
    int max_iter = 2000;
    bool force = false;
};

void add_solve_args(CLI::App* cmd, CommonSolveArgs& a) {
    cmd->add_option("--lambda", a.lambda, "dissipation in (0,1)")->check(CLI::Range(1e-9, 1.0));
    cmd->add_option("--kappa", a.kappa, "standard-map kick amplitude");
    cmd->add_option("--phi-file", a.phi_file, "CSV x,value with a custom zero-mean kick");
    cmd->add_option("--alpha1", a.alpha1, "horizontal translation");
    cmd->add_option("--alpha2", a.alpha2, "vertical translation");
    cmd->add_option("--n", a.grid, "grid size");
    cmd->add_option("--tol", a.tol, "solver tolerance");
    cmd->add_option("--max-iter", a.max_iter, "iteration cap");
    cmd->add_flag("--force", a.force, "iterate past the existence threshold");
}

PeriodicFn load_phi(const CommonSolveArgs& a) {
    if (a.phi_file.empty()) return standard_map_phi(a.kappa, a.grid);
    std::ifstream in(a.phi_file);
    if (!in) throw CLI::ValidationError("--phi-file", "cannot open " + a.phi_file);
    std::string line;
    std::getline(in, line);  // header
    std::vector<double> values;
    while (std::getline(in, line)) {
        const auto comma = line.find(',');
        if (comma == std::string::npos) continue;
        values.push_back(std::stod(line.substr(comma + 1)));
    }
    PeriodicFn phi{std::move(values)};
    if (std::abs(mean(phi)) > 1e-10) {
        throw CLI::ValidationError(
            "--phi-file", "kick must have zero mean; subtract its mean (" +
                              std::to_string(mean(phi)) + ") and re-emit the file");
    }
    return phi;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

void write_manifest(const fs::path& dir, const std::string& command,
                    const std::vector<std::string>& args) {
    json m;
    m["tool"] = "twistlab";
    m["version"] = "0.1.0";
    m["command"] = command;
    m["args"] = args;
    write_text(dir / "manifest.json", m.dump(2) + "\n");
}

void write_periodic_csv(const fs::path& path, const PeriodicFn& f) {
    std::ofstream out(path, std::ios::binary);
    write_csv(out, f);
}

json solve_report(const TwistParams& p, const InvariantGraph& g, double rho) {
    json r;
    r["lambda"] = p.lambda;
    r["alpha1"] = p.alpha1;
    r["alpha2"] = p.alpha2;
    r["lip_phi"] = lip_seminorm(p.phi);
    r["converged"] = g.status == SolveStatus::converged;
    r["iterations"] = g.iterations;
    r["residual_inv"] = g.residual_inv;
    r["residual_fe"] = g.residual_fe;
    r["lip_cert"] = g.lip_cert;
    r["rho"] = rho;
    return r;
}

int dispatch(const std::vector<std::string>& args);

// Flat key=value config support: keys mirror long flags and are appended as
// arguments unless the flag was already given, so explicit flags win.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
    std::string path;
    for (std::size_t i = 0; i + 1 < args.size(); ++i) {
        if (args[i] == "--config") path = args[i + 1];
    }
    if (path.empty()) return args;
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("--config", "cannot open " + path);
    std::vector<std::string> out = args;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = "--" + line.substr(0, eq);
        if (std::find(out.begin(), out.end(), key) == out.end()) {
            out.push_back(key);
            out.push_back(line.substr(eq + 1));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

int cmd_solve(const CommonSolveArgs& a, const std::string& out_dir, bool run_oracle,
              const std::vector<std::string>& raw_args) {
    const fs::path dir(out_dir);
    fs::create_directories(dir);
    const TwistParams p(a.lambda, a.alpha1, a.alpha2, load_phi(a));
    SolveOptions opts;
    opts.tol = a.tol;
    opts.max_iter = a.max_iter;
    opts.force = a.force;
    const InvariantGraph g = solve(p, opts);
    const double rho =
        g.g ? rotation_number(*g.g, 0.0, 1000000, 1e-9).rho : std::numeric_limits<double>::quiet_NaN();

    json report = solve_report(p, g, rho);
    if (run_oracle) {
        const PeriodicFn oracle = attractor_oracle(p);
        double worst = 0.0;
        for (int i = 0; i < oracle.size(); ++i) {
            const double x = static_cast<double>(i) / oracle.size();
            worst = std::max(worst, std::abs(oracle.sample(i) - g.psi(x)));
        }
        report["oracle_sup_diff"] = worst;
        write_periodic_csv(dir / "oracle.csv", oracle);
    }
    write_periodic_csv(dir / "graph.csv", g.psi);
    write_text(dir / "report.json", report.dump(2) + "\n");
    write_manifest(dir, "solve", raw_args);
    if (g.status == SolveStatus::converged) return kExitOk;
    return kExitNoConverge;
}

int cmd_rotnum(const CommonSolveArgs& a, const std::string& out_dir, long n_iter, double x0,
               const std::vector<std::string>& raw_args) {
    const fs::path dir(out_dir);
    fs::create_directories(dir);
    const TwistParams p(a.lambda, a.alpha1, a.alpha2, load_phi(a));
    SolveOptions opts;
    opts.tol = a.tol;
    opts.force = a.force;
    const InvariantGraph g = solve(p, opts);
    const RotationEstimate est = rotation_number(g.g.value(), x0, n_iter, 1e-9);
    json r;
    r["rho"] = est.rho;
    r["converged"] = est.converged;
    r["n_iter"] = n_iter;
    write_text(dir / "rotnum.json", r.dump(2) + "\n");
    write_manifest(dir, "rotnum", raw_args);
    return kExitOk;
}

int cmd_tune(const CommonSolveArgs& a, const std::string& out_dir, double omega,
             const std::string& vary, double tune_tol, long n_iter,
             const std::vector<std::string>& raw_args) {
    const fs::path dir(out_dir);
    fs::create_directories(dir);
    const TwistParams p(a.lambda, a.alpha1, a.alpha2, load_phi(a));
    RhoOptions opts;
    opts.n_iter = n_iter;
    opts.solve.tol = a.tol;
    const TuneResult res =
        vary == "alpha2" ? tune_alpha2(p, omega, tune_tol, opts) : tune_alpha1(p, omega, tune_tol, opts);
    json r;
    r["target"] = omega;
    r["achieved"] = res.achieved_rho;
    r["parameter"] = vary;
    r["value"] = res.value;
    r["iterations"] = res.bisections;
    write_text(dir / "tune.json", r.dump(2) + "\n");
    write_manifest(dir, "tune", raw_args);
    return kExitOk;
}

int cmd_cone(const CommonSolveArgs& a, const std::string& out_dir, int k_max, double jump_tol,
             const std::vector<std::string>& raw_args) {
    const fs::path dir(out_dir);
    fs::create_directories(dir);
    const TwistParams p(a.lambda, a.alpha1, a.alpha2, load_phi(a));
    SolveOptions opts;
    opts.tol = a.tol;
    opts.force = a.force;
    const InvariantGraph g = solve(p, opts);
    ConeOptions copts;
    copts.k_max = k_max;
    const ConeReport rep = cone_check(p, g, copts);
    const auto jumps = slope_discontinuity_scan(g.psi, jump_tol);

    json r;
    r["zeta_hat"] = rep.zeta_hat;
    r["beta"] = rep.beta;
    r["aperture_bound"] = rep.aperture_bound;
    r["analytic_pass"] = rep.analytic_pass;
    r["pointwise_pass"] = rep.pointwise_pass;
    r["violations"] = rep.violations.size();
    double worst = 0.0;
    for (const auto& v : rep.violations) worst = std::min(worst, v.margin);
    r["worst_margin"] = worst;
    r["final_aperture"] = rep.final_aperture;
    r["slope_jumps"] = jumps.size();
    write_text(dir / "cone.json", r.dump(2) + "\n");
    write_periodic_csv(dir / "slopes.csv", rep.slope_field);
    write_manifest(dir, "cone-check", raw_args);
    return kExitOk;
}

int cmd_arnold(int n, double lambda, double alpha1, const std::string& scan,
               const std::string& decay, int grid, const std::string& out_dir,
               const std::vector<std::string>& raw_args) {
    const fs::path dir(out_dir);
    fs::create_directories(dir);
    const arnold::Family fam(n, alpha1, lambda);
    json r;
    r["n"] = n;
    r["lambda"] = lambda;
    r["alpha1"] = alpha1;
    r["functional_residual"] = fam.functional_residual();

    if (!scan.empty()) {
        double lo, hi;
        int steps;
        if (std::sscanf(scan.c_str(), "%lf,%lf,%d", &lo, &hi, &steps) != 3) {
            throw CLI::ValidationError("--scan", "expected lo,hi,steps");
        }
        const auto plateaus = arnold::plateau_scan(n, lo, hi, steps);
        std::string csv = "a1_lo,a1_hi,p,q\n";
        char buf[128];
        for (const auto& pl : plateaus) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%ld,%ld\n", pl.a1_lo, pl.a1_hi, pl.p, pl.q);
            csv += buf;
        }
        write_text(dir / "plateaus.csv", csv);
        r["plateaus"] = plateaus.size();
    }
    if (!decay.empty()) {
        std::vector<int> ns;
        std::stringstream ss(decay);
        std::string tok;
        while (std::getline(ss, tok, ',')) ns.push_back(std::stoi(tok));
        const auto table = arnold::norm_decay(lambda, ns, grid);
        std::string csv = "n,c0,c1,holder\n";
        char buf[160];
        for (const auto& row : table.rows) {
            std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\n", row.n, row.c0, row.c1, row.holder);
            csv += buf;
        }
        write_text(dir / "decay.csv", csv);
        r["c0_exponent"] = table.c0_exponent;
        r["c1_exponent"] = table.c1_exponent;
    }
    write_text(dir / "arnold.json", r.dump(2) + "\n");
    write_manifest(dir, "arnold", raw_args);
    return kExitOk;
}

int cmd_denjoy(const denjoy::Config& cfg, const std::string& out_dir,
               const std::vector<std::string>& raw_args) {
    const fs::path dir(out_dir);
    fs::create_directories(dir);
    const denjoy::Artifact art = denjoy::build(cfg);
    const denjoy::Report rep = denjoy::certify(art);

    write_periodic_csv(dir / "g.csv", art.g_grid.displacement());
    write_periodic_csv(dir / "h.csv", art.h_grid.displacement());
    write_periodic_csv(dir / "psi.csv", art.psi);
    write_periodic_csv(dir / "phi.csv", art.phi);
    write_periodic_csv(dir / "graph.csv",
                       PeriodicFn::from_function([&](double x) { return art.graph_exact(x); },
                                                 cfg.grid_n));

    json r;
    r["omega"] = cfg.omega;
    r["lambda"] = cfg.lambda;
    r["N"] = cfg.N;
    r["K_requested"] = cfg.K;
    r["K"] = art.cfg.K;  // nearest truncation that closes into a circle map
    r["beta0"] = art.cfg.beta0_or_default();
    r["alphaN"] = art.alphaN;
    r["slope_floor"] = art.slope_floor;
    r["k_lo"] = art.k_lo;
    r["lip_psi_exact"] = rep.lip_psi_exact;
    r["lip_phi_grid"] = rep.lip_phi_grid;
    r["lip_threshold"] = rep.lip_threshold;
    r["lip_pass"] = rep.lip_pass;
    r["rho"] = rep.rho;
    r["rho_err"] = rep.rho_err;
    r["rho_pass"] = rep.rho_pass;
    r["beta_plus_err"] = rep.beta_plus_err;
    r["beta_minus_err"] = rep.beta_minus_err;
    r["beta_pass"] = rep.beta_pass;
    r["beta_plus_tracking"] = rep.beta_plus_tracking;
    r["beta_minus_tracking"] = rep.beta_minus_tracking;
    r["slope_agree_max"] = rep.slope_agree_max;
    r["slope_agree_pass"] = rep.slope_agree_pass;
    r["psi_jump_x0"] = rep.psi_jump_x0;
    r["psi_jump_floor"] = rep.psi_jump_floor;
    r["jump_pass"] = rep.jump_pass;
    r["quotient_err_max"] = rep.quotient_err_max;
    r["invariance_exact"] = rep.invariance_exact;
    r["seam_defect"] = rep.seam_defect;
    r["interval_image_defect"] = rep.interval_image_defect;
    r["mean_defect_Ah_Ag"] = rep.mean_defect_Ah_Ag;
    r["m_window_scaled"] = rep.m_window_scaled;
    r["m_window_1_over_N"] = rep.m_window_1_over_N;
    r["beta_sandwich_pass"] = rep.beta_sandwich_pass;
    r["dh_min"] = rep.dh_min;
    r["dh_max"] = rep.dh_max;
    r["phi_c0"] = rep.phi_c0;
    r["phi_holder09"] = rep.phi_holder09;
    r["phi_mean"] = rep.phi_mean;
    write_text(dir / "report.json", r.dump(2) + "\n");
    write_manifest(dir, "denjoy", raw_args);
    std::cerr << "denjoy: build " << rep.build_seconds << " s, certify " << rep.certify_seconds
              << " s\n";
    return kExitOk;
}

int cmd_sweep(const std::string& lambdas, const std::string& kappa_range, double alpha1, int grid,
              int max_iter, const std::string& out_dir, const std::vector<std::string>& raw_args) {
    const fs::path dir(out_dir);
    fs::create_directories(dir);
    SweepSpec spec;
    spec.alpha1 = alpha1;
    spec.grid_n = grid;
    spec.max_iter = max_iter;
    {
        std::stringstream ss(lambdas);
        std::string tok;
        while (std::getline(ss, tok, ',')) spec.lambdas.push_back(std::stod(tok));
    }
    {
        double lo, hi;
        int steps;
        if (std::sscanf(kappa_range.c_str(), "%lf:%lf:%d", &lo, &hi, &steps) != 3 || steps < 2) {
            throw CLI::ValidationError("--kappa-range", "expected lo:hi:steps");
        }
        for (int i = 0; i < steps; ++i) spec.kappas.push_back(lo + (hi - lo) * i / (steps - 1));
    }
    const Atlas atlas = run_sweep(spec);

    std::string csv = "lambda,kappa,converged,iterations,lip_cert,residual_inv\n";
    char buf[200];
    for (const auto& c : atlas.cells) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d,%d,%.17g,%.17g\n", c.lambda, c.kappa,
                      c.status == SolveStatus::converged ? 1 : 0, c.iterations, c.lip_cert,
                      c.residual_inv);
        csv += buf;
    }
    write_text(dir / "atlas.csv", csv);

    std::string curves = "lambda,lip_threshold,bohr\n";
    for (double l : spec.lambdas) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", l, existence_threshold(l), bohr_bound(l));
        curves += buf;
    }
    write_text(dir / "curves.csv", curves);

    json r;
    r["no_false_breakdown"] = atlas.no_false_breakdown();
    r["rows_monotone"] = atlas.rows_monotone();
    json deltas = json::object();
    for (double l : spec.lambdas) {
        char key[32];
        std::snprintf(key, sizeof key, "%g", l);
        deltas[key] = threshold_gap(l);
    }
    r["delta"] = deltas;
    write_text(dir / "report.json", r.dump(2) + "\n");
    write_manifest(dir, "sweep", raw_args);
    return kExitOk;
}

int cmd_rerun(const std::string& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) {
        std::cerr << "rerun: cannot open " << manifest_path << "\n";
        return kExitUsage;
    }
    json m;
    in >> m;
    std::vector<std::string> args = m.at("args").get<std::vector<std::string>>();
    return dispatch(args);
}

// ---------------------------------------------------------------------------

int dispatch(const std::vector<std::string>& args) {
    CLI::App app{"invariant graphs of dissipative twist maps", "twistlab"};
    app.require_subcommand(1);

    CommonSolveArgs sa;
    std::string out_dir = ".";
    bool run_oracle = false;

    auto* solve_cmd = app.add_subcommand("solve", "solve for the invariant graph");
    add_solve_args(solve_cmd, sa);
    solve_cmd->add_option("--out", out_dir, "output directory");
    solve_cmd->add_flag("--oracle", run_oracle, "cross-check against forward iteration");
    std::string solve_cmd_config;
    solve_cmd->add_option("--config", solve_cmd_config, "flat key=value file; flags override it");

    CommonSolveArgs ra;
    std::string rot_out = ".";
    long rot_iter = 1000000;
    double rot_x0 = 0.0;
    auto* rot_cmd = app.add_subcommand("rotnum", "rotation number of the induced circle map");
    add_solve_args(rot_cmd, ra);
    rot_cmd->add_option("--out", rot_out, "output directory");
    rot_cmd->add_option("--n-iter", rot_iter, "orbit length");
    rot_cmd->add_option("--x0", rot_x0, "orbit seed");
    std::string rot_cmd_config;
    rot_cmd->add_option("--config", rot_cmd_config, "flat key=value file; flags override it");

    CommonSolveArgs ta;
    std::string tune_out = ".";
    double omega = 0.6180339887498949;
    std::string vary = "alpha1";
    double tune_tol = 1e-6;
    long tune_iter = 1000000;
    auto* tune_cmd = app.add_subcommand("tune", "match a target rotation number");
    add_solve_args(tune_cmd, ta);
    tune_cmd->add_option("--out", tune_out, "output directory");
    tune_cmd->add_option("--omega", omega, "target rotation number")->required();
    tune_cmd->add_option("--vary", vary, "alpha1 or alpha2")
        ->check(CLI::IsMember({"alpha1", "alpha2"}));
    tune_cmd->add_option("--tune-tol", tune_tol, "|rho - omega| target");
    tune_cmd->add_option("--n-iter", tune_iter, "orbit length per rho evaluation");
    std::string tune_cmd_config;
    tune_cmd->add_option("--config", tune_cmd_config, "flat key=value file; flags override it");

    CommonSolveArgs ca;
    std::string cone_out = ".";
    int kmax = 40;
    double jump_tol = 0.05;
    auto* cone_cmd = app.add_subcommand("cone-check", "cone condition and slope diagnostics");
    add_solve_args(cone_cmd, ca);
    cone_cmd->add_option("--out", cone_out, "output directory");
    cone_cmd->add_option("--kmax", kmax, "pushforward depth for the slope field");
    cone_cmd->add_option("--jump-tol", jump_tol, "slope discontinuity threshold");
    std::string cone_cmd_config;
    cone_cmd->add_option("--config", cone_cmd_config, "flat key=value file; flags override it");

    int arn_n = 100;
    double arn_lambda = 0.25, arn_alpha1 = 0.0;
    std::string arn_scan, arn_decay;
    int arn_grid = 4096;
    std::string arn_out = ".";
    auto* arn_cmd = app.add_subcommand("arnold", "sine family: residuals, plateaus, decay");
    arn_cmd->add_option("--n", arn_n, "family index");
    arn_cmd->add_option("--lambda", arn_lambda, "dissipation");
    arn_cmd->add_option("--alpha1", arn_alpha1, "rotation parameter");
    arn_cmd->add_option("--scan", arn_scan, "plateau scan lo,hi,steps");
    arn_cmd->add_option("--decay", arn_decay, "comma list of n for norm decay");
    arn_cmd->add_option("--grid", arn_grid, "measurement grid");
    arn_cmd->add_option("--out", arn_out, "output directory");
    std::string arn_cmd_config;
    arn_cmd->add_option("--config", arn_cmd_config, "flat key=value file; flags override it");

    denjoy::Config dc;
    std::string den_out = ".";
    auto* den_cmd = app.add_subcommand("denjoy", "wandering-interval construction");
    den_cmd->add_option("--omega", dc.omega, "irrational rotation number");
    den_cmd->add_option("--lambda", dc.lambda, "dissipation");
    den_cmd->add_option("--N", dc.N, "length-law offset");
    den_cmd->add_option("--K", dc.K, "index truncation");
    den_cmd->add_option("--eps", dc.eps, "length-law exponent");
    den_cmd->add_option("--beta0", dc.beta0, "seed slope (0 = automatic)");
    den_cmd->add_option("--grid", dc.grid_n, "export grid");
    den_cmd->add_option("--out", den_out, "output directory");
    std::string den_cmd_config;
    den_cmd->add_option("--config", den_cmd_config, "flat key=value file; flags override it");

    std::string sw_lambdas = "0.04,0.1,0.25,0.5,0.81";
    std::string sw_kappas = "0.0:1.4:15";
    double sw_alpha1 = 0.38;
    int sw_grid = 1024, sw_max_iter = 600;
    std::string sw_out = ".";
    auto* sw_cmd = app.add_subcommand("sweep", "breakdown atlas over (lambda, kappa)");
    sw_cmd->add_option("--lambdas", sw_lambdas, "comma list of lambda");
    sw_cmd->add_option("--kappa-range", sw_kappas, "lo:hi:steps");
    sw_cmd->add_option("--alpha1", sw_alpha1, "horizontal translation");
    sw_cmd->add_option("--n", sw_grid, "grid size per cell");
    sw_cmd->add_option("--max-iter", sw_max_iter, "iteration cap per cell");
    sw_cmd->add_option("--out", sw_out, "output directory");
    std::string sw_cmd_config;
    sw_cmd->add_option("--config", sw_cmd_config, "flat key=value file; flags override it");

    std::string manifest_path;
    auto* rerun_cmd = app.add_subcommand("rerun", "replay a manifest");
    rerun_cmd->add_option("manifest", manifest_path, "path to manifest.json")->required();

    std::vector<std::string> expanded;
    try {
        expanded = expand_config(args);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "twistlab: " << e.what() << "\n";
        return kExitUsage;
    }
    std::vector<std::string> reversed(expanded.rbegin(), expanded.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (solve_cmd->parsed()) return cmd_solve(sa, out_dir, run_oracle, args);
        if (rot_cmd->parsed()) return cmd_rotnum(ra, rot_out, rot_iter, rot_x0, args);
        if (tune_cmd->parsed()) return cmd_tune(ta, tune_out, omega, vary, tune_tol, tune_iter, args);
        if (cone_cmd->parsed()) return cmd_cone(ca, cone_out, kmax, jump_tol, args);
        if (arn_cmd->parsed())
            return cmd_arnold(arn_n, arn_lambda, arn_alpha1, arn_scan, arn_decay, arn_grid, arn_out, args);
        if (den_cmd->parsed()) return cmd_denjoy(dc, den_out, args);
        if (sw_cmd->parsed())
            return cmd_sweep(sw_lambdas, sw_kappas, sw_alpha1, sw_grid, sw_max_iter, sw_out, args);
        if (rerun_cmd->parsed()) return cmd_rerun(manifest_path);
    } catch (const ThresholdError& e) {
        std::cerr << "twistlab: " << e.what() << "\n";
        return kExitThreshold;
    } catch (const NonConvergenceError& e) {
        std::cerr << "twistlab: " << e.what() << "\n";
        return kExitNoConverge;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "twistlab: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "twistlab: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "twistlab: " << e.what() << "\n";
        return 1;
    }
    return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return dispatch(args);
}
