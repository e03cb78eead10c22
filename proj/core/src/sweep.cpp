#include "twistlab/sweep.hpp"

#include <cmath>

#include "twistlab/parallel.hpp"

namespace twistlab {

double existence_threshold(double lambda) {
    const double rt = std::sqrt(lambda);
    return (1.0 - rt) * (1.0 - rt);
}

double bohr_bound(double lambda) { return 2.0 * (1.0 + lambda) / (2.0 + lambda); }

double threshold_gap(double lambda) { return bohr_bound(lambda) - existence_threshold(lambda); }

bool Atlas::no_false_breakdown() const {
    for (const auto& c : cells) {
        if (c.kappa <= existence_threshold(c.lambda) && c.status != SolveStatus::converged) {
            return false;
        }
    }
    return true;
}

bool Atlas::rows_monotone(int allowed_noise) const {
    const std::size_t cols = spec.kappas.size();
    for (std::size_t r = 0; r * cols < cells.size(); ++r) {
        int noise = 0;
        bool seen_failure = false;
        for (std::size_t c = 0; c < cols; ++c) {
            const auto& cell = cells[r * cols + c];
            const bool ok = cell.status == SolveStatus::converged;
            if (!ok) seen_failure = true;
            if (ok && seen_failure) ++noise;
        }
        if (noise > allowed_noise) return false;
    }
    return true;
}

Atlas run_sweep(const SweepSpec& spec) {
    Atlas atlas{spec, {}};
    const std::size_t rows = spec.lambdas.size(), cols = spec.kappas.size();
    atlas.cells.resize(rows * cols, SweepCell{0, 0, SolveStatus::max_iter, 0, 0, 0});

    parallel_for(static_cast<long>(rows * cols), [&](long cell_index) {
        const std::size_t r = static_cast<std::size_t>(cell_index) / cols;
        const std::size_t c = static_cast<std::size_t>(cell_index) % cols;
        const double lambda = spec.lambdas[r];
        const double kappa = spec.kappas[c];
        SweepCell out{lambda, kappa, SolveStatus::max_iter, 0, 0.0, 0.0};
        try {
            TwistParams p(lambda, spec.alpha1, 0.0, standard_map_phi(kappa, spec.grid_n));
            SolveOptions opts;
            opts.force = true;
            opts.tol = spec.tol;
            opts.max_iter = spec.max_iter;
            const InvariantGraph g = solve(p, opts);
            out.status = g.status;
            out.iterations = g.iterations;
            out.lip_cert = g.lip_cert;
            out.residual_inv = g.residual_inv;
        } catch (const std::exception&) {
            out.status = SolveStatus::diverged;
        }
        atlas.cells[static_cast<std::size_t>(cell_index)] = out;
    });
    return atlas;
}

}  // namespace twistlab
