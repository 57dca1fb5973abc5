#pragma once

// Shared fixtures and independent oracles for the test suite. The oracles
// deliberately avoid the library's solver code paths: brute-force scans,
// square-system enumeration and grid refinement only.

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "chebclust/envelope.hpp"
#include "chebclust/lp.hpp"

namespace testsupport {

inline chebclust::SignalGroup make_group(const std::vector<double>& times,
                                         const std::vector<std::vector<double>>& rows,
                                         std::vector<std::string> ids = {}) {
    chebclust::SignalGroup group;
    Eigen::VectorXd pts(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) pts[i] = times[i];
    group.grid = chebclust::Grid(pts);
    group.samples.resize(rows.size(), times.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < times.size(); ++c) group.samples(r, c) = rows[r][c];
    }
    if (ids.empty()) {
        for (std::size_t r = 0; r < rows.size(); ++r) ids.push_back("s" + std::to_string(r));
    }
    group.ids = std::move(ids);
    return group;
}

// The worked two-line example: s1 = 1 - 0.5 t, s2 = 0.5 t.
inline chebclust::SignalGroup crossing_lines_group(int n_points) {
    chebclust::Grid grid = chebclust::Grid::uniform(0.0, 1.0, n_points);
    std::vector<double> times(grid.points.data(), grid.points.data() + grid.size());
    std::vector<std::vector<double>> rows(2, std::vector<double>(n_points));
    for (int i = 0; i < n_points; ++i) {
        rows[0][i] = 1.0 - 0.5 * times[i];
        rows[1][i] = 0.5 * times[i];
    }
    return make_group(times, rows, {"s1", "s2"});
}

struct RandomInstance {
    chebclust::SignalGroup group;
    int degree = 0;
};

// Smooth pseudorandom bundles: a line plus three decaying harmonics per
// signal, grids of 5..200 uniform points, degrees 0..4, 2..10 signals.
inline RandomInstance random_instance(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto uniform = [&](double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(rng);
    };
    RandomInstance instance;
    instance.degree = static_cast<int>(rng() % 5);
    const int min_points = std::max(5, instance.degree + 2);
    const int n_points = min_points + static_cast<int>(rng() % (201 - min_points));
    const int n_signals = 2 + static_cast<int>(rng() % 9);

    std::vector<double> times(n_points);
    for (int i = 0; i < n_points; ++i) times[i] = static_cast<double>(i) / (n_points - 1);
    std::vector<std::vector<double>> rows(n_signals, std::vector<double>(n_points));
    for (int s = 0; s < n_signals; ++s) {
        const double c0 = uniform(-2.0, 2.0);
        const double c1 = uniform(-2.0, 2.0);
        double amp[3], freq[3], phase[3];
        for (int h = 0; h < 3; ++h) {
            amp[h] = uniform(0.0, 0.8) / (h + 1);
            freq[h] = 1.0 + static_cast<double>(rng() % 3);
            phase[h] = uniform(0.0, 6.283185307179586);
        }
        for (int i = 0; i < n_points; ++i) {
            double v = c0 + c1 * times[i];
            for (int h = 0; h < 3; ++h) {
                v += amp[h] * std::sin(6.283185307179586 * freq[h] * times[i] + phase[h]);
            }
            rows[s][i] = v;
        }
    }
    instance.group = make_group(times, rows);
    return instance;
}

// Row-subset enumeration oracle for small linear programs: tries every
// square active set, keeps the best feasible solution. Only valid when an
// optimal vertex exists (bounded feasible programs with full-rank columns).
inline std::optional<double> enumerate_lp_optimum(const chebclust::LpProblem& p,
                                                  double feas_tol = 1e-9) {
    const int rows = p.rows();
    const int cols = p.cols();
    if (rows < cols) return std::nullopt;

    std::vector<int> subset(cols);
    for (int i = 0; i < cols; ++i) subset[i] = i;
    std::optional<double> best;

    while (true) {
        Eigen::MatrixXd m(cols, cols);
        Eigen::VectorXd rhs(cols);
        for (int r = 0; r < cols; ++r) {
            m.row(r) = p.constraints.row(subset[r]);
            rhs[r] = p.rhs[subset[r]];
        }
        const double scale = m.cwiseAbs().maxCoeff();
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
        if (scale > 0.0 &&
            lu.matrixLU().diagonal().cwiseAbs().minCoeff() > 1e-10 * scale) {
            const Eigen::VectorXd x = lu.solve(rhs);
            if (((p.constraints * x - p.rhs).array() <= feas_tol).all()) {
                const double objective = p.objective.dot(x);
                if (!best || objective < *best) best = objective;
            }
        }
        int pos = cols - 1;
        while (pos >= 0 && subset[pos] == rows - cols + pos) --pos;
        if (pos < 0) break;
        ++subset[pos];
        for (int i = pos + 1; i < cols; ++i) subset[i] = subset[i - 1] + 1;
    }
    return best;
}

// Nested grid refinement over the coefficient box [-half, half]^dim around
// zero: evaluates the uniform deviation on every lattice point, recenters
// on the best and halves the box. Slow and solver-free on purpose.
inline double nested_grid_minimax(const Eigen::MatrixXd& basis_values,
                                  const Eigen::VectorXd& target, double half_width = 5.0,
                                  int points_per_axis = 21, int rounds = 16) {
    const int dim = static_cast<int>(basis_values.rows());
    Eigen::VectorXd center = Eigen::VectorXd::Zero(dim);
    double best = (target - basis_values.transpose() * center).cwiseAbs().maxCoeff();
    double half = half_width;

    for (int round = 0; round < rounds; ++round) {
        Eigen::VectorXd round_best_coeffs = center;
        double round_best = best;
        std::vector<int> idx(dim, 0);
        const int per = points_per_axis;
        while (true) {
            Eigen::VectorXd coeffs(dim);
            for (int d = 0; d < dim; ++d) {
                coeffs[d] = center[d] - half + 2.0 * half * idx[d] / (per - 1);
            }
            const double dev = (target - basis_values.transpose() * coeffs).cwiseAbs().maxCoeff();
            if (dev < round_best) {
                round_best = dev;
                round_best_coeffs = coeffs;
            }
            int d = 0;
            while (d < dim && ++idx[d] == per) idx[d++] = 0;
            if (d == dim) break;
        }
        center = round_best_coeffs;
        best = round_best;
        half *= 0.5;
    }
    return best;
}

}  // namespace testsupport
