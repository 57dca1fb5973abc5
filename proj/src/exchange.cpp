#include "chebclust/exchange.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "chebclust/envelope.hpp"

namespace chebclust {

void validate(const ReferenceBasis& ref, int grid_size, int expected_size) {
    if (ref.nodes.size() != ref.signs.size()) {
        throw std::invalid_argument("reference basis needs one sign per node");
    }
    if (expected_size >= 0 && ref.size() != expected_size) {
        throw std::invalid_argument("reference basis has " + std::to_string(ref.size()) +
                                    " nodes, expected " + std::to_string(expected_size));
    }
    if (ref.size() < 2) {
        throw std::invalid_argument("reference basis needs at least two nodes");
    }
    for (int i = 0; i < ref.size(); ++i) {
        if (ref.nodes[i] < 0 || ref.nodes[i] >= grid_size) {
            throw std::invalid_argument("reference basis node out of grid range");
        }
        if (ref.signs[i] != 1 && ref.signs[i] != -1) {
            throw std::invalid_argument("reference basis signs must be +1 or -1");
        }
        if (i > 0 && ref.nodes[i] <= ref.nodes[i - 1]) {
            throw std::invalid_argument("reference basis nodes must strictly increase");
        }
        if (i > 0 && ref.signs[i] == ref.signs[i - 1]) {
            throw std::invalid_argument("reference basis signs must strictly alternate");
        }
    }
}

namespace {

// Working node list of the solver. Unlike the public ReferenceBasis it may
// hold one location twice with both signs (a forming double point); entries
// are sorted by node with signs strictly alternating along the sequence.
struct SeqEntry {
    int node;
    int sign;
};
using NodeSeq = std::vector<SeqEntry>;

NodeSeq to_seq(const ReferenceBasis& ref) {
    NodeSeq seq(ref.size());
    for (int i = 0; i < ref.size(); ++i) seq[i] = {ref.nodes[i], ref.signs[i]};
    return seq;
}

// Back to the public shape; empty when the sequence holds a double location.
std::optional<ReferenceBasis> to_reference(const NodeSeq& seq) {
    ReferenceBasis ref;
    for (const auto& e : seq) {
        if (!ref.nodes.empty() && ref.nodes.back() == e.node) return std::nullopt;
        ref.nodes.push_back(e.node);
        ref.signs.push_back(e.sign);
    }
    return ref;
}

void check_seq(const NodeSeq& seq) {
    for (std::size_t i = 1; i < seq.size(); ++i) {
        const bool order_ok = seq[i - 1].node < seq[i].node ||
                              (seq[i - 1].node == seq[i].node && seq[i - 1].sign != seq[i].sign);
        if (!order_ok || seq[i - 1].sign == seq[i].sign) {
            throw std::logic_error("exchange produced an invalid node sequence");
        }
    }
}

// Solves sum_i a_i g_i(t_k) + sign_k * d = target_k over all entries, where
// the target is the band edge the entry is attached to. The matrix is
// size() x size(); size() == n+2 in the solver loop.
InterpolationResult solve_levelling_system(const Envelope& env, const Eigen::MatrixXd& values,
                                           const NodeSeq& seq) {
    const int rows = static_cast<int>(seq.size());
    const int dim = static_cast<int>(values.rows());
    if (rows != dim + 1) {
        throw std::invalid_argument("levelling system needs n+2 nodes");
    }
    Eigen::MatrixXd m(rows, rows);
    Eigen::VectorXd rhs(rows);
    for (int r = 0; r < rows; ++r) {
        m.row(r).head(dim) = values.col(seq[r].node).transpose();
        m(r, dim) = static_cast<double>(seq[r].sign);
        rhs[r] = seq[r].sign > 0 ? env.upper[seq[r].node] : env.lower[seq[r].node];
    }
    const double scale = m.cwiseAbs().maxCoeff();
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
    const double min_pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
    if (scale == 0.0 || min_pivot < kSingularPivotTolerance * scale) {
        throw DegenerateBasisError("levelling system is numerically singular");
    }
    const Eigen::VectorXd solution = lu.solve(rhs);
    InterpolationResult result;
    result.coeffs = solution.head(dim);
    result.d = solution[dim];
    return result;
}

struct DeviationScan {
    int index = 0;        // lowest index attaining the maximum
    int sign = +1;        // edge that dominates there, upper preferred
    double value = 0.0;
    int double_index = -1;  // lowest index where both edges reach the max
};

DeviationScan scan_deviations(const Envelope& env, const Eigen::VectorXd& prototype_values,
                              double tol) {
    const Eigen::VectorXd du = env.upper - prototype_values;
    const Eigen::VectorXd dl = prototype_values - env.lower;
    DeviationScan scan;
    scan.value = std::max(du.maxCoeff(), dl.maxCoeff());
    bool found = false;
    for (int i = 0; i < du.size(); ++i) {
        const double hi = std::max(du[i], dl[i]);
        if (!found && hi == scan.value) {
            scan.index = i;
            scan.sign = du[i] >= dl[i] ? +1 : -1;
            found = true;
        }
        if (scan.double_index < 0 && std::min(du[i], dl[i]) >= scan.value - tol) {
            scan.double_index = i;
        }
    }
    return scan;
}

// One generalized exchange move; the entering pair must not already be in
// the sequence. Entering at an opposite-signed node's location forms a
// double location by replacing the nearest same-signed neighbor.
NodeSeq step_seq(NodeSeq seq, int entering, int entering_sign) {
    const int size = static_cast<int>(seq.size());
    for (const auto& e : seq) {
        if (e.node == entering && e.sign == entering_sign) {
            throw std::invalid_argument("entering point is already a basis node with that sign");
        }
    }

    int twin = -1;  // position of the same location with the opposite sign
    for (int i = 0; i < size; ++i) {
        if (seq[i].node == entering) twin = i;
    }
    if (twin >= 0) {
        // Any neighbor of the twin carries the entering sign; the nearer
        // one on the low side gives way and the entering copy lands in its
        // slot, which keeps the sequence sorted and alternating.
        seq[twin > 0 ? twin - 1 : 1] = {entering, entering_sign};
        check_seq(seq);
        return seq;
    }

    int pos = 0;  // insertion point: first entry past the entering node
    while (pos < size && seq[pos].node < entering) ++pos;
    if (pos > 0 && seq[pos - 1].sign == entering_sign) {
        seq[pos - 1] = {entering, entering_sign};
    } else if (pos < size && seq[pos].sign == entering_sign) {
        seq[pos] = {entering, entering_sign};
    } else if (pos == 0) {
        // Entering below an opposite-signed first node: the far end drops.
        seq.pop_back();
        seq.insert(seq.begin(), {entering, entering_sign});
    } else if (pos == size) {
        seq.erase(seq.begin());
        seq.push_back({entering, entering_sign});
    } else {
        throw std::logic_error("interior entering point with no same-signed neighbor");
    }
    check_seq(seq);
    return seq;
}

}  // namespace

InterpolationResult chebyshev_interpolation(const Envelope& env, const ChebyshevBasis& basis,
                                            const ReferenceBasis& ref) {
    validate(ref, env.grid.size(), basis.dimension() + 1);
    return solve_levelling_system(env, basis.values_on_grid(env.grid), to_seq(ref));
}

MaxDeviation find_max_deviation(const Envelope& env, const ChebyshevBasis& basis,
                                const Eigen::VectorXd& coeffs, double tol) {
    const Eigen::VectorXd values = basis.evaluate_on_grid(coeffs, env.grid);
    const DeviationScan scan = scan_deviations(env, values, tol);
    MaxDeviation out;
    out.index = scan.index;
    out.sign = scan.sign;
    out.value = scan.value;
    const double du = env.upper[scan.index] - values[scan.index];
    const double dl = values[scan.index] - env.lower[scan.index];
    out.double_point = std::min(du, dl) >= scan.value - tol;
    return out;
}

ReferenceBasis exchange_step(const ReferenceBasis& ref, int entering, int entering_sign) {
    if (ref.nodes.empty()) {
        throw std::invalid_argument("reference basis is empty");
    }
    validate(ref, std::max(ref.nodes.back(), entering) + 1, -1);
    if (entering_sign != 1 && entering_sign != -1) {
        throw std::invalid_argument("entering sign must be +1 or -1");
    }
    if (entering < 0) {
        throw std::invalid_argument("entering node must be a grid index");
    }
    for (int i = 0; i < ref.size(); ++i) {
        if (ref.nodes[i] == entering) {
            if (ref.signs[i] == entering_sign) {
                throw std::invalid_argument("entering point is already a basis node");
            }
            // A double node would form; the solver terminates on these via
            // the double-point rule instead of exchanging.
            throw std::logic_error("entering point coincides with an opposite-signed node");
        }
    }
    const NodeSeq result = step_seq(to_seq(ref), entering, entering_sign);
    const std::optional<ReferenceBasis> back = to_reference(result);
    if (!back) {
        throw std::logic_error("exchange unexpectedly produced a double location");
    }
    return *back;
}

std::variant<ReferenceBasis, ImmediateOptimal> initialize_basis(const Envelope& env,
                                                                const ChebyshevBasis& basis) {
    const int n_points = env.grid.size();
    const int dim = basis.dimension();
    if (n_points < dim + 1) {
        throw std::invalid_argument("initialization needs at least n+1 grid points");
    }
    const LowerBoundResult bound = lower_bound(env);
    const Eigen::MatrixXd values = basis.values_on_grid(env.grid);

    // Stage one: n+1 nodes. Widest-gap points come first; missing slots are
    // padded with unused indices spread at even strides, lowest first.
    std::vector<int> nodes;
    if (static_cast<int>(bound.witnesses.size()) >= dim) {
        nodes.assign(bound.witnesses.begin(), bound.witnesses.begin() + dim);
    } else {
        nodes = bound.witnesses;
        std::vector<int> unused;
        for (int i = 0; i < n_points; ++i) {
            if (!std::binary_search(bound.witnesses.begin(), bound.witnesses.end(), i)) {
                unused.push_back(i);
            }
        }
        const int need = dim - static_cast<int>(nodes.size());
        const int last = static_cast<int>(unused.size()) - 1;
        for (int j = 0; j < need; ++j) {
            const int at = need == 1 ? 0 : static_cast<int>(std::lround(
                                               static_cast<double>(j) * last / (need - 1)));
            nodes.push_back(unused[at]);
        }
        std::sort(nodes.begin(), nodes.end());
    }

    // Midline targets at witnesses, edge-offset targets at padded nodes;
    // the two coincide on witnesses, so one rule covers both.
    Eigen::MatrixXd m(dim, dim);
    Eigen::VectorXd rhs(dim);
    for (int r = 0; r < dim; ++r) {
        const int node = nodes[r];
        const int sign = r % 2 == 0 ? +1 : -1;
        m.row(r) = values.col(node).transpose();
        rhs[r] = sign > 0 ? env.upper[node] - bound.delta_star
                          : env.lower[node] + bound.delta_star;
    }
    const double scale = m.cwiseAbs().maxCoeff();
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
    if (scale == 0.0 ||
        lu.matrixLU().diagonal().cwiseAbs().minCoeff() < kSingularPivotTolerance * scale) {
        throw DegenerateBasisError("start-up interpolation system is numerically singular");
    }
    const Eigen::VectorXd coeffs = lu.solve(rhs);

    const Eigen::VectorXd prototype = values.transpose() * coeffs;
    const DeviationScan scan = scan_deviations(env, prototype, kDeviationTolerance);
    if (scan.value <= bound.delta_star + kDeviationTolerance) {
        // Nothing deviates beyond the band lower bound: the midline fit is
        // already optimal and every widest-gap point touches both edges.
        return ImmediateOptimal{coeffs, scan.value, bound.witnesses.front()};
    }

    // The worst point joins the nodes; signs alternate anchored at it.
    std::vector<int> merged = nodes;
    merged.insert(std::upper_bound(merged.begin(), merged.end(), scan.index), scan.index);
    ReferenceBasis ref;
    ref.nodes = merged;
    ref.signs.resize(merged.size());
    const int anchor = static_cast<int>(std::find(merged.begin(), merged.end(), scan.index) -
                                        merged.begin());
    for (int i = 0; i < static_cast<int>(merged.size()); ++i) {
        ref.signs[i] = (i - anchor) % 2 == 0 ? scan.sign : -scan.sign;
    }
    validate(ref, n_points, dim + 1);
    return ref;
}

SolveReport solve_exchange(const Envelope& env, const ChebyshevBasis& basis,
                           const std::optional<ReferenceBasis>& warm_start, long iteration_limit,
                           double tol) {
    const int n_points = env.grid.size();
    const int dim = basis.dimension();
    if (n_points < dim + 1) {
        throw std::invalid_argument("exchange solve needs at least n+1 grid points");
    }
    const Eigen::MatrixXd values = basis.values_on_grid(env.grid);

    SolveReport report;
    NodeSeq seq;
    bool cold_started = false;
    // Level and entering deviation of the reference we last exchanged away
    // from; negative means the current basis did not come from an exchange.
    double prev_level = -1.0;
    double prev_value = 0.0;

    auto cold_start = [&]() -> bool {
        cold_started = true;
        auto init = initialize_basis(env, basis);
        if (std::holds_alternative<ImmediateOptimal>(init)) {
            const auto& opt = std::get<ImmediateOptimal>(init);
            report.coeffs = opt.coeffs;
            report.delta = opt.delta;
            report.reason = TerminationReason::OptimalDoublePoint;
            report.double_point = opt.witness;
            report.iterations = 1;
            report.history.push_back(opt.delta);
            return true;
        }
        seq = to_seq(std::get<ReferenceBasis>(init));
        return false;
    };

    auto warm_is_valid = [&](const ReferenceBasis& ref) {
        try {
            validate(ref, n_points, dim + 1);
            return true;
        } catch (const std::invalid_argument&) {
            return false;
        }
    };

    if (warm_start && warm_is_valid(*warm_start)) {
        report.warm_start_used = true;
        seq = to_seq(*warm_start);
    } else {
        if (warm_start) report.warm_start_fallback = true;
        if (cold_start()) return report;
    }

    while (report.iterations < iteration_limit) {
        InterpolationResult ir;
        try {
            ir = solve_levelling_system(env, values, seq);
        } catch (const DegenerateBasisError&) {
            // A stale warm basis can be singular on custom families; retry
            // cold once and re-raise if the cold basis is just as bad.
            if (cold_started) throw;
            report.warm_start_fallback = true;
            report.history.clear();
            prev_level = -1.0;
            if (cold_start()) return report;
            continue;
        }
        ++report.iterations;
        if (ir.d < 0.0) {
            for (auto& e : seq) e.sign = -e.sign;
            ir.d = -ir.d;
        }
        if (prev_level >= 0.0) {
            // After an exchange the new level is a strict convex combination
            // of the old level and the entering deviation, so only rounding in
            // the levelling solve can land it outside [prev_level, prev_value].
            // Project roundoff-scale violations back; larger ones pass through
            // so a genuine rule break still shows up in the history.
            const double guard = 1e-12 * std::max(1.0, prev_value);
            if (ir.d < prev_level && ir.d > prev_level - guard) {
                ir.d = prev_level;
            } else if (ir.d > prev_value && ir.d < prev_value + guard) {
                ir.d = prev_value;
            }
        }
        report.coeffs = ir.coeffs;
        report.history.push_back(ir.d);

        const Eigen::VectorXd prototype = values.transpose() * ir.coeffs;
        const DeviationScan scan = scan_deviations(env, prototype, tol);

        if (scan.double_index >= 0) {
            // Some point presses on both edges at the full deviation, which
            // pins the optimum there regardless of the basis state.
            report.delta = scan.value;
            report.reason = TerminationReason::OptimalDoublePoint;
            report.double_point = scan.double_index;
            report.certificate = to_reference(seq);
            return report;
        }
        if (scan.value <= ir.d + tol) {
            report.delta = scan.value;
            report.reason = TerminationReason::OptimalAlternation;
            report.certificate = to_reference(seq);
            return report;
        }
        prev_level = ir.d;
        prev_value = scan.value;
        seq = step_seq(seq, scan.index, scan.sign);
        ++report.exchanges;
    }

    // Iteration budget exhausted; report the best coefficients seen.
    if (report.coeffs.size() == dim) {
        const Eigen::VectorXd prototype = values.transpose() * report.coeffs;
        report.delta = scan_deviations(env, prototype, tol).value;
    }
    report.reason = TerminationReason::IterationLimit;
    report.certificate = to_reference(seq);
    return report;
}

}  // namespace chebclust
