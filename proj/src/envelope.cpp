#include "chebclust/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>

namespace chebclust {

void validate(const SignalGroup& group) {
    if (group.samples.rows() < 1) {
        throw std::invalid_argument("signal group needs at least one signal");
    }
    if (group.samples.cols() != group.grid.size()) {
        throw std::invalid_argument("signal rows must match the grid length");
    }
    if (static_cast<int>(group.ids.size()) != group.count()) {
        throw std::invalid_argument("one id per signal row required");
    }
    if (!group.samples.allFinite()) {
        throw std::invalid_argument("signal values must be finite");
    }
    std::unordered_set<std::string> seen;
    for (const auto& id : group.ids) {
        if (!seen.insert(id).second) {
            throw std::invalid_argument("duplicate signal id '" + id + "'");
        }
    }
}

namespace {

// Extremum with the smallest witness id on value ties; signal order in the
// group is not part of the contract, ids are.
void scan_column(const SignalGroup& group, int col, double& upper, double& lower,
                 std::string& upper_id, std::string& lower_id) {
    int hi = 0, lo = 0;
    for (int r = 1; r < group.count(); ++r) {
        const double v = group.samples(r, col);
        if (v > group.samples(hi, col) ||
            (v == group.samples(hi, col) && group.ids[r] < group.ids[hi])) {
            hi = r;
        }
        if (v < group.samples(lo, col) ||
            (v == group.samples(lo, col) && group.ids[r] < group.ids[lo])) {
            lo = r;
        }
    }
    upper = group.samples(hi, col);
    lower = group.samples(lo, col);
    upper_id = group.ids[hi];
    lower_id = group.ids[lo];
}

}  // namespace

Envelope build_envelope(const SignalGroup& group) {
    validate(group);
    const int n = group.grid.size();
    Envelope env;
    env.grid = group.grid;
    env.upper.resize(n);
    env.lower.resize(n);
    env.upper_witness.resize(n);
    env.lower_witness.resize(n);
    for (int i = 0; i < n; ++i) {
        scan_column(group, i, env.upper[i], env.lower[i], env.upper_witness[i],
                    env.lower_witness[i]);
    }
    return env;
}

SignalGroup apply_group_delta(const SignalGroup& group, const Eigen::MatrixXd& added_rows,
                              const std::vector<std::string>& added_ids,
                              const std::vector<std::string>& removed_ids) {
    if (added_rows.rows() != static_cast<Eigen::Index>(added_ids.size())) {
        throw std::invalid_argument("one id per added row required");
    }
    if (added_rows.rows() > 0 && added_rows.cols() != group.grid.size()) {
        throw std::invalid_argument("added rows must match the grid length");
    }
    std::unordered_set<std::string> removed(removed_ids.begin(), removed_ids.end());
    for (const auto& id : removed_ids) {
        if (std::find(group.ids.begin(), group.ids.end(), id) == group.ids.end()) {
            throw std::out_of_range("cannot remove unknown signal id '" + id + "'");
        }
    }

    SignalGroup out;
    out.grid = group.grid;
    const int kept = group.count() - static_cast<int>(removed.size());
    out.samples.resize(kept + added_rows.rows(), group.grid.size());
    int row = 0;
    for (int r = 0; r < group.count(); ++r) {
        if (removed.count(group.ids[r])) continue;
        out.samples.row(row) = group.samples.row(r);
        out.ids.push_back(group.ids[r]);
        ++row;
    }
    for (Eigen::Index r = 0; r < added_rows.rows(); ++r) {
        out.samples.row(row) = added_rows.row(r);
        out.ids.push_back(added_ids[r]);
        ++row;
    }
    validate(out);
    return out;
}

EnvelopeUpdate update_envelope(const Envelope& env, const SignalGroup& group,
                               const Eigen::MatrixXd& added_rows,
                               const std::vector<std::string>& added_ids,
                               const std::vector<std::string>& removed_ids) {
    const SignalGroup modified = apply_group_delta(group, added_rows, added_ids, removed_ids);
    std::unordered_set<std::string> removed(removed_ids.begin(), removed_ids.end());

    EnvelopeUpdate out;
    out.envelope = env;
    out.envelope.grid = modified.grid;
    bool changed = false;
    const int n = env.grid.size();
    for (int i = 0; i < n; ++i) {
        double up = env.upper[i], lo = env.lower[i];
        std::string up_id = env.upper_witness[i], lo_id = env.lower_witness[i];
        if (removed.count(up_id) || removed.count(lo_id)) {
            // A witness left: rescan this point from the survivors.
            scan_column(modified, i, up, lo, up_id, lo_id);
        } else {
            // Surviving witnesses stay valid; new rows can still displace
            // them, handled below with the same tie rule as a full scan.
            for (Eigen::Index r = 0; r < added_rows.rows(); ++r) {
                const double v = added_rows(r, i);
                if (v > up || (v == up && added_ids[r] < up_id)) {
                    up = v;
                    up_id = added_ids[r];
                }
                if (v < lo || (v == lo && added_ids[r] < lo_id)) {
                    lo = v;
                    lo_id = added_ids[r];
                }
            }
        }
        if (up != out.envelope.upper[i] || lo != out.envelope.lower[i]) changed = true;
        out.envelope.upper[i] = up;
        out.envelope.lower[i] = lo;
        out.envelope.upper_witness[i] = up_id;
        out.envelope.lower_witness[i] = lo_id;
    }
    out.changed = changed;
    return out;
}

LowerBoundResult lower_bound(const Envelope& env, double tol) {
    LowerBoundResult result;
    const Eigen::VectorXd gap = env.upper - env.lower;
    const double max_gap = gap.maxCoeff();
    result.delta_star = 0.5 * max_gap;
    for (int i = 0; i < gap.size(); ++i) {
        if (gap[i] >= max_gap - tol) result.witnesses.push_back(i);
    }
    return result;
}

bool no_update_needed(const Envelope& env, const Eigen::VectorXd& prototype_values, double tol) {
    if (prototype_values.size() != env.grid.size()) {
        throw std::invalid_argument("prototype values must match the grid length");
    }
    const double dev = std::max((env.upper - prototype_values).maxCoeff(),
                                (prototype_values - env.lower).maxCoeff());
    const double max_gap = (env.upper - env.lower).maxCoeff();
    return max_gap >= 2.0 * dev - tol;
}

}  // namespace chebclust
