#include "chebclust/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <stdexcept>
#include <unordered_set>

#include "chebclust/lp.hpp"
#include "chebclust/optimality.hpp"

namespace chebclust {

double chebyshev_distance(const Eigen::VectorXd& signal_values,
                          const Eigen::VectorXd& prototype_values) {
    if (signal_values.size() != prototype_values.size()) {
        throw std::invalid_argument("distance operands must share the grid");
    }
    return (signal_values - prototype_values).cwiseAbs().maxCoeff();
}

std::vector<int> initialize_assignment(const SignalGroup& group, int k, std::uint64_t seed) {
    validate(group);
    const int count = group.count();
    if (k < 1 || k > count) {
        throw std::invalid_argument("cluster count must lie between 1 and the signal count");
    }

    std::mt19937_64 rng(seed);
    std::vector<int> anchors;
    anchors.push_back(static_cast<int>(rng() % static_cast<std::uint64_t>(count)));

    // Farthest-first sweep: the next anchor maximizes the distance to the
    // anchors already chosen; ties keep the lowest row.
    std::vector<double> nearest(count, std::numeric_limits<double>::infinity());
    while (static_cast<int>(anchors.size()) < k) {
        const int latest = anchors.back();
        int best = -1;
        for (int r = 0; r < count; ++r) {
            nearest[r] = std::min(nearest[r], chebyshev_distance(group.samples.row(r).transpose(),
                                                                 group.samples.row(latest).transpose()));
            if (std::find(anchors.begin(), anchors.end(), r) != anchors.end()) continue;
            if (best < 0 || nearest[r] > nearest[best]) best = r;
        }
        anchors.push_back(best);
    }

    std::vector<int> assignment(count);
    for (int r = 0; r < count; ++r) {
        int best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) {
            const double d = chebyshev_distance(group.samples.row(r).transpose(),
                                                group.samples.row(anchors[c]).transpose());
            if (d < best_d) {
                best_d = d;
                best = c;
            }
        }
        assignment[r] = best;
    }
    return assignment;
}

namespace {

SignalGroup subgroup(const SignalGroup& group, const std::vector<int>& rows) {
    SignalGroup out;
    out.grid = group.grid;
    out.samples.resize(rows.size(), group.grid.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.samples.row(i) = group.samples.row(rows[i]);
        out.ids.push_back(group.ids[rows[i]]);
    }
    return out;
}

// True when every certificate point of the incumbent still presses on its
// edge at the (freshly computed) maximal deviation with its old value.
bool certificate_survives(const Prototype& proto, const Envelope& env, double delta_new,
                          double tol) {
    const double slack = tol * std::max(1.0, std::max(delta_new, proto.delta));
    if (delta_new > proto.delta + slack) return false;

    auto edge_dev = [&](int node, int sign) {
        return sign > 0 ? env.upper[node] - proto.grid_values[node]
                        : proto.grid_values[node] - env.lower[node];
    };
    auto holds = [&](int node, int sign) {
        const double dev = edge_dev(node, sign);
        return dev >= delta_new - slack && std::abs(dev - proto.delta) <= slack;
    };

    if (proto.double_point) {
        return holds(*proto.double_point, +1) && holds(*proto.double_point, -1);
    }
    if (proto.certificate) {
        for (int i = 0; i < proto.certificate->size(); ++i) {
            if (!holds(proto.certificate->nodes[i], proto.certificate->signs[i])) return false;
        }
        return true;
    }
    return false;
}

Prototype solve_prototype(const Envelope& env, const ClusterConfig& config,
                          const std::optional<ReferenceBasis>& warm, long& iterations_out,
                          bool& warm_fallback_out) {
    Prototype proto;
    iterations_out = 0;
    warm_fallback_out = false;

    std::optional<SolveReport> report;
    if (config.solver != SolverChoice::Lp) {
        report = solve_exchange(env, config.basis, warm, config.solver_iteration_limit,
                                config.tol);
        if (report->reason == TerminationReason::IterationLimit) {
            throw std::runtime_error("exchange solver hit its iteration limit");
        }
    }
    if (config.solver != SolverChoice::Exchange) {
        const LpSolution lp = solve_simplex(build_lp(env, config.basis));
        if (lp.status != LpStatus::Optimal) {
            throw std::runtime_error("band approximation program did not reach optimality");
        }
        if (report && std::abs(report->delta - lp.objective) > 1e-7) {
            throw std::runtime_error("exchange and simplex deviations disagree beyond 1e-7");
        }
        if (!report) {
            proto.coeffs = lp.values.head(config.basis.dimension());
            proto.delta = lp.objective;
        }
    }
    if (report) {
        proto.coeffs = report->coeffs;
        proto.delta = report->delta;
        proto.certificate = report->certificate;
        proto.double_point = report->double_point;
        iterations_out = report->iterations;
        warm_fallback_out = report->warm_start_fallback;
    }
    proto.grid_values = config.basis.evaluate_on_grid(proto.coeffs, env.grid);

    const DeviationProfile profile =
        deviation_profile(env, config.basis, proto.coeffs, config.tol);
    proto.alternation_ok = check_alternation(profile, config.basis.degree()).optimal;
    return proto;
}

}  // namespace

void update_prototypes(ClusteringState& state, const SignalGroup& group,
                       const ClusterConfig& config) {
    const int k = config.k;
    state.members.resize(k);
    state.groups.resize(k);
    state.envelopes.resize(k);
    state.prototypes.resize(k);

    for (int c = 0; c < k; ++c) {
        std::vector<int> members;
        for (int r = 0; r < group.count(); ++r) {
            if (state.assignment[r] == c) members.push_back(r);
        }
        const std::vector<int>& old_members = state.members[c];
        const bool had_prototype = state.prototypes[c].coeffs.size() > 0;

        if (members.empty()) {
            // Repairs happen in the assignment sweep; an empty cluster here
            // simply has nothing to solve.
            state.members[c].clear();
            state.groups[c] = SignalGroup{};
            state.prototypes[c] = Prototype{};
            continue;
        }

        auto log = [&](EventKind kind, long iters, double delta) {
            ClusterEvent ev;
            ev.outer_iteration = state.outer_iterations;
            ev.kind = kind;
            ev.cluster = c;
            ev.solver_iterations = iters;
            ev.delta = delta;
            state.events.push_back(ev);
        };

        if (config.skip_rules && had_prototype && members == old_members) {
            log(EventKind::SkipMembershipUnchanged, 0, state.prototypes[c].delta);
            continue;
        }

        // Reconcile the stored view with the new membership.
        Envelope env;
        bool envelope_changed = true;
        if (had_prototype && !old_members.empty()) {
            std::vector<int> added_rows;
            std::vector<std::string> removed_ids;
            for (int r : members) {
                if (!std::binary_search(old_members.begin(), old_members.end(), r)) {
                    added_rows.push_back(r);
                }
            }
            for (int r : old_members) {
                if (!std::binary_search(members.begin(), members.end(), r)) {
                    removed_ids.push_back(group.ids[r]);
                }
            }
            Eigen::MatrixXd added(added_rows.size(), group.grid.size());
            std::vector<std::string> added_ids;
            for (std::size_t i = 0; i < added_rows.size(); ++i) {
                added.row(i) = group.samples.row(added_rows[i]);
                added_ids.push_back(group.ids[added_rows[i]]);
            }
            EnvelopeUpdate update =
                update_envelope(state.envelopes[c], state.groups[c], added, added_ids, removed_ids);
            env = std::move(update.envelope);
            envelope_changed = update.changed;
        } else {
            env = build_envelope(subgroup(group, members));
        }

        state.members[c] = members;
        state.groups[c] = subgroup(group, members);
        state.envelopes[c] = env;

        if (config.skip_rules && had_prototype) {
            Prototype& proto = state.prototypes[c];
            if (!envelope_changed) {
                log(EventKind::SkipEnvelopeUnchanged, 0, proto.delta);
                continue;
            }
            const double delta_new =
                std::max((env.upper - proto.grid_values).maxCoeff(),
                         (proto.grid_values - env.lower).maxCoeff());
            if (certificate_survives(proto, env, delta_new, config.tol)) {
                proto.delta = delta_new;
                log(EventKind::SkipCertificateHolds, 0, proto.delta);
                continue;
            }
            if (no_update_needed(env, proto.grid_values, config.tol)) {
                proto.delta = delta_new;
                log(EventKind::SkipGapBound, 0, proto.delta);
                continue;
            }
        }

        const std::optional<ReferenceBasis> warm =
            had_prototype ? state.prototypes[c].certificate : std::nullopt;
        long iterations = 0;
        bool warm_fallback = false;
        state.prototypes[c] = solve_prototype(env, config, warm, iterations, warm_fallback);
        if (warm_fallback) log(EventKind::WarmStartFallback, 0, 0.0);
        log(EventKind::Solve, iterations, state.prototypes[c].delta);
    }
}

int assign(ClusteringState& state, const SignalGroup& group, const ClusterConfig& config) {
    const int k = config.k;
    int moves = 0;

    auto log_move = [&](EventKind kind, int row, int from, int to) {
        ClusterEvent ev;
        ev.outer_iteration = state.outer_iterations;
        ev.kind = kind;
        ev.cluster = to;
        ev.signal_id = group.ids[row];
        ev.from_cluster = from;
        ev.to_cluster = to;
        state.events.push_back(ev);
    };

    for (int r = 0; r < group.count(); ++r) {
        const int current = state.assignment[r];
        int best = current;
        double best_d = std::numeric_limits<double>::infinity();
        if (state.prototypes[current].grid_values.size() > 0) {
            best_d = chebyshev_distance(group.samples.row(r).transpose(),
                                        state.prototypes[current].grid_values);
        }
        for (int c = 0; c < k; ++c) {
            if (c == current || state.prototypes[c].grid_values.size() == 0) continue;
            const double d =
                chebyshev_distance(group.samples.row(r).transpose(), state.prototypes[c].grid_values);
            if (d < best_d) {  // strict: ties keep the incumbent
                best_d = d;
                best = c;
            }
        }
        if (best != current) {
            state.assignment[r] = best;
            ++moves;
            log_move(EventKind::Move, r, current, best);
        }
    }

    // Re-anchor clusters the sweep emptied: each takes the signal farthest
    // from its prototype, drawn from clusters that keep at least two.
    while (true) {
        std::vector<int> sizes(k, 0);
        for (int a : state.assignment) ++sizes[a];
        int empty = -1;
        for (int c = 0; c < k; ++c) {
            if (sizes[c] == 0) {
                empty = c;
                break;
            }
        }
        if (empty < 0) break;
        int donor_row = -1;
        double worst = -1.0;
        for (int r = 0; r < group.count(); ++r) {
            if (sizes[state.assignment[r]] < 2) continue;
            double d = std::numeric_limits<double>::infinity();
            if (state.prototypes[empty].grid_values.size() > 0) {
                d = chebyshev_distance(group.samples.row(r).transpose(),
                                       state.prototypes[empty].grid_values);
            } else {
                d = 0.0;
            }
            if (d > worst) {
                worst = d;
                donor_row = r;
            }
        }
        if (donor_row < 0) break;  // nothing can donate; leave as-is
        log_move(EventKind::EmptyClusterRepair, donor_row, state.assignment[donor_row], empty);
        state.assignment[donor_row] = empty;
        ++moves;
    }
    return moves;
}

ClusteringState k_medoid(const SignalGroup& group, const ClusterConfig& config) {
    validate(group);
    if (config.max_outer < 1) {
        throw std::invalid_argument("clustering needs at least one outer iteration");
    }

    ClusteringState state;
    state.assignment = initialize_assignment(group, config.k, config.seed);

    auto hash_assignment = [&]() {
        std::uint64_t h = 1469598103934665603ULL;
        for (int a : state.assignment) {
            h ^= static_cast<std::uint64_t>(a) + 1;
            h *= 1099511628211ULL;
        }
        return h;
    };

    std::unordered_set<std::uint64_t> seen;
    seen.insert(hash_assignment());

    for (int outer = 1; outer <= config.max_outer; ++outer) {
        state.outer_iterations = outer;
        update_prototypes(state, group, config);

        double sum_delta = 0.0, max_delta = 0.0;
        for (const auto& proto : state.prototypes) {
            if (proto.coeffs.size() == 0) continue;
            sum_delta += proto.delta;
            max_delta = std::max(max_delta, proto.delta);
        }
        state.sum_delta_log.push_back(sum_delta);
        state.max_delta_log.push_back(max_delta);

        const int moves = assign(state, group, config);
        if (moves == 0) {
            state.converged = true;
            break;
        }
        if (!seen.insert(hash_assignment()).second) {
            ClusterEvent ev;
            ev.outer_iteration = outer;
            ev.kind = EventKind::CycleDetected;
            state.events.push_back(ev);
            state.converged = false;
            break;
        }
    }
    return state;
}

}  // namespace chebclust
