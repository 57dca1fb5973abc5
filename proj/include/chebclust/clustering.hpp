#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "chebclust/basis.hpp"
#include "chebclust/envelope.hpp"
#include "chebclust/exchange.hpp"

namespace chebclust {

enum class SolverChoice { Exchange, Lp, CrossCheck };

struct ClusterConfig {
    int k = 1;
    ChebyshevBasis basis = ChebyshevBasis::monomial(0);
    SolverChoice solver = SolverChoice::Exchange;
    int max_outer = 50;
    long solver_iteration_limit = 500;
    double tol = kDeviationTolerance;
    std::uint64_t seed = 0;
    bool skip_rules = true;
};

// Cluster representative: the uniform-norm center of its member band.
struct Prototype {
    Eigen::VectorXd coeffs;
    double delta = 0.0;
    Eigen::VectorXd grid_values;                // prototype sampled on the grid
    std::optional<ReferenceBasis> certificate;  // warm-start seed for resolves
    std::optional<int> double_point;
    bool alternation_ok = false;                // certifier verdict at solve time
};

enum class EventKind {
    Solve,
    SkipMembershipUnchanged,  // no signals entered or left
    SkipEnvelopeUnchanged,    // membership changed, band did not
    SkipCertificateHolds,     // incumbent's certificate survives on the new band
    SkipGapBound,             // band gap already certifies the incumbent
    Move,
    EmptyClusterRepair,
    WarmStartFallback,
    CycleDetected,
};

struct ClusterEvent {
    int outer_iteration = 0;
    EventKind kind = EventKind::Solve;
    int cluster = -1;
    std::string signal_id;  // moves and repairs
    int from_cluster = -1;  // moves
    int to_cluster = -1;
    long solver_iterations = 0;
    double delta = 0.0;
};

struct ClusteringState {
    std::vector<int> assignment;             // per master-group row
    std::vector<std::vector<int>> members;   // per cluster, master row indices
    std::vector<SignalGroup> groups;         // materialized member view
    std::vector<Envelope> envelopes;         // valid when the cluster is nonempty
    std::vector<Prototype> prototypes;
    int outer_iterations = 0;
    bool converged = false;
    std::vector<ClusterEvent> events;
    std::vector<double> sum_delta_log;       // per outer iteration
    std::vector<double> max_delta_log;
};

// Uniform-norm distance between a sampled signal and a prototype.
double chebyshev_distance(const Eigen::VectorXd& signal_values,
                          const Eigen::VectorXd& prototype_values);

// Farthest-first anchors under the uniform norm; the seed picks the first
// anchor, every other signal joins its nearest anchor.
std::vector<int> initialize_assignment(const SignalGroup& group, int k, std::uint64_t seed);

// Recomputes prototypes for clusters whose membership changed since the
// last pass. Unchanged or provably-settled clusters are skipped and logged;
// everything else is resolved, warm-started from the incumbent certificate.
void update_prototypes(ClusteringState& state, const SignalGroup& group,
                       const ClusterConfig& config);

// One assignment sweep. A signal moves only to a strictly closer prototype
// (ties keep the incumbent); clusters emptied by the sweep are re-anchored
// at the signal farthest from their prototype. Returns the move count.
int assign(ClusteringState& state, const SignalGroup& group, const ClusterConfig& config);

// Alternating assignment / prototype updates until a sweep moves nothing.
// Assignment cycles are detected by hashing and end the run unconverged.
ClusteringState k_medoid(const SignalGroup& group, const ClusterConfig& config);

}  // namespace chebclust
