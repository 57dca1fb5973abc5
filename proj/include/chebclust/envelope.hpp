#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "chebclust/grid.hpp"

namespace chebclust {

// Deviation tolerance shared by the envelope, exchange and certification
// code paths. Comparisons against maxima use it as an absolute slack.
inline constexpr double kDeviationTolerance = 1e-9;

enum class Side { Upper, Lower };

// A bundle of l signals sampled on a common grid. Row j of samples holds
// signal ids[j]; ids are unique and the row count matches ids.
struct SignalGroup {
    Grid grid;
    Eigen::MatrixXd samples;  // l x N
    std::vector<std::string> ids;

    int count() const { return static_cast<int>(samples.rows()); }
};

void validate(const SignalGroup& group);

// Pointwise band of a signal group: upper = max over signals, lower = min.
// Witness ids record which signal attains each extremum (smallest id on
// ties) so that removals can invalidate only the points that need a rescan.
struct Envelope {
    Grid grid;
    Eigen::VectorXd upper;
    Eigen::VectorXd lower;
    std::vector<std::string> upper_witness;
    std::vector<std::string> lower_witness;
};

Envelope build_envelope(const SignalGroup& group);

struct EnvelopeUpdate {
    Envelope envelope;
    bool changed = false;  // true when any upper/lower value moved
};

// Incremental rebuild after membership changes: added rows are new signals
// (with their ids), removed ids must exist in the group. Grid points whose
// recorded witness was removed are recomputed from the surviving signals;
// added signals then widen the band where they exceed it. The result is
// elementwise identical to build_envelope on the modified group.
EnvelopeUpdate update_envelope(const Envelope& env, const SignalGroup& group,
                               const Eigen::MatrixXd& added_rows,
                               const std::vector<std::string>& added_ids,
                               const std::vector<std::string>& removed_ids);

// The modified group itself, same membership arithmetic as update_envelope.
SignalGroup apply_group_delta(const SignalGroup& group,
                              const Eigen::MatrixXd& added_rows,
                              const std::vector<std::string>& added_ids,
                              const std::vector<std::string>& removed_ids);

struct LowerBoundResult {
    double delta_star = 0.0;     // half the widest band gap
    std::vector<int> witnesses;  // grid indices attaining the widest gap
};

// No prototype can deviate less than half the widest gap between the band
// edges; witnesses collect every grid index within tol of that gap.
LowerBoundResult lower_bound(const Envelope& env, double tol = kDeviationTolerance);

// True when a candidate prototype already certifies itself on this envelope:
// some grid point has band gap equal to twice the prototype's deviation
// (within tol). In that case no solve can improve on the candidate.
bool no_update_needed(const Envelope& env, const Eigen::VectorXd& prototype_values,
                      double tol = kDeviationTolerance);

}  // namespace chebclust
