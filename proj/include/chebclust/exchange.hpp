#pragma once

#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "chebclust/basis.hpp"
#include "chebclust/envelope.hpp"

namespace chebclust {

// Scaled-pivot threshold below which an interpolation system counts as
// numerically singular.
inline constexpr double kSingularPivotTolerance = 1e-12;

// Raised when an interpolation system is numerically singular, e.g. a stale
// warm-start basis on a custom function family.
struct DegenerateBasisError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// n+2 grid node indices, strictly increasing, with strictly alternating
// attachment to the band edges: sign +1 reads "touches upper - d", sign -1
// reads "touches lower + d".
struct ReferenceBasis {
    std::vector<int> nodes;
    std::vector<int> signs;

    int size() const { return static_cast<int>(nodes.size()); }
};

void validate(const ReferenceBasis& ref, int grid_size, int expected_size);

struct InterpolationResult {
    Eigen::VectorXd coeffs;  // n+1 prototype coefficients
    double d = 0.0;          // signed levelled deviation at the nodes
};

// Solves the n+2 linear equations S(t_k) - sign_k * d = target_k where the
// target is the band edge the node is attached to. A negative d means the
// attachment pattern is mirrored; callers flip all signs and keep |d|.
InterpolationResult chebyshev_interpolation(const Envelope& env, const ChebyshevBasis& basis,
                                            const ReferenceBasis& ref);

struct MaxDeviation {
    int index = 0;   // lowest grid index attaining the maximum
    int sign = +1;   // +1 when the upper edge dominates there
    double value = 0.0;
    bool double_point = false;  // both edges attain the maximum at index
};

// Largest pointwise deviation between the band and the prototype. Ties on
// value pick the lowest grid index; ties between edges at one point pick
// the upper edge and flag the point as double.
MaxDeviation find_max_deviation(const Envelope& env, const ChebyshevBasis& basis,
                                const Eigen::VectorXd& coeffs,
                                double tol = kDeviationTolerance);

// One exchange move. The entering point must carry a deviation above the
// basis level and must not already be a node; a same-signed adjacent node
// is replaced, otherwise the entering point extends the basis past its end
// and the node furthest from the entering side drops out. The result is
// again sorted and strictly alternating.
ReferenceBasis exchange_step(const ReferenceBasis& ref, int entering, int entering_sign);

struct ImmediateOptimal {
    Eigen::VectorXd coeffs;
    double delta = 0.0;
    int witness = 0;  // grid index of a widest-gap point
};

// Start-up rule built on the band lower bound delta*: interpolate the band
// midline through the first n+1 widest-gap points, padding with unused grid
// indices at even strides when there are fewer than n+1. If nothing deviates
// beyond delta* the midline interpolant is already optimal; otherwise the
// worst point joins the nodes to form the initial n+2 basis, signs anchored
// at that point.
std::variant<ReferenceBasis, ImmediateOptimal> initialize_basis(const Envelope& env,
                                                                const ChebyshevBasis& basis);

enum class TerminationReason {
    OptimalDoublePoint,   // one point touches both band edges at the deviation
    OptimalAlternation,   // n+2 alternating points at the deviation
    IterationLimit,
};

struct SolveReport {
    Eigen::VectorXd coeffs;
    double delta = 0.0;
    TerminationReason reason = TerminationReason::IterationLimit;
    std::optional<ReferenceBasis> certificate;  // final basis when node-distinct
    std::optional<int> double_point;            // grid index for double-point exits
    long iterations = 0;                        // interpolation solves
    long exchanges = 0;                         // actual node swaps
    bool warm_start_used = false;
    bool warm_start_fallback = false;           // warm basis rejected or restarted
    std::vector<double> history;                // levelled deviation per iteration
};

// Levelled-deviation exchange iteration. A valid warm basis skips the
// start-up rule; a stale or degenerate one falls back to a cold start and
// records the fact. The deviation history never decreases; an exchange either
// climbs past tol or, when several references share the optimal level, ties
// it exactly (the exact gain is a convex weight times the entering excess
// and can round to nothing near a degenerate optimum).
SolveReport solve_exchange(const Envelope& env, const ChebyshevBasis& basis,
                           const std::optional<ReferenceBasis>& warm_start = std::nullopt,
                           long iteration_limit = 500,
                           double tol = kDeviationTolerance);

}  // namespace chebclust
