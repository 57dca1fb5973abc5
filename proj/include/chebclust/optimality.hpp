#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "chebclust/basis.hpp"
#include "chebclust/envelope.hpp"

namespace chebclust {

// Pointwise deviations of a prototype against the band, with the index sets
// where each edge is touched at the maximum. Membership uses the relative
// slack tol * max(1, delta).
struct DeviationProfile {
    Eigen::VectorXd upper_dev;  // upper - S
    Eigen::VectorXd lower_dev;  // S - lower
    double delta = 0.0;
    std::vector<int> t_plus;    // upper_dev == delta
    std::vector<int> t_minus;   // lower_dev == delta
};

DeviationProfile deviation_profile(const Envelope& env, const ChebyshevBasis& basis,
                                   const Eigen::VectorXd& coeffs,
                                   double tol = kDeviationTolerance);

enum class CertificateKind { DoublePoint, Alternation, Subdifferential, None };

struct OptimalityVerdict {
    bool optimal = false;
    CertificateKind kind = CertificateKind::None;
    std::optional<int> double_point;       // grid index touching both edges
    std::vector<int> alternation_nodes;    // n+2 indices, increasing
    std::vector<int> alternation_signs;    // matching +1/-1, alternating
    std::vector<int> support_indices;      // subdifferential support points
    std::vector<int> support_signs;
    Eigen::VectorXd weights;               // convex weights on the support
    Eigen::VectorXd improving_direction;   // coefficient move that cuts delta
};

// Combinatorial certificate: a double point, or n+2 maximal-deviation
// points of strictly alternating edge membership. Not optimal yields no
// improving direction here; the subdifferential check provides one.
OptimalityVerdict check_alternation(const DeviationProfile& profile, int degree);

// Convex-hull certificate: the origin must lie in the hull of the columns
// { +g(t), t in T+ } and { -g(t), t in T- }. Feasible weights form the
// certificate (at most n+2 of them are positive); infeasibility converts
// the separating direction into a coefficient move that lowers delta.
OptimalityVerdict check_subdifferential(const DeviationProfile& profile,
                                        const ChebyshevBasis& basis, const Grid& grid);

// Single-curve specialization: requires a collapsed band (upper == lower)
// and delegates to the two-edge certifiers.
OptimalityVerdict check_classical(const Envelope& env, const ChebyshevBasis& basis,
                                  const Eigen::VectorXd& coeffs,
                                  double tol = kDeviationTolerance);

}  // namespace chebclust
