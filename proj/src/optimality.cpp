#include "chebclust/optimality.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "chebclust/lp.hpp"

namespace chebclust {

DeviationProfile deviation_profile(const Envelope& env, const ChebyshevBasis& basis,
                                   const Eigen::VectorXd& coeffs, double tol) {
    const Eigen::VectorXd values = basis.evaluate_on_grid(coeffs, env.grid);
    DeviationProfile profile;
    profile.upper_dev = env.upper - values;
    profile.lower_dev = values - env.lower;
    profile.delta = std::max(profile.upper_dev.maxCoeff(), profile.lower_dev.maxCoeff());
    const double slack = tol * std::max(1.0, profile.delta);
    for (int i = 0; i < env.grid.size(); ++i) {
        if (profile.upper_dev[i] >= profile.delta - slack) profile.t_plus.push_back(i);
        if (profile.lower_dev[i] >= profile.delta - slack) profile.t_minus.push_back(i);
    }
    return profile;
}

OptimalityVerdict check_alternation(const DeviationProfile& profile, int degree) {
    OptimalityVerdict verdict;

    // A point pressing on both edges settles it alone.
    for (int i : profile.t_plus) {
        if (std::binary_search(profile.t_minus.begin(), profile.t_minus.end(), i)) {
            verdict.optimal = true;
            verdict.kind = CertificateKind::DoublePoint;
            verdict.double_point = i;
            return verdict;
        }
    }

    // Otherwise we need n+2 maximal-deviation points of strictly
    // alternating edge membership. Each index touches exactly one edge
    // here, so the longest alternating subsequence keeps the first point
    // of every run of equal signs.
    std::vector<std::pair<int, int>> points;  // (grid index, sign)
    for (int i : profile.t_plus) points.emplace_back(i, +1);
    for (int i : profile.t_minus) points.emplace_back(i, -1);
    std::sort(points.begin(), points.end());

    std::vector<int> nodes, signs;
    for (const auto& [idx, sign] : points) {
        if (signs.empty() || signs.back() != sign) {
            nodes.push_back(idx);
            signs.push_back(sign);
        }
    }
    if (static_cast<int>(nodes.size()) >= degree + 2) {
        nodes.resize(degree + 2);
        signs.resize(degree + 2);
        verdict.optimal = true;
        verdict.kind = CertificateKind::Alternation;
        verdict.alternation_nodes = std::move(nodes);
        verdict.alternation_signs = std::move(signs);
    }
    return verdict;
}

OptimalityVerdict check_subdifferential(const DeviationProfile& profile,
                                        const ChebyshevBasis& basis, const Grid& grid) {
    const int n_plus = static_cast<int>(profile.t_plus.size());
    const int n_minus = static_cast<int>(profile.t_minus.size());
    if (n_plus + n_minus == 0) {
        throw std::invalid_argument("deviation profile has no maximal points");
    }

    OptimalityVerdict verdict;
    Eigen::MatrixXd columns(basis.dimension(), n_plus + n_minus);
    int c = 0;
    for (int i : profile.t_plus) {
        columns.col(c++) = basis.values_at(grid.points[i]);
        verdict.support_indices.push_back(i);
        verdict.support_signs.push_back(+1);
    }
    for (int i : profile.t_minus) {
        columns.col(c++) = -basis.values_at(grid.points[i]);
        verdict.support_indices.push_back(i);
        verdict.support_signs.push_back(-1);
    }

    const ConvexHullResult hull = feasibility_in_convex_hull(columns);
    if (hull.feasible) {
        verdict.optimal = true;
        verdict.kind = CertificateKind::Subdifferential;
        verdict.weights = hull.weights;
    } else {
        // Moving the coefficients along the separating direction lifts the
        // prototype into every upper-critical point and away from every
        // lower-critical one, cutting the deviation.
        verdict.improving_direction = hull.direction;
    }
    return verdict;
}

OptimalityVerdict check_classical(const Envelope& env, const ChebyshevBasis& basis,
                                  const Eigen::VectorXd& coeffs, double tol) {
    if ((env.upper - env.lower).maxCoeff() > tol) {
        throw std::invalid_argument("classical check needs a collapsed band");
    }
    const DeviationProfile profile = deviation_profile(env, basis, coeffs, tol);
    OptimalityVerdict verdict = check_alternation(profile, basis.degree());
    if (verdict.optimal) return verdict;
    return check_subdifferential(profile, basis, env.grid);
}

}  // namespace chebclust
