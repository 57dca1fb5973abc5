#pragma once

#include <Eigen/Dense>

namespace chebclust {

// Shared sample grid for a signal group. Points are strictly increasing and
// stay inside the stated interval [a, b].
struct Grid {
    Eigen::VectorXd points;
    double a = 0.0;
    double b = 0.0;

    Grid() = default;

    // Interval endpoints default to the first and last point.
    explicit Grid(Eigen::VectorXd pts);
    Grid(Eigen::VectorXd pts, double a_, double b_);

    int size() const { return static_cast<int>(points.size()); }

    static Grid uniform(double a, double b, int n_points);
};

}  // namespace chebclust
