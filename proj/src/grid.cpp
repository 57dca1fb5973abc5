#include "chebclust/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace chebclust {

namespace {

void check_points(const Eigen::VectorXd& pts, double a, double b) {
    if (pts.size() < 1) {
        throw std::invalid_argument("grid needs at least one point");
    }
    for (Eigen::Index i = 0; i < pts.size(); ++i) {
        if (!std::isfinite(pts[i])) {
            throw std::invalid_argument("grid point " + std::to_string(i) + " is not finite");
        }
        if (i > 0 && !(pts[i - 1] < pts[i])) {
            throw std::invalid_argument("grid points must be strictly increasing at index " +
                                        std::to_string(i));
        }
    }
    if (!(a <= pts[0]) || !(pts[pts.size() - 1] <= b)) {
        throw std::invalid_argument("grid points leave the interval [a, b]");
    }
}

}  // namespace

Grid::Grid(Eigen::VectorXd pts) : points(std::move(pts)) {
    if (points.size() < 1) {
        throw std::invalid_argument("grid needs at least one point");
    }
    a = points[0];
    b = points[points.size() - 1];
    check_points(points, a, b);
}

Grid::Grid(Eigen::VectorXd pts, double a_, double b_) : points(std::move(pts)), a(a_), b(b_) {
    check_points(points, a, b);
}

Grid Grid::uniform(double a, double b, int n_points) {
    if (n_points < 1 || !(a < b)) {
        throw std::invalid_argument("uniform grid needs a < b and at least one point");
    }
    if (n_points == 1) {
        Eigen::VectorXd single(1);
        single[0] = a;
        return Grid(std::move(single), a, b);
    }
    return Grid(Eigen::VectorXd::LinSpaced(n_points, a, b), a, b);
}

}  // namespace chebclust
