#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "chebclust/grid.hpp"

namespace chebclust {

enum class BasisKind { Monomial, ChebyshevPolynomial, Custom };

// A finite family of basis functions g_0, ..., g_n used to form prototypes
// S(t) = sum_i a_i * g_i(t). The built-in kinds are evaluable anywhere on
// the domain; a custom basis is defined by its sampled values on a grid and
// is evaluable only at those points.
class ChebyshevBasis {
public:
    static ChebyshevBasis monomial(int degree);
    // Chebyshev polynomials of the first kind mapped from [a, b] onto [-1, 1].
    static ChebyshevBasis chebyshev_polynomial(int degree, double a, double b);
    // values(i, j) = g_i(t_j) over the given grid, one row per function.
    static ChebyshevBasis custom(Eigen::MatrixXd values, Grid grid);

    BasisKind kind() const { return kind_; }
    int degree() const { return degree_; }
    int dimension() const { return degree_ + 1; }

    // Column vector (g_0(t), ..., g_n(t)).
    Eigen::VectorXd values_at(double t) const;

    // S(t) for coefficient vector a of length n+1.
    double evaluate(const Eigen::VectorXd& coeffs, double t) const;

    // Per-point evaluation over a grid; entry i equals evaluate(coeffs, t_i)
    // exactly (same code path).
    Eigen::VectorXd evaluate_on_grid(const Eigen::VectorXd& coeffs, const Grid& grid) const;

    // (n+1) x N matrix of g_i(t_j) over the given grid.
    Eigen::MatrixXd values_on_grid(const Grid& grid) const;

private:
    ChebyshevBasis() = default;

    BasisKind kind_ = BasisKind::Monomial;
    int degree_ = 0;
    double a_ = 0.0, b_ = 0.0;       // chebyshev kind only
    Eigen::MatrixXd values_;         // custom kind only
    Eigen::VectorXd sample_points_;  // custom kind only
};

struct SystemCheck {
    bool passed = false;
    std::vector<int> witness;  // offending node subset when failed
};

// Default scaled-determinant threshold below which a node subset counts as
// degenerate.
inline constexpr double kDeterminantTolerance = 1e-10;

// Probes the Haar condition: every n+1 distinct grid nodes must give a
// nonsingular collocation matrix. All subsets are tested when there are at
// most sample_budget of them, otherwise a seeded pseudorandom sample of
// sample_budget distinct subsets. Determinants are scaled by row norms
// before the threshold test.
SystemCheck check_chebyshev_system(const ChebyshevBasis& basis, const Grid& grid,
                                   long sample_budget = 2000,
                                   std::uint64_t seed = 0xc3b5u);

}  // namespace chebclust
