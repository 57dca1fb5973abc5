#include "chebclust/basis.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>
#include <string>

namespace chebclust {

ChebyshevBasis ChebyshevBasis::monomial(int degree) {
    if (degree < 0) {
        throw std::invalid_argument("basis degree must be nonnegative");
    }
    ChebyshevBasis basis;
    basis.kind_ = BasisKind::Monomial;
    basis.degree_ = degree;
    return basis;
}

ChebyshevBasis ChebyshevBasis::chebyshev_polynomial(int degree, double a, double b) {
    if (degree < 0) {
        throw std::invalid_argument("basis degree must be nonnegative");
    }
    if (!(a < b)) {
        throw std::invalid_argument("chebyshev basis needs a < b");
    }
    ChebyshevBasis basis;
    basis.kind_ = BasisKind::ChebyshevPolynomial;
    basis.degree_ = degree;
    basis.a_ = a;
    basis.b_ = b;
    return basis;
}

ChebyshevBasis ChebyshevBasis::custom(Eigen::MatrixXd values, Grid grid) {
    if (values.cols() != grid.size()) {
        throw std::invalid_argument("custom basis values must have one column per grid point");
    }
    if (values.rows() < 1) {
        throw std::invalid_argument("custom basis needs at least one function row");
    }
    if (!values.allFinite()) {
        throw std::invalid_argument("custom basis values must be finite");
    }
    ChebyshevBasis basis;
    basis.kind_ = BasisKind::Custom;
    basis.degree_ = static_cast<int>(values.rows()) - 1;
    basis.values_ = std::move(values);
    basis.sample_points_ = grid.points;
    return basis;
}

Eigen::VectorXd ChebyshevBasis::values_at(double t) const {
    const int n = degree_;
    Eigen::VectorXd g(n + 1);
    switch (kind_) {
        case BasisKind::Monomial: {
            double p = 1.0;
            for (int i = 0; i <= n; ++i) {
                g[i] = p;
                p *= t;
            }
            return g;
        }
        case BasisKind::ChebyshevPolynomial: {
            const double slack = 1e-12 * (std::abs(a_) + std::abs(b_) + 1.0);
            if (t < a_ - slack || t > b_ + slack) {
                throw std::domain_error("evaluation point outside the basis domain");
            }
            const double u = (2.0 * t - (a_ + b_)) / (b_ - a_);
            g[0] = 1.0;
            if (n >= 1) g[1] = u;
            for (int i = 2; i <= n; ++i) {
                g[i] = 2.0 * u * g[i - 1] - g[i - 2];
            }
            return g;
        }
        case BasisKind::Custom: {
            const double* begin = sample_points_.data();
            const double* end = begin + sample_points_.size();
            const double* it = std::lower_bound(begin, end, t);
            if (it == end || *it != t) {
                throw std::domain_error("custom basis is only evaluable at its own grid points");
            }
            return values_.col(it - begin);
        }
    }
    throw std::logic_error("unreachable basis kind");
}

double ChebyshevBasis::evaluate(const Eigen::VectorXd& coeffs, double t) const {
    if (coeffs.size() != dimension()) {
        throw std::invalid_argument("coefficient count does not match the basis dimension");
    }
    return coeffs.dot(values_at(t));
}

Eigen::VectorXd ChebyshevBasis::evaluate_on_grid(const Eigen::VectorXd& coeffs,
                                                 const Grid& grid) const {
    if (coeffs.size() != dimension()) {
        throw std::invalid_argument("coefficient count does not match the basis dimension");
    }
    Eigen::VectorXd out(grid.size());
    for (int i = 0; i < grid.size(); ++i) {
        out[i] = coeffs.dot(values_at(grid.points[i]));
    }
    return out;
}

Eigen::MatrixXd ChebyshevBasis::values_on_grid(const Grid& grid) const {
    Eigen::MatrixXd out(dimension(), grid.size());
    for (int j = 0; j < grid.size(); ++j) {
        out.col(j) = values_at(grid.points[j]);
    }
    return out;
}

namespace {

// |det M| after scaling each row to unit euclidean norm. An exactly zero
// row counts as singular.
double scaled_determinant(Eigen::MatrixXd m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        const double norm = m.row(r).norm();
        if (norm == 0.0) return 0.0;
        m.row(r) /= norm;
    }
    return std::abs(m.determinant());
}

// Number of (size)-subsets of {0..n-1}, saturated at cap.
long long count_combinations(int n, int size, long long cap) {
    long long result = 1;
    for (int i = 0; i < size; ++i) {
        result = result * (n - i) / (i + 1);
        if (result >= cap) return cap;
    }
    return result;
}

}  // namespace

SystemCheck check_chebyshev_system(const ChebyshevBasis& basis, const Grid& grid,
                                   long sample_budget, std::uint64_t seed) {
    const int n_funcs = basis.dimension();
    const int n_points = grid.size();
    if (n_funcs > n_points) {
        throw std::invalid_argument("system check needs at least n+1 grid points");
    }
    if (sample_budget < 1) {
        throw std::invalid_argument("sample budget must be positive");
    }

    const Eigen::MatrixXd all_values = basis.values_on_grid(grid);
    auto test_subset = [&](const std::vector<int>& subset) {
        Eigen::MatrixXd m(n_funcs, n_funcs);
        for (int c = 0; c < n_funcs; ++c) {
            m.col(c) = all_values.col(subset[c]);
        }
        return scaled_determinant(m) >= kDeterminantTolerance;
    };

    const long long total = count_combinations(n_points, n_funcs, sample_budget + 1LL);
    if (total <= sample_budget) {
        // Exhaustive: lexicographic walk over all increasing subsets.
        std::vector<int> subset(n_funcs);
        for (int i = 0; i < n_funcs; ++i) subset[i] = i;
        while (true) {
            if (!test_subset(subset)) return {false, subset};
            int pos = n_funcs - 1;
            while (pos >= 0 && subset[pos] == n_points - n_funcs + pos) --pos;
            if (pos < 0) break;
            ++subset[pos];
            for (int i = pos + 1; i < n_funcs; ++i) subset[i] = subset[i - 1] + 1;
        }
        return {true, {}};
    }

    std::mt19937_64 rng(seed);
    std::set<std::vector<int>> seen;
    std::vector<int> pool(n_points);
    for (int i = 0; i < n_points; ++i) pool[i] = i;
    while (static_cast<long>(seen.size()) < sample_budget) {
        // Partial Fisher-Yates draw of n+1 distinct indices.
        for (int i = 0; i < n_funcs; ++i) {
            std::uniform_int_distribution<int> pick(i, n_points - 1);
            std::swap(pool[i], pool[pick(rng)]);
        }
        std::vector<int> subset(pool.begin(), pool.begin() + n_funcs);
        std::sort(subset.begin(), subset.end());
        if (!seen.insert(subset).second) continue;
        if (!test_subset(subset)) return {false, subset};
    }
    return {true, {}};
}

}  // namespace chebclust
