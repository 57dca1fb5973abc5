#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "chebclust/basis.hpp"
#include "chebclust/envelope.hpp"

namespace chebclust {

inline constexpr double kPivotTolerance = 1e-10;
inline constexpr double kFeasibilityTolerance = 1e-9;
inline constexpr int kDefaultPivotLimit = 200000;

// Row provenance for problems produced by build_lp: which grid point and
// which band edge the inequality came from.
struct RowLabel {
    int grid_index = -1;
    Side side = Side::Upper;
};

// min c'x subject to A x <= b, with per-column sign information. Columns
// marked free are unrestricted, the rest are nonnegative.
struct LpProblem {
    Eigen::VectorXd objective;
    Eigen::MatrixXd constraints;
    Eigen::VectorXd rhs;
    std::vector<bool> free_column;
    std::vector<RowLabel> labels;  // empty for hand-built problems

    int rows() const { return static_cast<int>(constraints.rows()); }
    int cols() const { return static_cast<int>(constraints.cols()); }
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

// One basic variable per constraint row. Structural entries refer to a
// problem column, slack entries to the row whose slack they are.
struct BasicEntry {
    bool structural = false;
    int index = 0;
};

struct LpSolution {
    LpStatus status = LpStatus::IterationLimit;
    Eigen::VectorXd values;  // per problem column, empty unless optimal
    double objective = 0.0;
    std::vector<BasicEntry> basis;
    long iterations = 0;
};

// Best uniform approximation of the band as a linear program: variables
// a_0..a_n, z; for every grid point i the rows
//     upper_i - S(t_i) <= z      and      S(t_i) - lower_i <= z
// in that block order (all upper rows first). Objective: minimize z.
LpProblem build_lp(const Envelope& env, const ChebyshevBasis& basis);

// Dense two-phase primal simplex on the condensed tableau. Free columns are
// split into differences of nonnegative pairs before solving. Bland's rule
// on fixed variable ids guards against cycling; phase one drives a single
// auxiliary column out of the basis.
LpSolution solve_simplex(const LpProblem& problem, long pivot_limit = kDefaultPivotLimit);

struct ConvexHullResult {
    bool feasible = false;
    Eigen::VectorXd weights;    // convex combination weights when feasible
    Eigen::VectorXd direction;  // u with u'm_j > 0 for all columns otherwise
};

// Does the origin lie in the convex hull of the columns of M? Decided by a
// phase-one feasibility solve of { M w = 0, sum w = 1, w >= 0 }. When it
// does not, a separating direction is recovered from the dual values.
ConvexHullResult feasibility_in_convex_hull(const Eigen::MatrixXd& columns);

// Fixed-format MPS dump for cross-checking against external solvers.
// Column order follows the problem: structural columns first as C0..Ck,
// or A0..An, Z for problems produced by build_lp.
void write_mps(const LpProblem& problem, std::ostream& out, const std::string& name = "CHEBLP");

}  // namespace chebclust
