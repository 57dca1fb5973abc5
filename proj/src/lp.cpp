#include "chebclust/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace chebclust {

namespace {

// Condensed (slack-implicit) tableau for min c'v s.t. G v <= h, v >= 0.
// Variable ids: 0..k-1 structural, k..k+m-1 row slacks, k+m the phase-one
// auxiliary. Rows carry the id of their basic variable, columns the id of
// their nonbasic one; a pivot swaps the two labels in place.
class CondensedTableau {
public:
    CondensedTableau(const Eigen::MatrixXd& G, const Eigen::VectorXd& h, const Eigen::VectorXd& c)
        : m_(static_cast<int>(G.rows())),
          k_(static_cast<int>(G.cols())),
          T_(G),
          rhs_(h),
          obj_(c.transpose()),
          row_var_(m_),
          col_var_(k_),
          row_dead_(m_, false),
          col_dead_(k_, false) {
        for (int i = 0; i < m_; ++i) row_var_[i] = k_ + i;
        for (int j = 0; j < k_; ++j) col_var_[j] = j;
    }

    LpStatus run(long pivot_limit) {
        if (!phase_one(pivot_limit)) {
            return iterations_ >= pivot_limit ? LpStatus::IterationLimit : LpStatus::Infeasible;
        }
        return phase_two(pivot_limit);
    }

    long iterations() const { return iterations_; }
    double objective() const { return obj_value_; }
    double infeasibility() const { return aux_value_; }

    Eigen::VectorXd structural_values() const {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(k_);
        for (int i = 0; i < m_; ++i) {
            if (row_var_[i] < k_) v[row_var_[i]] = rhs_[i];
        }
        return v;
    }

    std::vector<int> basic_ids() const { return row_var_; }

    // Phase-one dual value per row, meaningful at an infeasible stop:
    // y_i = -(reduced cost of slack i), zero when the slack is basic.
    Eigen::VectorXd phase_one_duals() const {
        Eigen::VectorXd y = Eigen::VectorXd::Zero(m_);
        for (int j = 0; j < static_cast<int>(col_var_.size()); ++j) {
            const int id = col_var_[j];
            if (id >= k_ && id < k_ + m_) y[id - k_] = -aux_obj_[j];
        }
        return y;
    }

private:
    static constexpr double kTol = kPivotTolerance;
    static constexpr double kFeasTol = kFeasibilityTolerance;

    void pivot(int r, int c) {
        const double p = T_(r, c);
        const Eigen::VectorXd col = T_.col(c);
        const Eigen::RowVectorXd row = T_.row(r);
        const double beta = rhs_[r];

        T_.noalias() -= col * (row / p);
        T_.row(r) = row / p;
        T_.col(c) = -col / p;
        T_(r, c) = 1.0 / p;

        rhs_ -= col * (beta / p);
        rhs_[r] = beta / p;

        {
            const double q = obj_[c];
            obj_ -= (q / p) * row;
            obj_[c] = -q / p;
            obj_value_ += q * beta / p;
        }
        if (phase_one_active_) {
            const double q = aux_obj_[c];
            aux_obj_ -= (q / p) * row;
            aux_obj_[c] = -q / p;
            aux_value_ += q * beta / p;
        }
        std::swap(row_var_[r], col_var_[c]);
        ++iterations_;
    }

    // Bland entering column for the given reduced-cost row: the smallest
    // variable id among alive columns priced below -kTol.
    int entering(const Eigen::RowVectorXd& price) const {
        int best = -1;
        for (int j = 0; j < static_cast<int>(col_var_.size()); ++j) {
            if (col_dead_[j] || price[j] >= -kTol) continue;
            if (best < 0 || col_var_[j] < col_var_[best]) best = j;
        }
        return best;
    }

    // Minimum-ratio row; ties pick the smallest basic id. Negative rhs from
    // roundoff is treated as zero.
    int leaving(int c) const {
        int best = -1;
        double best_ratio = 0.0;
        for (int i = 0; i < m_; ++i) {
            if (row_dead_[i] || T_(i, c) <= kTol) continue;
            const double ratio = std::max(rhs_[i], 0.0) / T_(i, c);
            if (best < 0 || ratio < best_ratio ||
                (ratio == best_ratio && row_var_[i] < row_var_[best])) {
                best = i;
                best_ratio = ratio;
            }
        }
        return best;
    }

    bool phase_one(long pivot_limit) {
        int worst = 0;
        for (int i = 1; i < m_; ++i) {
            if (rhs_[i] < rhs_[worst]) worst = i;
        }
        if (rhs_[worst] >= -kFeasTol) return true;  // already primal feasible

        // Append the auxiliary column: -1 in every row, objective e_aux.
        aux_id_ = k_ + m_;
        T_.conservativeResize(Eigen::NoChange, T_.cols() + 1);
        T_.col(T_.cols() - 1).setConstant(-1.0);
        col_var_.push_back(aux_id_);
        col_dead_.push_back(false);
        obj_.conservativeResize(obj_.size() + 1);
        obj_[obj_.size() - 1] = 0.0;
        aux_obj_ = Eigen::RowVectorXd::Zero(T_.cols());
        aux_obj_[T_.cols() - 1] = 1.0;
        aux_value_ = 0.0;
        phase_one_active_ = true;

        // First pivot lifts the auxiliary in at the most negative row,
        // making every rhs nonnegative.
        pivot(worst, static_cast<int>(T_.cols()) - 1);

        while (iterations_ < pivot_limit) {
            const int c = entering(aux_obj_);
            if (c < 0) break;
            const int r = leaving(c);
            if (r < 0) break;  // phase-one objective is bounded; defensive
            pivot(r, c);
        }
        if (iterations_ >= pivot_limit) return false;
        if (aux_value_ > kFeasTol) return false;  // genuinely infeasible

        // Drive the auxiliary out of the basis if it lingers at level zero.
        for (int i = 0; i < m_; ++i) {
            if (row_var_[i] != aux_id_) continue;
            int c = -1;
            for (int j = 0; j < static_cast<int>(col_var_.size()); ++j) {
                if (!col_dead_[j] && col_var_[j] != aux_id_ && std::abs(T_(i, j)) > kTol) {
                    c = j;
                    break;
                }
            }
            if (c >= 0) {
                pivot(i, c);
            } else {
                row_dead_[i] = true;  // vacuous row, basic aux pinned at zero
            }
        }
        for (int j = 0; j < static_cast<int>(col_var_.size()); ++j) {
            if (col_var_[j] == aux_id_) col_dead_[j] = true;
        }
        phase_one_active_ = false;
        return true;
    }

    LpStatus phase_two(long pivot_limit) {
        while (iterations_ < pivot_limit) {
            const int c = entering(obj_);
            if (c < 0) return LpStatus::Optimal;
            const int r = leaving(c);
            if (r < 0) return LpStatus::Unbounded;
            pivot(r, c);
        }
        return LpStatus::IterationLimit;
    }

    int m_, k_;
    Eigen::MatrixXd T_;
    Eigen::VectorXd rhs_;
    Eigen::RowVectorXd obj_;
    Eigen::RowVectorXd aux_obj_;
    double obj_value_ = 0.0;
    double aux_value_ = 0.0;
    std::vector<int> row_var_, col_var_;
    std::vector<bool> row_dead_;
    std::vector<bool> col_dead_;
    bool phase_one_active_ = false;
    long iterations_ = 0;
    int aux_id_ = -1;
};

}  // namespace

LpProblem build_lp(const Envelope& env, const ChebyshevBasis& basis) {
    const int n_points = env.grid.size();
    const int dim = basis.dimension();
    const Eigen::MatrixXd values = basis.values_on_grid(env.grid);

    LpProblem p;
    p.objective = Eigen::VectorXd::Zero(dim + 1);
    p.objective[dim] = 1.0;
    p.constraints.resize(2 * n_points, dim + 1);
    p.rhs.resize(2 * n_points);
    p.free_column.assign(dim + 1, true);
    p.labels.resize(2 * n_points);
    for (int i = 0; i < n_points; ++i) {
        // upper_i - S(t_i) <= z
        p.constraints.row(i).head(dim) = -values.col(i).transpose();
        p.constraints(i, dim) = -1.0;
        p.rhs[i] = -env.upper[i];
        p.labels[i] = {i, Side::Upper};
        // S(t_i) - lower_i <= z
        p.constraints.row(n_points + i).head(dim) = values.col(i).transpose();
        p.constraints(n_points + i, dim) = -1.0;
        p.rhs[n_points + i] = env.lower[i];
        p.labels[n_points + i] = {i, Side::Lower};
    }
    return p;
}

LpSolution solve_simplex(const LpProblem& problem, long pivot_limit) {
    const int rows = problem.rows();
    const int cols = problem.cols();
    if (static_cast<int>(problem.free_column.size()) != cols) {
        throw std::invalid_argument("free_column must have one flag per column");
    }
    if (problem.rhs.size() != rows || problem.objective.size() != cols) {
        throw std::invalid_argument("lp dimensions disagree");
    }

    // Free columns become differences of nonnegative pairs; engine ids keep
    // the original column order so Bland's rule is unaffected.
    int engine_cols = 0;
    std::vector<int> first_engine_col(cols);
    for (int j = 0; j < cols; ++j) {
        first_engine_col[j] = engine_cols;
        engine_cols += problem.free_column[j] ? 2 : 1;
    }
    Eigen::MatrixXd G(rows, engine_cols);
    Eigen::VectorXd c(engine_cols);
    for (int j = 0; j < cols; ++j) {
        const int e = first_engine_col[j];
        G.col(e) = problem.constraints.col(j);
        c[e] = problem.objective[j];
        if (problem.free_column[j]) {
            G.col(e + 1) = -problem.constraints.col(j);
            c[e + 1] = -problem.objective[j];
        }
    }

    CondensedTableau tableau(G, problem.rhs, c);
    LpSolution solution;
    solution.status = tableau.run(pivot_limit);
    solution.iterations = tableau.iterations();
    if (solution.status != LpStatus::Optimal) return solution;

    solution.objective = tableau.objective();
    const Eigen::VectorXd v = tableau.structural_values();
    solution.values.resize(cols);
    for (int j = 0; j < cols; ++j) {
        const int e = first_engine_col[j];
        solution.values[j] = problem.free_column[j] ? v[e] - v[e + 1] : v[e];
    }
    const std::vector<int> basics = tableau.basic_ids();
    for (int i = 0; i < static_cast<int>(basics.size()); ++i) {
        const int id = basics[i];
        BasicEntry entry;
        if (id < engine_cols) {
            // Map an engine column back to the problem column it split from.
            int col = static_cast<int>(std::upper_bound(first_engine_col.begin(),
                                                        first_engine_col.end(), id) -
                                       first_engine_col.begin()) -
                      1;
            entry.structural = true;
            entry.index = col;
        } else if (id < engine_cols + rows) {
            entry.structural = false;
            entry.index = id - engine_cols;
        } else {
            // Auxiliary pinned in a vacuous row: report that row's slack.
            entry.structural = false;
            entry.index = i;
        }
        solution.basis.push_back(entry);
    }
    return solution;
}

ConvexHullResult feasibility_in_convex_hull(const Eigen::MatrixXd& columns) {
    const int d = static_cast<int>(columns.rows());
    const int m = static_cast<int>(columns.cols());
    if (d < 1 || m < 1) {
        throw std::invalid_argument("convex hull test needs a nonempty matrix");
    }

    // Feasibility program: M w = 0, sum w = 1, w >= 0, written as
    // inequality pairs so the condensed engine applies directly.
    Eigen::MatrixXd G(2 * d + 2, m);
    G.topRows(d) = columns;
    G.middleRows(d, d) = -columns;
    G.row(2 * d).setOnes();
    G.row(2 * d + 1).setConstant(-1.0);
    Eigen::VectorXd h = Eigen::VectorXd::Zero(2 * d + 2);
    h[2 * d] = 1.0;
    h[2 * d + 1] = -1.0;

    CondensedTableau tableau(G, h, Eigen::VectorXd::Zero(m));
    const LpStatus status = tableau.run(kDefaultPivotLimit);

    ConvexHullResult result;
    if (status == LpStatus::Optimal) {
        result.feasible = true;
        Eigen::VectorXd w = tableau.structural_values();
        w = w.cwiseMax(0.0);
        const double total = w.sum();
        if (total > 0.0) w /= total;
        result.weights = w;
        return result;
    }
    if (status != LpStatus::Infeasible) {
        throw std::runtime_error("convex hull feasibility solve hit the pivot limit");
    }
    result.feasible = false;
    const Eigen::VectorXd y = tableau.phase_one_duals();
    Eigen::VectorXd u = y.segment(d, d) - y.head(d);
    const double scale = u.cwiseAbs().maxCoeff();
    if (scale > 0.0) u /= scale;
    result.direction = u;
    return result;
}

void write_mps(const LpProblem& problem, std::ostream& out, const std::string& name) {
    const int rows = problem.rows();
    const int cols = problem.cols();
    const bool band_form = !problem.labels.empty();

    auto row_name = [&](int i) {
        char buf[16];
        if (band_form) {
            std::snprintf(buf, sizeof buf, "%c%04d", problem.labels[i].side == Side::Upper ? 'U' : 'L',
                          problem.labels[i].grid_index);
        } else {
            std::snprintf(buf, sizeof buf, "R%04d", i);
        }
        return std::string(buf);
    };
    auto col_name = [&](int j) {
        char buf[16];
        if (band_form && j == cols - 1) {
            return std::string("Z");
        }
        std::snprintf(buf, sizeof buf, "%c%d", band_form ? 'A' : 'C', j);
        return std::string(buf);
    };
    auto num = [](double v) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "%.6g", v);
        return std::string(buf);
    };
    auto field = [](const std::string& s, std::size_t width) {
        std::string padded = s;
        if (padded.size() < width) padded.append(width - padded.size(), ' ');
        return padded;
    };

    out << "NAME          " << name << "\n";
    out << "ROWS\n";
    out << " N  COST\n";
    for (int i = 0; i < rows; ++i) {
        out << " L  " << row_name(i) << "\n";
    }
    out << "COLUMNS\n";
    for (int j = 0; j < cols; ++j) {
        if (problem.objective[j] != 0.0) {
            out << "    " << field(col_name(j), 10) << field("COST", 10)
                << num(problem.objective[j]) << "\n";
        }
        for (int i = 0; i < rows; ++i) {
            const double v = problem.constraints(i, j);
            if (v == 0.0) continue;
            out << "    " << field(col_name(j), 10) << field(row_name(i), 10) << num(v) << "\n";
        }
    }
    out << "RHS\n";
    for (int i = 0; i < rows; ++i) {
        if (problem.rhs[i] == 0.0) continue;
        out << "    " << field("RHS", 10) << field(row_name(i), 10) << num(problem.rhs[i]) << "\n";
    }
    out << "BOUNDS\n";
    for (int j = 0; j < cols; ++j) {
        if (problem.free_column[j]) {
            out << " FR " << field("BND", 10) << col_name(j) << "\n";
        }
    }
    out << "ENDATA\n";
}

}  // namespace chebclust
