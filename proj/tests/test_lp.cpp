#include <random>
#include <sstream>

#include <doctest.h>

#include "chebclust/basis.hpp"
#include "chebclust/envelope.hpp"
#include "chebclust/lp.hpp"
#include "support.hpp"

using namespace chebclust;

namespace {

LpProblem band_problem(const SignalGroup& group, int degree) {
    return build_lp(build_envelope(group), ChebyshevBasis::monomial(degree));
}

}  // namespace

TEST_CASE("lp construction mirrors the band constraints") {
    const SignalGroup group = testsupport::crossing_lines_group(3);
    const LpProblem problem = band_problem(group, 1);
    REQUIRE(problem.rows() == 6);
    REQUIRE(problem.cols() == 3);
    CHECK(problem.objective[0] == 0.0);
    CHECK(problem.objective[1] == 0.0);
    CHECK(problem.objective[2] == 1.0);
    for (int j = 0; j < 3; ++j) CHECK(problem.free_column[j]);

    // Upper block row for t0 = 0: -a0 - 0*a1 - z <= -1.
    CHECK(problem.constraints(0, 0) == -1.0);
    CHECK(problem.constraints(0, 1) == 0.0);
    CHECK(problem.constraints(0, 2) == -1.0);
    CHECK(problem.rhs[0] == -1.0);
    // Lower block row for t0: a0 + 0*a1 - z <= 0.
    CHECK(problem.constraints(3, 0) == 1.0);
    CHECK(problem.constraints(3, 2) == -1.0);
    CHECK(problem.rhs[3] == 0.0);

    REQUIRE(problem.labels.size() == 6);
    CHECK(problem.labels[0].side == Side::Upper);
    CHECK(problem.labels[0].grid_index == 0);
    CHECK(problem.labels[4].side == Side::Lower);
    CHECK(problem.labels[4].grid_index == 1);
}

TEST_CASE("single point band has the midpoint optimum") {
    const SignalGroup group =
        testsupport::make_group({0.0}, {{2.0}, {0.0}}, {"hi", "lo"});
    const LpProblem problem = band_problem(group, 0);
    const LpSolution solution = solve_simplex(problem);
    REQUIRE(solution.status == LpStatus::Optimal);
    CHECK(solution.objective == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(solution.values[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("crossing lines solve to half the gap") {
    const SignalGroup group = testsupport::crossing_lines_group(101);
    const LpSolution solution = solve_simplex(band_problem(group, 1));
    REQUIRE(solution.status == LpStatus::Optimal);
    CHECK(solution.objective == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("simplex matches brute force vertex enumeration") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> unif(-1.5, 1.5);
    int solved = 0;
    for (int trial = 0; trial < 40; ++trial) {
        const int degree = static_cast<int>(rng() % 3);
        const int n_points = degree + 2 + static_cast<int>(rng() % (7 - degree - 1));
        const int n_signals = 2 + static_cast<int>(rng() % 3);
        Eigen::VectorXd times(n_points);
        for (int i = 0; i < n_points; ++i) times[i] = i + 0.25 * unif(rng);
        Eigen::MatrixXd rows(n_signals, n_points);
        for (int r = 0; r < n_signals; ++r)
            for (int c = 0; c < n_points; ++c) rows(r, c) = unif(rng) + 0.2 * c;
        SignalGroup group;
        group.grid = Grid(times);
        group.samples = rows;
        for (int r = 0; r < n_signals; ++r) group.ids.push_back("s" + std::to_string(r));

        const LpProblem problem = band_problem(group, degree);
        const LpSolution solution = solve_simplex(problem);
        REQUIRE(solution.status == LpStatus::Optimal);
        const auto brute = testsupport::enumerate_lp_optimum(problem);
        REQUIRE(brute.has_value());
        CHECK(solution.objective == doctest::Approx(*brute).epsilon(1e-9));

        // Feasibility of the reported point.
        const Eigen::VectorXd residual =
            problem.constraints * solution.values - problem.rhs;
        CHECK(residual.maxCoeff() <= 1e-9);
        ++solved;
    }
    CHECK(solved == 40);
}

TEST_CASE("simplex detects an unbounded objective") {
    LpProblem problem;
    problem.objective.resize(1);
    problem.objective << -1.0;  // minimize -x with only x >= -5
    problem.constraints.resize(1, 1);
    problem.constraints << -1.0;
    problem.rhs.resize(1);
    problem.rhs << 5.0;
    problem.free_column = {true};
    CHECK(solve_simplex(problem).status == LpStatus::Unbounded);
}

TEST_CASE("simplex detects infeasibility") {
    LpProblem problem;
    problem.objective.resize(1);
    problem.objective << 1.0;
    problem.constraints.resize(2, 1);
    problem.constraints << 1.0, -1.0;  // x <= -1 and x >= 1
    problem.rhs.resize(2);
    problem.rhs << -1.0, -1.0;
    problem.free_column = {true};
    CHECK(solve_simplex(problem).status == LpStatus::Infeasible);
}

TEST_CASE("duplicated constraints do not upset the pivot rule") {
    const SignalGroup group = testsupport::crossing_lines_group(5);
    LpProblem problem = band_problem(group, 1);
    const int m = problem.rows();
    LpProblem doubled;
    doubled.objective = problem.objective;
    doubled.free_column = problem.free_column;
    doubled.constraints.resize(2 * m, problem.cols());
    doubled.constraints << problem.constraints, problem.constraints;
    doubled.rhs.resize(2 * m);
    doubled.rhs << problem.rhs, problem.rhs;
    const LpSolution solution = solve_simplex(doubled);
    REQUIRE(solution.status == LpStatus::Optimal);
    CHECK(solution.objective == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("convex hull membership with interior origin") {
    Eigen::MatrixXd columns(2, 3);
    columns << 1.0, -1.0, -1.0,
               0.0,  1.0, -1.0;
    const ConvexHullResult result = feasibility_in_convex_hull(columns);
    REQUIRE(result.feasible);
    REQUIRE(result.weights.size() == 3);
    CHECK(result.weights.minCoeff() >= 0.0);
    CHECK(result.weights.sum() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK((columns * result.weights).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("convex hull separation when the origin is outside") {
    Eigen::MatrixXd columns(2, 2);
    columns << 1.0, 1.0,
               0.0, 1.0;
    const ConvexHullResult result = feasibility_in_convex_hull(columns);
    REQUIRE_FALSE(result.feasible);
    REQUIRE(result.direction.size() == 2);
    CHECK(result.direction.cwiseAbs().maxCoeff() == doctest::Approx(1.0).epsilon(1e-12));
    for (int j = 0; j < columns.cols(); ++j) {
        CHECK(result.direction.dot(columns.col(j)) > 0.0);
    }
}

TEST_CASE("convex hull separation on random outside instances") {
    std::mt19937_64 rng(555);
    std::uniform_real_distribution<double> unif(0.2, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        // All columns live in the open halfspace {x : x[0] > 0}.
        const int d = 2 + static_cast<int>(rng() % 3);
        const int cols = 1 + static_cast<int>(rng() % 5);
        Eigen::MatrixXd columns(d, cols);
        for (int j = 0; j < cols; ++j) {
            columns(0, j) = unif(rng);
            for (int i = 1; i < d; ++i) columns(i, j) = unif(rng) - 1.1;
        }
        const ConvexHullResult result = feasibility_in_convex_hull(columns);
        REQUIRE_FALSE(result.feasible);
        for (int j = 0; j < cols; ++j) {
            CHECK(result.direction.dot(columns.col(j)) > 0.0);
        }
    }
}

TEST_CASE("mps export carries the full model") {
    const SignalGroup group = testsupport::crossing_lines_group(3);
    const LpProblem problem = band_problem(group, 1);
    std::ostringstream out;
    write_mps(problem, out, "BANDLP");
    const std::string text = out.str();
    CHECK(text.find("NAME") != std::string::npos);
    CHECK(text.find("BANDLP") != std::string::npos);
    CHECK(text.find("ROWS") != std::string::npos);
    CHECK(text.find("COLUMNS") != std::string::npos);
    CHECK(text.find("RHS") != std::string::npos);
    CHECK(text.find("BOUNDS") != std::string::npos);
    CHECK(text.find("ENDATA") != std::string::npos);
    CHECK(text.find("U0000") != std::string::npos);
    CHECK(text.find("L0002") != std::string::npos);
    CHECK(text.find(" Z ") != std::string::npos);
    // Free variables need explicit FR bound records.
    CHECK(text.find("FR ") != std::string::npos);
}
