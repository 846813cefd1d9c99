#pragma once

#include <Eigen/Dense>
#include <optional>
#include <utility>
#include <vector>

namespace riskconvex::lp {

enum class LpStatus { Optimal, Infeasible, Unbounded };

/// min c^T x  s.t.  Aeq x = beq,  Ain x <= bin,  x >= lower_bounds.
/// lower_bounds unset means all variables free; entries may be -inf.
struct LinearProgram {
    Eigen::VectorXd objective;
    Eigen::MatrixXd eq_matrix;   // 0 x n when absent
    Eigen::VectorXd eq_rhs;
    Eigen::MatrixXd ineq_matrix; // 0 x n when absent
    Eigen::VectorXd ineq_rhs;
    std::optional<Eigen::VectorXd> lower_bounds;

    int num_vars() const { return static_cast<int>(objective.size()); }

    /// min c^T x s.t. A x = b, x >= 0 (the recourse-evaluation shape).
    static LinearProgram nonneg_equality(const Eigen::VectorXd& c, const Eigen::MatrixXd& A,
                                         const Eigen::VectorXd& b);
};

struct LpOptions {
    double feas_tol = 1e-9;     // absolute residual tolerance
    double obj_rel_tol = 1e-7;  // relative tolerance on objective comparisons
    int refresh_interval = 50;  // basis-inverse residual checkpoint cadence (pivots)
    long max_iterations = 0;    // 0 = derived from problem size
};

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    double value = 0.0;
    Eigen::VectorXd point;
    Eigen::VectorXd dual_point; // one multiplier per row: eq rows first, then ineq rows
    long iterations = 0;
    int refreshes = 0;
};

LpSolution solve_lp(const LinearProgram& prog, const LpOptions& opts = {});

/// Decides whether {v : A v < b} is nonempty via the auxiliary program
/// max delta s.t. A v + delta 1 <= b, delta <= 1. Strict iff delta* > threshold.
struct StrictFeasibility {
    bool feasible = false;
    Eigen::VectorXd witness;
    double delta = 0.0;
};

StrictFeasibility feasible_strict(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                  double threshold = 1e-7, const LpOptions& opts = {});

// ---------------------------------------------------------------------------
// Standard-form interface: min c^T y, A y = b, y >= 0 with sparse columns.
// Large structured models (the scenario epigraph program) are assembled here
// directly so a crash basis can be supplied.

struct StandardFormLp {
    int nrows = 0;
    Eigen::VectorXd rhs;
    std::vector<double> cost;
    std::vector<std::vector<std::pair<int, double>>> cols;

    explicit StandardFormLp(int rows = 0) : nrows(rows), rhs(Eigen::VectorXd::Zero(rows)) {}

    int add_column(double c, std::vector<std::pair<int, double>> entries) {
        cost.push_back(c);
        cols.push_back(std::move(entries));
        return static_cast<int>(cols.size()) - 1;
    }
    int num_cols() const { return static_cast<int>(cols.size()); }
};

struct StandardSolution {
    LpStatus status = LpStatus::Infeasible;
    double value = 0.0;
    Eigen::VectorXd x;
    Eigen::VectorXd row_duals;
    long iterations = 0;
    int refreshes = 0;
};

/// basis_hint, when given, maps each row to the column starting basic there.
/// An invalid hint (singular basis or infeasible basic point) falls back to
/// the usual phase-1 start.
StandardSolution solve_standard(const StandardFormLp& prob, const LpOptions& opts = {},
                                const std::vector<int>* basis_hint = nullptr);

} // namespace riskconvex::lp
