#include "riskconvex/lp.hpp"

#include "riskconvex/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace riskconvex::lp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Revised simplex with a dense explicit basis inverse, eta-style rank-1
// updates, and residual checkpoints every opts.refresh_interval pivots.
// Dantzig pricing with a switch to Bland's rule once degeneracy persists.
class RevisedSimplex {
  public:
    RevisedSimplex(const StandardFormLp& prob, const LpOptions& opts)
        : opts_(opts), m_(prob.nrows), n_(prob.num_cols()) {
        rowsign_.assign(m_, 1.0);
        b_ = prob.rhs;
        for (int i = 0; i < m_; ++i) {
            if (b_[i] < 0.0) {
                rowsign_[i] = -1.0;
                b_[i] = -b_[i];
            }
        }
        cols_.resize(n_);
        for (int j = 0; j < n_; ++j) {
            cols_[j].reserve(prob.cols[j].size());
            for (auto [r, v] : prob.cols[j]) cols_[j].emplace_back(r, v * rowsign_[r]);
        }
        cost_ = prob.cost;
    }

    StandardSolution run(const std::vector<int>* basis_hint) {
        StandardSolution out;
        bool basis_ready = false;
        if (basis_hint && static_cast<int>(basis_hint->size()) == m_) basis_ready = try_hint(*basis_hint);
        if (!basis_ready) {
            if (!phase_one()) {
                out.status = LpStatus::Infeasible;
                out.iterations = iterations_;
                out.refreshes = refreshes_;
                return out;
            }
        }
        const bool bounded = iterate(/*phase1=*/false);
        out.iterations = iterations_;
        out.refreshes = refreshes_;
        if (!bounded) {
            out.status = LpStatus::Unbounded;
            return out;
        }
        out.status = LpStatus::Optimal;
        out.x = Eigen::VectorXd::Zero(n_);
        for (int i = 0; i < m_; ++i)
            if (basis_[i] < n_) out.x[basis_[i]] = xb_[i];
        out.value = 0.0;
        for (int j = 0; j < n_; ++j) out.value += cost_[j] * out.x[j];
        Eigen::VectorXd y = duals();
        out.row_duals = Eigen::VectorXd(m_);
        for (int i = 0; i < m_; ++i) out.row_duals[i] = y[i] * rowsign_[i];
        return out;
    }

  private:
    const LpOptions opts_;
    int m_;
    int n_;                  // structural columns; artificials live at indices >= n_
    Eigen::VectorXd b_;
    std::vector<double> rowsign_;
    std::vector<std::vector<std::pair<int, double>>> cols_;
    std::vector<double> cost_;

    std::vector<int> basis_;
    std::vector<char> in_basis_;
    Eigen::MatrixXd binv_;
    Eigen::VectorXd xb_;
    long iterations_ = 0;
    int refreshes_ = 0;
    int n_art_ = 0;

    double col_cost(int j, bool phase1) const {
        if (phase1) return j >= n_ ? 1.0 : 0.0;
        return j >= n_ ? 0.0 : cost_[j];
    }

    // d = B^-1 a_j using column sparsity.
    Eigen::VectorXd ftran(int j) const {
        Eigen::VectorXd d = Eigen::VectorXd::Zero(m_);
        if (j >= n_) {
            d = binv_.col(j - n_);
            return d;
        }
        for (auto [r, v] : cols_[j]) d.noalias() += v * binv_.col(r);
        return d;
    }

    Eigen::VectorXd duals() const {
        Eigen::VectorXd cb(m_);
        for (int i = 0; i < m_; ++i) cb[i] = col_cost(basis_[i], false);
        return binv_.transpose() * cb;
    }

    bool try_hint(const std::vector<int>& hint) {
        Eigen::MatrixXd B = Eigen::MatrixXd::Zero(m_, m_);
        for (int i = 0; i < m_; ++i) {
            const int j = hint[i];
            if (j < 0 || j >= n_) return false;
            for (auto [r, v] : cols_[j]) B(r, i) = v;
        }
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
        const Eigen::MatrixXd binv = lu.inverse();
        if (!binv.allFinite()) return false;
        if ((B * binv - Eigen::MatrixXd::Identity(m_, m_)).cwiseAbs().maxCoeff() > 1e-7) return false;
        Eigen::VectorXd xb = binv * b_;
        if (xb.minCoeff() < -opts_.feas_tol * (1.0 + b_.cwiseAbs().maxCoeff())) return false;
        basis_ = hint;
        binv_ = binv;
        xb_ = xb.cwiseMax(0.0);
        in_basis_.assign(n_, 0);
        for (int j : basis_) in_basis_[j] = 1;
        n_art_ = 0;
        return true;
    }

    bool phase_one() {
        n_art_ = m_;
        basis_.resize(m_);
        for (int i = 0; i < m_; ++i) basis_[i] = n_ + i;
        in_basis_.assign(n_, 0);
        binv_ = Eigen::MatrixXd::Identity(m_, m_);
        xb_ = b_;
        if (!iterate(/*phase1=*/true))
            throw NumericalFailure("phase-1 objective reported unbounded");
        double art_sum = 0.0;
        for (int i = 0; i < m_; ++i)
            if (basis_[i] >= n_) art_sum += xb_[i];
        const double scale = 1.0 + b_.cwiseAbs().maxCoeff();
        return art_sum <= 1e-7 * scale;
    }

    long max_iterations() const {
        if (opts_.max_iterations > 0) return opts_.max_iterations;
        return 20000 + 200L * m_ + 4L * n_;
    }

    // Returns false on unboundedness.
    bool iterate(bool phase1) {
        const double dual_tol = 1e-9;
        const long cap = max_iterations();
        long degenerate_run = 0;
        bool bland = false;
        int since_refresh = 0;

        while (true) {
            if (iterations_ >= cap)
                throw NumericalFailure("simplex iteration cap exceeded (persistent degeneracy)");

            Eigen::VectorXd cb(m_);
            for (int i = 0; i < m_; ++i) cb[i] = col_cost(basis_[i], phase1);
            const Eigen::VectorXd y = binv_.transpose() * cb;

            int enter = -1;
            double best_red = -dual_tol;
            for (int j = 0; j < n_; ++j) {
                if (in_basis_[j]) continue;
                double red = col_cost(j, phase1);
                for (auto [r, v] : cols_[j]) red -= y[r] * v;
                if (bland) {
                    if (red < -dual_tol) {
                        enter = j;
                        break;
                    }
                } else if (red < best_red) {
                    best_red = red;
                    enter = j;
                }
            }
            if (enter < 0) return true; // optimal for this phase

            const Eigen::VectorXd d = ftran(enter);

            // Ratio test. Rows holding a zero-level artificial are evicted first
            // so artificials can never re-grow in phase 2.
            int leave = -1;
            double theta = kInf;
            double best_piv = 0.0;
            for (int i = 0; i < m_; ++i) {
                const bool art_row = basis_[i] >= n_;
                if (art_row && std::abs(d[i]) > 1e-9 && xb_[i] <= opts_.feas_tol) {
                    leave = i;
                    theta = 0.0;
                    best_piv = std::abs(d[i]);
                    break;
                }
                if (d[i] > 1e-9) {
                    const double ratio = xb_[i] / d[i];
                    const bool better =
                        ratio < theta - 1e-12 ||
                        (ratio < theta + 1e-12 &&
                         (bland ? (leave < 0 || basis_[i] < basis_[leave]) : std::abs(d[i]) > best_piv));
                    if (better) {
                        theta = ratio;
                        leave = i;
                        best_piv = std::abs(d[i]);
                    }
                }
            }
            if (leave < 0) {
                if (phase1) throw NumericalFailure("phase-1 ratio test failed");
                return false; // unbounded
            }

            // Pivot: basis exchange plus eta update of the inverse.
            const double piv = d[leave];
            const int old = basis_[leave];
            if (old < n_) in_basis_[old] = 0;
            basis_[leave] = enter;
            in_basis_[enter] = 1;

            xb_.noalias() -= theta * d;
            xb_[leave] = theta;
            for (int i = 0; i < m_; ++i)
                if (xb_[i] < 0.0 && xb_[i] > -1e-11) xb_[i] = 0.0;

            const Eigen::RowVectorXd prow = binv_.row(leave);
            Eigen::VectorXd factor = d / piv;
            factor[leave] = 0.0;
            binv_.noalias() -= factor * prow;
            binv_.row(leave) = prow / piv;

            ++iterations_;
            ++since_refresh;
            if (theta <= 1e-11) {
                if (++degenerate_run > 2L * (m_ + 1) + 16) bland = true;
            } else {
                degenerate_run = 0;
            }

            if (since_refresh >= opts_.refresh_interval) {
                since_refresh = 0;
                if (!residual_ok()) refactor();
            }
        }
    }

    bool residual_ok() const {
        Eigen::VectorXd bx = Eigen::VectorXd::Zero(m_);
        for (int i = 0; i < m_; ++i) {
            const int j = basis_[i];
            if (j >= n_) {
                bx[j - n_] += xb_[i];
            } else {
                for (auto [r, v] : cols_[j]) bx[r] += v * xb_[i];
            }
        }
        const double scale = 1.0 + b_.cwiseAbs().maxCoeff();
        return (bx - b_).cwiseAbs().maxCoeff() <= opts_.feas_tol * scale;
    }

    void refactor() {
        Eigen::MatrixXd B = Eigen::MatrixXd::Zero(m_, m_);
        for (int i = 0; i < m_; ++i) {
            const int j = basis_[i];
            if (j >= n_) {
                B(j - n_, i) = 1.0;
            } else {
                for (auto [r, v] : cols_[j]) B(r, i) = v;
            }
        }
        binv_ = Eigen::PartialPivLU<Eigen::MatrixXd>(B).inverse();
        xb_ = (binv_ * b_).cwiseMax(0.0);
        ++refreshes_;
    }
};

} // namespace

LinearProgram LinearProgram::nonneg_equality(const Eigen::VectorXd& c, const Eigen::MatrixXd& A,
                                             const Eigen::VectorXd& b) {
    LinearProgram p;
    p.objective = c;
    p.eq_matrix = A;
    p.eq_rhs = b;
    p.ineq_matrix = Eigen::MatrixXd::Zero(0, c.size());
    p.ineq_rhs = Eigen::VectorXd::Zero(0);
    p.lower_bounds = Eigen::VectorXd::Zero(c.size());
    return p;
}

StandardSolution solve_standard(const StandardFormLp& prob, const LpOptions& opts,
                                const std::vector<int>* basis_hint) {
    RevisedSimplex s(prob, opts);
    return s.run(basis_hint);
}

LpSolution solve_lp(const LinearProgram& prog, const LpOptions& opts) {
    const int n = prog.num_vars();
    const int me = static_cast<int>(prog.eq_rhs.size());
    const int mi = static_cast<int>(prog.ineq_rhs.size());
    if (!prog.objective.allFinite()) throw NumericalFailure("objective has non-finite coefficients");

    StandardFormLp sf(me + mi);
    for (int i = 0; i < me; ++i) sf.rhs[i] = prog.eq_rhs[i];
    for (int i = 0; i < mi; ++i) sf.rhs[me + i] = prog.ineq_rhs[i];

    // Variable transform: finite lower bound -> shift; free -> split pair.
    double obj_shift = 0.0;
    struct VarMap {
        int pos = -1;
        int neg = -1;
        double shift = 0.0;
    };
    std::vector<VarMap> vmap(n);
    auto column_entries = [&](int k) {
        std::vector<std::pair<int, double>> e;
        for (int i = 0; i < me; ++i)
            if (prog.eq_matrix(i, k) != 0.0) e.emplace_back(i, prog.eq_matrix(i, k));
        for (int i = 0; i < mi; ++i)
            if (prog.ineq_matrix(i, k) != 0.0) e.emplace_back(me + i, prog.ineq_matrix(i, k));
        return e;
    };
    for (int k = 0; k < n; ++k) {
        const double lb = prog.lower_bounds ? (*prog.lower_bounds)[k] : -kInf;
        auto entries = column_entries(k);
        if (std::isfinite(lb)) {
            vmap[k].shift = lb;
            if (lb != 0.0) {
                for (auto [r, v] : entries) sf.rhs[r] -= v * lb;
                obj_shift += prog.objective[k] * lb;
            }
            vmap[k].pos = sf.add_column(prog.objective[k], entries);
        } else {
            vmap[k].pos = sf.add_column(prog.objective[k], entries);
            auto neg_entries = entries;
            for (auto& [r, v] : neg_entries) v = -v;
            vmap[k].neg = sf.add_column(-prog.objective[k], std::move(neg_entries));
        }
    }
    for (int i = 0; i < mi; ++i) sf.add_column(0.0, {{me + i, 1.0}});

    StandardSolution ss = solve_standard(sf, opts, nullptr);

    LpSolution out;
    out.status = ss.status;
    out.iterations = ss.iterations;
    out.refreshes = ss.refreshes;
    if (ss.status != LpStatus::Optimal) return out;
    out.point = Eigen::VectorXd(n);
    for (int k = 0; k < n; ++k) {
        double v = ss.x[vmap[k].pos] + vmap[k].shift;
        if (vmap[k].neg >= 0) v -= ss.x[vmap[k].neg];
        out.point[k] = v;
    }
    out.value = ss.value + obj_shift;
    out.dual_point = ss.row_duals;
    return out;
}

StrictFeasibility feasible_strict(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                  double threshold, const LpOptions& opts) {
    const int rows = static_cast<int>(A.rows());
    const int dim = static_cast<int>(A.cols());
    LinearProgram p;
    p.objective = Eigen::VectorXd::Zero(dim + 1);
    p.objective[dim] = -1.0; // max delta
    p.eq_matrix = Eigen::MatrixXd::Zero(0, dim + 1);
    p.eq_rhs = Eigen::VectorXd::Zero(0);
    p.ineq_matrix = Eigen::MatrixXd::Zero(rows + 1, dim + 1);
    p.ineq_rhs = Eigen::VectorXd::Zero(rows + 1);
    p.ineq_matrix.block(0, 0, rows, dim) = A;
    p.ineq_matrix.col(dim).head(rows).setOnes();
    p.ineq_rhs.head(rows) = b;
    p.ineq_matrix(rows, dim) = 1.0; // delta <= 1 keeps the program bounded
    p.ineq_rhs[rows] = 1.0;

    const LpSolution sol = solve_lp(p, opts);
    StrictFeasibility out;
    if (sol.status != LpStatus::Optimal) return out;
    out.delta = sol.point[dim];
    if (out.delta > threshold) {
        out.feasible = true;
        out.witness = sol.point.head(dim);
    }
    return out;
}

} // namespace riskconvex::lp
