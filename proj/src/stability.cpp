#include "riskconvex/stability.hpp"

#include "riskconvex/errors.hpp"
#include "riskconvex/lp.hpp"
#include "riskconvex/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace riskconvex::stability {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void FirstStageSpec::validate() const {
    if (T.cols() != h.size() || T.cols() != A.cols()) throw ParseError("first_stage: dimension mismatch");
    if (A.rows() != b.size()) throw ParseError("first_stage: A/b row mismatch");
    lp::LinearProgram feas;
    feas.objective = Eigen::VectorXd::Zero(n());
    feas.eq_matrix = Eigen::MatrixXd::Zero(0, n());
    feas.eq_rhs = Eigen::VectorXd::Zero(0);
    feas.ineq_matrix = A;
    feas.ineq_rhs = b;
    if (lp::solve_lp(feas).status != lp::LpStatus::Optimal)
        throw ParseError("first_stage: X is empty");
    // T(X) bounded iff each coordinate of T xi is bounded over X.
    for (int k = 0; k < s(); ++k) {
        for (const double sign : {1.0, -1.0}) {
            lp::LinearProgram p = feas;
            p.objective = sign * T.row(k).transpose();
            if (lp::solve_lp(p).status == lp::LpStatus::Unbounded)
                throw ParseError("first_stage: T(X) is unbounded");
        }
    }
}

FirstStageSpec FirstStageSpec::box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
    const int n = static_cast<int>(lo.size());
    FirstStageSpec fs;
    fs.T = Eigen::MatrixXd::Identity(n, n);
    fs.h = Eigen::VectorXd::Zero(n);
    fs.A = Eigen::MatrixXd::Zero(2 * n, n);
    fs.b = Eigen::VectorXd::Zero(2 * n);
    for (int k = 0; k < n; ++k) {
        fs.A(2 * k, k) = 1.0;
        fs.b[2 * k] = hi[k];
        fs.A(2 * k + 1, k) = -1.0;
        fs.b[2 * k + 1] = -lo[k];
    }
    return fs;
}

namespace {

struct EpigraphLp {
    lp::StandardFormLp sf{0};
    std::vector<int> hint;
    double obj_shift = 0.0;
    // column ids for recovering xi
    std::vector<int> xi_pos, xi_neg;
    Eigen::VectorXd xi0;
};

EpigraphLp build_epigraph(const FirstStageSpec& fs, const poly::ConeComplex& cx,
                          const std::vector<std::pair<double, double>>& atoms,
                          const measures::Empirical& sc, const Eigen::VectorXd* tilt) {
    const int n = fs.n();
    const int s = fs.s();
    const int N = cx.num_vertices();
    const int ns = static_cast<int>(sc.points.rows());
    const int K = static_cast<int>(atoms.size());
    const int mrows = static_cast<int>(fs.A.rows()) + ns * N + K * ns;

    EpigraphLp e;
    e.sf = lp::StandardFormLp(mrows);

    // Anchor point: strict interior when available, else any feasible vertex.
    Eigen::VectorXd xi0;
    {
        const auto strict = lp::feasible_strict(fs.A, fs.b);
        if (strict.feasible) {
            xi0 = strict.witness;
        } else {
            lp::LinearProgram feas;
            feas.objective = Eigen::VectorXd::Zero(n);
            feas.eq_matrix = Eigen::MatrixXd::Zero(0, n);
            feas.eq_rhs = Eigen::VectorXd::Zero(0);
            feas.ineq_matrix = fs.A;
            feas.ineq_rhs = fs.b;
            const auto sol = lp::solve_lp(feas);
            if (sol.status != lp::LpStatus::Optimal) throw ParseError("first_stage: X is empty");
            xi0 = sol.point;
        }
    }
    e.xi0 = xi0;
    const Eigen::VectorXd x0 = fs.T * xi0;

    const int row_box0 = 0;
    const int row_phi0 = static_cast<int>(fs.A.rows());
    const int row_u0 = row_phi0 + ns * N;
    auto phi_row = [&](int i, int j) { return row_phi0 + j * N + i; };
    auto u_row = [&](int k, int j) { return row_u0 + k * ns + j; };

    for (int rr = 0; rr < fs.A.rows(); ++rr) e.sf.rhs[row_box0 + rr] = fs.b[rr] - fs.A.row(rr).dot(xi0);
    for (int j = 0; j < ns; ++j)
        for (int i = 0; i < N; ++i)
            e.sf.rhs[phi_row(i, j)] =
                cx.vertices[i].dot(sc.points.row(j).transpose() - x0);
    // u rows have rhs 0.

    Eigen::VectorXd hcost = fs.h;
    if (tilt) hcost += *tilt;
    e.obj_shift = fs.h.dot(xi0);

    // xi columns (free, split).
    e.xi_pos.resize(n);
    e.xi_neg.resize(n);
    for (int v = 0; v < n; ++v) {
        std::vector<std::pair<int, double>> col;
        for (int rr = 0; rr < fs.A.rows(); ++rr)
            if (fs.A(rr, v) != 0.0) col.emplace_back(row_box0 + rr, fs.A(rr, v));
        for (int j = 0; j < ns; ++j)
            for (int i = 0; i < N; ++i) {
                const double coef = cx.vertices[i].dot(fs.T.col(v));
                if (coef != 0.0) col.emplace_back(phi_row(i, j), coef);
            }
        e.xi_pos[v] = e.sf.add_column(hcost[v], col);
        for (auto& [rr, vv] : col) vv = -vv;
        e.xi_neg[v] = e.sf.add_column(-hcost[v], std::move(col));
    }

    // f_j columns (free, split): +1 in every phi row of scenario j, -1 in u rows.
    std::vector<int> f_pos(ns), f_neg(ns);
    for (int j = 0; j < ns; ++j) {
        std::vector<std::pair<int, double>> col;
        for (int i = 0; i < N; ++i) col.emplace_back(phi_row(i, j), 1.0);
        for (int k = 0; k < K; ++k) col.emplace_back(u_row(k, j), -1.0);
        f_pos[j] = e.sf.add_column(0.0, col);
        for (auto& [rr, vv] : col) vv = -vv;
        f_neg[j] = e.sf.add_column(0.0, std::move(col));
    }

    // eta_k columns (free, split): +1 in the u rows of atom k.
    for (int k = 0; k < K; ++k) {
        std::vector<std::pair<int, double>> col;
        for (int j = 0; j < ns; ++j) col.emplace_back(u_row(k, j), 1.0);
        e.sf.add_column(atoms[k].second, col);
        for (auto& [rr, vv] : col) vv = -vv;
        e.sf.add_column(-atoms[k].second, std::move(col));
    }

    // u_{kj} >= 0 with cost w_k p_j / alpha_k.
    std::vector<std::vector<int>> u_cols(K, std::vector<int>(ns));
    for (int k = 0; k < K; ++k)
        for (int j = 0; j < ns; ++j)
            u_cols[k][j] = e.sf.add_column(atoms[k].second * sc.weights[j] / atoms[k].first,
                                           {{u_row(k, j), 1.0}});

    // Slacks / surpluses.
    std::vector<int> box_slack(fs.A.rows());
    for (int rr = 0; rr < fs.A.rows(); ++rr)
        box_slack[rr] = e.sf.add_column(0.0, {{row_box0 + rr, 1.0}});
    std::vector<std::vector<int>> t_phi(N, std::vector<int>(ns));
    for (int j = 0; j < ns; ++j)
        for (int i = 0; i < N; ++i) t_phi[i][j] = e.sf.add_column(0.0, {{phi_row(i, j), -1.0}});
    std::vector<std::vector<int>> t_u(K, std::vector<int>(ns));
    for (int k = 0; k < K; ++k)
        for (int j = 0; j < ns; ++j) t_u[k][j] = e.sf.add_column(0.0, {{u_row(k, j), -1.0}});

    // Crash basis: slacks on box rows; per scenario, f_j basic on its argmax
    // phi row and surpluses elsewhere; u or its surplus depending on sign.
    e.hint.assign(mrows, -1);
    for (int rr = 0; rr < fs.A.rows(); ++rr) e.hint[row_box0 + rr] = box_slack[rr];
    for (int j = 0; j < ns; ++j) {
        int istar = 0;
        double best = e.sf.rhs[phi_row(0, j)];
        for (int i = 1; i < N; ++i) {
            if (e.sf.rhs[phi_row(i, j)] > best) {
                best = e.sf.rhs[phi_row(i, j)];
                istar = i;
            }
        }
        e.hint[phi_row(istar, j)] = best >= 0.0 ? f_pos[j] : f_neg[j];
        for (int i = 0; i < N; ++i)
            if (i != istar) e.hint[phi_row(i, j)] = t_phi[i][j];
        for (int k = 0; k < K; ++k)
            e.hint[u_row(k, j)] = best >= 0.0 ? u_cols[k][j] : t_u[k][j];
    }
    return e;
}

} // namespace

SolveResult solve_P(const FirstStageSpec& fs, const poly::ConeComplex& cx,
                    const risk::DistortionFunction& g, const measures::MeasureModel& scenarios,
                    int alpha_cells, bool check_uniqueness) {
    if (!scenarios.is_empirical()) throw Unsupported("solve_P needs an empirical scenario measure");
    const auto& sc = std::get<measures::Empirical>(scenarios.model);
    const auto atoms = risk::distortion_measure(g).discretize(risk::alpha_cell_bounds(alpha_cells));
    if (atoms.empty()) throw InvalidDistortion("mixing measure discretized to nothing");

    auto run = [&](const Eigen::VectorXd* tilt) {
        const auto e = build_epigraph(fs, cx, atoms, sc, tilt);
        lp::LpOptions opts;
        const auto sol = lp::solve_standard(e.sf, opts, &e.hint);
        if (sol.status == lp::LpStatus::Unbounded)
            throw NumericalFailure("scenario program unbounded; T(X) unbounded in a descent direction");
        if (sol.status != lp::LpStatus::Optimal)
            throw NumericalFailure("scenario program infeasible");
        SolveResult out;
        out.xi_star = e.xi0;
        for (int v = 0; v < fs.n(); ++v)
            out.xi_star[v] += sol.x[e.xi_pos[v]] - sol.x[e.xi_neg[v]];
        out.x_star = fs.T * out.xi_star;
        out.value = sol.value + e.obj_shift;
        out.scenario_count = static_cast<std::size_t>(sc.points.rows());
        out.iterations = sol.iterations;
        return out;
    };

    SolveResult base = run(nullptr);
    if (check_uniqueness) {
        Rng rng(20240331);
        Eigen::VectorXd tilt(fs.n());
        for (int v = 0; v < fs.n(); ++v) tilt[v] = 1e-9 * (2.0 * rng.next_double() - 1.0);
        const auto plus = run(&tilt);
        tilt = -tilt;
        const auto minus = run(&tilt);
        if ((plus.x_star - base.x_star).cwiseAbs().maxCoeff() > 1e-6 ||
            (minus.x_star - base.x_star).cwiseAbs().maxCoeff() > 1e-6)
            base.unique = false;
    }
    return base;
}

double hausdorff_drift(const SolveResult& a, const SolveResult& b) {
    return (a.x_star - b.x_star).norm();
}

StabilityResult stability_experiment(const FirstStageSpec& fs, const poly::ConeComplex& cx,
                                     const risk::DistortionFunction& g,
                                     const measures::MeasureModel& base,
                                     const std::vector<double>& radii, std::size_t n_scen,
                                     int n_reps, std::uint64_t seed, double kappa, double p,
                                     PerturbationFamily family, int alpha_cells) {
    if (!(kappa > 0.0)) throw ParseError("stability experiment needs kappa > 0 from certification");
    const auto L = risk::kusuoka_lipschitz_L(g, p);
    if (!L.finite) throw Unsupported("stability bound needs a finite Kusuoka Lipschitz constant");
    fs.validate();

    StabilityResult out;
    out.lipschitz_L = L.value;
    out.max_vertex_norm = cx.max_vertex_norm();
    out.kappa = kappa;

    const int s = base.dim;
    for (int rep = 0; rep < n_reps; ++rep) {
        const auto b0 = measures::sample(base, n_scen, substream_seed(seed, 100 + rep));
        Eigen::MatrixXd pts0(n_scen, s);
        for (int k = 0; k < s; ++k)
            for (std::size_t j = 0; j < n_scen; ++j) pts0(static_cast<Eigen::Index>(j), k) = b0.component(k)[j];
        const auto m0 = measures::MeasureModel::empirical(pts0);
        const auto sol0 = solve_P(fs, cx, g, m0, alpha_cells, true);

        for (std::size_t ri = 0; ri < radii.size(); ++ri) {
            const double radius = radii[ri];
            measures::MeasureModel mp = m0;
            if (family == PerturbationFamily::Shift) {
                Eigen::MatrixXd pts = pts0;
                const double step = radius / std::sqrt(static_cast<double>(s));
                pts.array() += step;
                mp = measures::MeasureModel::empirical(pts);
            } else if (family == PerturbationFamily::Reweight) {
                Eigen::VectorXd w = Eigen::VectorXd::Constant(pts0.rows(), 1.0);
                Eigen::VectorXd norms(pts0.rows());
                for (int j = 0; j < pts0.rows(); ++j) norms[j] = pts0.row(j).norm();
                std::vector<int> order(pts0.rows());
                std::iota(order.begin(), order.end(), 0);
                std::sort(order.begin(), order.end(), [&](int a, int b2) { return norms[a] < norms[b2]; });
                const double tilt = std::min(0.999, radius);
                for (int rank = 0; rank < pts0.rows(); ++rank) {
                    const double sgn = rank < pts0.rows() / 2 ? -1.0 : 1.0;
                    w[order[rank]] = 1.0 + sgn * tilt;
                }
                w /= w.sum();
                mp = measures::MeasureModel::empirical(pts0, w);
            } else {
                const auto br = measures::sample(base, n_scen, substream_seed(seed, 5000 + rep * 97 + ri));
                Eigen::MatrixXd pts(n_scen, s);
                for (int k = 0; k < s; ++k)
                    for (std::size_t j = 0; j < n_scen; ++j) pts(static_cast<Eigen::Index>(j), k) = br.component(k)[j];
                mp = measures::MeasureModel::empirical(pts);
            }

            const double d_p = measures::wasserstein_p(m0, mp, p);
            const auto sol1 = solve_P(fs, cx, g, mp, alpha_cells, true);
            StabilityRow row;
            row.radius = radius;
            row.rep = rep;
            row.d_p = d_p;
            row.drift = hausdorff_drift(sol0, sol1);
            row.bound = 2.0 * std::sqrt(L.value * out.max_vertex_norm / kappa * d_p);
            row.pass = row.drift <= row.bound + 1e-12;
            row.unique = sol0.unique && sol1.unique;
            if (!row.pass) ++out.violations;
            out.rows.push_back(row);
        }
    }

    // log-log regression of drift against d_p.
    std::vector<double> lx, ly;
    for (const auto& row : out.rows) {
        if (row.d_p > 1e-14 && row.drift > 1e-14) {
            lx.push_back(std::log(row.d_p));
            ly.push_back(std::log(row.drift));
        }
    }
    if (lx.size() >= 2) {
        const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / lx.size();
        const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / ly.size();
        double cov = 0.0, var = 0.0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            cov += (lx[i] - mx) * (ly[i] - my);
            var += (lx[i] - mx) * (lx[i] - mx);
        }
        out.loglog_slope = var > 0.0 ? cov / var : 0.0;
    }
    return out;
}

} // namespace riskconvex::stability
