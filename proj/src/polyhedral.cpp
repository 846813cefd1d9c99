#include "riskconvex/polyhedral.hpp"

#include "riskconvex/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace riskconvex::poly {

void RecourseSpec::validate() const {
    if (W.rows() < 1 || W.cols() < 1) throw ParseError("recourse: W must be nonempty");
    if (q.size() != W.cols()) throw ParseError("recourse: q length must equal the column count of W");
    if (!W.allFinite() || !q.allFinite()) throw ParseError("recourse: non-finite entries");
}

double ConeComplex::phi(const Eigen::VectorXd& t) const {
    double best = vertices[0].dot(t);
    for (std::size_t i = 1; i < vertices.size(); ++i) best = std::max(best, vertices[i].dot(t));
    return best;
}

int ConeComplex::cone_index(const Eigen::VectorXd& t) const {
    int idx = 0;
    double best = vertices[0].dot(t);
    for (std::size_t i = 1; i < vertices.size(); ++i) {
        const double v = vertices[i].dot(t);
        if (v > best) {
            best = v;
            idx = static_cast<int>(i);
        }
    }
    return idx;
}

bool ConeComplex::adjacent(int i, int j) const {
    if (i > j) std::swap(i, j);
    for (auto [a, b] : adjacency)
        if (a == i && b == j) return true;
    return false;
}

double ConeComplex::max_vertex_norm() const {
    double d = 0.0;
    for (const auto& v : vertices) d = std::max(d, v.norm());
    return d;
}

bool check_complete_recourse(const RecourseSpec& spec) {
    spec.validate();
    const int s = spec.s();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(spec.W);
    qr.setThreshold(1e-10);
    if (qr.rank() < s) return false; // conic hull cannot be full-dimensional
    const Eigen::VectorXd zero_obj = Eigen::VectorXd::Zero(spec.m());
    for (int k = 0; k < s; ++k) {
        for (const double sign : {1.0, -1.0}) {
            Eigen::VectorXd t = Eigen::VectorXd::Zero(s);
            t[k] = sign;
            const auto sol = lp::solve_lp(lp::LinearProgram::nonneg_equality(zero_obj, spec.W, t));
            if (sol.status != lp::LpStatus::Optimal) return false;
        }
    }
    return true;
}

lp::StrictFeasibility check_sufficiently_expensive(const RecourseSpec& spec) {
    spec.validate();
    return lp::feasible_strict(spec.W.transpose(), spec.q);
}

bool check_a6(const RecourseSpec& spec) {
    spec.validate();
    return spec.q.minCoeff() > 0.0;
}

std::vector<Eigen::VectorXd> enumerate_dual_vertices(const RecourseSpec& spec, double dedup_tol) {
    spec.validate();
    if (!check_complete_recourse(spec))
        throw NotPolytope("dual feasible set has an unbounded direction (complete recourse fails)");
    geom::HPolytope dual{spec.W.transpose(), spec.q};
    auto verts = geom::enumerate_vertices(dual, dedup_tol);
    // Deterministic order: lexicographic.
    std::sort(verts.begin(), verts.end(), [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
        for (int k = 0; k < a.size(); ++k) {
            if (a[k] < b[k] - 1e-12) return true;
            if (a[k] > b[k] + 1e-12) return false;
        }
        return false;
    });
    return verts;
}

double evaluate_phi_lp(const RecourseSpec& spec, const Eigen::VectorXd& t) {
    const auto sol = lp::solve_lp(lp::LinearProgram::nonneg_equality(spec.q, spec.W, t));
    if (sol.status != lp::LpStatus::Optimal)
        throw NumericalFailure("recourse LP not optimal; check A1/A2");
    return sol.value;
}

namespace {

// min-norm point of conv{p_1..p_K}; subset search (Caratheodory bound dim+1).
double hull_min_norm(const std::vector<Eigen::VectorXd>& pts) {
    const int K = static_cast<int>(pts.size());
    const int s = static_cast<int>(pts[0].size());
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : pts) best = std::min(best, p.norm());
    const int max_card = std::min(K, s + 1);
    std::vector<int> idx;
    // Iterative subset enumeration by cardinality.
    for (int card = 2; card <= max_card; ++card) {
        idx.assign(card, 0);
        std::iota(idx.begin(), idx.end(), 0);
        while (true) {
            Eigen::MatrixXd G(card, card);
            for (int a = 0; a < card; ++a)
                for (int b = 0; b < card; ++b) G(a, b) = pts[idx[a]].dot(pts[idx[b]]);
            Eigen::FullPivLU<Eigen::MatrixXd> lu(G);
            lu.setThreshold(1e-12);
            if (lu.isInvertible()) {
                const Eigen::VectorXd ginv1 = lu.solve(Eigen::VectorXd::Ones(card));
                const double denom = ginv1.sum();
                if (denom > 1e-14) {
                    const Eigen::VectorXd lam = ginv1 / denom;
                    if (lam.minCoeff() >= -1e-12) {
                        Eigen::VectorXd pt = Eigen::VectorXd::Zero(s);
                        for (int a = 0; a < card; ++a) pt += lam[a] * pts[idx[a]];
                        best = std::min(best, pt.norm());
                    }
                }
            }
            int i = card - 1;
            while (i >= 0 && idx[i] == K - (card - i)) --i;
            if (i < 0) break;
            ++idx[i];
            for (int j = i + 1; j < card; ++j) idx[j] = idx[j - 1] + 1;
        }
    }
    return best;
}

// c_i = min over the ray hull of max_j (d_i - d_j)^T u, as an LP in the hull
// weights.
double ray_hull_gap_lp(const ConeComplex& cx, int i) {
    const auto& cone = cx.cones[i];
    const int K = static_cast<int>(cone.rays.size());
    const int N = cx.num_vertices();
    // Variables: lambda_1..lambda_K >= 0, t free. min t.
    lp::LinearProgram p;
    p.objective = Eigen::VectorXd::Zero(K + 1);
    p.objective[K] = 1.0;
    p.eq_matrix = Eigen::MatrixXd::Zero(1, K + 1);
    p.eq_matrix.block(0, 0, 1, K).setOnes();
    p.eq_rhs = Eigen::VectorXd::Ones(1);
    p.ineq_matrix = Eigen::MatrixXd::Zero(N, K + 1);
    p.ineq_rhs = Eigen::VectorXd::Zero(N);
    for (int j = 0; j < N; ++j) {
        const Eigen::VectorXd diff = cx.vertices[i] - cx.vertices[j];
        for (int k = 0; k < K; ++k) p.ineq_matrix(j, k) = diff.dot(cone.rays[k]);
        p.ineq_matrix(j, K) = -1.0; // (d_i - d_j)^T u <= t
    }
    Eigen::VectorXd lb = Eigen::VectorXd::Zero(K + 1);
    lb[K] = -std::numeric_limits<double>::infinity();
    p.lower_bounds = lb;
    const auto sol = lp::solve_lp(p);
    if (sol.status != lp::LpStatus::Optimal) throw NumericalFailure("ray-hull gap LP failed");
    return sol.value;
}

} // namespace

double alpha_constant(const ConeComplex& cx) {
    if (cx.num_vertices() < 2) throw NumericalFailure("alpha constant needs at least two dual vertices");
    double alpha = std::numeric_limits<double>::infinity();
    for (int i = 0; i < cx.num_vertices(); ++i) {
        const auto& cone = cx.cones[i];
        if (cone.rays.empty()) continue;
        const double c = ray_hull_gap_lp(cx, i);
        const double hmin = hull_min_norm(cone.rays);
        alpha = std::min(alpha, c * hmin);
    }
    return alpha;
}

MinNormPoint min_norm_hyperplane_point(const ConeComplex& cx, int i, double eta) {
    const auto& cone = cx.cones[i];
    MinNormPoint out;
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < static_cast<int>(cone.rays.size()); ++k) {
        const double dt = cone.vertex.dot(cone.rays[k]);
        if (dt <= 1e-12) continue;
        const double nrm = eta / dt; // rays are unit
        if (nrm < best - 1e-15) {
            best = nrm;
            out.ray_index = k;
        }
    }
    if (out.ray_index < 0)
        throw NoPositiveRay("no ray of the cone meets the positive hyperplane; index not in I+");
    out.norm = best;
    out.point = (eta / cone.vertex.dot(cone.rays[out.ray_index])) * cone.rays[out.ray_index];
    return out;
}

ConeComplex build_cone_complex(const std::vector<Eigen::VectorXd>& vertices) {
    if (vertices.empty()) throw NumericalFailure("empty vertex list");
    ConeComplex cx;
    cx.dim = static_cast<int>(vertices[0].size());
    cx.vertices = vertices;
    const int N = cx.num_vertices();
    const int s = cx.dim;
    cx.vertex_rows.resize(N, s);
    for (int i = 0; i < N; ++i) cx.vertex_rows.row(i) = vertices[i].transpose();

    cx.cones.resize(N);
    for (int i = 0; i < N; ++i) {
        Cone& cone = cx.cones[i];
        cone.vertex = vertices[i];
        // K_i = { z : (d_j - d_i)^T z <= 0 for all j }.
        Eigen::MatrixXd A(N - 1, s);
        int r = 0;
        for (int j = 0; j < N; ++j) {
            if (j == i) continue;
            A.row(r++) = (vertices[j] - vertices[i]).transpose();
        }
        const auto strict = lp::feasible_strict(A, Eigen::VectorXd::Zero(N - 1));
        if (!strict.feasible)
            throw DegenerateCone("linearity cone has empty interior; duplicate dual vertices suspected");
        if (!geom::cone_pointed(A))
            throw DegenerateCone("linearity cone is not pointed; dual polytope not full-dimensional");
        cone.rays = geom::cone_extreme_rays(A);
        if (cone.rays.empty())
            throw DegenerateCone("no extreme rays recovered for a full-dimensional pointed cone");

        // Facets: one per distinct active difference direction.
        std::vector<Eigen::VectorXd> facet_normals;
        for (int j = 0; j < N; ++j) {
            if (j == i) continue;
            Eigen::VectorXd n = vertices[i] - vertices[j];
            const double nn = n.norm();
            if (nn <= 1e-12) continue;
            Eigen::VectorXd nu = n / nn;
            bool dup = false;
            for (const auto& f : cx.cones[i].facets)
                if ((f.normal.normalized() - nu).cwiseAbs().maxCoeff() < 1e-9) dup = true;
            if (dup) continue;
            Facet f;
            f.normal = n;
            f.opposite_vertex = j;
            for (int k = 0; k < static_cast<int>(cone.rays.size()); ++k)
                if (std::abs(nu.dot(cone.rays[k])) <= 1e-9) f.ray_ids.push_back(k);
            if (s == 1) {
                // Facet is the origin; keep the first inducing direction only.
                if (cone.facets.empty()) cone.facets.push_back(std::move(f));
                continue;
            }
            if (static_cast<int>(f.ray_ids.size()) < s - 1) continue;
            Eigen::MatrixXd R(f.ray_ids.size(), s);
            for (std::size_t k = 0; k < f.ray_ids.size(); ++k) R.row(static_cast<int>(k)) = cone.rays[f.ray_ids[k]].transpose();
            Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(R);
            qr.setThreshold(1e-9);
            if (qr.rank() == s - 1) cone.facets.push_back(std::move(f));
        }

        // Classification from ray signs against d_i.
        const double dnorm = cone.vertex.norm();
        double maxdt = -std::numeric_limits<double>::infinity();
        double mindt = std::numeric_limits<double>::infinity();
        for (const auto& t : cone.rays) {
            const double dt = cone.vertex.dot(t);
            maxdt = std::max(maxdt, dt);
            mindt = std::min(mindt, dt);
        }
        cone.in_iplus = dnorm > 1e-12 && maxdt > 1e-12;
        if (cone.in_iplus) {
            cone.in_iplusplus = mindt > 1e-12;
            cone.in_ipm = !cone.in_iplusplus;
            if (cone.in_iplusplus) cone.alpha_prime = mindt;
            const auto yhat = min_norm_hyperplane_point(cx, i, 1.0);
            cone.yhat1_norm = yhat.norm;
            cone.yhat1_ray = yhat.ray_index;
            cone.gamma = cone.vertex.dot(cone.rays[yhat.ray_index]);
            cone.gamma_prime = 0.5 * cone.gamma;
        }
        if (cone.in_iplus) cx.iplus.push_back(i);
        if (cone.in_iplusplus) cx.iplusplus.push_back(i);
        if (cone.in_ipm) cx.ipm.push_back(i);
    }

    // Adjacency: rank of the common face's rays equals s-1.
    for (int i = 0; i < N; ++i) {
        for (int j = i + 1; j < N; ++j) {
            Eigen::MatrixXd Aj(N - 1, s);
            int r = 0;
            for (int l = 0; l < N; ++l) {
                if (l == j) continue;
                Aj.row(r++) = (vertices[l] - vertices[j]).transpose();
            }
            std::vector<Eigen::VectorXd> common;
            for (const auto& t : cx.cones[i].rays) {
                bool in_j = true;
                for (int rr = 0; rr < Aj.rows(); ++rr)
                    if (Aj.row(rr).dot(t) > 1e-9) in_j = false;
                if (in_j) common.push_back(t);
            }
            int rank = 0;
            if (!common.empty()) {
                Eigen::MatrixXd C(common.size(), s);
                for (std::size_t k = 0; k < common.size(); ++k) C.row(static_cast<int>(k)) = common[k].transpose();
                Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(C);
                qr.setThreshold(1e-9);
                rank = static_cast<int>(qr.rank());
            }
            if (rank == s - 1) cx.adjacency.emplace_back(i, j);
        }
    }

    if (N >= 2) cx.alpha = alpha_constant(cx);

    // delta = max{alpha'_i, gamma'_j | i in I++, j in I+-} as stated; the min
    // variant is kept alongside for experiments.
    double dmax = 0.0;
    double dmin = std::numeric_limits<double>::infinity();
    bool any = false;
    for (int i : cx.iplusplus) {
        dmax = std::max(dmax, cx.cones[i].alpha_prime);
        dmin = std::min(dmin, cx.cones[i].alpha_prime);
        any = true;
    }
    for (int j : cx.ipm) {
        dmax = std::max(dmax, cx.cones[j].gamma_prime);
        dmin = std::min(dmin, cx.cones[j].gamma_prime);
        any = true;
    }
    cx.delta = any ? dmax : 0.0;
    cx.delta_min = any ? dmin : 0.0;
    return cx;
}

} // namespace riskconvex::poly
