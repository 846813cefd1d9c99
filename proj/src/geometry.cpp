#include "riskconvex/geometry.hpp"

#include "riskconvex/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace riskconvex::geom {

namespace {

// Iterate k-subsets of {0..m-1} in lexicographic order.
bool next_subset(std::vector<int>& idx, int m) {
    const int k = static_cast<int>(idx.size());
    for (int i = k - 1; i >= 0; --i) {
        if (idx[i] < m - (k - i)) {
            ++idx[i];
            for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
            return true;
        }
    }
    return false;
}

std::size_t binomial_capped(int m, int k, std::size_t cap) {
    if (k < 0 || k > m) return 0;
    std::size_t r = 1;
    for (int i = 0; i < k; ++i) {
        r = r * static_cast<std::size_t>(m - i) / static_cast<std::size_t>(i + 1);
        if (r > cap) return cap + 1;
    }
    return r;
}

bool point_feasible(const HPolytope& poly, const Eigen::VectorXd& z, double tol) {
    for (int i = 0; i < poly.A.rows(); ++i) {
        const double scale = 1.0 + std::abs(poly.b[i]) + poly.A.row(i).cwiseAbs().sum() * std::max(1.0, z.cwiseAbs().maxCoeff());
        if (poly.A.row(i).dot(z) - poly.b[i] > tol * scale) return false;
    }
    return true;
}

// Deduplicate rows of an inequality system by normalized (a, b).
std::vector<int> nonredundant_rows(const Eigen::MatrixXd& A, const Eigen::VectorXd* b, double tol) {
    std::vector<int> keep;
    std::vector<Eigen::VectorXd> seen;
    std::vector<double> seen_b;
    for (int i = 0; i < A.rows(); ++i) {
        const double nrm = A.row(i).norm();
        if (nrm <= tol) continue;
        Eigen::VectorXd an = A.row(i).transpose() / nrm;
        const double bn = b ? (*b)[i] / nrm : 0.0;
        bool dup = false;
        for (std::size_t j = 0; j < seen.size(); ++j) {
            if ((seen[j] - an).cwiseAbs().maxCoeff() < 1e-9 && std::abs(seen_b[j] - bn) < 1e-9) {
                dup = true;
                break;
            }
        }
        if (!dup) {
            keep.push_back(i);
            seen.push_back(std::move(an));
            seen_b.push_back(bn);
        }
    }
    return keep;
}

} // namespace

std::vector<Eigen::VectorXd> enumerate_vertices(const HPolytope& poly, double dedup_tol,
                                                std::size_t max_subsets) {
    const int s = static_cast<int>(poly.A.cols());
    const int m = static_cast<int>(poly.A.rows());
    std::vector<Eigen::VectorXd> verts;
    if (m < s) return verts;
    if (binomial_capped(m, s, max_subsets) > max_subsets)
        throw Unsupported("vertex enumeration: subset count exceeds the desk-scale limit");

    std::vector<int> idx(s);
    std::iota(idx.begin(), idx.end(), 0);
    Eigen::MatrixXd As(s, s);
    Eigen::VectorXd bs(s);
    do {
        for (int r = 0; r < s; ++r) {
            As.row(r) = poly.A.row(idx[r]);
            bs[r] = poly.b[idx[r]];
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(As);
        lu.setThreshold(1e-10);
        if (lu.rank() < s) continue;
        const Eigen::VectorXd z = lu.solve(bs);
        if (!z.allFinite()) continue;
        if (!point_feasible(poly, z, 1e-9)) continue;
        bool dup = false;
        for (const auto& v : verts) {
            if ((v - z).cwiseAbs().maxCoeff() <= dedup_tol) {
                dup = true;
                break;
            }
        }
        if (!dup) verts.push_back(z);
    } while (next_subset(idx, m));
    return verts;
}

bool cone_pointed(const Eigen::MatrixXd& A, double tol) {
    if (A.rows() < A.cols()) return false;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    qr.setThreshold(tol);
    return qr.rank() == A.cols();
}

std::vector<Eigen::VectorXd> cone_extreme_rays(const Eigen::MatrixXd& A, double tol) {
    const int s = static_cast<int>(A.cols());
    std::vector<Eigen::VectorXd> rays;
    const std::vector<int> rows = nonredundant_rows(A, nullptr, tol);
    const int m = static_cast<int>(rows.size());

    auto feasible_dir = [&](const Eigen::VectorXd& u) {
        for (int i = 0; i < A.rows(); ++i)
            if (A.row(i).dot(u) > tol * (1.0 + A.row(i).norm())) return false;
        return true;
    };
    auto push_unique = [&](const Eigen::VectorXd& u) {
        for (const auto& r : rays)
            if ((r - u).cwiseAbs().maxCoeff() < 1e-8) return;
        rays.push_back(u);
    };

    if (s == 1) {
        Eigen::VectorXd plus(1), minus(1);
        plus << 1.0;
        minus << -1.0;
        if (feasible_dir(plus)) push_unique(plus);
        if (feasible_dir(minus)) push_unique(minus);
        return rays;
    }

    if (m < s - 1) return rays; // not pointed enough to carry extreme rays

    std::vector<int> idx(s - 1);
    std::iota(idx.begin(), idx.end(), 0);
    do {
        Eigen::MatrixXd As(s - 1, s);
        for (int r = 0; r < s - 1; ++r) As.row(r) = A.row(rows[idx[r]]);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(As);
        lu.setThreshold(1e-10);
        if (lu.rank() != s - 1) continue;
        Eigen::MatrixXd kern = lu.kernel();
        if (kern.cols() != 1) continue;
        Eigen::VectorXd u = kern.col(0);
        const double nrm = u.norm();
        if (nrm < 1e-12) continue;
        u /= nrm;
        for (const int sign : {+1, -1}) {
            const Eigen::VectorXd cand = sign * u;
            if (!feasible_dir(cand)) continue;
            // Extremality: active rows at cand must have rank s-1.
            std::vector<int> act;
            for (int i = 0; i < A.rows(); ++i)
                if (std::abs(A.row(i).dot(cand)) <= tol * (1.0 + A.row(i).norm())) act.push_back(i);
            if (static_cast<int>(act.size()) < s - 1) continue;
            Eigen::MatrixXd Act(act.size(), s);
            for (std::size_t r = 0; r < act.size(); ++r) Act.row(static_cast<int>(r)) = A.row(act[r]);
            Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Act);
            qr.setThreshold(1e-9);
            if (qr.rank() == s - 1) push_unique(cand);
        }
    } while (next_subset(idx, m));
    return rays;
}

HPolytope intersect_box(const HPolytope& poly, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
    const int s = static_cast<int>(poly.A.cols());
    HPolytope out;
    out.A = Eigen::MatrixXd::Zero(poly.A.rows() + 2 * s, s);
    out.b = Eigen::VectorXd::Zero(poly.b.size() + 2 * s);
    out.A.topRows(poly.A.rows()) = poly.A;
    out.b.head(poly.b.size()) = poly.b;
    for (int k = 0; k < s; ++k) {
        out.A(poly.A.rows() + 2 * k, k) = 1.0;
        out.b[poly.b.size() + 2 * k] = hi[k];
        out.A(poly.A.rows() + 2 * k + 1, k) = -1.0;
        out.b[poly.b.size() + 2 * k + 1] = -lo[k];
    }
    return out;
}

namespace {

VolumeCentroid polygon_measure(std::vector<Eigen::VectorXd> verts) {
    VolumeCentroid out;
    out.centroid = Eigen::VectorXd::Zero(2);
    if (verts.size() < 3) return out;
    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    for (const auto& v : verts) mean += v;
    mean /= static_cast<double>(verts.size());
    std::sort(verts.begin(), verts.end(), [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
        return std::atan2(a[1] - mean[1], a[0] - mean[0]) < std::atan2(b[1] - mean[1], b[0] - mean[0]);
    });
    double area2 = 0.0;
    Eigen::Vector2d c = Eigen::Vector2d::Zero();
    const std::size_t n = verts.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& p = verts[i];
        const auto& q = verts[(i + 1) % n];
        const double cross = p[0] * q[1] - q[0] * p[1];
        area2 += cross;
        c[0] += (p[0] + q[0]) * cross;
        c[1] += (p[1] + q[1]) * cross;
    }
    const double area = 0.5 * std::abs(area2);
    out.volume = area;
    if (area > 1e-14) {
        c /= (3.0 * area2);
        out.centroid = c;
    } else {
        out.volume = 0.0;
    }
    return out;
}

} // namespace

VolumeCentroid volume_centroid(const HPolytope& poly, double tol) {
    const int s = static_cast<int>(poly.A.cols());
    if (s > 3) throw DimensionTooHigh("volume_centroid supports dim <= 3");
    VolumeCentroid out;
    out.centroid = Eigen::VectorXd::Zero(s);

    const auto verts = enumerate_vertices(poly, 1e-9);
    if (verts.size() < static_cast<std::size_t>(s) + 1) return out;

    if (s == 1) {
        double lo = verts[0][0], hi = verts[0][0];
        for (const auto& v : verts) {
            lo = std::min(lo, v[0]);
            hi = std::max(hi, v[0]);
        }
        out.volume = hi - lo;
        out.centroid[0] = 0.5 * (lo + hi);
        if (out.volume <= 1e-14) out.volume = 0.0;
        return out;
    }

    if (s == 2) {
        auto pm = polygon_measure(verts);
        out.volume = pm.volume;
        out.centroid = pm.centroid;
        return out;
    }

    // s == 3: divergence-theorem sum over facet fans.
    Eigen::Vector3d origin = Eigen::Vector3d::Zero();
    for (const auto& v : verts) origin += v;
    origin /= static_cast<double>(verts.size());

    const std::vector<int> rows = nonredundant_rows(poly.A, &poly.b, tol);
    double vol = 0.0;
    Eigen::Vector3d cent = Eigen::Vector3d::Zero();
    for (const int i : rows) {
        const Eigen::Vector3d a = poly.A.row(i).transpose();
        const double an = a.norm();
        std::vector<Eigen::Vector3d> fverts;
        for (const auto& v : verts) {
            const double scale = 1.0 + std::abs(poly.b[i]) + an * v.cwiseAbs().maxCoeff();
            if (std::abs(a.dot(v) - poly.b[i]) <= 1e-8 * scale) fverts.push_back(v);
        }
        if (fverts.size() < 3) continue;
        // Order facet polygon by angle in a plane basis.
        Eigen::Vector3d n = a / an;
        Eigen::Vector3d u = n.unitOrthogonal();
        Eigen::Vector3d w = n.cross(u);
        Eigen::Vector3d fmean = Eigen::Vector3d::Zero();
        for (const auto& v : fverts) fmean += v;
        fmean /= static_cast<double>(fverts.size());
        std::sort(fverts.begin(), fverts.end(), [&](const Eigen::Vector3d& p, const Eigen::Vector3d& q) {
            const Eigen::Vector3d dp = p - fmean, dq = q - fmean;
            return std::atan2(dp.dot(w), dp.dot(u)) < std::atan2(dq.dot(w), dq.dot(u));
        });
        for (std::size_t k = 1; k + 1 < fverts.size(); ++k) {
            Eigen::Vector3d t1 = fverts[0], t2 = fverts[k], t3 = fverts[k + 1];
            Eigen::Vector3d tri_n = (t2 - t1).cross(t3 - t1);
            if (tri_n.dot(n) < 0.0) std::swap(t2, t3);
            const double v6 = (t1 - origin).dot((t2 - origin).cross(t3 - origin));
            vol += v6 / 6.0;
            cent += (v6 / 6.0) * (origin + t1 + t2 + t3) / 4.0;
        }
    }
    if (vol > 1e-14) {
        out.volume = vol;
        out.centroid = cent / vol;
    }
    return out;
}

} // namespace riskconvex::geom
