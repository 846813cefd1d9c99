#pragma once

#include <Eigen/Dense>
#include <vector>

namespace riskconvex::geom {

/// H-polytope / H-cone: { z : A z <= b }.
struct HPolytope {
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
};

/// Exact vertex enumeration by basis-subset search. Deterministic order,
/// deduplicated in l-inf at dedup_tol. Throws Unsupported when the number of
/// row subsets exceeds max_subsets (desk-scale guard).
std::vector<Eigen::VectorXd> enumerate_vertices(const HPolytope& poly, double dedup_tol = 1e-7,
                                                std::size_t max_subsets = 1000000);

/// Extreme rays (unit-normalized) of the pointed cone { z : A z <= 0 }.
std::vector<Eigen::VectorXd> cone_extreme_rays(const Eigen::MatrixXd& A, double tol = 1e-9);

/// rank(A) == dim, i.e. the lineality space of { A z <= 0 } is trivial.
bool cone_pointed(const Eigen::MatrixXd& A, double tol = 1e-9);

struct VolumeCentroid {
    double volume = 0.0;
    Eigen::VectorXd centroid;
};

/// Exact (up to fp) volume and centroid of a bounded H-polytope, dim <= 3.
/// Empty or lower-dimensional sets report volume 0.
VolumeCentroid volume_centroid(const HPolytope& poly, double tol = 1e-9);

/// Convenience: intersect with an axis-aligned box [lo, hi] (adds 2*dim rows).
HPolytope intersect_box(const HPolytope& poly, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi);

} // namespace riskconvex::geom
