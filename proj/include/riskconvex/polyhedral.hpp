#pragma once

#include "riskconvex/geometry.hpp"
#include "riskconvex/lp.hpp"

#include <Eigen/Dense>
#include <limits>
#include <vector>

namespace riskconvex::poly {

/// Second stage data: phi(t) = min{ q^T y | W y = t, y >= 0 }.
struct RecourseSpec {
    Eigen::MatrixXd W; // s x m
    Eigen::VectorXd q; // m

    int s() const { return static_cast<int>(W.rows()); }
    int m() const { return static_cast<int>(W.cols()); }
    void validate() const;
};

struct Facet {
    Eigen::VectorXd normal;   // facet lies in { normal^T z = 0 }, normal = d_i - d_j
    int opposite_vertex = -1; // lowest j inducing the facet
    std::vector<int> ray_ids; // extreme rays of the cone lying on the facet
};

struct Cone {
    Eigen::VectorXd vertex;            // d_i
    std::vector<Eigen::VectorXd> rays; // unit extreme rays
    std::vector<Facet> facets;
    bool in_iplus = false;
    bool in_iplusplus = false;
    bool in_ipm = false;
    double alpha_prime = 0.0; // min_k d^T t_k over rays, for I++ members
    double gamma = 0.0;       // d^T t for the min-norm hyperplane ray, I+/Ipm geometry
    double gamma_prime = 0.0; // gamma / 2
    double yhat1_norm = std::numeric_limits<double>::infinity();
    int yhat1_ray = -1;
};

struct ConeComplex {
    int dim = 0;
    std::vector<Eigen::VectorXd> vertices;
    std::vector<Cone> cones;
    std::vector<std::pair<int, int>> adjacency; // i < j
    std::vector<int> iplus, iplusplus, ipm;
    double alpha = 0.0;     // certified Lemma (iii) lower bound
    double delta = 0.0;     // max{alpha'_i, gamma'_j} (stated rule)
    double delta_min = 0.0; // min variant, exposed for experimentation
    // N x s row-major copy feeding the batch kernels.
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> vertex_rows;

    int num_vertices() const { return static_cast<int>(vertices.size()); }
    double phi(const Eigen::VectorXd& t) const;
    /// Index of the linearity cone containing t (argmax d_i^T t, ties to lowest i).
    int cone_index(const Eigen::VectorXd& t) const;
    bool adjacent(int i, int j) const;
    double max_vertex_norm() const;
};

bool check_complete_recourse(const RecourseSpec& spec);

/// A2 via the delta-program on { v : W^T v < q }.
lp::StrictFeasibility check_sufficiently_expensive(const RecourseSpec& spec);

bool check_a6(const RecourseSpec& spec);

/// Exact vertex set of { v : W^T v <= q }. Requires A1 (throws NotPolytope).
std::vector<Eigen::VectorXd> enumerate_dual_vertices(const RecourseSpec& spec,
                                                     double dedup_tol = 1e-7);

/// LP route for phi; the vertex-max route lives on ConeComplex::phi.
double evaluate_phi_lp(const RecourseSpec& spec, const Eigen::VectorXd& t);

ConeComplex build_cone_complex(const std::vector<Eigen::VectorXd>& vertices);

/// Certified Lemma (iii) constant: per cone, ray-hull LP value times the hull's
/// minimum norm; overall minimum across cones. Conservative by construction.
double alpha_constant(const ConeComplex& complex);

struct MinNormPoint {
    Eigen::VectorXd point;
    int ray_index = -1;
    double norm = 0.0;
};

/// yhat^i(eta): minimum-norm intersection of { d_i^T z = eta } with the rays of
/// cone i; ties broken by lowest ray index.
MinNormPoint min_norm_hyperplane_point(const ConeComplex& complex, int i, double eta);

} // namespace riskconvex::poly
