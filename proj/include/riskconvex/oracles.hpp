#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace riskconvex::oracles {

// Closed-form ground truths for the worked 1-D and 2-D instances used as
// oracles by the test and acceptance suites. Region predicates are strict: an
// input outside the stated case assumptions throws OutOfRegion.

/// phi(t)=max{0,a t}, z ~ U(-rho, 1+rho). The unnormalized variant integrates
/// against plain Lebesgue measure on the support (the paper's literal form);
/// the normalized variant divides by the box length 1+2 rho.
double ex1_qee(double x, double eta, double a, double rho, bool normalized);

/// phi(t)=max{0,t1,t2}, z ~ U((0,1)^2), 0 < x2 < x1, eta > 0, x1 + eta <= 1.
/// Returns the expected excess and the Hessian in x.
std::pair<double, Eigen::Matrix2d> ex2_qee_and_hessian(double x1, double x2, double eta);

/// phi(t)=max{0,t}, z ~ U(0,1): Q_EE(x,eta) = (1-x-eta)^2 / 2.
double ex3_qee(double x, double eta);

/// Same instance: VaR = 1 - alpha - x (requires it positive), CVaR = -x + (2-alpha)/2.
std::pair<double, double> ex4_var_cvar(double x, double alpha);

/// phi(t)=|t|, mu = U(0,1)/2 + U(1.5,2.5)/2, x in (0,1).
struct Ex5 {
    static double qee(double x, double eta);      // 7-branch table / 4
    static double cdf(double x, double t);        // mu(phi(z-x) <= t), 6-branch table
    static double var(double x, double alpha);    // minimal t with cdf >= 1-alpha
    static double cvar(double x, double alpha);   // var + qee(x,var)/alpha
};

// ---------------------------------------------------------------------------
// Oracle-vs-pipeline suite: every closed form above checked against the
// generic numeric evaluators on a deterministic input grid.

struct SuiteCase {
    std::string name;
    double max_err = 0.0;
    double tol = 0.0;
    bool pass = false;
};

struct SuiteResult {
    std::vector<SuiteCase> cases;
    bool all_pass = true;
};

SuiteResult run_oracle_suite(std::uint64_t seed);

} // namespace riskconvex::oracles
