#pragma once

#include "riskconvex/measures.hpp"
#include "riskconvex/polyhedral.hpp"
#include "riskconvex/risk.hpp"

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace riskconvex::certify {

struct RegionSpec {
    Eigen::VectorXd v_lo, v_hi;
    std::optional<std::pair<Eigen::VectorXd, Eigen::VectorXd>> u_box; // U inside V
    void validate() const;
    double diameter() const { return (v_hi - v_lo).norm(); }
};

/// eta0 = (1 - margin) * rho / max_{i in I+} ||yhat^i(1)||; +inf when I+ is empty.
double eta0_max(const poly::ConeComplex& cx, double rho, double margin = 1e-6);

/// Extra l-inf clearance a sub-box U has inside V; the density floor then
/// holds on U + B_{rho+gap}.
double region_gap(const Eigen::VectorXd& v_lo, const Eigen::VectorXd& v_hi,
                  const Eigen::VectorXd& u_lo, const Eigen::VectorXd& u_hi);

struct CvarConditionResult {
    double sup_estimate = 0.0;
    Eigen::VectorXd arg_sup;
    double eta0 = 0.0;
    double margin = 0.0;
    bool pass = false;
    double grid_spacing = 0.0; // estimate resolution, never claimed exact
    bool lipschitz_var_pass = false;
    double lipschitz_var_worst = 0.0; // max |dVaR| - (delta/3)||dx|| over grid pairs
};

/// sup_{x in region} Q_VaR(x) <= eta0, by grid search plus one refinement, with
/// the delta/3 VaR Lipschitz diagnostic on the same grid.
CvarConditionResult cvar_condition_check(const risk::Evaluator& ev, const Eigen::VectorXd& lo,
                                         const Eigen::VectorXd& hi, double alpha, double eta0,
                                         double delta, int grid_per_dim = 20);

struct VarUpperBoundResult {
    double eta_bar = 0.0; // inf{ t : mu(B_t(0)) >= alpha }
    double d = 0.0;       // max_i ||d_i||
    double bound = 0.0;   // d*eta_bar + d*max_{x in U} ||x||
    Eigen::VectorXd u_lo, u_hi; // largest centered sub-box with max||x|| <= eps/d
};

VarUpperBoundResult var_upper_bound(const poly::ConeComplex& cx, const measures::MeasureModel& m,
                                    const Eigen::VectorXd& u_lo, const Eigen::VectorXd& u_hi,
                                    double alpha, double eps);

/// Per-replicate functional value; replicates share common random numbers so
/// convexity gaps cancel sampling noise.
struct RepFunctional {
    int replicates = 1;
    int dim = 0;
    std::function<double(int rep, const Eigen::VectorXd& x)> eval;
};

struct EstimatorConfig {
    int n_pairs = 300;
    std::uint64_t seed = 777;
    double min_separation = 0.05; // fraction of diam
    double denom_floor = 1e-6;
    double lambda_lo = 0.25, lambda_hi = 0.75;
};

struct ModulusEstimate {
    double kappa = 0.0;
    double noise_floor = 0.0; // 3 x propagated se at the argmin pair
    int pairs_used = 0;
    bool certified_positive() const { return kappa > 3.0 * noise_floor && kappa > 0.0; }
};

ModulusEstimate empirical_strong_convexity(const RepFunctional& f, const Eigen::VectorXd& lo,
                                           const Eigen::VectorXd& hi, const EstimatorConfig& cfg);

struct PartialScEstimate {
    ModulusEstimate midpoint; // Definition-1 form, x-distance normalization
    ModulusEstimate gradient; // monotonicity form via the gradient formula
};

PartialScEstimate empirical_partial_sc(const risk::Evaluator& ev, const Eigen::VectorXd& v_lo,
                                       const Eigen::VectorXd& v_hi, double eta_lo, double eta_hi,
                                       const EstimatorConfig& cfg);

/// Symmetrized pair predicate of the restricted-PSC admissible set.
struct OmegaSet {
    const poly::ConeComplex* cx = nullptr;
    double delta = 0.0;
    bool pair_admissible(const Eigen::VectorXd& x, double eta, const Eigen::VectorXd& y,
                         double eta_prime) const;
};

OmegaSet omega_set(const poly::ConeComplex& cx, double delta_override = -1.0);

PartialScEstimate empirical_restricted_psc(const risk::Evaluator& ev, const Eigen::VectorXd& v_lo,
                                           const Eigen::VectorXd& v_hi, double eta0,
                                           const OmegaSet& omega, const EstimatorConfig& cfg);

struct TheoreticalModulusResult {
    double kappa_lower = 0.0;
    double ci_half = 0.0; // Monte-Carlo facet-volume uncertainty at the binding cone
    double eta_minus = 0.0, eta_plus = 0.0;
    std::vector<std::string> notes;
};

/// r * min over cones of the facet-sweep constants (approximate lower bound;
/// facet volumes by Monte Carlo in hyperplane coordinates, dim <= 3).
TheoreticalModulusResult theoretical_modulus(const poly::ConeComplex& cx, double rho, double r,
                                             double eta_minus, double eta_plus,
                                             std::size_t n_mc = 1000000, std::uint64_t seed = 4242);

// ---------------------------------------------------------------------------

struct CheckResult {
    bool pass = false;
    std::string evidence;
    double value = 0.0;
};

struct CertificationReport {
    CheckResult a1, a2, a3, a4, a5, a6;
    std::optional<double> eta0;
    double rho_used = 0.0, r_used = 0.0;
    std::optional<CvarConditionResult> cvar_condition;
    std::optional<VarUpperBoundResult> var_bound;
    std::optional<ModulusEstimate> kappa_cvar;
    std::optional<ModulusEstimate> kappa_qee_fixed_eta;
    std::optional<PartialScEstimate> kappa_partial;
    std::optional<PartialScEstimate> kappa_restricted;
    std::optional<double> distortion_c;
    std::optional<TheoreticalModulusResult> theoretical;
    double omega_delta = 0.0;
    bool all_requested_pass = false;
};

struct CertifyOptions {
    double alpha = 0.5;
    std::optional<risk::DistortionFunction> distortion;
    bool use_min_delta = false;
    bool run_moduli = true;
    bool run_theoretical = true;
    EstimatorConfig estimator;
    int grid_per_dim = 20;
};

CertificationReport certify_pipeline(const poly::RecourseSpec& spec,
                                     const measures::MeasureModel& measure,
                                     const measures::DensityCertificate& cert,
                                     const RegionSpec& region, const risk::RiskConfig& rcfg,
                                     const CertifyOptions& opts);

} // namespace riskconvex::certify
