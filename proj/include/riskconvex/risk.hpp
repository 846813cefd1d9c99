#pragma once

#include "riskconvex/distortion.hpp"
#include "riskconvex/kernels.hpp"
#include "riskconvex/measures.hpp"
#include "riskconvex/polyhedral.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

namespace riskconvex::risk {

enum class IntegrationMode { MonteCarlo, Quadrature };

struct RiskConfig {
    IntegrationMode mode = IntegrationMode::MonteCarlo;
    std::size_t n_samples = 100000; // total MC budget, split across replicates
    int replicates = 8;             // independent substreams; stderr = sd / sqrt(R)
    std::uint64_t seed = 12345;
    int alpha_cells = 128;      // mixing-measure grid (geometric toward 0 and 1)
    double cross_check_se = 5.0; // CVaR dual-route tolerance in standard errors
    int threads = 1;
};

struct Estimate {
    double value = 0.0;
    double stderr_ = 0.0; // 0 on exact paths
};

struct EeGradient {
    Eigen::VectorXd grad_x;
    double d_eta = 0.0;
    Eigen::VectorXd se_x;
    double se_eta = 0.0;
};

/// Binds a cone complex, a probability model and an integration config.
/// Monte-Carlo paths draw the sample set once (common random numbers across
/// every functional and every x); quadrature on density-backed models does an
/// exact cone-cell decomposition of the piecewise-linear integrands (dim<=3);
/// empirical models evaluate as exact finite sums.
class Evaluator {
  public:
    Evaluator(poly::ConeComplex complex, measures::MeasureModel measure, RiskConfig cfg);

    const poly::ConeComplex& complex() const { return complex_; }
    const measures::MeasureModel& measure() const { return measure_; }
    const RiskConfig& config() const { return cfg_; }

    bool exact_path() const { return exact_; }
    int replicate_count() const { return exact_ ? 1 : static_cast<int>(batches_.size()); }
    std::size_t total_samples() const;

    Estimate q_expectation(const Eigen::VectorXd& x) const;
    Estimate q_expected_excess(const Eigen::VectorXd& x, double eta) const;
    EeGradient q_ee_gradient(const Eigen::VectorXd& x, double eta) const;
    double q_var(const Eigen::VectorXd& x, double alpha) const;
    /// Eq.(8) plug-in, cross-checked against a golden-section minimization of
    /// the variational objective; returns the plug-in value.
    Estimate q_cvar(const Eigen::VectorXd& x, double alpha) const;
    Estimate q_distortion(const Eigen::VectorXd& x, const DistortionFunction& g) const;

    /// nu_g reduced to atoms: exact atoms plus midpoint cells on the alpha grid.
    std::vector<std::pair<double, double>> discretized_mixing(const DistortionFunction& g) const;

    /// mu(phi(z - x) <= t).
    double pushforward_cdf(const Eigen::VectorXd& x, double t) const;
    /// Bracket for the attainable phi(z-x) values over the support.
    std::pair<double, double> phi_range(const Eigen::VectorXd& x) const;

    // Per-replicate values (common random numbers within a replicate). With
    // exact paths there is a single replicate equal to the exact value.
    double expectation_rep(int r, const Eigen::VectorXd& x) const;
    double expected_excess_rep(int r, const Eigen::VectorXd& x, double eta) const;
    double cvar_rep(int r, const Eigen::VectorXd& x, double alpha) const;
    double distortion_rep(int r, const Eigen::VectorXd& x,
                          const std::vector<std::pair<double, double>>& mixing_atoms) const;
    EeGradient gradient_rep(int r, const Eigen::VectorXd& x, double eta) const;

  private:
    poly::ConeComplex complex_;
    measures::MeasureModel measure_;
    RiskConfig cfg_;
    bool exact_ = false;
    bool empirical_ = false;
    std::vector<kernels::SampleBatch> batches_; // MC replicates, or the single empirical batch
    std::vector<double> weights_;               // empirical weights aligned with batches_[0]

    struct PhiView {
        std::vector<double> phi;
        std::vector<std::int32_t> cone;
    };
    PhiView eval_phi(const kernels::SampleBatch& b, const Eigen::VectorXd& x, bool want_cones) const;
    std::vector<double> pooled_phi(const Eigen::VectorXd& x) const;
    double cvar_from_sorted(const std::vector<double>& sorted_phi, const std::vector<double>* cumw,
                            double alpha) const;

    double exact_expectation(const Eigen::VectorXd& x) const;
    double exact_expected_excess(const Eigen::VectorXd& x, double eta) const;
    EeGradient exact_gradient(const Eigen::VectorXd& x, double eta) const;
    double exact_cdf(const Eigen::VectorXd& x, double t) const;
    double exact_var(const Eigen::VectorXd& x, double alpha) const;

    Estimate from_reps(const std::vector<double>& reps) const;
};

} // namespace riskconvex::risk
