#pragma once

#include "riskconvex/distortion.hpp"
#include "riskconvex/measures.hpp"
#include "riskconvex/polyhedral.hpp"
#include "riskconvex/risk.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace riskconvex::stability {

/// First stage: min h^T xi + Q(T xi) over X = { xi : A xi <= b }.
struct FirstStageSpec {
    Eigen::MatrixXd T; // s x n
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
    Eigen::VectorXd h;

    int n() const { return static_cast<int>(T.cols()); }
    int s() const { return static_cast<int>(T.rows()); }
    /// X nonempty, T(X) bounded; throws otherwise.
    void validate() const;
    static FirstStageSpec box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi);
};

struct SolveResult {
    Eigen::VectorXd x_star;
    Eigen::VectorXd xi_star;
    double value = 0.0;
    std::size_t scenario_count = 0;
    long iterations = 0;
    bool unique = true;
};

/// Scenario program for the distortion functional: one Rockafellar-Uryasev
/// epigraph block per mixing atom, all sharing the recourse epigraph variables.
/// Exact for the discretized mixing measure.
SolveResult solve_P(const FirstStageSpec& fs, const poly::ConeComplex& cx,
                    const risk::DistortionFunction& g, const measures::MeasureModel& scenarios,
                    int alpha_cells = 128, bool check_uniqueness = false);

double hausdorff_drift(const SolveResult& a, const SolveResult& b);

enum class PerturbationFamily { Shift, Reweight, Resample };

struct StabilityRow {
    double radius = 0.0;
    int rep = 0;
    double d_p = 0.0;
    double drift = 0.0;
    double bound = 0.0;
    bool pass = false;
    bool unique = true;
};

struct StabilityResult {
    std::vector<StabilityRow> rows;
    double loglog_slope = 0.0;
    int violations = 0;
    double lipschitz_L = 0.0;
    double max_vertex_norm = 0.0;
    double kappa = 0.0;
};

StabilityResult stability_experiment(const FirstStageSpec& fs, const poly::ConeComplex& cx,
                                     const risk::DistortionFunction& g,
                                     const measures::MeasureModel& base,
                                     const std::vector<double>& radii, std::size_t n_scen,
                                     int n_reps, std::uint64_t seed, double kappa, double p = 1.0,
                                     PerturbationFamily family = PerturbationFamily::Shift,
                                     int alpha_cells = 16);

} // namespace riskconvex::stability
