#pragma once

#include "riskconvex/kernels.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace riskconvex::measures {

struct BoxUniform {
    Eigen::VectorXd lo, hi;
};

struct MixtureOfBoxUniforms {
    std::vector<BoxUniform> components;
    Eigen::VectorXd weights;
};

/// Piecewise-constant density: axes[k] holds the cell boundaries of dimension
/// k (strictly increasing); values holds one density per cell in C order.
struct DensityGrid {
    std::vector<std::vector<double>> axes;
    std::vector<double> values;
};

struct Empirical {
    Eigen::MatrixXd points; // n x s
    Eigen::VectorXd weights;
};

struct MeasureModel {
    std::variant<BoxUniform, MixtureOfBoxUniforms, DensityGrid, Empirical> model;
    int dim = 0;

    static MeasureModel box_uniform(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi);
    static MeasureModel mixture(std::vector<BoxUniform> comps, const Eigen::VectorXd& weights);
    static MeasureModel density_grid(std::vector<std::vector<double>> axes, std::vector<double> values);
    static MeasureModel empirical(const Eigen::MatrixXd& points, const Eigen::VectorXd& weights = {});

    bool is_empirical() const { return std::holds_alternative<Empirical>(model); }
    bool has_density() const { return !is_empirical(); }
    std::string kind() const;
    void validate() const;

    /// Smallest axis-aligned box containing the support.
    void support_box(Eigen::VectorXd& lo, Eigen::VectorXd& hi) const;
};

/// i.i.d. draws, deterministic in (seed); generated in fixed-size chunks from
/// per-chunk substreams so that chunk-parallel generation stays reproducible.
kernels::SampleBatch sample(const MeasureModel& m, std::size_t n, std::uint64_t seed,
                            std::size_t chunk = 8192);

struct MomentResult {
    bool finite = true;
    double value = 0.0;
    double stderr_ = 0.0; // 0 for exact/deterministic paths
};

/// E ||z||; exact or quadrature for density kinds, Monte Carlo with a CI for
/// DensityGrid (per contract), exact for Empirical.
MomentResult check_first_moment(const MeasureModel& m, std::size_t mc_n = 200000,
                                std::uint64_t mc_seed = 9001);

struct DensityCertificate {
    Eigen::VectorXd v_lo, v_hi; // open box V
    double rho = 0.0;
    double r = 0.0;
};

struct FloorCheckResult {
    bool pass = false;
    double observed_min = 0.0;
    Eigen::VectorXd argmin;
    std::size_t n_points = 0;
};

/// Deterministic Halton-offset grid over V + B_rho(0) (l-inf expansion, which
/// contains the Euclidean one). Probabilistic evidence, not a proof.
FloorCheckResult verify_density_floor(const MeasureModel& m, const DensityCertificate& cert,
                                      std::size_t n_grid = 100000);

/// Lebesgue density at z; throws NoDensity for Empirical.
double density(const MeasureModel& m, const Eigen::VectorXd& z);

struct WassersteinOptions {
    std::size_t quantile_points = 10000; // minimum quadrature nodes across (0,1)
    std::size_t max_support = 200;       // discrete OT desk-scale cap
};

/// 1-D pairs of any kind via quantile quadrature on breakpoint-aligned
/// segments; multi-dimensional empirical pairs via exact discrete optimal
/// transport. Anything else is Unsupported.
double wasserstein_p(const MeasureModel& a, const MeasureModel& b, double p,
                     const WassersteinOptions& opts = {});

/// Probability mass of the centered closed ball of radius t (exact for 1-D
/// density kinds and empirical; sampling otherwise).
double ball_mass(const MeasureModel& m, double t, std::size_t mc_n = 200000,
                 std::uint64_t mc_seed = 9001);

} // namespace riskconvex::measures
