#pragma once

#include <string>
#include <utility>
#include <vector>

namespace riskconvex::risk {

/// Concave distortion g: [0,1] -> [0,1], g(0)=0, g(1)=1, with its derivative.
/// Tabulated distortions differentiate numerically (central h=1e-6, one-sided
/// at the endpoints).
struct DistortionFunction {
    enum class Family { Expectation, Cvar, Wang, ProportionalHazard, Lookback, Tabulated };

    Family family = Family::Expectation;
    double param = 0.0;
    std::vector<std::pair<double, double>> knots; // Tabulated only

    static DistortionFunction expectation();
    static DistortionFunction cvar(double alpha);
    static DistortionFunction wang(double beta);
    static DistortionFunction proportional_hazard(double gamma);
    static DistortionFunction lookback(double gamma);
    static DistortionFunction tabulated(std::vector<std::pair<double, double>> knots);
    static DistortionFunction from_name(const std::string& name, double param);

    double g(double t) const;
    double gprime(double t) const;
    std::string name() const;

    /// g(0)=0, g(1)=1, nondecreasing and concave on a 1e3 grid (1e-9 slack).
    void validate() const;
};

/// Mixing measure nu_g on (0,1]: cdf(t) = g(t) - t g'(t) plus an atom
/// lim_{t->1-} g'(t) at 1. Interior kinks of g carry explicit atoms; the cdf
/// uses the left-derivative convention so an atom at t is counted only for
/// arguments strictly above t.
struct DistortionMeasure {
    DistortionFunction g;
    std::vector<std::pair<double, double>> interior_atoms; // (location, mass)
    double atom_at_one = 0.0;

    double cdf(double t) const;            // nu((0,t]), t in (0,1)
    double continuous_cdf(double t) const; // cdf minus interior atoms < t
    /// Mass of the continuous part, from the distortion identity
    /// lim_{t->1-} [g - t g'] = 1 - lim g'.
    double continuous_total() const;
    double total_mass() const;

    /// Discretization for quadrature/solvers: exact atoms plus cell masses of
    /// the continuous part placed at cell midpoints; the last cell absorbs the
    /// slowly-converging remainder near 1 so no mass is dropped.
    std::vector<std::pair<double, double>> discretize(const std::vector<double>& cell_bounds) const;
};

/// Validates the mass identity cdf(1-) + atom = 1: within 1e-6 at t = 1-1e-9,
/// or monotone convergence toward it for measures with slow tails (Wang).
DistortionMeasure distortion_measure(const DistortionFunction& g);

/// Cell boundaries on (0,1) with geometric clustering toward both endpoints.
std::vector<double> alpha_cell_bounds(int cells, double eps = 1e-6);

struct DistortionCondition {
    double c = 0.0;            // 1 - g(a0) + a0 g'(a0)
    double from_measure = 0.0; // nu((a0, 1])
};

/// Asserts |c - nu((a0,1])| <= 1e-6 (CrossCheckFailure otherwise).
DistortionCondition distortion_condition_c(const DistortionFunction& g, double alpha0);

struct LipschitzL {
    bool finite = false;
    double value = 0.0;           // +inf when not finite
    double continuous_part = 0.0; // converged continuous integral (diagnostic)
};

/// L = int (1-a)^(-1/p) nu_g(da). Infinite when the atom at 1 is positive or
/// the improper continuous part fails to converge under grid refinement.
LipschitzL kusuoka_lipschitz_L(const DistortionFunction& g, double p);

} // namespace riskconvex::risk
