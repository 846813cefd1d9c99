#include "riskconvex/oracles.hpp"

#include "riskconvex/errors.hpp"
#include "riskconvex/risk.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace riskconvex::oracles {

double ex1_qee(double x, double eta, double a, double rho, bool normalized) {
    if (!(x > 0.0 && x < 1.0) || !(eta > 0.0) || !(a > 0.0) || !(rho > 0.0))
        throw OutOfRegion("ex1 requires x in (0,1) and eta, a, rho > 0");
    double value = 0.0;
    if (x < 1.0 + rho - eta / a) {
        const double t = a * (1.0 + rho - x) - eta;
        value = t * t / (2.0 * a);
    }
    return normalized ? value / (1.0 + 2.0 * rho) : value;
}

std::pair<double, Eigen::Matrix2d> ex2_qee_and_hessian(double x1, double x2, double eta) {
    if (!(0.0 < x2 && x2 < x1 && eta > 0.0 && x1 + eta <= 1.0))
        throw OutOfRegion("ex2 requires 0 < x2 < x1, eta > 0, x1 + eta <= 1");
    const double u = 1.0 - x1 - eta;
    const double v = 1.0 - x2 - eta;
    const double A = 0.5 * x2 * u * u;
    const double Ap = 0.5 * x1 * v * v;
    const double CCp = (2.0 / 3.0) * u * u * u + eta * u * u;
    const double Cpp = 0.5 * (1.0 - x1) * (v * v - u * u);
    Eigen::Matrix2d H;
    H << x2 - x1 + 1.0, x1 + eta - 1.0, x1 + eta - 1.0, 1.0;
    return {A + Ap + CCp + Cpp, H};
}

double ex3_qee(double x, double eta) {
    if (!(x > 0.0 && x < 1.0) || !(eta > 0.0) || !(x + eta <= 1.0))
        throw OutOfRegion("ex3 requires x in (0,1), eta > 0, x + eta <= 1");
    const double t = 1.0 - x - eta;
    return 0.5 * t * t;
}

std::pair<double, double> ex4_var_cvar(double x, double alpha) {
    if (!(x > 0.0 && x < 1.0) || !(alpha > 0.0 && alpha < 1.0))
        throw OutOfRegion("ex4 requires x in (0,1) and alpha in (0,1)");
    const double var = 1.0 - alpha - x;
    if (var <= 0.0) throw OutOfRegion("ex4 closed form requires 1 - alpha - x > 0");
    const double cvar = -x + 0.5 * (2.0 - alpha);
    return {var, cvar};
}

namespace {

bool between(double lo, double v, double hi, double tol = 1e-12) {
    return v >= lo - tol && v <= hi + tol;
}

} // namespace

double Ex5::qee(double x, double eta) {
    if (!(x > 0.0 && x < 1.0) || !(eta >= 0.0)) throw OutOfRegion("ex5 requires x in (0,1), eta >= 0");
    const double lo = x - eta;
    const double hi = x + eta;
    auto sq = [](double t) { return t * t; };
    double four_qee;
    if (between(0.0, lo, hi) && hi <= 1.0 + 1e-12) {
        four_qee = sq(lo) + sq(1.0 - hi) + sq(2.5 - hi) - sq(1.5 - hi);
    } else if (lo <= 1e-12 && between(0.0, hi, 1.0)) {
        four_qee = sq(1.0 - hi) + sq(2.5 - hi) - sq(1.5 - hi);
    } else if (lo <= 1e-12 && between(1.0, hi, 1.5)) {
        four_qee = sq(2.5 - hi) - sq(1.5 - hi);
    } else if (lo <= 1e-12 && between(1.5, hi, 2.5)) {
        four_qee = sq(2.5 - hi);
    } else if (between(0.0, lo, 1.0) && between(1.0, hi, 1.5)) {
        four_qee = sq(lo) + sq(2.5 - hi) - sq(1.5 - hi);
    } else if (between(0.0, lo, 1.5) && between(1.5, hi, 2.5)) {
        four_qee = sq(lo) + sq(2.5 - hi);
    } else if (lo <= 1e-12 && hi >= 2.5 - 1e-12) {
        four_qee = 0.0;
    } else if (hi >= 2.5 - 1e-12) {
        // lo in (0,1), upper tail fully absorbed.
        four_qee = sq(lo);
    } else {
        throw OutOfRegion("ex5 expected-excess branch not covered");
    }
    return 0.25 * four_qee;
}

double Ex5::cdf(double x, double t) {
    if (!(x > 0.0 && x < 1.0)) throw OutOfRegion("ex5 requires x in (0,1)");
    if (t < 0.0) return 0.0;
    const double lo = x - t;
    const double hi = x + t;
    if (between(0.0, lo, hi) && hi <= 1.0 + 1e-12) return t;
    if (lo <= 1e-12 && between(0.0, hi, 1.0)) return 0.5 * hi;
    if (lo <= 1e-12 && between(1.0, hi, 1.5)) return 0.5;
    if (lo <= 1e-12 && between(1.5, hi, 2.5)) return 0.5 + 0.5 * (hi - 1.5);
    if (between(0.0, lo, 1.0) && between(1.0, hi, 1.5)) return 0.5 * (1.0 - lo);
    if (between(0.0, lo, 1.0) && between(1.5, hi, 2.5)) return 0.5 * (1.0 - lo) + 0.5 * (hi - 1.5);
    if (lo <= 1e-12 && hi >= 2.5 - 1e-12) return 1.0;
    if (between(0.0, lo, 1.0) && hi >= 2.5 - 1e-12) return 0.5 * (1.0 - lo) + 0.5;
    throw OutOfRegion("ex5 cdf branch not covered");
}

double Ex5::var(double x, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw OutOfRegion("ex5 requires alpha in (0,1)");
    const double p = 1.0 - alpha;
    // cdf is nondecreasing and piecewise linear in t; invert by bisection on
    // [0, 2.5 + x] (cdf caps at 1 there).
    double lo = 0.0, hi = 2.5 + x;
    if (cdf(x, lo) >= p) return lo;
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (cdf(x, mid) >= p - 1e-14) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

double Ex5::cvar(double x, double alpha) {
    const double v = var(x, alpha);
    return v + qee(x, v) / alpha;
}

// ---------------------------------------------------------------------------

namespace {

using riskconvex::measures::MeasureModel;
using riskconvex::risk::Evaluator;
using riskconvex::risk::IntegrationMode;
using riskconvex::risk::RiskConfig;

Eigen::VectorXd v1(double x) {
    Eigen::VectorXd v(1);
    v << x;
    return v;
}

struct CaseTracker {
    SuiteCase c;
    explicit CaseTracker(std::string name, double tol) {
        c.name = std::move(name);
        c.tol = tol;
    }
    void observe(double err) { c.max_err = std::max(c.max_err, std::abs(err)); }
    SuiteCase done() {
        c.pass = c.max_err <= c.tol;
        return c;
    }
};

riskconvex::poly::ConeComplex make_complex(const riskconvex::poly::RecourseSpec& spec) {
    return riskconvex::poly::build_cone_complex(riskconvex::poly::enumerate_dual_vertices(spec));
}

} // namespace

SuiteResult run_oracle_suite(std::uint64_t seed) {
    SuiteResult out;
    auto push = [&out](SuiteCase c) {
        out.all_pass = out.all_pass && c.pass;
        out.cases.push_back(std::move(c));
    };

    // Instance A: phi = max{0, t}, mu = U(-rho, 1+rho), rho = 0.25 (Ex1, a=1).
    riskconvex::poly::RecourseSpec specA;
    specA.W = Eigen::MatrixXd(1, 2);
    specA.W << 1.0, -1.0;
    specA.q = Eigen::VectorXd(2);
    specA.q << 1.0, 0.0;
    const auto cxA = make_complex(specA);
    const double rho = 0.25;
    const auto muA = MeasureModel::box_uniform(v1(-rho), v1(1.0 + rho));

    {
        RiskConfig cfg;
        cfg.mode = IntegrationMode::Quadrature;
        Evaluator ev(cxA, muA, cfg);
        CaseTracker t("ex1_expected_excess_quadrature", 1e-9);
        for (double x = 0.1; x < 0.95; x += 0.1)
            for (double eta : {0.05, 0.1, 0.2})
                t.observe(ev.q_expected_excess(v1(x), eta).value - ex1_qee(x, eta, 1.0, rho, true));
        push(t.done());
    }
    {
        RiskConfig cfg;
        cfg.seed = seed;
        cfg.n_samples = 40000;
        Evaluator ev(cxA, muA, cfg);
        CaseTracker t("ex1_expected_excess_monte_carlo", 6e-3);
        for (double x : {0.2, 0.5, 0.8})
            for (double eta : {0.05, 0.15})
                t.observe(ev.q_expected_excess(v1(x), eta).value - ex1_qee(x, eta, 1.0, rho, true));
        push(t.done());
    }

    // Instance B: phi = max{0, t1, t2}, mu = U((0,1)^2) (Ex2).
    riskconvex::poly::RecourseSpec specB;
    specB.W = Eigen::MatrixXd(2, 3);
    specB.W << -1.0, 0.0, 1.0, 0.0, -1.0, 1.0;
    specB.q = Eigen::VectorXd(3);
    specB.q << 0.0, 0.0, 1.0;
    const auto cxB = make_complex(specB);
    const auto muB = MeasureModel::box_uniform(Eigen::VectorXd::Zero(2), Eigen::VectorXd::Ones(2));
    {
        RiskConfig cfg;
        cfg.mode = IntegrationMode::Quadrature;
        Evaluator ev(cxB, muB, cfg);
        CaseTracker t("ex2_expected_excess_quadrature", 1e-9);
        Eigen::VectorXd x(2);
        for (auto [x1, x2, eta] : {std::array<double, 3>{0.6, 0.3, 0.2},
                                   std::array<double, 3>{0.5, 0.2, 0.1},
                                   std::array<double, 3>{0.7, 0.4, 0.25}}) {
            x << x1, x2;
            t.observe(ev.q_expected_excess(x, eta).value - ex2_qee_and_hessian(x1, x2, eta).first);
        }
        push(t.done());

        CaseTracker th("ex2_hessian_finite_differences", 5e-3);
        const auto H = ex2_qee_and_hessian(0.6, 0.3, 0.2).second;
        const double h = 0.01;
        Eigen::Matrix2d Hfd;
        Eigen::VectorXd base(2);
        base << 0.6, 0.3;
        auto f = [&](double d0, double d1) {
            Eigen::VectorXd xx = base;
            xx[0] += d0;
            xx[1] += d1;
            return ev.q_expected_excess(xx, 0.2).value;
        };
        Hfd(0, 0) = (f(h, 0) - 2.0 * f(0, 0) + f(-h, 0)) / (h * h);
        Hfd(1, 1) = (f(0, h) - 2.0 * f(0, 0) + f(0, -h)) / (h * h);
        Hfd(0, 1) = (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4.0 * h * h);
        Hfd(1, 0) = Hfd(0, 1);
        th.observe((Hfd - H).cwiseAbs().maxCoeff());
        push(th.done());
    }

    // Instance C: phi = max{0,t}, mu = U(0,1) (Ex3/Ex4).
    const auto muC = MeasureModel::box_uniform(v1(0.0), v1(1.0));
    {
        RiskConfig cfg;
        cfg.seed = seed + 1;
        cfg.n_samples = 60000;
        Evaluator ev(cxA, muC, cfg);
        CaseTracker t("ex3_expected_excess_monte_carlo", 5e-3);
        for (double x = 0.1; x <= 0.7; x += 0.15)
            for (double eta : {0.05, 0.1, 0.2})
                t.observe(ev.q_expected_excess(v1(x), eta).value - ex3_qee(x, eta));
        push(t.done());

        CaseTracker tv("ex4_var_monte_carlo", 8e-3);
        CaseTracker tc("ex4_cvar_monte_carlo", 8e-3);
        for (double alpha : {0.3, 0.5, 0.8}) {
            for (double x : {0.05, 0.1, 0.15}) {
                const auto [var, cvar] = ex4_var_cvar(x, alpha);
                tv.observe(ev.q_var(v1(x), alpha) - var);
                tc.observe(ev.q_cvar(v1(x), alpha).value - cvar);
            }
        }
        push(tv.done());
        push(tc.done());
    }
    {
        RiskConfig cfg;
        cfg.mode = IntegrationMode::Quadrature;
        Evaluator ev(cxA, muC, cfg);
        CaseTracker t("ex4_var_cvar_quadrature", 1e-8);
        for (double alpha : {0.3, 0.5, 0.8}) {
            for (double x : {0.05, 0.1, 0.15}) {
                const auto [var, cvar] = ex4_var_cvar(x, alpha);
                t.observe(ev.q_var(v1(x), alpha) - var);
                t.observe(ev.q_cvar(v1(x), alpha).value - cvar);
            }
        }
        push(t.done());
    }

    // Instance D: phi = |t|, mu = U(0,1)/2 + U(1.5,2.5)/2 (Ex5).
    riskconvex::poly::RecourseSpec specD;
    specD.W = Eigen::MatrixXd(1, 2);
    specD.W << 1.0, -1.0;
    specD.q = Eigen::VectorXd(2);
    specD.q << 1.0, 1.0;
    const auto cxD = make_complex(specD);
    std::vector<riskconvex::measures::BoxUniform> comps;
    comps.push_back({v1(0.0), v1(1.0)});
    comps.push_back({v1(1.5), v1(2.5)});
    Eigen::VectorXd wmix(2);
    wmix << 0.5, 0.5;
    const auto muD = MeasureModel::mixture(comps, wmix);
    {
        RiskConfig cfg;
        cfg.mode = IntegrationMode::Quadrature;
        Evaluator ev(cxD, muD, cfg);
        CaseTracker t("ex5_expected_excess_quadrature", 1e-9);
        for (double x : {0.2, 0.5, 0.8})
            for (double eta : {0.1, 0.4, 0.9, 1.3, 1.8})
                t.observe(ev.q_expected_excess(v1(x), eta).value - Ex5::qee(x, eta));
        push(t.done());

        CaseTracker tc("ex5_pushforward_cdf_quadrature", 1e-9);
        for (double x : {0.2, 0.5, 0.8})
            for (double tt : {0.1, 0.3, 0.7, 1.1, 1.7, 2.2})
                tc.observe(ev.pushforward_cdf(v1(x), tt) - Ex5::cdf(x, tt));
        push(tc.done());

        CaseTracker tvc("ex5_var_cvar_quadrature", 1e-7);
        for (double x : {0.3, 0.6}) {
            for (double alpha : {0.3, 0.4, 0.6}) {
                tvc.observe(ev.q_var(v1(x), alpha) - Ex5::var(x, alpha));
                tvc.observe(ev.q_cvar(v1(x), alpha).value - Ex5::cvar(x, alpha));
            }
        }
        push(tvc.done());

        // alpha < 1/4 puts the value-at-risk above 1 on all of (0,1).
        CaseTracker tq("ex5_small_alpha_var_above_one", 0.0);
        double worst = 1.0;
        for (double x = 0.05; x < 1.0; x += 0.05) worst = std::min(worst, Ex5::var(x, 0.2) - 1.0);
        for (double x : {0.25, 0.5, 0.75}) worst = std::min(worst, ev.q_var(v1(x), 0.2) - 1.0);
        tq.observe(worst > 0.0 ? 0.0 : 1.0);
        push(tq.done());
    }

    return out;
}

} // namespace riskconvex::oracles
