#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "riskconvex/certify.hpp"
#include "riskconvex/errors.hpp"
#include "riskconvex/oracles.hpp"

#include <cmath>

using namespace riskconvex;
using measures::MeasureModel;
using risk::Evaluator;
using risk::IntegrationMode;
using risk::RiskConfig;

namespace {

Eigen::VectorXd v1(double x) {
    Eigen::VectorXd v(1);
    v << x;
    return v;
}

poly::RecourseSpec spec_1d(double q1, double q2) {
    poly::RecourseSpec s;
    s.W = Eigen::MatrixXd(1, 2);
    s.W << 1.0, -1.0;
    s.q = Eigen::VectorXd(2);
    s.q << q1, q2;
    return s;
}

poly::ConeComplex cx_of(const poly::RecourseSpec& s) {
    return poly::build_cone_complex(poly::enumerate_dual_vertices(s));
}

RiskConfig mc_cfg(std::size_t n, std::uint64_t seed) {
    RiskConfig cfg;
    cfg.n_samples = n;
    cfg.seed = seed;
    return cfg;
}

RiskConfig exact_cfg() {
    RiskConfig cfg;
    cfg.mode = IntegrationMode::Quadrature;
    return cfg;
}

} // namespace

TEST_CASE("eta0: scaling of the paper's first worked instance, |t| case, sub-box variant") {
    const double rho = 0.25;
    for (double a : {0.5, 1.0, 2.0}) {
        const auto cx = cx_of(spec_1d(a, 0.0)); // phi = max{0, a t}
        const double eta0 = certify::eta0_max(cx, rho);
        CHECK(eta0 / (a * rho) >= 0.999999);
        CHECK(eta0 / (a * rho) <= 1.0);
    }
    const auto cxabs = cx_of(spec_1d(1.0, 1.0));
    CHECK(certify::eta0_max(cxabs, 0.5) == doctest::Approx(0.5).epsilon(1e-5));

    // U = (rho, 1-rho) inside V = (0,1) buys an extra rho of clearance.
    const double gap = certify::region_gap(v1(0.0), v1(1.0), v1(rho), v1(1.0 - rho));
    CHECK(gap == doctest::Approx(rho));
    const auto cx1 = cx_of(spec_1d(1.0, 0.0));
    const double eta0u = certify::eta0_max(cx1, rho + gap);
    CHECK(eta0u / (2.0 * rho) >= 0.999999);
    CHECK(eta0u / (2.0 * rho) <= 1.0);
}

TEST_CASE("cvar condition (20): pass and fail cases") {
    // Certified |t| instance: alpha = 0.75 keeps sup VaR under eta0 ~ 0.25.
    {
        const auto cx = cx_of(spec_1d(1.0, 1.0));
        Evaluator ev(cx, MeasureModel::box_uniform(v1(-0.25), v1(1.25)), exact_cfg());
        const double eta0 = certify::eta0_max(cx, 0.25);
        const auto res = certify::cvar_condition_check(ev, v1(0.0), v1(1.0), 0.75, eta0, cx.delta);
        CHECK(res.pass);
        CHECK(res.sup_estimate == doctest::Approx(0.1875).epsilon(1e-2));
        // alpha-monotonicity: passing at alpha keeps passing for larger alpha.
        for (double a2 : {0.8, 0.9, 0.99}) {
            const auto r2 = certify::cvar_condition_check(ev, v1(0.0), v1(1.0), a2, eta0, cx.delta);
            CHECK(r2.pass);
            CHECK(r2.sup_estimate <= res.sup_estimate + 1e-9);
        }
    }
    // The two-box mixture from the appendix example: alpha < 1/4 forces the
    // value-at-risk above 1 everywhere, far beyond any admissible eta0.
    {
        const auto cx = cx_of(spec_1d(1.0, 1.0));
        std::vector<measures::BoxUniform> comps{{v1(0.0), v1(1.0)}, {v1(1.5), v1(2.5)}};
        Eigen::VectorXd w(2);
        w << 0.5, 0.5;
        Evaluator ev(cx, MeasureModel::mixture(comps, w), exact_cfg());
        const auto res = certify::cvar_condition_check(ev, v1(0.1), v1(0.9), 0.2, 0.25, cx.delta);
        CHECK(!res.pass);
        CHECK(res.sup_estimate > 1.0);
    }
}

TEST_CASE("var upper bound") {
    const auto cx = cx_of(spec_1d(1.0, 1.0)); // d = 1
    // Point mass at the origin: eta_bar = 0 at every level.
    {
        Eigen::MatrixXd pts(1, 1);
        pts << 0.0;
        const auto r = certify::var_upper_bound(cx, MeasureModel::empirical(pts), v1(-0.1), v1(0.1),
                                                0.5, 0.1);
        CHECK(r.eta_bar == doctest::Approx(0.0));
    }
    // U(0,1): mu(B_t) = t, so eta_bar = alpha; with U = (-0.1, 0.1) the bound
    // is d*eta_bar + d*max||x|| = 0.5 + 0.1.
    {
        const auto r = certify::var_upper_bound(cx, MeasureModel::box_uniform(v1(0.0), v1(1.0)),
                                                v1(-0.1), v1(0.1), 0.5, 0.1);
        CHECK(r.eta_bar == doctest::Approx(0.5).epsilon(1e-9));
        CHECK(r.d == doctest::Approx(1.0));
        CHECK(r.bound == doctest::Approx(0.6).epsilon(1e-9));
        CHECK(r.u_hi[0] == doctest::Approx(0.1)); // largest centered box for eps = 0.1
    }
}

TEST_CASE("empirical strong convexity: quadratic, linear, and the Ex3 expected excess") {
    certify::EstimatorConfig ecfg;
    ecfg.n_pairs = 120;
    // Deterministic quadratic: kappa = 1 exactly.
    certify::RepFunctional quad{1, 1, [](int, const Eigen::VectorXd& x) { return 0.5 * x.squaredNorm(); }};
    auto est = certify::empirical_strong_convexity(quad, v1(-1.0), v1(1.0), ecfg);
    CHECK(est.kappa == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(est.noise_floor == doctest::Approx(0.0));
    CHECK(est.certified_positive());

    certify::RepFunctional lin{1, 1, [](int, const Eigen::VectorXd& x) { return 3.0 * x[0] + 1.0; }};
    est = certify::empirical_strong_convexity(lin, v1(-1.0), v1(1.0), ecfg);
    CHECK(std::abs(est.kappa) < 1e-9);
    CHECK(!est.certified_positive());

    // Q_EE(. , 0.1) of the counterexample instance has curvature exactly 1 on
    // valid regions (exact quadrature path).
    const auto cx = cx_of(spec_1d(1.0, 0.0));
    Evaluator ev(cx, MeasureModel::box_uniform(v1(0.0), v1(1.0)), exact_cfg());
    certify::RepFunctional qee{ev.replicate_count(), 1, [&](int r, const Eigen::VectorXd& x) {
                                   return ev.expected_excess_rep(r, x, 0.1);
                               }};
    est = certify::empirical_strong_convexity(qee, v1(0.1), v1(0.7), ecfg);
    CHECK(est.kappa == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("omega set pair predicate") {
    const auto cx = cx_of(spec_1d(1.0, 0.0)); // I+ = {d=1}, delta = 1
    const auto omega = certify::omega_set(cx);
    CHECK(omega.delta == doctest::Approx(1.0));
    // nu >= 0 with u > 0: admissible (reverse direction lands in the d=0 cone).
    CHECK(omega.pair_admissible(v1(0.2), 0.1, v1(0.5), 0.3));
    // The PSC-killer pair u > 0, nu = -u is excluded for delta < 3.
    CHECK(!omega.pair_admissible(v1(0.2), 0.4, v1(0.5), 0.1));
    // Mild decrease within the delta/3 slope is admissible.
    CHECK(omega.pair_admissible(v1(0.2), 0.2, v1(0.5), 0.2 - 0.3 / 3.0 * 0.9));
    // eta-constant pairs always admissible.
    CHECK(omega.pair_admissible(v1(0.7), 0.15, v1(0.2), 0.15));
}

TEST_CASE("partial vs restricted strong convexity on the counterexample instance") {
    const auto cx = cx_of(spec_1d(1.0, 0.0));
    Evaluator ev(cx, MeasureModel::box_uniform(v1(0.0), v1(1.0)), mc_cfg(32000, 99));
    certify::EstimatorConfig ecfg;
    ecfg.n_pairs = 150;
    ecfg.min_separation = 0.1;
    const double eta0 = 0.25;

    const auto part = certify::empirical_partial_sc(ev, v1(0.1), v1(0.7), 0.0125, eta0, ecfg);
    CHECK(part.gradient.kappa < part.gradient.noise_floor);
    CHECK(part.midpoint.kappa < part.midpoint.noise_floor);
    CHECK(!part.gradient.certified_positive());

    const auto omega = certify::omega_set(cx);
    const auto restr = certify::empirical_restricted_psc(ev, v1(0.1), v1(0.7), eta0, omega, ecfg);
    // Theorem-4 regime: admissible pairs have quotient at least (1-delta/3)^2.
    CHECK(restr.gradient.kappa > 3.0 * restr.gradient.noise_floor);
    CHECK(restr.gradient.kappa > 0.3);
    CHECK(restr.midpoint.kappa > 3.0 * restr.midpoint.noise_floor);
    // Filtering to a subset cannot lower the minimum.
    CHECK(restr.gradient.kappa >= part.gradient.kappa - 1e-9);
}

TEST_CASE("restricted estimator reports admissible-pair starvation") {
    // On the |t| instance both pair orientations trigger the Omega condition,
    // so a tiny delta forces |eta' - eta| <= (delta/3)||u|| and almost no
    // sampled pair survives.
    const auto cx = cx_of(spec_1d(1.0, 1.0));
    Evaluator ev(cx, MeasureModel::box_uniform(v1(-0.25), v1(1.25)), exact_cfg());
    const auto omega = certify::omega_set(cx, 1e-9);
    certify::EstimatorConfig ecfg;
    ecfg.n_pairs = 200;
    CHECK_THROWS_AS(
        certify::empirical_restricted_psc(ev, v1(0.1), v1(0.7), 0.25, omega, ecfg),
        TooFewAdmissiblePairs);
}

TEST_CASE("theoretical modulus: 1-D cases and consistency with the empirical estimate") {
    // phi = |t|, mu = U(-rho, 1+rho) normalized: r = 1/1.5, alpha = 2,
    // facet gap 2, alpha' = 1, ||d|| = 1: kappa_lower = r * min{4/2, 1} = r.
    {
        const auto cx = cx_of(spec_1d(1.0, 1.0));
        const double r = 1.0 / 1.5;
        const double eta0 = certify::eta0_max(cx, 0.25);
        const auto tm = certify::theoretical_modulus(cx, 0.25, r, eta0 / 2.0, eta0);
        CHECK(tm.kappa_lower == doctest::Approx(r).epsilon(1e-9));

        Evaluator ev(cx, MeasureModel::box_uniform(v1(-0.25), v1(1.25)), exact_cfg());
        certify::EstimatorConfig ecfg;
        ecfg.n_pairs = 120;
        certify::RepFunctional qee{1, 1, [&](int rr, const Eigen::VectorXd& x) {
                                       return ev.expected_excess_rep(rr, x, eta0 / 2.0);
                                   }};
        const auto est = certify::empirical_strong_convexity(qee, v1(0.0), v1(1.0), ecfg);
        CHECK(tm.kappa_lower <= est.kappa + 3.0 * est.noise_floor + 1e-9);
    }
    // phi = max{0, a t}: both cases give r*a, matching the exact curvature
    // a * theta of the closed form.
    for (double a : {1.0, 2.0}) {
        const auto cx = cx_of(spec_1d(a, 0.0));
        const double r = 1.0 / 1.5;
        const double eta0 = certify::eta0_max(cx, 0.25);
        const auto tm = certify::theoretical_modulus(cx, 0.25, r, eta0 / 2.0, eta0);
        CHECK(tm.kappa_lower == doctest::Approx(r * a).epsilon(1e-9));

        Evaluator ev(cx, MeasureModel::box_uniform(v1(-0.25), v1(1.25)), exact_cfg());
        certify::EstimatorConfig ecfg;
        ecfg.n_pairs = 100;
        certify::RepFunctional qee{1, 1, [&](int rr, const Eigen::VectorXd& x) {
                                       return ev.expected_excess_rep(rr, x, eta0 / 2.0);
                                   }};
        const auto est = certify::empirical_strong_convexity(qee, v1(0.0), v1(1.0), ecfg);
        CHECK(tm.kappa_lower <= est.kappa + 3.0 * est.noise_floor + 1e-9);
    }
}

TEST_CASE("full pipeline on the certified |t| instance and the counterexample") {
    // Certified instance: A1-A6 pass, condition (20) passes at alpha = 0.75,
    // CVaR modulus positive and at least kappa_partial / alpha.
    {
        const auto spec = spec_1d(1.0, 1.0);
        measures::DensityCertificate cert;
        cert.v_lo = v1(0.0);
        cert.v_hi = v1(1.0);
        cert.rho = 0.25;
        cert.r = 1.0 / 1.5;
        certify::RegionSpec region;
        region.v_lo = v1(0.0);
        region.v_hi = v1(1.0);
        certify::CertifyOptions opts;
        opts.alpha = 0.75;
        opts.estimator.n_pairs = 120;
        opts.estimator.min_separation = 0.25;
        const auto rep = certify::certify_pipeline(
            spec, MeasureModel::box_uniform(v1(-0.25), v1(1.25)), cert, region, mc_cfg(48000, 7), opts);
        CHECK(rep.a1.pass);
        CHECK(rep.a2.pass);
        CHECK(rep.a3.pass);
        CHECK(rep.a4.pass);
        CHECK(rep.a5.pass);
        CHECK(rep.a6.pass);
        REQUIRE(rep.eta0.has_value());
        CHECK(*rep.eta0 == doctest::Approx(0.25).epsilon(1e-4));
        REQUIRE(rep.cvar_condition.has_value());
        CHECK(rep.cvar_condition->pass);
        REQUIRE(rep.kappa_cvar.has_value());
        CHECK(rep.kappa_cvar->certified_positive());
        REQUIRE(rep.kappa_partial.has_value());
        const double kp = rep.kappa_partial->gradient.kappa;
        CHECK(kp > 0.5); // true modulus is 2r = 4/3
        CHECK(rep.kappa_cvar->kappa >=
              kp / opts.alpha - 3.0 * (rep.kappa_cvar->noise_floor + 1e-3));
        CHECK(rep.all_requested_pass);
    }
    // Counterexample instance: A6 fails, no partial strong convexity.
    {
        const auto spec = spec_1d(1.0, 0.0);
        measures::DensityCertificate cert;
        cert.v_lo = v1(0.1);
        cert.v_hi = v1(0.9);
        cert.rho = 0.1;
        cert.r = 1.0;
        certify::RegionSpec region;
        region.v_lo = v1(0.1);
        region.v_hi = v1(0.9);
        certify::CertifyOptions opts;
        opts.alpha = 0.5;
        // The adversarial u = -nu minimum needs enough pairs to resolve.
        opts.estimator.n_pairs = 800;
        opts.run_theoretical = false;
        const auto rep = certify::certify_pipeline(spec, MeasureModel::box_uniform(v1(0.0), v1(1.0)),
                                                   cert, region, mc_cfg(48000, 11), opts);
        CHECK(!rep.a6.pass);
        REQUIRE(rep.kappa_partial.has_value());
        CHECK(rep.kappa_partial->gradient.kappa < rep.kappa_partial->gradient.noise_floor);
        REQUIRE(rep.kappa_cvar.has_value());
        CHECK(!rep.kappa_cvar->certified_positive());
        CHECK(!rep.all_requested_pass);
    }
}
