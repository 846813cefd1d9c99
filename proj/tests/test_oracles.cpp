#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "riskconvex/errors.hpp"
#include "riskconvex/oracles.hpp"
#include "riskconvex/rng.hpp"

#include <cmath>

using namespace riskconvex;
using namespace riskconvex::oracles;

TEST_CASE("ex1: zero branch, literal value, normalization") {
    CHECK(ex1_qee(0.95, 0.5, 1.0, 0.25, false) == doctest::Approx(0.0)); // x >= 1+rho-eta
    // direct substitution of the closed form
    CHECK(ex1_qee(0.5, 0.1, 1.0, 0.25, false) == doctest::Approx(0.21125).epsilon(1e-12));
    CHECK(ex1_qee(0.5, 0.1, 1.0, 0.25, true) == doctest::Approx(0.21125 / 1.5).epsilon(1e-12));
    CHECK_THROWS_AS(ex1_qee(-0.1, 0.1, 1.0, 0.25, true), OutOfRegion);
}

TEST_CASE("ex1 normalized variant equals direct quadrature of the defining integral") {
    // trapezoid on a fine grid is plenty at 1e-6
    const double a = 1.0, rho = 0.25, x = 0.5, eta = 0.1;
    const int n = 200000;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = -rho + (1.0 + 2.0 * rho) * (i + 0.5) / n;
        acc += std::max(0.0, std::max(0.0, a * (z - x)) - eta);
    }
    acc /= n; // normalized uniform density
    CHECK(ex1_qee(x, eta, a, rho, true) == doctest::Approx(acc).epsilon(1e-5));
}

TEST_CASE("ex2: value, Hessian, degenerate limit") {
    const auto [val, H] = ex2_qee_and_hessian(0.6, 0.3, 0.2);
    CHECK(H(0, 0) == doctest::Approx(0.7));
    CHECK(H(0, 1) == doctest::Approx(-0.2));
    CHECK(H(1, 0) == doctest::Approx(-0.2));
    CHECK(H(1, 1) == doctest::Approx(1.0));
    // 2-D tensor quadrature of the defining integral.
    const int g = 1200;
    double acc = 0.0;
    for (int i = 0; i < g; ++i) {
        for (int j = 0; j < g; ++j) {
            const double z1 = (i + 0.5) / g, z2 = (j + 0.5) / g;
            acc += std::max(0.0, std::max({0.0, z1 - 0.6, z2 - 0.3}) - 0.2);
        }
    }
    acc /= g * g;
    CHECK(val == doctest::Approx(acc).epsilon(2e-6));
    // det H -> 0+ as eta -> 1-, x1 -> 1, x2 -> 0.
    double prev = 1.0;
    for (double step : {0.2, 0.1, 0.05, 0.02}) {
        const auto [v2, H2] = ex2_qee_and_hessian(1.0 - 1.5 * step, 0.5 * step, step * 0.5);
        const double det = H2.determinant();
        CHECK(det > 0.0);
        CHECK(det <= prev + 1e-12);
        prev = det;
    }
    CHECK_THROWS_AS(ex2_qee_and_hessian(0.3, 0.6, 0.2), OutOfRegion);
}

TEST_CASE("ex2: finite differences of the value reproduce the stated Hessian") {
    const double h = 1e-4;
    const double x1 = 0.55, x2 = 0.25, eta = 0.2;
    auto f = [&](double a, double b) { return ex2_qee_and_hessian(a, b, eta).first; };
    const auto H = ex2_qee_and_hessian(x1, x2, eta).second;
    const double h11 = (f(x1 + h, x2) - 2.0 * f(x1, x2) + f(x1 - h, x2)) / (h * h);
    const double h22 = (f(x1, x2 + h) - 2.0 * f(x1, x2) + f(x1, x2 - h)) / (h * h);
    const double h12 = (f(x1 + h, x2 + h) - f(x1 + h, x2 - h) - f(x1 - h, x2 + h) + f(x1 - h, x2 - h)) /
                       (4.0 * h * h);
    CHECK(std::abs(h11 - H(0, 0)) < 1e-4);
    CHECK(std::abs(h22 - H(1, 1)) < 1e-4);
    CHECK(std::abs(h12 - H(0, 1)) < 1e-4);
}

TEST_CASE("ex3 and ex4 closed forms") {
    CHECK(ex3_qee(0.5, 0.1) == doctest::Approx(0.08).epsilon(1e-12));
    const auto [var, cvar] = ex4_var_cvar(0.2, 0.5);
    CHECK(var == doctest::Approx(0.3));
    CHECK(cvar == doctest::Approx(0.55));
    // Eq.(8) consistency: CVaR = VaR + Q_EE(x, VaR) / alpha via ex3.
    for (double x : {0.1, 0.2, 0.3}) {
        for (double alpha : {0.3, 0.5}) {
            const auto [v, c] = ex4_var_cvar(x, alpha);
            CHECK(c == doctest::Approx(v + ex3_qee(x, v) / alpha).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(ex4_var_cvar(0.8, 0.5), OutOfRegion); // var would be negative
}

TEST_CASE("ex5 tables: spot values and branch continuity") {
    // mu([x-t, x+t]) = 1 once the interval swallows both boxes.
    CHECK(Ex5::cdf(0.4, 2.2) == doctest::Approx(1.0));
    // Branch 0 <= x-t <= x+t <= 1: mass t.
    CHECK(Ex5::cdf(0.5, 0.3) == doctest::Approx(0.3).epsilon(1e-12));
    // Small alpha: VaR > 1 on all of V.
    for (double x = 0.05; x < 1.0; x += 0.05) CHECK(Ex5::var(x, 0.2) > 1.0);

    // Continuity across branch boundaries, qee and cdf, against the direct
    // two-box formulas.
    auto direct_cdf = [](double x, double t) {
        const double lo = x - t, hi = x + t;
        const double m1 = std::max(0.0, std::min(hi, 1.0) - std::max(lo, 0.0));
        const double m2 = std::max(0.0, std::min(hi, 2.5) - std::max(lo, 1.5));
        return 0.5 * m1 + 0.5 * m2;
    };
    auto direct_qee = [](double x, double eta) {
        const int n = 40000;
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            const double z1 = (i + 0.5) / n;
            acc += 0.5 * std::max(0.0, std::abs(z1 - x) - eta) / n;
            const double z2 = 1.5 + (i + 0.5) / n;
            acc += 0.5 * std::max(0.0, std::abs(z2 - x) - eta) / n;
        }
        return acc;
    };
    Rng rng(4);
    for (int it = 0; it < 200; ++it) {
        const double x = rng.uniform(0.01, 0.99);
        const double t = rng.uniform(0.0, 2.6);
        CHECK(Ex5::cdf(x, t) == doctest::Approx(direct_cdf(x, t)).epsilon(1e-9));
    }
    for (double x : {0.3, 0.7}) {
        for (double eta : {0.05, 0.35, 0.8, 1.2, 1.6, 2.1})
            CHECK(Ex5::qee(x, eta) == doctest::Approx(direct_qee(x, eta)).epsilon(1e-6));
        // boundary points of the branch conditions
        for (double b : {x, 1.0 - x, 1.5 - x, 2.5 - x}) {
            if (b <= 0.0) continue;
            const double eps = 1e-10;
            CHECK(std::abs(Ex5::qee(x, b - eps) - Ex5::qee(x, b + eps)) < 1e-9);
            CHECK(std::abs(Ex5::cdf(x, b - eps) - Ex5::cdf(x, b + eps)) < 1e-9);
        }
    }
}

TEST_CASE("oracle suite runs green and is deterministic") {
    const auto r1 = run_oracle_suite(12345);
    for (const auto& c : r1.cases) {
        INFO(c.name, " max_err=", c.max_err, " tol=", c.tol);
        CHECK(c.pass);
    }
    CHECK(r1.all_pass);
    const auto r2 = run_oracle_suite(12345);
    REQUIRE(r1.cases.size() == r2.cases.size());
    for (std::size_t i = 0; i < r1.cases.size(); ++i) {
        CHECK(r1.cases[i].max_err == r2.cases[i].max_err); // bitwise
        CHECK(r1.cases[i].pass == r2.cases[i].pass);
    }
}
