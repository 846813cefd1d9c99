#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "riskconvex/errors.hpp"
#include "riskconvex/measures.hpp"
#include "riskconvex/rng.hpp"

#include <cmath>

using namespace riskconvex;
using measures::MeasureModel;

namespace {

Eigen::VectorXd v1(double x) {
    Eigen::VectorXd v(1);
    v << x;
    return v;
}

MeasureModel ex5_mixture() {
    std::vector<measures::BoxUniform> comps;
    comps.push_back({v1(0.0), v1(1.0)});
    comps.push_back({v1(1.5), v1(2.5)});
    Eigen::VectorXd w(2);
    w << 0.5, 0.5;
    return MeasureModel::mixture(comps, w);
}

MeasureModel two_point(double a, double b) {
    Eigen::MatrixXd pts(2, 1);
    pts << a, b;
    return MeasureModel::empirical(pts);
}

} // namespace

TEST_CASE("sampling: support, reproducibility, law of large numbers") {
    const auto box = MeasureModel::box_uniform(v1(0.0), v1(1.0));
    const auto s1 = measures::sample(box, 4, 7);
    const auto s2 = measures::sample(box, 4, 7);
    for (std::size_t j = 0; j < 4; ++j) {
        CHECK(s1.component(0)[j] >= 0.0);
        CHECK(s1.component(0)[j] < 1.0);
        CHECK(s1.component(0)[j] == s2.component(0)[j]); // bitwise reproducible
    }

    const auto emp = two_point(0.0, 1.0);
    const auto se = measures::sample(emp, 40000, 11);
    double ones = 0.0;
    for (std::size_t j = 0; j < se.count; ++j) ones += se.component(0)[j];
    const double frac = ones / static_cast<double>(se.count);
    CHECK(std::abs(frac - 0.5) < 3.0 * 0.5 / std::sqrt(40000.0));

    const auto mix = ex5_mixture();
    const auto sm = measures::sample(mix, 50000, 13);
    for (std::size_t j = 0; j < sm.count; ++j) {
        const double z = sm.component(0)[j];
        CHECK(!(z > 1.0 && z < 1.5)); // the gap carries no mass
    }
}

TEST_CASE("chunked substreams: same seed reproduces, new seed decorrelates") {
    const auto box = MeasureModel::box_uniform(v1(0.0), v1(1.0));
    const auto a = measures::sample(box, 10000, 99, 8192);
    const auto b = measures::sample(box, 10000, 99, 8192);
    for (std::size_t j = 0; j < a.count; ++j) CHECK(a.component(0)[j] == b.component(0)[j]);
    const auto c = measures::sample(box, 10000, 100, 8192);
    int diff = 0;
    for (std::size_t j = 0; j < a.count; ++j) diff += a.component(0)[j] != c.component(0)[j];
    CHECK(diff > 9000);
}

TEST_CASE("first moments") {
    CHECK(measures::check_first_moment(MeasureModel::box_uniform(v1(0.0), v1(1.0))).value ==
          doctest::Approx(0.5).epsilon(1e-12));
    CHECK(measures::check_first_moment(two_point(-2.0, 2.0)).value == doctest::Approx(2.0));
    CHECK(measures::check_first_moment(ex5_mixture()).value == doctest::Approx(1.25).epsilon(1e-12));
}

TEST_CASE("density floor verification") {
    measures::DensityCertificate cert;
    cert.v_lo = v1(0.0);
    cert.v_hi = v1(1.0);
    cert.rho = 0.25;
    cert.r = 1.0 / 1.5;
    const auto wide = MeasureModel::box_uniform(v1(-0.25), v1(1.25));
    auto res = measures::verify_density_floor(wide, cert, 20000);
    CHECK(res.pass);
    CHECK(res.observed_min == doctest::Approx(1.0 / 1.5));

    cert.rho = 0.1;
    cert.r = 0.5;
    const auto narrow = MeasureModel::box_uniform(v1(0.0), v1(1.0));
    res = measures::verify_density_floor(narrow, cert, 20000);
    CHECK(!res.pass);
    CHECK(res.observed_min == doctest::Approx(0.0));

    cert.rho = 0.1;
    cert.r = 0.01;
    res = measures::verify_density_floor(ex5_mixture(), cert, 20000);
    CHECK(!res.pass); // the gap (1, 1.1) is inside V + B_rho

    CHECK_THROWS_AS(measures::verify_density_floor(two_point(0.0, 1.0), cert, 100), NoDensity);
}

TEST_CASE("wasserstein: shifted uniforms have distance |a| for p in {1,2}") {
    const auto u = MeasureModel::box_uniform(v1(0.0), v1(1.0));
    for (double a : {0.1, 0.5, 2.0}) {
        const auto ua = MeasureModel::box_uniform(v1(a), v1(a + 1.0));
        for (double p : {1.0, 2.0})
            CHECK(measures::wasserstein_p(u, ua, p) == doctest::Approx(a).epsilon(1e-9));
    }
}

TEST_CASE("wasserstein: point masses and small empiricals") {
    CHECK(measures::wasserstein_p(two_point(0.0, 0.0), two_point(1.0, 1.0), 1.0) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(measures::wasserstein_p(two_point(0.0, 1.0), two_point(0.5, 0.5), 1.0) ==
          doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("wasserstein metric axioms on random empirical triples") {
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 4 + static_cast<int>(rng.next_index(6));
        auto mk = [&] {
            Eigen::MatrixXd pts(n, 1);
            for (int i = 0; i < n; ++i) pts(i, 0) = rng.uniform(-2.0, 2.0);
            return MeasureModel::empirical(pts);
        };
        const auto A = mk(), B = mk(), C = mk();
        const double ab = measures::wasserstein_p(A, B, 1.0);
        const double ba = measures::wasserstein_p(B, A, 1.0);
        const double aa = measures::wasserstein_p(A, A, 1.0);
        const double ac = measures::wasserstein_p(A, C, 1.0);
        const double cb = measures::wasserstein_p(C, B, 1.0);
        CHECK(std::abs(ab - ba) < 1e-12);
        CHECK(aa < 1e-12);
        CHECK(ab <= ac + cb + 1e-9);
        CHECK(measures::wasserstein_p(A, B, 1.0) <= measures::wasserstein_p(A, B, 2.0) + 1e-9);
    }
}

TEST_CASE("wasserstein: multi-dimensional empirical pairs via optimal transport") {
    Rng rng(8);
    const int n = 25;
    Eigen::MatrixXd a(n, 2), b(n, 2);
    for (int i = 0; i < n; ++i) {
        a(i, 0) = rng.uniform(0.0, 1.0);
        a(i, 1) = rng.uniform(0.0, 1.0);
        b(i, 0) = a(i, 0) + 0.3;
        b(i, 1) = a(i, 1) + 0.4;
    }
    const auto A = MeasureModel::empirical(a), B = MeasureModel::empirical(b);
    CHECK(measures::wasserstein_p(A, B, 1.0) == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(measures::wasserstein_p(A, B, 2.0) == doctest::Approx(0.5).epsilon(1e-8));

    Eigen::MatrixXd big = Eigen::MatrixXd::Zero(201, 2);
    CHECK_THROWS_AS(measures::wasserstein_p(MeasureModel::empirical(big), B, 1.0), Unsupported);
}

TEST_CASE("empirical-vs-model distance decreases with the sample size") {
    const auto box = MeasureModel::box_uniform(v1(0.0), v1(1.0));
    double prev = 1e9;
    for (std::size_t n : {100, 1000, 10000}) {
        const auto s = measures::sample(box, n, 17);
        Eigen::MatrixXd pts(n, 1);
        for (std::size_t j = 0; j < n; ++j) pts(static_cast<Eigen::Index>(j), 0) = s.component(0)[j];
        const double w = measures::wasserstein_p(MeasureModel::empirical(pts), box, 1.0);
        CHECK(w < prev);
        prev = w;
    }
    CHECK(prev < 0.02);
}

TEST_CASE("ball mass") {
    CHECK(measures::ball_mass(two_point(0.0, 0.0), 0.0) == doctest::Approx(1.0));
    const auto u01 = MeasureModel::box_uniform(v1(0.0), v1(1.0));
    CHECK(measures::ball_mass(u01, 0.5) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(measures::ball_mass(ex5_mixture(), 1.0) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("model validation raises precise errors") {
    Eigen::VectorXd w(2);
    w << 0.6, 0.6;
    std::vector<measures::BoxUniform> comps{{v1(0.0), v1(1.0)}, {v1(2.0), v1(3.0)}};
    CHECK_THROWS_WITH_AS(MeasureModel::mixture(comps, w), "measure.weights: must sum to 1",
                         ParseError);
}
