#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "riskconvex/errors.hpp"
#include "riskconvex/polyhedral.hpp"
#include "riskconvex/rng.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

using namespace riskconvex;
using poly::RecourseSpec;

namespace {

RecourseSpec make_spec(std::initializer_list<double> wrow, std::initializer_list<double> q) {
    RecourseSpec s;
    s.W = Eigen::MatrixXd(1, static_cast<int>(wrow.size()));
    int j = 0;
    for (double v : wrow) s.W(0, j++) = v;
    s.q = Eigen::VectorXd(static_cast<int>(q.size()));
    j = 0;
    for (double v : q) s.q[j++] = v;
    return s;
}

RecourseSpec spec_l1() {
    // phi(t) = ||t||_1 via W = [I | -I], q = 1.
    RecourseSpec s;
    s.W = Eigen::MatrixXd(2, 4);
    s.W << 1, 0, -1, 0, 0, 1, 0, -1;
    s.q = Eigen::VectorXd::Ones(4);
    return s;
}

RecourseSpec spec_max0t1t2() {
    RecourseSpec s;
    s.W = Eigen::MatrixXd(2, 3);
    s.W << -1, 0, 1, 0, -1, 1;
    s.q = Eigen::VectorXd(3);
    s.q << 0, 0, 1;
    return s;
}

// Test-local vertex oracle, independent of the library's subset enumerator.
std::vector<Eigen::VectorXd> oracle_vertices(const RecourseSpec& spec) {
    const Eigen::MatrixXd A = spec.W.transpose();
    const Eigen::VectorXd b = spec.q;
    const int s = static_cast<int>(A.cols());
    const int m = static_cast<int>(A.rows());
    std::vector<Eigen::VectorXd> out;
    std::vector<int> idx(s);
    std::function<void(int, int)> rec = [&](int start, int depth) {
        if (depth == s) {
            Eigen::MatrixXd As(s, s);
            Eigen::VectorXd bs(s);
            for (int r = 0; r < s; ++r) {
                As.row(r) = A.row(idx[r]);
                bs[r] = b[idx[r]];
            }
            Eigen::FullPivLU<Eigen::MatrixXd> lu(As);
            lu.setThreshold(1e-10);
            if (lu.rank() < s) return;
            const Eigen::VectorXd v = lu.solve(bs);
            if (((A * v - b).array() > 1e-8).any()) return;
            for (const auto& w : out)
                if ((w - v).cwiseAbs().maxCoeff() <= 1e-7) return;
            out.push_back(v);
            return;
        }
        for (int j = start; j < m; ++j) {
            idx[depth] = j;
            rec(j + 1, depth + 1);
        }
    };
    rec(0, 0);
    return out;
}

bool same_vertex_sets(const std::vector<Eigen::VectorXd>& a, const std::vector<Eigen::VectorXd>& b) {
    if (a.size() != b.size()) return false;
    for (const auto& v : a) {
        bool found = false;
        for (const auto& w : b)
            if ((v - w).cwiseAbs().maxCoeff() <= 1e-7) found = true;
        if (!found) return false;
    }
    return true;
}

} // namespace

TEST_CASE("complete recourse checks") {
    CHECK(poly::check_complete_recourse(make_spec({1, -1}, {1, 0})));
    CHECK(!poly::check_complete_recourse(make_spec({1}, {1})));
    CHECK(poly::check_complete_recourse(spec_l1()));
}

TEST_CASE("sufficiently expensive recourse (A2)") {
    auto r = poly::check_sufficiently_expensive(make_spec({1, -1}, {1, 0}));
    REQUIRE(r.feasible);
    CHECK(r.witness[0] == doctest::Approx(0.5).epsilon(1e-6));

    r = poly::check_sufficiently_expensive(make_spec({1, -1}, {1, 1}));
    REQUIRE(r.feasible);
    CHECK(std::abs(r.witness[0]) < 1e-7);

    r = poly::check_sufficiently_expensive(make_spec({1, -1}, {0, 0}));
    CHECK(!r.feasible);
}

TEST_CASE("A6 positivity of q") {
    CHECK(poly::check_a6(make_spec({1, -1}, {1, 1})));
    CHECK(!poly::check_a6(make_spec({1, -1}, {1, 0})));
    RecourseSpec s3;
    s3.W = Eigen::MatrixXd(1, 3);
    s3.W << 1, -1, 2;
    s3.q = Eigen::VectorXd(3);
    s3.q << 2, 3, 0.5;
    CHECK(poly::check_a6(s3));
}

TEST_CASE("dual vertex enumeration on the named instances") {
    auto v = poly::enumerate_dual_vertices(make_spec({1, -1}, {1, 0}));
    REQUIRE(v.size() == 2);
    CHECK(v[0][0] == doctest::Approx(0.0));
    CHECK(v[1][0] == doctest::Approx(1.0));

    v = poly::enumerate_dual_vertices(make_spec({1, -1}, {1, 1}));
    REQUIRE(v.size() == 2);
    CHECK(v[0][0] == doctest::Approx(-1.0));
    CHECK(v[1][0] == doctest::Approx(1.0));

    v = poly::enumerate_dual_vertices(spec_l1());
    REQUIRE(v.size() == 4);
    for (const auto& d : v) {
        CHECK(std::abs(std::abs(d[0]) - 1.0) < 1e-9);
        CHECK(std::abs(std::abs(d[1]) - 1.0) < 1e-9);
    }

    CHECK_THROWS_AS(poly::enumerate_dual_vertices(make_spec({1}, {1})), NotPolytope);
}

TEST_CASE("phi evaluation: vertex max vs LP on the named instances") {
    for (const auto& spec :
         {make_spec({1, -1}, {1, 0}), make_spec({1, -1}, {1, 1}), spec_l1(), spec_max0t1t2()}) {
        const auto cx = poly::build_cone_complex(poly::enumerate_dual_vertices(spec));
        Rng rng(5);
        for (int it = 0; it < 200; ++it) {
            Eigen::VectorXd t(spec.s());
            for (int k = 0; k < spec.s(); ++k) t[k] = rng.uniform(-4.0, 4.0);
            CHECK(std::abs(cx.phi(t) - poly::evaluate_phi_lp(spec, t)) < 1e-8);
        }
    }
    const auto cx1 = poly::build_cone_complex(poly::enumerate_dual_vertices(make_spec({1, -1}, {1, 0})));
    Eigen::VectorXd t(1);
    t << -3.0;
    CHECK(cx1.phi(t) == doctest::Approx(0.0));
    const auto cx2 = poly::build_cone_complex(poly::enumerate_dual_vertices(make_spec({1, -1}, {1, 1})));
    t << -2.0;
    CHECK(cx2.phi(t) == doctest::Approx(2.0));
    const auto cxl1 = poly::build_cone_complex(poly::enumerate_dual_vertices(spec_l1()));
    Eigen::VectorXd t2(2);
    t2 << 1.0, -2.0;
    CHECK(cxl1.phi(t2) == doctest::Approx(3.0));
}

TEST_CASE("positive homogeneity and subadditivity of phi") {
    const auto cx = poly::build_cone_complex(poly::enumerate_dual_vertices(spec_l1()));
    Rng rng(6);
    for (int it = 0; it < 300; ++it) {
        Eigen::VectorXd a(2), b(2);
        for (int k = 0; k < 2; ++k) {
            a[k] = rng.uniform(-2.0, 2.0);
            b[k] = rng.uniform(-2.0, 2.0);
        }
        const double lam = rng.uniform(0.01, 5.0);
        CHECK(cx.phi(lam * a) == doctest::Approx(lam * cx.phi(a)).epsilon(1e-12));
        CHECK(cx.phi(a + b) <= cx.phi(a) + cx.phi(b) + 1e-12);
    }
}

TEST_CASE("cone classification on the three canonical shapes") {
    {
        const auto cx = poly::build_cone_complex(poly::enumerate_dual_vertices(make_spec({1, -1}, {1, 0})));
        REQUIRE(cx.num_vertices() == 2);
        CHECK(cx.iplus == std::vector<int>{1});
        CHECK(cx.iplusplus == std::vector<int>{1});
        CHECK(cx.ipm.empty());
        CHECK(cx.adjacency.size() == 1);
    }
    {
        const auto cx = poly::build_cone_complex(poly::enumerate_dual_vertices(make_spec({1, -1}, {1, 1})));
        CHECK(cx.iplus.size() == 2);
        CHECK(cx.iplusplus.size() == 2);
        CHECK(cx.ipm.empty());
    }
    {
        // phi = max{0, t1, t2}: the slice {d^T z <= eta} of the cone of (1,0)
        // is unbounded along (0,-1), so both nonzero vertices land in I+-.
        const auto cx = poly::build_cone_complex(poly::enumerate_dual_vertices(spec_max0t1t2()));
        REQUIRE(cx.num_vertices() == 3);
        int i10 = -1, i01 = -1;
        for (int i = 0; i < 3; ++i) {
            if (cx.vertices[i].isApprox(Eigen::Vector2d(1, 0), 1e-9)) i10 = i;
            if (cx.vertices[i].isApprox(Eigen::Vector2d(0, 1), 1e-9)) i01 = i;
        }
        REQUIRE(i10 >= 0);
        REQUIRE(i01 >= 0);
        CHECK(cx.cones[i10].in_ipm);
        CHECK(cx.cones[i01].in_ipm);
        CHECK(cx.iplusplus.empty());
        CHECK(cx.iplus.size() == 2);
    }
}

TEST_CASE("alpha constant examples") {
    const auto cx1 = poly::build_cone_complex(poly::enumerate_dual_vertices(make_spec({1, -1}, {1, 0})));
    CHECK(cx1.alpha == doctest::Approx(1.0).epsilon(1e-9));
    const auto cx2 = poly::build_cone_complex(poly::enumerate_dual_vertices(make_spec({1, -1}, {1, 1})));
    CHECK(cx2.alpha == doctest::Approx(2.0).epsilon(1e-9));
    const auto cxl1 = poly::build_cone_complex(poly::enumerate_dual_vertices(spec_l1()));
    CHECK(cxl1.alpha == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("alpha is a valid lower bound for the max-gap over sampled directions") {
    for (const auto& spec : {spec_l1(), spec_max0t1t2()}) {
        const auto cx = poly::build_cone_complex(poly::enumerate_dual_vertices(spec));
        Rng rng(9);
        for (int it = 0; it < 500; ++it) {
            Eigen::VectorXd u(spec.s());
            for (int k = 0; k < spec.s(); ++k) u[k] = rng.uniform(-1.0, 1.0);
            if (u.norm() < 1e-6) continue;
            const int i = cx.cone_index(u);
            double best = 0.0;
            for (int j = 0; j < cx.num_vertices(); ++j)
                best = std::max(best, (cx.vertices[i] - cx.vertices[j]).dot(u));
            CHECK(best >= cx.alpha * u.norm() - 1e-9);
        }
    }
}

TEST_CASE("min-norm hyperplane points") {
    for (double a : {0.5, 1.0, 2.0}) {
        const auto cx = poly::build_cone_complex(poly::enumerate_dual_vertices(make_spec({1, -1}, {a, 0})));
        const auto y = poly::min_norm_hyperplane_point(cx, 1, 0.7);
        CHECK(y.norm == doctest::Approx(0.7 / a).epsilon(1e-12));
    }
    {
        const auto cx = poly::build_cone_complex(poly::enumerate_dual_vertices(make_spec({1, -1}, {1, 1})));
        const auto y = poly::min_norm_hyperplane_point(cx, 1, 2.0);
        CHECK(y.point[0] == doctest::Approx(2.0));
    }
    {
        const auto cx = poly::build_cone_complex(poly::enumerate_dual_vertices(spec_l1()));
        int d11 = -1;
        for (int i = 0; i < 4; ++i)
            if (cx.vertices[i].isApprox(Eigen::Vector2d(1, 1), 1e-9)) d11 = i;
        REQUIRE(d11 >= 0);
        const auto y = poly::min_norm_hyperplane_point(cx, d11, 1.0);
        CHECK(y.norm == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(y.ray_index == 0); // deterministic tie-break
        for (double eta : {0.25, 0.5, 2.0, 7.0})
            CHECK(poly::min_norm_hyperplane_point(cx, d11, eta).norm ==
                  doctest::Approx(eta * y.norm).epsilon(1e-12));
    }
    {
        const auto cx = poly::build_cone_complex(poly::enumerate_dual_vertices(make_spec({1, -1}, {1, 0})));
        CHECK_THROWS_AS(poly::min_norm_hyperplane_point(cx, 0, 1.0), NoPositiveRay);
    }
}

TEST_CASE("A6 holds iff phi dominates a positive multiple of the norm") {
    {
        const auto spec = make_spec({1, -1}, {1, 1});
        REQUIRE(poly::check_a6(spec));
        const auto cx = poly::build_cone_complex(poly::enumerate_dual_vertices(spec));
        double alpha_prime = std::numeric_limits<double>::infinity();
        for (const auto& c : cx.cones) {
            REQUIRE(c.in_iplusplus);
            alpha_prime = std::min(alpha_prime, c.alpha_prime);
        }
        REQUIRE(alpha_prime > 0.0);
        Rng rng(11);
        for (int it = 0; it < 300; ++it) {
            Eigen::VectorXd u(1);
            u << rng.uniform(-3.0, 3.0);
            CHECK(cx.phi(u) >= alpha_prime * u.norm() - 1e-12);
        }
    }
    {
        const auto spec = make_spec({1, -1}, {1, 0});
        REQUIRE(!poly::check_a6(spec));
        const auto cx = poly::build_cone_complex(poly::enumerate_dual_vertices(spec));
        Eigen::VectorXd u(1);
        u << -1.0;
        CHECK(cx.phi(u) <= 0.0);
    }
}

TEST_CASE("random instances: vertex sets match brute force, complex is consistent") {
    Rng rng(42);
    int built = 0;
    for (int inst = 0; inst < 120 && built < 25; ++inst) {
        const int s = 1 + static_cast<int>(rng.next_index(3));
        const int m = s + 1 + static_cast<int>(rng.next_index(4));
        RecourseSpec spec;
        spec.W = Eigen::MatrixXd(s, m);
        for (int i = 0; i < s; ++i)
            for (int j = 0; j < m; ++j) spec.W(i, j) = rng.uniform(-1.0, 1.0);
        Eigen::VectorXd v0(s);
        for (int k = 0; k < s; ++k) v0[k] = rng.uniform(-0.5, 0.5);
        spec.q = spec.W.transpose() * v0; // A2 by construction
        for (int j = 0; j < m; ++j) spec.q[j] += rng.uniform(0.1, 1.0);
        if (!poly::check_complete_recourse(spec)) continue;
        ++built;

        const auto mine = poly::enumerate_dual_vertices(spec);
        const auto oracle = oracle_vertices(spec);
        REQUIRE(same_vertex_sets(mine, oracle));

        const auto cx = poly::build_cone_complex(mine);
        for (int it = 0; it < 50; ++it) {
            Eigen::VectorXd t(s);
            for (int k = 0; k < s; ++k) t[k] = rng.uniform(-2.0, 2.0);
            const int i = cx.cone_index(t);
            for (int j = 0; j < cx.num_vertices(); ++j)
                CHECK(cx.vertices[i].dot(t) >= cx.vertices[j].dot(t) - 1e-9);
            CHECK(std::abs(cx.phi(t) - poly::evaluate_phi_lp(spec, t)) < 1e-8);
        }
        std::vector<int> uni = cx.iplusplus;
        uni.insert(uni.end(), cx.ipm.begin(), cx.ipm.end());
        std::sort(uni.begin(), uni.end());
        CHECK(uni == cx.iplus);
        for (auto [i, j] : cx.adjacency) {
            if (s == 1) continue;
            int common = 0;
            for (const auto& t : cx.cones[i].rays) {
                bool inj = true;
                for (int l = 0; l < cx.num_vertices(); ++l)
                    if ((cx.vertices[l] - cx.vertices[j]).dot(t) > 1e-9) inj = false;
                if (inj) ++common;
            }
            CHECK(common >= s - 1);
        }
    }
    CHECK(built >= 25);
}

TEST_CASE("duplicate vertices raise DegenerateCone") {
    std::vector<Eigen::VectorXd> verts;
    Eigen::VectorXd a(1), b(1);
    a << 1.0;
    b << 1.0 + 1e-12;
    verts.push_back(a);
    verts.push_back(b);
    CHECK_THROWS_AS(poly::build_cone_complex(verts), DegenerateCone);
}
