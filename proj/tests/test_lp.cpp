#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "riskconvex/lp.hpp"
#include "riskconvex/rng.hpp"

#include <cmath>
#include <limits>
#include <vector>

using namespace riskconvex;
using lp::LinearProgram;
using lp::LpStatus;

namespace {

// Independent oracle: enumerate basic solutions of min c^T x, A x = b, x >= 0.
double brute_force_equality(const Eigen::VectorXd& c, const Eigen::MatrixXd& A,
                            const Eigen::VectorXd& b, bool& feasible) {
    const int m = static_cast<int>(A.rows());
    const int n = static_cast<int>(A.cols());
    double best = std::numeric_limits<double>::infinity();
    feasible = false;
    std::vector<int> idx(m);
    std::function<void(int, int)> rec = [&](int start, int depth) {
        if (depth == m) {
            Eigen::MatrixXd B(m, m);
            for (int i = 0; i < m; ++i) B.col(i) = A.col(idx[i]);
            Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
            lu.setThreshold(1e-10);
            if (!lu.isInvertible()) return;
            const Eigen::VectorXd xb = lu.solve(b);
            if (xb.minCoeff() < -1e-9) return;
            double val = 0.0;
            for (int i = 0; i < m; ++i) val += c[idx[i]] * xb[i];
            feasible = true;
            best = std::min(best, val);
            return;
        }
        for (int j = start; j < n; ++j) {
            idx[depth] = j;
            rec(j + 1, depth + 1);
        }
    };
    rec(0, 0);
    return best;
}

} // namespace

TEST_CASE("single tight constraint") {
    Eigen::VectorXd c(2), b(1);
    Eigen::MatrixXd A(1, 2);
    c << 1.0, 0.0;
    A << 1.0, -1.0;
    b << 1.0;
    const auto sol = lp::solve_lp(LinearProgram::nonneg_equality(c, A, b));
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.value == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(sol.point[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(sol.point[1] == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("negative rhs forces the second variable") {
    Eigen::VectorXd c(2), b(1);
    Eigen::MatrixXd A(1, 2);
    c << 1.0, 1.0;
    A << 1.0, -1.0;
    b << -1.0;
    const auto sol = lp::solve_lp(LinearProgram::nonneg_equality(c, A, b));
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.value == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(sol.point[0] == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(sol.point[1] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("improving ray reported as unbounded") {
    Eigen::VectorXd c(2), b(1);
    Eigen::MatrixXd A(1, 2);
    c << -1.0, 0.0;
    A << 1.0, -1.0;
    b << 0.0;
    const auto sol = lp::solve_lp(LinearProgram::nonneg_equality(c, A, b));
    CHECK(sol.status == LpStatus::Unbounded);
}

TEST_CASE("infeasible equality system") {
    Eigen::VectorXd c(1), b(2);
    Eigen::MatrixXd A(2, 1);
    c << 1.0;
    A << 1.0, 1.0;
    b << 1.0, 2.0;
    const auto sol = lp::solve_lp(LinearProgram::nonneg_equality(c, A, b));
    CHECK(sol.status == LpStatus::Infeasible);
}

TEST_CASE("optimal solutions satisfy feasibility, duality and complementary slackness") {
    Rng rng(123);
    int solved = 0;
    for (int inst = 0; inst < 60; ++inst) {
        const int n = 2 + static_cast<int>(rng.next_index(5));
        const int m = 1 + static_cast<int>(rng.next_index(static_cast<std::size_t>(n)));
        Eigen::MatrixXd A(m, n);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) A(i, j) = rng.uniform(-1.0, 1.0);
        // Feasible by construction.
        Eigen::VectorXd x0(n);
        for (int j = 0; j < n; ++j) x0[j] = rng.uniform(0.0, 2.0);
        const Eigen::VectorXd b = A * x0;
        Eigen::VectorXd c(n);
        for (int j = 0; j < n; ++j) c[j] = rng.uniform(-1.0, 1.0);

        const auto sol = lp::solve_lp(LinearProgram::nonneg_equality(c, A, b));
        bool feasible = false;
        const double oracle = brute_force_equality(c, A, b, feasible);
        REQUIRE(feasible);
        if (sol.status != LpStatus::Optimal) {
            // Oracle only certifies a bounded minimum when one exists over
            // basic solutions; unbounded instances are legitimate here.
            CHECK(sol.status == LpStatus::Unbounded);
            continue;
        }
        ++solved;
        CHECK(std::abs(sol.value - oracle) < 1e-8 * (1.0 + std::abs(oracle)));
        CHECK((A * sol.point - b).cwiseAbs().maxCoeff() < 1e-8);
        CHECK(sol.point.minCoeff() > -1e-9);
        // Strong duality and complementary slackness on the equality form.
        const Eigen::VectorXd y = sol.dual_point;
        CHECK(std::abs(b.dot(y) - sol.value) < 1e-7 * (1.0 + std::abs(sol.value)));
        const Eigen::VectorXd red = c - A.transpose() * y;
        CHECK(red.minCoeff() > -1e-7);
        for (int j = 0; j < n; ++j) CHECK(std::abs(red[j] * sol.point[j]) < 1e-6);
    }
    CHECK(solved > 10);
}

TEST_CASE("solver output is reproducible") {
    Eigen::VectorXd c(3), b(2);
    Eigen::MatrixXd A(2, 3);
    c << 1.0, 2.0, 0.5;
    A << 1.0, 1.0, 0.0, 0.0, 1.0, 1.0;
    b << 1.0, 1.5;
    const auto s1 = lp::solve_lp(LinearProgram::nonneg_equality(c, A, b));
    const auto s2 = lp::solve_lp(LinearProgram::nonneg_equality(c, A, b));
    REQUIRE(s1.status == LpStatus::Optimal);
    CHECK(s1.value == s2.value); // bitwise identical
    CHECK((s1.point - s2.point).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("feasible_strict examples") {
    Eigen::MatrixXd A(2, 1);
    A << 1.0, -1.0;

    Eigen::VectorXd b(2);
    b << 1.0, 0.0; // v <= 1, -v <= 0: interior is (0,1)
    auto r = lp::feasible_strict(A, b);
    REQUIRE(r.feasible);
    CHECK(r.witness[0] == doctest::Approx(0.5).epsilon(1e-7));

    b << 0.0, 0.0; // only v = 0, not strict
    r = lp::feasible_strict(A, b);
    CHECK(!r.feasible);

    b << 1.0, 1.0; // 0 interior to (-1,1)
    r = lp::feasible_strict(A, b);
    REQUIRE(r.feasible);
    CHECK(std::abs(r.witness[0]) < 1e-7);
    CHECK((A * r.witness - b).maxCoeff() < 0.0);
}

TEST_CASE("standard-form interface accepts a crash basis") {
    // min x1 + x2 s.t. x1 + x2 - s = 1 (surplus), all >= 0.
    lp::StandardFormLp sf(1);
    sf.rhs[0] = 1.0;
    const int c1 = sf.add_column(1.0, {{0, 1.0}});
    sf.add_column(1.0, {{0, 1.0}});
    sf.add_column(0.0, {{0, -1.0}});
    std::vector<int> hint{c1};
    const auto sol = lp::solve_standard(sf, {}, &hint);
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.value == doctest::Approx(1.0));
}
