#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "riskconvex/kernels.hpp"
#include "riskconvex/rng.hpp"

#include <cmath>

using namespace riskconvex;

namespace {

kernels::SampleBatch random_batch(int dim, std::size_t n, std::uint64_t seed) {
    kernels::SampleBatch b(dim, n);
    Rng rng(seed);
    for (int k = 0; k < dim; ++k)
        for (std::size_t j = 0; j < n; ++j) b.component(k)[j] = rng.uniform(-3.0, 3.0);
    return b;
}

std::vector<double> random_verts(int nverts, int dim, std::uint64_t seed) {
    std::vector<double> v(static_cast<std::size_t>(nverts) * dim);
    Rng rng(seed);
    for (auto& x : v) x = rng.uniform(-2.0, 2.0);
    return v;
}

} // namespace

TEST_CASE("recourse_max matches a naive evaluation") {
    const int dim = 2, nverts = 4;
    const auto verts = random_verts(nverts, dim, 1);
    const auto z = random_batch(dim, 113, 2);
    const double xs[2] = {0.3, -0.7};
    std::vector<double> phi(z.count);
    std::vector<std::int32_t> arg(z.count);
    kernels::detail::recourse_max_scalar(verts.data(), nverts, dim, z, xs, phi.data(), arg.data());
    for (std::size_t j = 0; j < z.count; ++j) {
        double best = -1e300;
        int bi = -1;
        for (int i = 0; i < nverts; ++i) {
            double acc = 0.0;
            for (int k = 0; k < dim; ++k) acc += verts[i * dim + k] * (z.component(k)[j] - xs[k]);
            if (acc > best) {
                best = acc;
                bi = i;
            }
        }
        CHECK(phi[j] == doctest::Approx(best).epsilon(1e-14));
        CHECK(arg[j] == bi);
    }
}

TEST_CASE("argmax tie-break picks the lowest vertex index") {
    // Two identical vertices: index 0 must win.
    const int dim = 1, nverts = 2;
    const std::vector<double> verts{1.0, 1.0};
    kernels::SampleBatch z(1, 5);
    for (std::size_t j = 0; j < 5; ++j) z.component(0)[j] = static_cast<double>(j) - 2.0;
    const double xs[1] = {0.0};
    std::vector<double> phi(5);
    std::vector<std::int32_t> arg(5);
    for (auto impl : kernels::available_impls()) {
        kernels::force_impl(impl);
        kernels::recourse_max(verts.data(), nverts, dim, z, xs, phi.data(), arg.data());
        for (std::size_t j = 0; j < 5; ++j) CHECK(arg[j] == 0);
    }
    kernels::force_impl(kernels::available_impls().back());
}

TEST_CASE("SIMD variants are bit-identical to the scalar reference") {
    for (int dim : {1, 2, 3}) {
        for (int nverts : {2, 3, 7}) {
            const auto verts = random_verts(nverts, dim, 10 + dim);
            // Odd count exercises the tail path.
            const auto z = random_batch(dim, 10007, 20 + nverts);
            std::vector<double> xs(dim, 0.25);
            std::vector<double> phi_ref(z.count), phi(z.count);
            std::vector<std::int32_t> arg_ref(z.count), arg(z.count);
            kernels::detail::recourse_max_scalar(verts.data(), nverts, dim, z, xs.data(),
                                                 phi_ref.data(), arg_ref.data());
            const auto ref_sums = kernels::detail::excess_sums_scalar(phi_ref.data(), nullptr,
                                                                      z.count, 0.125);
            for (auto impl : kernels::available_impls()) {
                kernels::force_impl(impl);
                kernels::recourse_max(verts.data(), nverts, dim, z, xs.data(), phi.data(), arg.data());
                for (std::size_t j = 0; j < z.count; ++j) {
                    REQUIRE(phi[j] == phi_ref[j]); // exact
                    REQUIRE(arg[j] == arg_ref[j]);
                }
                const auto sums = kernels::excess_sums(phi.data(), nullptr, z.count, 0.125);
                REQUIRE(sums.excess == ref_sums.excess);
                REQUIRE(sums.tail == ref_sums.tail);
            }
        }
    }
    kernels::force_impl(kernels::available_impls().back());
}

TEST_CASE("weighted excess sums follow the stride-4 contract") {
    const std::size_t n = 1001;
    Rng rng(77);
    std::vector<double> phi(n), w(n);
    for (std::size_t j = 0; j < n; ++j) {
        phi[j] = rng.uniform(-1.0, 2.0);
        w[j] = rng.uniform(0.0, 1.0);
    }
    const auto ref = kernels::detail::excess_sums_scalar(phi.data(), w.data(), n, 0.4);
    double exc_acc[4] = {0, 0, 0, 0}, tail_acc[4] = {0, 0, 0, 0};
    const std::size_t main = n - n % 4;
    for (std::size_t j = 0; j < main; ++j) {
        const double d = phi[j] - 0.4;
        if (d > 0.0) exc_acc[j % 4] += w[j] * d;
        if (d >= 0.0) tail_acc[j % 4] += w[j];
    }
    double exc = (exc_acc[0] + exc_acc[1]) + (exc_acc[2] + exc_acc[3]);
    double tail = (tail_acc[0] + tail_acc[1]) + (tail_acc[2] + tail_acc[3]);
    for (std::size_t j = main; j < n; ++j) {
        const double d = phi[j] - 0.4;
        if (d > 0.0) exc += w[j] * d;
        if (d >= 0.0) tail += w[j];
    }
    CHECK(ref.excess == exc);
    CHECK(ref.tail == tail);
    for (auto impl : kernels::available_impls()) {
        kernels::force_impl(impl);
        const auto got = kernels::excess_sums(phi.data(), w.data(), n, 0.4);
        CHECK(got.excess == ref.excess);
        CHECK(got.tail == ref.tail);
    }
    kernels::force_impl(kernels::available_impls().back());
}
