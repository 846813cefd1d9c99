#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace riskconvex::kernels {

// Batched inner loops for Monte-Carlo evaluation of the recourse value
// function. Every kernel has a scalar reference implementation plus SIMD
// variants (AVX2 on x86-64, NEON on aarch64) selected once at runtime.
//
// The variants are required to be BIT-IDENTICAL to the scalar reference:
//  - recourse_max is lane-parallel across samples; each sample's dot products
//    accumulate over the dimension in the same order in every variant, and no
//    FMA contraction is used.
//  - reductions follow a fixed stride-4 contract: four partial accumulators
//    over j == l (mod 4), combined as (a0+a1)+(a2+a3), then the tail elements
//    in ascending order.
// Equivalence is asserted exactly (==) in the test suite.

/// Samples stored component-major: component k of sample j at data[k*count+j].
struct SampleBatch {
    int dim = 0;
    std::size_t count = 0;
    std::vector<double> data;

    SampleBatch() = default;
    SampleBatch(int d, std::size_t n) : dim(d), count(n), data(static_cast<std::size_t>(d) * n, 0.0) {}

    double* component(int k) { return data.data() + static_cast<std::size_t>(k) * count; }
    const double* component(int k) const { return data.data() + static_cast<std::size_t>(k) * count; }

    /// Sample j as a small dense vector copy.
    std::vector<double> point(std::size_t j) const {
        std::vector<double> p(dim);
        for (int k = 0; k < dim; ++k) p[k] = component(k)[j];
        return p;
    }
};

struct ExcessSums {
    double excess = 0.0; // sum of w_j * max(0, phi_j - eta)
    double tail = 0.0;   // sum of w_j * [phi_j >= eta]
};

/// phi_j = max_i sum_k verts[i*dim+k] * (z_k[j] - xshift[k]); ties to lowest i.
/// verts is row-major nverts x dim. argmax may be null.
void recourse_max(const double* verts, int nverts, int dim,
                  const SampleBatch& z, const double* xshift,
                  double* phi, std::int32_t* argmax);

/// Stride-4 reduction of excess and tail mass. weights may be null (w_j = 1).
ExcessSums excess_sums(const double* phi, const double* weights, std::size_t count, double eta);

enum class Impl { Scalar, Avx2, Neon };

Impl active_impl();
std::vector<Impl> available_impls();
void force_impl(Impl impl); // for equivalence tests; throws if unavailable
std::string impl_name(Impl impl);

namespace detail {
void recourse_max_scalar(const double* verts, int nverts, int dim,
                         const SampleBatch& z, const double* xshift,
                         double* phi, std::int32_t* argmax);
ExcessSums excess_sums_scalar(const double* phi, const double* weights, std::size_t count, double eta);

bool avx2_built();
bool avx2_supported();
void recourse_max_avx2(const double* verts, int nverts, int dim,
                       const SampleBatch& z, const double* xshift,
                       double* phi, std::int32_t* argmax);
ExcessSums excess_sums_avx2(const double* phi, const double* weights, std::size_t count, double eta);

bool neon_built();
void recourse_max_neon(const double* verts, int nverts, int dim,
                       const SampleBatch& z, const double* xshift,
                       double* phi, std::int32_t* argmax);
ExcessSums excess_sums_neon(const double* phi, const double* weights, std::size_t count, double eta);
} // namespace detail

} // namespace riskconvex::kernels
