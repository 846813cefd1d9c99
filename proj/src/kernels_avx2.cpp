#include "riskconvex/kernels.hpp"

#include <stdexcept>

#ifdef RISKCONVEX_BUILD_AVX2
#include <immintrin.h>
#endif

namespace riskconvex::kernels::detail {

bool avx2_built() {
#ifdef RISKCONVEX_BUILD_AVX2
    return true;
#else
    return false;
#endif
}

bool avx2_supported() {
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

#ifdef RISKCONVEX_BUILD_AVX2

namespace {
inline double hsum_fixed_order(__m256d v) {
    alignas(32) double t[4];
    _mm256_store_pd(t, v);
    return (t[0] + t[1]) + (t[2] + t[3]);
}
} // namespace

void recourse_max_avx2(const double* verts, int nverts, int dim,
                       const SampleBatch& z, const double* xshift,
                       double* phi, std::int32_t* argmax) {
    const std::size_t n = z.count;
    const std::size_t main = n - n % 4;
    for (std::size_t j = 0; j < main; j += 4) {
        // vertex 0 seeds best/idx, matching the scalar tie-break (strict >).
        __m256d best;
        {
            __m256d acc = _mm256_setzero_pd();
            for (int k = 0; k < dim; ++k) {
                const __m256d zk = _mm256_loadu_pd(z.component(k) + j);
                const __m256d t = _mm256_sub_pd(zk, _mm256_set1_pd(xshift[k]));
                acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_set1_pd(verts[k]), t));
            }
            best = acc;
        }
        __m256d idxv = _mm256_setzero_pd();
        for (int i = 1; i < nverts; ++i) {
            const double* di = verts + static_cast<std::size_t>(i) * dim;
            __m256d acc = _mm256_setzero_pd();
            for (int k = 0; k < dim; ++k) {
                const __m256d zk = _mm256_loadu_pd(z.component(k) + j);
                const __m256d t = _mm256_sub_pd(zk, _mm256_set1_pd(xshift[k]));
                acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_set1_pd(di[k]), t));
            }
            const __m256d gt = _mm256_cmp_pd(acc, best, _CMP_GT_OQ);
            best = _mm256_blendv_pd(best, acc, gt);
            idxv = _mm256_blendv_pd(idxv, _mm256_set1_pd(static_cast<double>(i)), gt);
        }
        _mm256_storeu_pd(phi + j, best);
        if (argmax) {
            alignas(32) double t[4];
            _mm256_store_pd(t, idxv);
            for (int l = 0; l < 4; ++l) argmax[j + l] = static_cast<std::int32_t>(t[l]);
        }
    }
    if (main < n) {
        SampleBatch tailz(z.dim, n - main);
        for (int k = 0; k < z.dim; ++k)
            for (std::size_t j = main; j < n; ++j) tailz.component(k)[j - main] = z.component(k)[j];
        recourse_max_scalar(verts, nverts, dim, tailz, xshift, phi + main, argmax ? argmax + main : nullptr);
    }
}

ExcessSums excess_sums_avx2(const double* phi, const double* weights, std::size_t count, double eta) {
    const std::size_t main = count - count % 4;
    __m256d exc = _mm256_setzero_pd();
    __m256d tail = _mm256_setzero_pd();
    const __m256d etav = _mm256_set1_pd(eta);
    const __m256d one = _mm256_set1_pd(1.0);
    for (std::size_t j = 0; j < main; j += 4) {
        const __m256d p = _mm256_loadu_pd(phi + j);
        const __m256d w = weights ? _mm256_loadu_pd(weights + j) : one;
        const __m256d d = _mm256_sub_pd(p, etav);
        const __m256d gt = _mm256_cmp_pd(d, _mm256_setzero_pd(), _CMP_GT_OQ);
        const __m256d ge = _mm256_cmp_pd(d, _mm256_setzero_pd(), _CMP_GE_OQ);
        exc = _mm256_add_pd(exc, _mm256_and_pd(gt, _mm256_mul_pd(w, d)));
        tail = _mm256_add_pd(tail, _mm256_and_pd(ge, w));
    }
    ExcessSums out;
    out.excess = hsum_fixed_order(exc);
    out.tail = hsum_fixed_order(tail);
    for (std::size_t j = main; j < count; ++j) {
        const double w = weights ? weights[j] : 1.0;
        const double d = phi[j] - eta;
        if (d > 0.0) out.excess += w * d;
        if (d >= 0.0) out.tail += w;
    }
    return out;
}

#else

void recourse_max_avx2(const double*, int, int, const SampleBatch&, const double*, double*, std::int32_t*) {
    throw std::logic_error("AVX2 kernels not built");
}
ExcessSums excess_sums_avx2(const double*, const double*, std::size_t, double) {
    throw std::logic_error("AVX2 kernels not built");
}

#endif

} // namespace riskconvex::kernels::detail
