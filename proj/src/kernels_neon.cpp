#include "riskconvex/kernels.hpp"

#include <stdexcept>

#ifdef RISKCONVEX_BUILD_NEON
#include <arm_neon.h>
#endif

namespace riskconvex::kernels::detail {

bool neon_built() {
#ifdef RISKCONVEX_BUILD_NEON
    return true;
#else
    return false;
#endif
}

#ifdef RISKCONVEX_BUILD_NEON

// float64x2_t carries two lanes, so the stride-4 contract is kept by running
// two vector accumulators side by side: lanes (0,1) and (2,3) of each group.

void recourse_max_neon(const double* verts, int nverts, int dim,
                       const SampleBatch& z, const double* xshift,
                       double* phi, std::int32_t* argmax) {
    const std::size_t n = z.count;
    const std::size_t main = n - n % 2;
    for (std::size_t j = 0; j < main; j += 2) {
        float64x2_t best;
        {
            float64x2_t acc = vdupq_n_f64(0.0);
            for (int k = 0; k < dim; ++k) {
                const float64x2_t zk = vld1q_f64(z.component(k) + j);
                const float64x2_t t = vsubq_f64(zk, vdupq_n_f64(xshift[k]));
                acc = vaddq_f64(acc, vmulq_f64(vdupq_n_f64(verts[k]), t));
            }
            best = acc;
        }
        float64x2_t idxv = vdupq_n_f64(0.0);
        for (int i = 1; i < nverts; ++i) {
            const double* di = verts + static_cast<std::size_t>(i) * dim;
            float64x2_t acc = vdupq_n_f64(0.0);
            for (int k = 0; k < dim; ++k) {
                const float64x2_t zk = vld1q_f64(z.component(k) + j);
                const float64x2_t t = vsubq_f64(zk, vdupq_n_f64(xshift[k]));
                acc = vaddq_f64(acc, vmulq_f64(vdupq_n_f64(di[k]), t));
            }
            const uint64x2_t gt = vcgtq_f64(acc, best);
            best = vbslq_f64(gt, acc, best);
            idxv = vbslq_f64(gt, vdupq_n_f64(static_cast<double>(i)), idxv);
        }
        vst1q_f64(phi + j, best);
        if (argmax) {
            double t[2];
            vst1q_f64(t, idxv);
            argmax[j] = static_cast<std::int32_t>(t[0]);
            argmax[j + 1] = static_cast<std::int32_t>(t[1]);
        }
    }
    if (main < n) {
        SampleBatch tailz(z.dim, n - main);
        for (int k = 0; k < z.dim; ++k)
            for (std::size_t j = main; j < n; ++j) tailz.component(k)[j - main] = z.component(k)[j];
        recourse_max_scalar(verts, nverts, dim, tailz, xshift, phi + main, argmax ? argmax + main : nullptr);
    }
}

ExcessSums excess_sums_neon(const double* phi, const double* weights, std::size_t count, double eta) {
    const std::size_t main = count - count % 4;
    float64x2_t exc01 = vdupq_n_f64(0.0), exc23 = vdupq_n_f64(0.0);
    float64x2_t tail01 = vdupq_n_f64(0.0), tail23 = vdupq_n_f64(0.0);
    const float64x2_t etav = vdupq_n_f64(eta);
    const float64x2_t one = vdupq_n_f64(1.0);
    const float64x2_t zero = vdupq_n_f64(0.0);
    for (std::size_t j = 0; j < main; j += 4) {
        const float64x2_t p0 = vld1q_f64(phi + j);
        const float64x2_t p1 = vld1q_f64(phi + j + 2);
        const float64x2_t w0 = weights ? vld1q_f64(weights + j) : one;
        const float64x2_t w1 = weights ? vld1q_f64(weights + j + 2) : one;
        const float64x2_t d0 = vsubq_f64(p0, etav);
        const float64x2_t d1 = vsubq_f64(p1, etav);
        exc01 = vaddq_f64(exc01, vbslq_f64(vcgtq_f64(d0, zero), vmulq_f64(w0, d0), zero));
        exc23 = vaddq_f64(exc23, vbslq_f64(vcgtq_f64(d1, zero), vmulq_f64(w1, d1), zero));
        tail01 = vaddq_f64(tail01, vbslq_f64(vcgeq_f64(d0, zero), w0, zero));
        tail23 = vaddq_f64(tail23, vbslq_f64(vcgeq_f64(d1, zero), w1, zero));
    }
    ExcessSums out;
    out.excess = (vgetq_lane_f64(exc01, 0) + vgetq_lane_f64(exc01, 1)) +
                 (vgetq_lane_f64(exc23, 0) + vgetq_lane_f64(exc23, 1));
    out.tail = (vgetq_lane_f64(tail01, 0) + vgetq_lane_f64(tail01, 1)) +
               (vgetq_lane_f64(tail23, 0) + vgetq_lane_f64(tail23, 1));
    for (std::size_t j = main; j < count; ++j) {
        const double w = weights ? weights[j] : 1.0;
        const double d = phi[j] - eta;
        if (d > 0.0) out.excess += w * d;
        if (d >= 0.0) out.tail += w;
    }
    return out;
}

#else

void recourse_max_neon(const double*, int, int, const SampleBatch&, const double*, double*, std::int32_t*) {
    throw std::logic_error("NEON kernels not built");
}
ExcessSums excess_sums_neon(const double*, const double*, std::size_t, double) {
    throw std::logic_error("NEON kernels not built");
}

#endif

} // namespace riskconvex::kernels::detail
