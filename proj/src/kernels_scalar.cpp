#include "riskconvex/kernels.hpp"

namespace riskconvex::kernels::detail {

void recourse_max_scalar(const double* verts, int nverts, int dim,
                         const SampleBatch& z, const double* xshift,
                         double* phi, std::int32_t* argmax) {
    const std::size_t n = z.count;
    for (std::size_t j = 0; j < n; ++j) {
        double best = 0.0;
        {
            const double* d0 = verts;
            double acc = 0.0;
            for (int k = 0; k < dim; ++k) acc = acc + d0[k] * (z.component(k)[j] - xshift[k]);
            best = acc;
        }
        std::int32_t idx = 0;
        for (int i = 1; i < nverts; ++i) {
            const double* di = verts + static_cast<std::size_t>(i) * dim;
            double acc = 0.0;
            for (int k = 0; k < dim; ++k) acc = acc + di[k] * (z.component(k)[j] - xshift[k]);
            if (acc > best) {
                best = acc;
                idx = i;
            }
        }
        phi[j] = best;
        if (argmax) argmax[j] = idx;
    }
}

ExcessSums excess_sums_scalar(const double* phi, const double* weights, std::size_t count, double eta) {
    double exc[4] = {0.0, 0.0, 0.0, 0.0};
    double tail[4] = {0.0, 0.0, 0.0, 0.0};
    const std::size_t main = count - count % 4;
    for (std::size_t j = 0; j < main; j += 4) {
        for (std::size_t l = 0; l < 4; ++l) {
            const double w = weights ? weights[j + l] : 1.0;
            const double d = phi[j + l] - eta;
            exc[l] += (d > 0.0) ? w * d : 0.0;
            tail[l] += (d >= 0.0) ? w : 0.0;
        }
    }
    ExcessSums out;
    out.excess = (exc[0] + exc[1]) + (exc[2] + exc[3]);
    out.tail = (tail[0] + tail[1]) + (tail[2] + tail[3]);
    for (std::size_t j = main; j < count; ++j) {
        const double w = weights ? weights[j] : 1.0;
        const double d = phi[j] - eta;
        if (d > 0.0) out.excess += w * d;
        if (d >= 0.0) out.tail += w;
    }
    return out;
}

} // namespace riskconvex::kernels::detail
