#include "riskconvex/kernels.hpp"

#include <stdexcept>

namespace riskconvex::kernels {

namespace {

Impl pick_default() {
    if (detail::avx2_built() && detail::avx2_supported()) return Impl::Avx2;
    if (detail::neon_built()) return Impl::Neon;
    return Impl::Scalar;
}

Impl& current() {
    static Impl impl = pick_default();
    return impl;
}

} // namespace

Impl active_impl() { return current(); }

std::vector<Impl> available_impls() {
    std::vector<Impl> v{Impl::Scalar};
    if (detail::avx2_built() && detail::avx2_supported()) v.push_back(Impl::Avx2);
    if (detail::neon_built()) v.push_back(Impl::Neon);
    return v;
}

void force_impl(Impl impl) {
    for (Impl a : available_impls()) {
        if (a == impl) {
            current() = impl;
            return;
        }
    }
    throw std::runtime_error("kernel implementation unavailable on this machine: " + impl_name(impl));
}

std::string impl_name(Impl impl) {
    switch (impl) {
        case Impl::Scalar: return "scalar";
        case Impl::Avx2: return "avx2";
        case Impl::Neon: return "neon";
    }
    return "?";
}

void recourse_max(const double* verts, int nverts, int dim,
                  const SampleBatch& z, const double* xshift,
                  double* phi, std::int32_t* argmax) {
    switch (current()) {
        case Impl::Avx2: detail::recourse_max_avx2(verts, nverts, dim, z, xshift, phi, argmax); return;
        case Impl::Neon: detail::recourse_max_neon(verts, nverts, dim, z, xshift, phi, argmax); return;
        default: detail::recourse_max_scalar(verts, nverts, dim, z, xshift, phi, argmax); return;
    }
}

ExcessSums excess_sums(const double* phi, const double* weights, std::size_t count, double eta) {
    switch (current()) {
        case Impl::Avx2: return detail::excess_sums_avx2(phi, weights, count, eta);
        case Impl::Neon: return detail::excess_sums_neon(phi, weights, count, eta);
        default: return detail::excess_sums_scalar(phi, weights, count, eta);
    }
}

} // namespace riskconvex::kernels
