#include "swarmest/kernels.hpp"

#include <atomic>
#include <stdexcept>

#include "kernels_backend.hpp"

namespace swarmest::kernels {

namespace {

struct Vtable {
    double (*sum)(std::span<const double>);
    double (*sum_sq_dev)(std::span<const double>, double);
    void (*eval_cone)(std::span<const double>, std::span<const double>, double, double, double,
                      double, std::span<double>);
    std::size_t (*radius_query)(std::span<const double>, std::span<const double>, double, double,
                                double, std::size_t, std::span<std::uint32_t>);
};

constexpr Vtable kScalar{detail::sum_scalar, detail::sum_sq_dev_scalar, detail::eval_cone_scalar,
                         detail::radius_query_scalar};

#if defined(SWARMEST_HAVE_AVX2_BACKEND)
constexpr Vtable kAvx2{detail::sum_avx2, detail::sum_sq_dev_avx2, detail::eval_cone_avx2,
                       detail::radius_query_avx2};
#endif
#if defined(SWARMEST_HAVE_NEON_BACKEND)
constexpr Vtable kNeon{detail::sum_neon, detail::sum_sq_dev_neon, detail::eval_cone_neon,
                       detail::radius_query_neon};
#endif

Backend detect() {
#if defined(SWARMEST_HAVE_AVX2_BACKEND)
    if (__builtin_cpu_supports("avx2")) return Backend::Avx2;
#endif
#if defined(SWARMEST_HAVE_NEON_BACKEND)
    return Backend::Neon;
#endif
    return Backend::Scalar;
}

const Vtable* table_for(Backend b) {
    switch (b) {
        case Backend::Scalar:
            return &kScalar;
        case Backend::Avx2:
#if defined(SWARMEST_HAVE_AVX2_BACKEND)
            return &kAvx2;
#else
            return nullptr;
#endif
        case Backend::Neon:
#if defined(SWARMEST_HAVE_NEON_BACKEND)
            return &kNeon;
#else
            return nullptr;
#endif
    }
    return nullptr;
}

std::atomic<Backend> g_backend{detect()};

}  // namespace

Backend active_backend() { return g_backend.load(std::memory_order_relaxed); }

bool backend_supported(Backend b) {
    if (b == Backend::Scalar) return true;
#if defined(SWARMEST_HAVE_AVX2_BACKEND)
    if (b == Backend::Avx2) return __builtin_cpu_supports("avx2") != 0;
#endif
#if defined(SWARMEST_HAVE_NEON_BACKEND)
    if (b == Backend::Neon) return true;
#endif
    return false;
}

void force_backend(Backend b) {
    if (!backend_supported(b))
        throw std::invalid_argument("kernel backend not supported on this machine: " +
                                    std::string(backend_name(b)));
    g_backend.store(b, std::memory_order_relaxed);
}

std::string_view backend_name(Backend b) {
    switch (b) {
        case Backend::Scalar:
            return "scalar";
        case Backend::Avx2:
            return "avx2";
        case Backend::Neon:
            return "neon";
    }
    return "unknown";
}

double sum(std::span<const double> xs) {
    return table_for(active_backend())->sum(xs);
}

double sum_sq_dev(std::span<const double> xs, double center) {
    return table_for(active_backend())->sum_sq_dev(xs, center);
}

void eval_cone(std::span<const double> xs, std::span<const double> ys, double cx, double cy,
               double height, double slope, std::span<double> out) {
    table_for(active_backend())->eval_cone(xs, ys, cx, cy, height, slope, out);
}

std::size_t radius_query(std::span<const double> xs, std::span<const double> ys, double qx,
                         double qy, double radius, std::size_t skip,
                         std::span<std::uint32_t> out) {
    return table_for(active_backend())->radius_query(xs, ys, qx, qy, radius, skip, out);
}

}  // namespace swarmest::kernels
