#include "kernels_backend.hpp"

#if defined(SWARMEST_HAVE_AVX2_BACKEND)

#include <immintrin.h>

namespace swarmest::kernels::detail {

namespace {

inline __m256d abs_pd(__m256d v) {
    return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v);
}

// One Neumaier step on 4 lanes at once; per-lane op order matches the scalar
// reference exactly (no FMA).
inline void neumaier_step(__m256d& s, __m256d& c, __m256d x) {
    const __m256d t = _mm256_add_pd(s, x);
    const __m256d mask = _mm256_cmp_pd(abs_pd(s), abs_pd(x), _CMP_GE_OQ);
    const __m256d big = _mm256_add_pd(_mm256_sub_pd(s, t), x);    // |s| >= |x|
    const __m256d small = _mm256_add_pd(_mm256_sub_pd(x, t), s);  // |s| <  |x|
    c = _mm256_add_pd(c, _mm256_blendv_pd(small, big, mask));
    s = t;
}

inline void store_lanes(__m256d v, double out[4]) {
    _mm256_storeu_pd(out, v);
}

}  // namespace

double sum_avx2(std::span<const double> xs) {
    __m256d s = _mm256_setzero_pd();
    __m256d c = _mm256_setzero_pd();
    const std::size_t n4 = xs.size() / 4 * 4;
    for (std::size_t k = 0; k < n4; k += 4) neumaier_step(s, c, _mm256_loadu_pd(xs.data() + k));
    double sl[4], cl[4];
    store_lanes(s, sl);
    store_lanes(c, cl);
    return finish_striped(sl, cl, xs.data() + n4, xs.size() - n4, 0.0, false);
}

double sum_sq_dev_avx2(std::span<const double> xs, double center) {
    __m256d s = _mm256_setzero_pd();
    __m256d c = _mm256_setzero_pd();
    const __m256d ctr = _mm256_set1_pd(center);
    const std::size_t n4 = xs.size() / 4 * 4;
    for (std::size_t k = 0; k < n4; k += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(xs.data() + k), ctr);
        neumaier_step(s, c, _mm256_mul_pd(d, d));
    }
    double sl[4], cl[4];
    store_lanes(s, sl);
    store_lanes(c, cl);
    return finish_striped(sl, cl, xs.data() + n4, xs.size() - n4, center, true);
}

void eval_cone_avx2(std::span<const double> xs, std::span<const double> ys, double cx, double cy,
                    double height, double slope, std::span<double> out) {
    const __m256d vcx = _mm256_set1_pd(cx);
    const __m256d vcy = _mm256_set1_pd(cy);
    const __m256d vh = _mm256_set1_pd(height);
    const __m256d vs = _mm256_set1_pd(slope);
    const std::size_t n4 = xs.size() / 4 * 4;
    for (std::size_t k = 0; k < n4; k += 4) {
        const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs.data() + k), vcx);
        const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ys.data() + k), vcy);
        const __m256d r =
            _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)));
        _mm256_storeu_pd(out.data() + k, _mm256_sub_pd(vh, _mm256_mul_pd(vs, r)));
    }
    for (std::size_t i = n4; i < xs.size(); ++i) {
        const double dx = xs[i] - cx;
        const double dy = ys[i] - cy;
        out[i] = height - slope * std::sqrt(dx * dx + dy * dy);
    }
}

std::size_t radius_query_avx2(std::span<const double> xs, std::span<const double> ys, double qx,
                              double qy, double radius, std::size_t skip,
                              std::span<std::uint32_t> out) {
    const double r2 = radius * radius;
    const __m256d vqx = _mm256_set1_pd(qx);
    const __m256d vqy = _mm256_set1_pd(qy);
    const __m256d vr2 = _mm256_set1_pd(r2);
    const std::size_t n4 = xs.size() / 4 * 4;
    std::size_t count = 0;
    for (std::size_t k = 0; k < n4; k += 4) {
        const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs.data() + k), vqx);
        const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ys.data() + k), vqy);
        const __m256d d2 = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
        int mask = _mm256_movemask_pd(_mm256_cmp_pd(d2, vr2, _CMP_LT_OQ));
        if (skip >= k && skip < k + 4) mask &= ~(1 << (skip - k));
        while (mask != 0) {
            const int bit = __builtin_ctz(static_cast<unsigned>(mask));
            out[count++] = static_cast<std::uint32_t>(k + static_cast<std::size_t>(bit));
            mask &= mask - 1;
        }
    }
    for (std::size_t i = n4; i < xs.size(); ++i) {
        const double dx = xs[i] - qx;
        const double dy = ys[i] - qy;
        if (dx * dx + dy * dy < r2 && i != skip) out[count++] = static_cast<std::uint32_t>(i);
    }
    return count;
}

}  // namespace swarmest::kernels::detail

#endif  // SWARMEST_HAVE_AVX2_BACKEND
