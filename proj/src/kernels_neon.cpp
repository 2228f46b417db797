#include "kernels_backend.hpp"

#if defined(SWARMEST_HAVE_NEON_BACKEND)

#include <arm_neon.h>

namespace swarmest::kernels::detail {

namespace {

// NEON registers hold 2 doubles; the 4-lane stripe uses a register pair so
// the schedule matches the scalar reference and AVX2 bit for bit.
inline void neumaier_step(float64x2_t& s, float64x2_t& c, float64x2_t x) {
    const float64x2_t t = vaddq_f64(s, x);
    const uint64x2_t mask = vcgeq_f64(vabsq_f64(s), vabsq_f64(x));
    const float64x2_t big = vaddq_f64(vsubq_f64(s, t), x);
    const float64x2_t small = vaddq_f64(vsubq_f64(x, t), s);
    c = vaddq_f64(c, vbslq_f64(mask, big, small));
    s = t;
}

}  // namespace

double sum_neon(std::span<const double> xs) {
    float64x2_t s01 = vdupq_n_f64(0.0), s23 = vdupq_n_f64(0.0);
    float64x2_t c01 = vdupq_n_f64(0.0), c23 = vdupq_n_f64(0.0);
    const std::size_t n4 = xs.size() / 4 * 4;
    for (std::size_t k = 0; k < n4; k += 4) {
        neumaier_step(s01, c01, vld1q_f64(xs.data() + k));
        neumaier_step(s23, c23, vld1q_f64(xs.data() + k + 2));
    }
    double sl[4], cl[4];
    vst1q_f64(sl, s01);
    vst1q_f64(sl + 2, s23);
    vst1q_f64(cl, c01);
    vst1q_f64(cl + 2, c23);
    return finish_striped(sl, cl, xs.data() + n4, xs.size() - n4, 0.0, false);
}

double sum_sq_dev_neon(std::span<const double> xs, double center) {
    float64x2_t s01 = vdupq_n_f64(0.0), s23 = vdupq_n_f64(0.0);
    float64x2_t c01 = vdupq_n_f64(0.0), c23 = vdupq_n_f64(0.0);
    const float64x2_t ctr = vdupq_n_f64(center);
    const std::size_t n4 = xs.size() / 4 * 4;
    for (std::size_t k = 0; k < n4; k += 4) {
        const float64x2_t d0 = vsubq_f64(vld1q_f64(xs.data() + k), ctr);
        const float64x2_t d1 = vsubq_f64(vld1q_f64(xs.data() + k + 2), ctr);
        neumaier_step(s01, c01, vmulq_f64(d0, d0));
        neumaier_step(s23, c23, vmulq_f64(d1, d1));
    }
    double sl[4], cl[4];
    vst1q_f64(sl, s01);
    vst1q_f64(sl + 2, s23);
    vst1q_f64(cl, c01);
    vst1q_f64(cl + 2, c23);
    return finish_striped(sl, cl, xs.data() + n4, xs.size() - n4, center, true);
}

void eval_cone_neon(std::span<const double> xs, std::span<const double> ys, double cx, double cy,
                    double height, double slope, std::span<double> out) {
    const float64x2_t vcx = vdupq_n_f64(cx);
    const float64x2_t vcy = vdupq_n_f64(cy);
    const float64x2_t vh = vdupq_n_f64(height);
    const float64x2_t vs = vdupq_n_f64(slope);
    const std::size_t n2 = xs.size() / 2 * 2;
    for (std::size_t k = 0; k < n2; k += 2) {
        const float64x2_t dx = vsubq_f64(vld1q_f64(xs.data() + k), vcx);
        const float64x2_t dy = vsubq_f64(vld1q_f64(ys.data() + k), vcy);
        const float64x2_t r = vsqrtq_f64(vaddq_f64(vmulq_f64(dx, dx), vmulq_f64(dy, dy)));
        vst1q_f64(out.data() + k, vsubq_f64(vh, vmulq_f64(vs, r)));
    }
    for (std::size_t i = n2; i < xs.size(); ++i) {
        const double dx = xs[i] - cx;
        const double dy = ys[i] - cy;
        out[i] = height - slope * std::sqrt(dx * dx + dy * dy);
    }
}

std::size_t radius_query_neon(std::span<const double> xs, std::span<const double> ys, double qx,
                              double qy, double radius, std::size_t skip,
                              std::span<std::uint32_t> out) {
    const double r2 = radius * radius;
    const float64x2_t vqx = vdupq_n_f64(qx);
    const float64x2_t vqy = vdupq_n_f64(qy);
    const float64x2_t vr2 = vdupq_n_f64(r2);
    const std::size_t n2 = xs.size() / 2 * 2;
    std::size_t count = 0;
    for (std::size_t k = 0; k < n2; k += 2) {
        const float64x2_t dx = vsubq_f64(vld1q_f64(xs.data() + k), vqx);
        const float64x2_t dy = vsubq_f64(vld1q_f64(ys.data() + k), vqy);
        const float64x2_t d2 = vaddq_f64(vmulq_f64(dx, dx), vmulq_f64(dy, dy));
        const uint64x2_t lt = vcltq_f64(d2, vr2);
        if (vgetq_lane_u64(lt, 0) && k != skip) out[count++] = static_cast<std::uint32_t>(k);
        if (vgetq_lane_u64(lt, 1) && k + 1 != skip) out[count++] = static_cast<std::uint32_t>(k + 1);
    }
    for (std::size_t i = n2; i < xs.size(); ++i) {
        const double dx = xs[i] - qx;
        const double dy = ys[i] - qy;
        if (dx * dx + dy * dy < r2 && i != skip) out[count++] = static_cast<std::uint32_t>(i);
    }
    return count;
}

}  // namespace swarmest::kernels::detail

#endif  // SWARMEST_HAVE_NEON_BACKEND
