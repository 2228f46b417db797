#pragma once

// Internal backend contracts for the SIMD kernels. The scalar routines below
// are the reference semantics: 4-lane striped accumulation with per-lane
// Neumaier compensation, lanes combined as (l0+l1)+(l2+l3) and the tail folded
// in left to right. SIMD backends must reproduce them bit for bit.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>

namespace swarmest::kernels::detail {

struct Neumaier {
    double acc = 0.0;
    double comp = 0.0;

    void add(double x) {
        const double t = acc + x;
        if (std::abs(acc) >= std::abs(x))
            comp += (acc - t) + x;
        else
            comp += (x - t) + acc;
        acc = t;
    }

    double value() const { return acc + comp; }
};

/// Combine 4 striped lanes and fold the tail, shared by every backend.
inline double finish_striped(const double s[4], const double c[4], const double* tail,
                             std::size_t tail_n, double center, bool squared) {
    Neumaier total;
    total.acc = (s[0] + s[1]) + (s[2] + s[3]);
    total.comp = (c[0] + c[1]) + (c[2] + c[3]);
    for (std::size_t i = 0; i < tail_n; ++i) {
        double v = tail[i];
        if (squared) {
            const double d = v - center;
            v = d * d;
        }
        total.add(v);
    }
    return total.value();
}

// Scalar reference kernels.

double sum_scalar(std::span<const double> xs);
double sum_sq_dev_scalar(std::span<const double> xs, double center);
void eval_cone_scalar(std::span<const double> xs, std::span<const double> ys, double cx, double cy,
                      double height, double slope, std::span<double> out);
std::size_t radius_query_scalar(std::span<const double> xs, std::span<const double> ys, double qx,
                                double qy, double radius, std::size_t skip,
                                std::span<std::uint32_t> out);

#if defined(__x86_64__) || defined(_M_X64)
#define SWARMEST_HAVE_AVX2_BACKEND 1
double sum_avx2(std::span<const double> xs);
double sum_sq_dev_avx2(std::span<const double> xs, double center);
void eval_cone_avx2(std::span<const double> xs, std::span<const double> ys, double cx, double cy,
                    double height, double slope, std::span<double> out);
std::size_t radius_query_avx2(std::span<const double> xs, std::span<const double> ys, double qx,
                              double qy, double radius, std::size_t skip,
                              std::span<std::uint32_t> out);
#endif

#if defined(__aarch64__)
#define SWARMEST_HAVE_NEON_BACKEND 1
double sum_neon(std::span<const double> xs);
double sum_sq_dev_neon(std::span<const double> xs, double center);
void eval_cone_neon(std::span<const double> xs, std::span<const double> ys, double cx, double cy,
                    double height, double slope, std::span<double> out);
std::size_t radius_query_neon(std::span<const double> xs, std::span<const double> ys, double qx,
                              double qy, double radius, std::size_t skip,
                              std::span<std::uint32_t> out);
#endif

}  // namespace swarmest::kernels::detail
