#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace swarmest::kernels {

// Data-parallel inner-loop kernels with a scalar reference implementation and
// SIMD variants (AVX2 on x86-64, NEON on aarch64) selected once at startup.
//
// Every kernel is specified in 4-lane-striped form: lane j accumulates
// elements j, j+4, j+8, ... and lanes are combined as (l0+l1)+(l2+l3), with
// the tail added left to right. The scalar reference implements exactly that
// schedule, so all backends return bit-identical results and runtime dispatch
// never changes simulation output. Reductions use Neumaier compensation per
// lane. The library is compiled with -ffp-contract=off to keep the scalar
// reference free of FMA contraction.

enum class Backend { Scalar, Avx2, Neon };

Backend active_backend();
bool backend_supported(Backend b);

/// Force a specific backend (tests, --no-simd). Throws std::invalid_argument
/// if the backend is not supported on this machine.
void force_backend(Backend b);

std::string_view backend_name(Backend b);

/// Compensated sum of xs.
double sum(std::span<const double> xs);

/// Compensated sum of (x - center)^2 over xs.
double sum_sq_dev(std::span<const double> xs, double center);

/// out[i] = height - slope * sqrt((xs[i]-cx)^2 + (ys[i]-cy)^2).
void eval_cone(std::span<const double> xs, std::span<const double> ys, double cx, double cy,
               double height, double slope, std::span<double> out);

/// Indices i (ascending) with (xs[i]-qx)^2 + (ys[i]-qy)^2 < radius^2, i != skip.
/// `out` must have room for xs.size() entries; returns the count written.
std::size_t radius_query(std::span<const double> xs, std::span<const double> ys, double qx,
                         double qy, double radius, std::size_t skip, std::span<std::uint32_t> out);

}  // namespace swarmest::kernels
