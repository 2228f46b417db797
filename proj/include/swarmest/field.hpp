#pragma once

#include <vector>

#include "swarmest/geometry.hpp"
#include "swarmest/kernels.hpp"
#include "swarmest/rng.hpp"

namespace swarmest {

enum class FieldKind { Cone, MultiPeak };

struct GaussianPeak {
    Vec2 center;
    double height = 1.0;
    double width = 0.2;  // isotropic std deviation

    constexpr bool operator==(const GaussianPeak&) const = default;
};

/// Analytic scalar intensity field over the arena plus the sensing-noise
/// coefficient. Cone: g(x) = height - slope * |x - center|. MultiPeak:
/// g(x) = sum_k h_k * exp(-|x - c_k|^2 / (2 w_k^2)).
struct FieldSpec {
    FieldKind kind = FieldKind::Cone;
    Vec2 center{};       // cone apex
    double height = 1.0;
    double slope = 1.0;
    std::vector<GaussianPeak> peaks;
    double sigma = 0.025;

    bool operator==(const FieldSpec&) const = default;

    /// Default uni-modal benchmark: apex at (0.75*w, 0.75*h), slope chosen so
    /// the minimum over the arena is 0. The apex is deliberately off-center so
    /// a corner-anchored placement patch starts with a biased collective.
    static FieldSpec default_cone(const Arena& arena, double sigma = 0.025);

    /// Default multi-modal benchmark: three Gaussian bumps with distinct
    /// centers, heights and widths.
    static FieldSpec default_multi_peak(const Arena& arena, double sigma = 0.025);
};

/// Noise-free field value at x. Throws std::domain_error if x is outside the
/// arena.
double intensity_at(const FieldSpec& field, const Arena& arena, Vec2 x);

/// One noisy measurement: intensity_at(x) + sigma * N(0,1). With sigma = 0 the
/// result is bit-identical to intensity_at and no draw is consumed.
double sense(const FieldSpec& field, const Arena& arena, Vec2 x, Rng& rng);

struct GroundTruth {
    double z_gt = 0.0;
};

/// Arena-average of an arbitrary integrand by the midpoint rule on an
/// resolution x resolution grid. Rows are reduced with the compensated sum
/// kernel; deterministic for a given resolution.
template <class F>
double arena_average(F&& g, const Arena& arena, int resolution = 512) {
    const int n = resolution;
    const double dx = arena.width / n;
    const double dy = arena.height / n;
    std::vector<double> row(static_cast<std::size_t>(n));
    double total = 0.0;
    for (int j = 0; j < n; ++j) {
        const double y = (j + 0.5) * dy;
        for (int i = 0; i < n; ++i) row[static_cast<std::size_t>(i)] = g((i + 0.5) * dx, y);
        total += kernels::sum(row);
    }
    return total / (static_cast<double>(n) * static_cast<double>(n));
}

/// Arena-average intensity (the estimation target). Pure in (field, arena,
/// resolution); noise is excluded.
GroundTruth ground_truth_mean(const FieldSpec& field, const Arena& arena, int resolution = 512);

}  // namespace swarmest
