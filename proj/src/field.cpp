#include "swarmest/field.hpp"

#include <algorithm>
#include <stdexcept>

namespace swarmest {

FieldSpec FieldSpec::default_cone(const Arena& arena, double sigma) {
    FieldSpec f;
    f.kind = FieldKind::Cone;
    // Apex in the upper-right interior, away from the placement patch, so the
    // initial collective is biased. Slope fixed at 4; the height follows so
    // the minimum over the arena (at the farthest corner) is exactly 0.
    f.center = {0.85 * arena.width, 0.85 * arena.height};
    f.slope = 4.0;
    const double corner_x = std::max(f.center.x, arena.width - f.center.x);
    const double corner_y = std::max(f.center.y, arena.height - f.center.y);
    f.height = f.slope * std::sqrt(corner_x * corner_x + corner_y * corner_y);
    f.sigma = sigma;
    return f;
}

FieldSpec FieldSpec::default_multi_peak(const Arena& arena, double sigma) {
    FieldSpec f;
    f.kind = FieldKind::MultiPeak;
    const double s = std::min(arena.width, arena.height);
    f.peaks = {
        {{0.25 * arena.width, 0.70 * arena.height}, 1.0, 0.18 * s},
        {{0.75 * arena.width, 0.25 * arena.height}, 0.7, 0.22 * s},
        {{0.80 * arena.width, 0.80 * arena.height}, 0.5, 0.15 * s},
    };
    f.sigma = sigma;
    return f;
}

double intensity_at(const FieldSpec& field, const Arena& arena, Vec2 x) {
    if (!arena.contains(x)) throw std::domain_error("intensity_at: position outside arena");
    switch (field.kind) {
        case FieldKind::Cone: {
            const double dx = x.x - field.center.x;
            const double dy = x.y - field.center.y;
            return field.height - field.slope * std::sqrt(dx * dx + dy * dy);
        }
        case FieldKind::MultiPeak: {
            double v = 0.0;
            for (const auto& p : field.peaks) {
                const double dx = x.x - p.center.x;
                const double dy = x.y - p.center.y;
                v += p.height * std::exp(-(dx * dx + dy * dy) / (2.0 * p.width * p.width));
            }
            return v;
        }
    }
    throw std::logic_error("intensity_at: unknown field kind");
}

double sense(const FieldSpec& field, const Arena& arena, Vec2 x, Rng& rng) {
    const double v = intensity_at(field, arena, x);
    if (field.sigma == 0.0) return v;
    return v + field.sigma * rng.normal();
}

GroundTruth ground_truth_mean(const FieldSpec& field, const Arena& arena, int resolution) {
    if (field.kind == FieldKind::Cone) {
        // Batched fast path; same per-point arithmetic as intensity_at.
        const int n = resolution;
        const double dx = arena.width / n;
        const double dy = arena.height / n;
        std::vector<double> row_x(static_cast<std::size_t>(n));
        std::vector<double> row_y(static_cast<std::size_t>(n));
        std::vector<double> row_g(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) row_x[static_cast<std::size_t>(i)] = (i + 0.5) * dx;
        double total = 0.0;
        for (int j = 0; j < n; ++j) {
            std::fill(row_y.begin(), row_y.end(), (j + 0.5) * dy);
            kernels::eval_cone(row_x, row_y, field.center.x, field.center.y, field.height,
                               field.slope, row_g);
            total += kernels::sum(row_g);
        }
        return {total / (static_cast<double>(n) * static_cast<double>(n))};
    }
    return {arena_average(
        [&](double px, double py) { return intensity_at(field, arena, {px, py}); }, arena,
        resolution)};
}

}  // namespace swarmest
