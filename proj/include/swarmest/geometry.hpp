#pragma once

#include <cmath>
#include <numbers>

namespace swarmest {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2 operator-() const { return {-x, -y}; }
    constexpr bool operator==(const Vec2&) const = default;

    double norm() const { return std::sqrt(x * x + y * y); }
};

constexpr Vec2 operator*(double s, Vec2 v) { return {v.x * s, v.y * s}; }

inline constexpr double kPi = std::numbers::pi;

/// Wrap an angle to (-pi, pi].
inline double wrap_angle(double a) {
    a = std::remainder(a, 2.0 * kPi);  // in [-pi, pi]
    if (a <= -kPi) a += 2.0 * kPi;
    return a;
}

/// Axis-aligned rectangle [0,width] x [0,height] with reflecting walls.
struct Arena {
    double width = 1.4;
    double height = 1.4;

    constexpr bool operator==(const Arena&) const = default;

    bool contains(Vec2 p) const {
        return p.x >= 0.0 && p.x <= width && p.y >= 0.0 && p.y <= height;
    }
};

/// Axis-aligned rectangle with an explicit origin (initial placement patch).
struct Rect {
    Vec2 origin{0.0, 0.0};
    double width = 0.7;
    double height = 0.7;

    constexpr bool operator==(const Rect&) const = default;

    bool contained_in(const Arena& a) const {
        return origin.x >= 0.0 && origin.y >= 0.0 && width > 0.0 && height > 0.0 &&
               origin.x + width <= a.width && origin.y + height <= a.height;
    }
};

namespace detail {
/// Fold a coordinate back into [0, hi] by specular reflection, any overshoot.
inline double reflect_coord(double v, double hi) {
    if (v >= 0.0 && v <= hi) return v;
    const double period = 2.0 * hi;
    v = std::fmod(v, period);
    if (v < 0.0) v += period;
    if (v > hi) v = period - v;
    return v;
}
}  // namespace detail

/// Advance `x` by `step` with specular reflection at the arena walls.
/// Corners are handled by folding each axis independently (repeatedly if the
/// overshoot spans several wall widths).
inline Vec2 reflect_step(const Arena& arena, Vec2 x, Vec2 step) {
    Vec2 target = x + step;
    return {detail::reflect_coord(target.x, arena.width),
            detail::reflect_coord(target.y, arena.height)};
}

}  // namespace swarmest
