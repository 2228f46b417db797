#include "kernels_backend.hpp"

namespace swarmest::kernels::detail {

namespace {

inline void neumaier_lane(double& s, double& c, double x) {
    const double t = s + x;
    if (std::abs(s) >= std::abs(x))
        c += (s - t) + x;
    else
        c += (x - t) + s;
    s = t;
}

}  // namespace

double sum_scalar(std::span<const double> xs) {
    double s[4] = {0, 0, 0, 0};
    double c[4] = {0, 0, 0, 0};
    const std::size_t n4 = xs.size() / 4 * 4;
    for (std::size_t k = 0; k < n4; k += 4)
        for (std::size_t j = 0; j < 4; ++j) neumaier_lane(s[j], c[j], xs[k + j]);
    return finish_striped(s, c, xs.data() + n4, xs.size() - n4, 0.0, false);
}

double sum_sq_dev_scalar(std::span<const double> xs, double center) {
    double s[4] = {0, 0, 0, 0};
    double c[4] = {0, 0, 0, 0};
    const std::size_t n4 = xs.size() / 4 * 4;
    for (std::size_t k = 0; k < n4; k += 4) {
        for (std::size_t j = 0; j < 4; ++j) {
            const double d = xs[k + j] - center;
            neumaier_lane(s[j], c[j], d * d);
        }
    }
    return finish_striped(s, c, xs.data() + n4, xs.size() - n4, center, true);
}

void eval_cone_scalar(std::span<const double> xs, std::span<const double> ys, double cx, double cy,
                      double height, double slope, std::span<double> out) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - cx;
        const double dy = ys[i] - cy;
        out[i] = height - slope * std::sqrt(dx * dx + dy * dy);
    }
}

std::size_t radius_query_scalar(std::span<const double> xs, std::span<const double> ys, double qx,
                                double qy, double radius, std::size_t skip,
                                std::span<std::uint32_t> out) {
    const double r2 = radius * radius;
    std::size_t count = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - qx;
        const double dy = ys[i] - qy;
        if (dx * dx + dy * dy < r2 && i != skip) out[count++] = static_cast<std::uint32_t>(i);
    }
    return count;
}

}  // namespace swarmest::kernels::detail
