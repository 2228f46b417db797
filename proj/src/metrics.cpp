#include "swarmest/metrics.hpp"

#include <stdexcept>

#include "swarmest/kernels.hpp"

namespace swarmest {

namespace {

double mean_of(std::span<const double> xs) {
    if (xs.empty()) throw std::domain_error("error metric over an empty estimate list");
    return kernels::sum(xs) / static_cast<double>(xs.size());
}

}  // namespace

double trueness_error(std::span<const double> estimates, double z_gt) {
    const double bias = mean_of(estimates) - z_gt;
    return bias * bias;
}

double precision_error(std::span<const double> estimates) {
    const double mean = mean_of(estimates);
    return kernels::sum_sq_dev(estimates, mean) / static_cast<double>(estimates.size());
}

double accuracy_error(std::span<const double> estimates, double z_gt) {
    if (estimates.empty()) throw std::domain_error("error metric over an empty estimate list");
    return kernels::sum_sq_dev(estimates, z_gt) / static_cast<double>(estimates.size());
}

DecisionTime decision_time(std::span<const std::optional<std::int64_t>> switch_times) {
    DecisionTime out;
    double total = 0.0;
    for (const auto& st : switch_times) {
        if (st) {
            total += static_cast<double>(*st);
            ++out.switched;
        } else {
            ++out.never_switched;
        }
    }
    if (out.switched > 0) out.mean = total / static_cast<double>(out.switched);
    return out;
}

}  // namespace swarmest
