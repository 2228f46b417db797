#pragma once

#include <cstdint>
#include <optional>
#include <span>

namespace swarmest {

/// Per-timestep error decomposition snapshot.
struct MetricsSample {
    std::int64_t t = 0;
    double e_t = 0.0;  // trueness error (squared bias of the collective mean)
    double e_p = 0.0;  // precision error (population variance of estimates)
    double e_a = 0.0;  // accuracy error (mean squared error to ground truth)
    double frac_switched = 0.0;
    double collective_mean = 0.0;
};

/// (mean(estimates) - z_gt)^2. Throws std::domain_error on an empty list.
double trueness_error(std::span<const double> estimates, double z_gt);

/// Population variance (1/N) of the estimates. Throws std::domain_error on an
/// empty list.
double precision_error(std::span<const double> estimates);

/// mean((estimate_i - z_gt)^2). Throws std::domain_error on an empty list.
double accuracy_error(std::span<const double> estimates, double z_gt);

struct DecisionTime {
    double mean = 0.0;  // over agents that switched; 0 if none did
    std::size_t switched = 0;
    std::size_t never_switched = 0;

    bool partial() const { return never_switched > 0; }
};

/// Mean per-agent switch time. Agents that never switched are excluded from
/// the mean and reported in never_switched.
DecisionTime decision_time(std::span<const std::optional<std::int64_t>> switch_times);

}  // namespace swarmest
