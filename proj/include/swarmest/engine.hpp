#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "swarmest/agent.hpp"
#include "swarmest/metrics.hpp"

namespace swarmest {

/// Full simulation state for one run. Agents draw from per-agent rng
/// sub-streams (split from the run seed), so per-tick updates are independent
/// of processing order.
struct World {
    SimParams params;
    FieldSpec field;  // params.field with sigma overridden by params.noise_sigma
    Arena arena;
    std::vector<AgentState> agents;
    std::vector<Rng> streams;  // one per agent
    std::int64_t t = 0;
    double z_gt = 0.0;
    /// Mean |z_s - z_col| over exploiting agents in the last tick (NaN while
    /// nobody exploits); convergence diagnostic for the social movement.
    double last_mean_mismatch = std::numeric_limits<double>::quiet_NaN();
};

/// Place N agents uniformly in the patch with uniform headings, all Exploring.
/// Throws std::invalid_argument on invalid params (patch outside arena, ...).
World init_world(const SimParams& params);

/// Indices j != i with |x_i - x_j| < comm_range (strict) and agent j in the
/// exploitation phase, in ascending order. Brute force or the uniform-grid
/// index, per params.use_spatial_grid; both return identical sets.
std::vector<std::uint32_t> neighbors(const World& world, std::uint32_t i);

/// Advance one synchronous timestep:
///   1. every agent senses at its current position;
///   2. exploring agents update trackers and may switch (effective this tick);
///   3. exploiting agents aggregate against the post-switch memory/position
///      snapshot and compute their gradient move;
///   4. exploring agents compute their random-walk move;
///   5. all positions/memories commit at once, t += 1.
void tick(World& world);

/// Current per-agent estimates: opinion memory once switched, otherwise the
/// pre-switch convention (tracker midpoint or last raw sense), falling back to
/// the noiseless field value before any sample exists (t = 0).
std::vector<double> collect_estimates(const World& world);

/// Error decomposition of the current world state.
MetricsSample measure(const World& world);

struct RunRecord {
    std::uint64_t seed = 0;
    SimParams params;
    double z_gt = 0.0;
    std::vector<MetricsSample> samples;
    std::vector<std::optional<std::int64_t>> switch_times;
    std::vector<Vec2> initial_positions;
    std::vector<Vec2> final_positions;

    /// Canonical text serialization (17 significant digits); equal strings
    /// mean equal records. Used by the determinism regression.
    std::string to_canonical_string() const;
};

/// init_world + total_steps ticks, sampling every `record_stride` ticks (the
/// initial state and the final tick are always sampled). `on_sample`, when
/// set, observes every recorded sample.
RunRecord run(const SimParams& params, std::int64_t record_stride = 1,
              const std::function<void(const MetricsSample&)>& on_sample = {});

inline DecisionTime decision_time(const RunRecord& record) {
    return decision_time(std::span<const std::optional<std::int64_t>>(record.switch_times));
}

}  // namespace swarmest
