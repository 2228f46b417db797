#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>

#include "swarmest/field.hpp"
#include "swarmest/geometry.hpp"
#include "swarmest/rng.hpp"

namespace swarmest {

enum class Phase { Exploring, Exploiting };
enum class SwitchMode { Fixed, Adaptive };
enum class GradientMode { Basic, Extended };

/// Which per-agent quantity stands in for the estimate before the agent has
/// switched (the opinion memory is undefined pre-switch).
enum class PreSwitchEstimate { TrackerAvg, LastSense };

/// All run parameters. Defaults follow the reference experiment setup.
struct SimParams {
    int n_agents = 100;
    Arena arena{1.4, 1.4};
    Rect patch{{0.0, 0.0}, 0.7, 0.7};
    double comm_range = 0.30;
    double heading_noise_rate = 0.1;   // r_psi
    double random_walk_weight = 0.25;  // r_lambda
    double step_size = 0.002;          // lambda
    double noise_sigma = 0.025;        // sigma
    double memory_weight = 0.99;       // alpha
    double gradient_decay = 0.99;      // beta
    double lag_decay = 0.9;            // beta_lag
    double delta_prec = 1e-6;
    std::int64_t delta_mem = 100;
    std::int64_t total_steps = 5000;  // t_f
    SwitchMode switch_mode = SwitchMode::Fixed;
    std::int64_t switch_time = 4250;  // t_sw, fixed mode only; default sits in the
                                      // measured speed-accuracy optimum region of
                                      // the default configuration
    GradientMode gradient_mode = GradientMode::Extended;
    std::uint64_t seed = 1;
    FieldSpec field = FieldSpec::default_cone(Arena{1.4, 1.4});
    // Seed the opinion at switch from the exploration-tracker midpoint (the
    // gathered a-priori data) rather than the instantaneous sense; sense
    // seeding spreads opinions over the full sensed range and splinters the
    // exploitation network at small N.
    bool init_memory_from_avg = true;
    PreSwitchEstimate pre_switch_estimate = PreSwitchEstimate::LastSense;
    bool use_spatial_grid = false;  // uniform-grid neighbor index instead of brute force

    bool operator==(const SimParams&) const = default;
};

/// Throws std::invalid_argument if any invariant is violated.
void validate(const SimParams& p);

/// Axis displacements smaller than this contribute nothing to a finite
/// difference (bounded gradients across near-zero steps).
inline constexpr double kFdEpsilon = 1e-9;
/// Finite-difference divisors are floored at this fraction of the step
/// length so a near-tangential axis cannot inject unbounded spikes into the
/// decayed gradient estimates.
inline constexpr double kFdQuotientFloor = 0.25;
/// Gradient norms below this fall back to the pure random-walk step.
inline constexpr double kNormEpsilon = 1e-12;

struct AgentState {
    Vec2 position;
    double heading = 0.0;  // radians, (-pi, pi]
    Phase phase = Phase::Exploring;
    double memory = 0.0;  // z_m, defined once the agent has switched
    Vec2 last_position;
    Vec2 grad_memory;     // decayed objective-gradient estimate (basic method)
    Vec2 grad_intensity;  // decayed sensed-intensity gradient estimate (extended method)
    double min_seen = std::numeric_limits<double>::infinity();
    double max_seen = -std::numeric_limits<double>::infinity();
    double lag = 0.0;  // z_lag, valid once lag_started
    bool lag_started = false;
    std::int64_t counter = 0;
    std::optional<std::int64_t> switch_time;
    double last_sense = 0.0;  // previous tick's z_s
    bool has_last_sense = false;
    double prev_objective = 0.0;
    bool has_prev_objective = false;

    bool has_samples() const { return min_seen <= max_seen; }
    double tracker_avg() const { return 0.5 * (min_seen + max_seen); }
};

/// One random-walk turn: psi + r_psi * zeta with zeta ~ U[-pi, pi], wrapped.
double explore_heading(double heading, double heading_noise_rate, Rng& rng);

/// Random-walk move: turn, step `step_size` along the new heading, reflect at
/// the walls. Updates heading, position and last_position.
void explore_move(AgentState& state, const Arena& arena, const SimParams& params, Rng& rng);

/// Feed one sensed value into the exploration-quality trackers: running
/// extrema, their midpoint z_avg, the lagged average, and the hysteresis
/// counter (incremented while |lag - z_avg| < delta_prec, else decremented,
/// floored at 0). The lag initializes to the first z_avg.
void update_switch_trackers(AgentState& state, double z_s, const SimParams& params);

/// Exploration -> exploitation decision. Fixed mode: t >= switch_time.
/// Adaptive mode: counter > delta_mem.
bool should_switch(const AgentState& state, const SimParams& params, std::int64_t t);

/// Voting aggregation: (z_s + sum of neighbor memories) / (1 + N_i).
double collective_signal(double z_s, std::span<const double> neighbor_memories);

/// Opinion update: alpha * z_m + (1 - alpha) * z_col.
double memory_update(double z_m, double z_col, double alpha);

/// 0.5 * (z_s - z_col)^2.
double objective(double z_s, double z_col);

/// Basic pseudo-gradient step. Differentiates the objective over the last
/// displacement (degenerate axes contribute 0), folds the result into the
/// decayed grad_memory, and returns
///   step_size * (-(1 - r_lambda) * grad_memory/|grad_memory| + r_lambda * eta)
/// with eta a per-axis U[-1,1] vector. |grad_memory| < epsilon drops the
/// gradient term (pure random-walk step). Mutates state.grad_memory only.
Vec2 basic_gradient_step(AgentState& state, double f_now, double f_prev, const SimParams& params,
                         Rng& rng);

/// Decayed finite-difference estimate of the sensed-intensity gradient over
/// the last displacement, folded into state.grad_intensity with the same
/// decay factor as grad_memory. A degenerate axis contributes 0; if both axes
/// are degenerate the estimate is left unchanged (no new information).
void intensity_gradient_estimate(AgentState& state, double z_s_now, double z_s_prev,
                                 double gradient_decay);

/// Extended pseudo-gradient step:
///   grad f ~= (N_i / (N_i + 1)) * (z_s - z_col) * grad_intensity,
/// assembled into a step exactly like the basic rule. N_i = 0 or a degenerate
/// gradient falls back to the pure random-walk step. Does not update
/// grad_intensity (see intensity_gradient_estimate).
Vec2 extended_gradient_step(const AgentState& state, double z_s, double z_col,
                            std::size_t n_neighbors, const SimParams& params, Rng& rng);

}  // namespace swarmest
