#include "swarmest/agent.hpp"

#include <numeric>
#include <stdexcept>

namespace swarmest {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
}

bool in_unit(double v) { return v >= 0.0 && v <= 1.0; }

/// Shared step assembly for both pseudo-gradient rules: a fixed-size step
/// mixing the normalized descent direction with a random component. A
/// gradient with norm below kNormEpsilon drops the descent term entirely.
Vec2 assemble_step(Vec2 grad, const SimParams& params, Rng& rng) {
    const Vec2 eta{rng.uniform_sym(), rng.uniform_sym()};
    const double norm = grad.norm();
    Vec2 descent{0.0, 0.0};
    if (norm >= kNormEpsilon) descent = grad * (-(1.0 - params.random_walk_weight) / norm);
    return params.step_size * (descent + params.random_walk_weight * eta);
}

/// Per-axis finite difference of df over displacement. An exactly degenerate
/// axis contributes 0; otherwise the divisor magnitude is floored at a
/// fraction of the step length, which keeps the quotient's sign (the
/// direction information) while bounding the spikes that would otherwise
/// dominate the decayed gradient memory.
Vec2 finite_difference(double df, Vec2 displacement) {
    const double floor = kFdQuotientFloor * displacement.norm();
    const auto axis = [&](double d) {
        if (std::abs(d) < kFdEpsilon) return 0.0;
        return df / (d >= 0.0 ? std::max(d, floor) : std::min(d, -floor));
    };
    return {axis(displacement.x), axis(displacement.y)};
}

}  // namespace

void validate(const SimParams& p) {
    require(p.n_agents >= 1, "n_agents must be >= 1");
    require(p.arena.width > 0.0 && p.arena.height > 0.0, "arena sides must be positive");
    require(p.patch.contained_in(p.arena), "placement patch must be contained in the arena");
    require(p.comm_range > 0.0, "comm_range must be positive");
    require(in_unit(p.heading_noise_rate), "heading_noise_rate must be in [0,1]");
    require(in_unit(p.random_walk_weight), "random_walk_weight must be in [0,1]");
    require(p.step_size >= 0.0, "step_size must be non-negative");
    require(p.noise_sigma >= 0.0, "noise_sigma must be non-negative");
    require(in_unit(p.memory_weight), "memory_weight must be in [0,1]");
    require(in_unit(p.gradient_decay), "gradient_decay must be in [0,1]");
    require(in_unit(p.lag_decay), "lag_decay must be in [0,1]");
    require(p.delta_prec >= 0.0, "delta_prec must be non-negative");
    require(p.delta_mem >= 0, "delta_mem must be non-negative");
    require(p.total_steps >= 0, "total_steps must be non-negative");
    if (p.switch_mode == SwitchMode::Fixed)
        require(p.switch_time >= 0, "switch_time must be non-negative");
    require(p.field.sigma >= 0.0, "field sigma must be non-negative");
    if (p.field.kind == FieldKind::MultiPeak)
        require(!p.field.peaks.empty(), "multi-peak field needs at least one peak");
}

double explore_heading(double heading, double heading_noise_rate, Rng& rng) {
    const double zeta = rng.uniform(-kPi, kPi);
    return wrap_angle(heading + heading_noise_rate * zeta);
}

void explore_move(AgentState& state, const Arena& arena, const SimParams& params, Rng& rng) {
    state.heading = explore_heading(state.heading, params.heading_noise_rate, rng);
    const Vec2 step{params.step_size * std::cos(state.heading),
                    params.step_size * std::sin(state.heading)};
    state.last_position = state.position;
    state.position = reflect_step(arena, state.position, step);
}

void update_switch_trackers(AgentState& state, double z_s, const SimParams& params) {
    state.min_seen = std::min(state.min_seen, z_s);
    state.max_seen = std::max(state.max_seen, z_s);
    const double z_avg = state.tracker_avg();
    if (!state.lag_started) {
        state.lag = z_avg;
        state.lag_started = true;
    } else {
        state.lag = params.lag_decay * state.lag + (1.0 - params.lag_decay) * z_avg;
    }
    const double z_ref = std::abs(state.lag - z_avg);
    if (z_ref < params.delta_prec)
        state.counter += 1;
    else if (state.counter > 0)
        state.counter -= 1;
}

bool should_switch(const AgentState& state, const SimParams& params, std::int64_t t) {
    if (params.switch_mode == SwitchMode::Fixed) return t >= params.switch_time;
    return state.counter > params.delta_mem;
}

double collective_signal(double z_s, std::span<const double> neighbor_memories) {
    const double total =
        std::accumulate(neighbor_memories.begin(), neighbor_memories.end(), z_s);
    return total / (1.0 + static_cast<double>(neighbor_memories.size()));
}

double memory_update(double z_m, double z_col, double alpha) {
    return alpha * z_m + (1.0 - alpha) * z_col;
}

double objective(double z_s, double z_col) {
    const double d = z_s - z_col;
    return 0.5 * d * d;
}

Vec2 basic_gradient_step(AgentState& state, double f_now, double f_prev, const SimParams& params,
                         Rng& rng) {
    const Vec2 fd = finite_difference(f_now - f_prev, state.position - state.last_position);
    state.grad_memory =
        params.gradient_decay * state.grad_memory + (1.0 - params.gradient_decay) * fd;
    return assemble_step(state.grad_memory, params, rng);
}

void intensity_gradient_estimate(AgentState& state, double z_s_now, double z_s_prev,
                                 double gradient_decay) {
    const Vec2 d = state.position - state.last_position;
    if (std::abs(d.x) < kFdEpsilon && std::abs(d.y) < kFdEpsilon) return;  // no new information
    const Vec2 fd = finite_difference(z_s_now - z_s_prev, d);
    state.grad_intensity = gradient_decay * state.grad_intensity + (1.0 - gradient_decay) * fd;
}

Vec2 extended_gradient_step(const AgentState& state, double z_s, double z_col,
                            std::size_t n_neighbors, const SimParams& params, Rng& rng) {
    const double ni = static_cast<double>(n_neighbors);
    const Vec2 grad = (ni / (ni + 1.0)) * (z_s - z_col) * state.grad_intensity;
    return assemble_step(grad, params, rng);
}

}  // namespace swarmest
