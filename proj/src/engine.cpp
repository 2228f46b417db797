#include "swarmest/engine.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

#include "swarmest/kernels.hpp"

namespace swarmest {

namespace {

/// Positions/phases/memories frozen for one tick (double-buffered update).
struct Snapshot {
    std::vector<double> xs, ys, mem;
    std::vector<char> exploiting;

    void capture(const std::vector<AgentState>& agents) {
        const std::size_t n = agents.size();
        xs.resize(n);
        ys.resize(n);
        mem.resize(n);
        exploiting.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            xs[i] = agents[i].position.x;
            ys[i] = agents[i].position.y;
            mem[i] = agents[i].memory;
            exploiting[i] = agents[i].phase == Phase::Exploiting ? 1 : 0;
        }
    }
};

/// Uniform-grid spatial index with cell size = comm range. Query results are
/// sorted ascending so they are interchangeable with the brute-force path.
class UniformGrid {
public:
    void build(const std::vector<double>& xs, const std::vector<double>& ys, const Arena& arena,
               double range) {
        range_ = range;
        nx_ = std::max(1, static_cast<int>(arena.width / range));
        ny_ = std::max(1, static_cast<int>(arena.height / range));
        cell_w_ = arena.width / nx_;
        cell_h_ = arena.height / ny_;
        bins_.assign(static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_), {});
        for (std::size_t i = 0; i < xs.size(); ++i)
            bins_[bin_of(xs[i], ys[i])].push_back(static_cast<std::uint32_t>(i));
    }

    void query(const std::vector<double>& xs, const std::vector<double>& ys, std::uint32_t i,
               std::vector<std::uint32_t>& out) const {
        out.clear();
        const double qx = xs[i];
        const double qy = ys[i];
        const double r2 = range_ * range_;
        const int cx = cell_x(qx);
        const int cy = cell_y(qy);
        for (int by = std::max(0, cy - 1); by <= std::min(ny_ - 1, cy + 1); ++by) {
            for (int bx = std::max(0, cx - 1); bx <= std::min(nx_ - 1, cx + 1); ++bx) {
                const auto& bin =
                    bins_[static_cast<std::size_t>(by) * static_cast<std::size_t>(nx_) +
                          static_cast<std::size_t>(bx)];
                for (std::uint32_t j : bin) {
                    if (j == i) continue;
                    const double dx = xs[j] - qx;
                    const double dy = ys[j] - qy;
                    if (dx * dx + dy * dy < r2) out.push_back(j);
                }
            }
        }
        std::sort(out.begin(), out.end());
    }

private:
    int cell_x(double x) const {
        return std::min(nx_ - 1, std::max(0, static_cast<int>(x / cell_w_)));
    }
    int cell_y(double y) const {
        return std::min(ny_ - 1, std::max(0, static_cast<int>(y / cell_h_)));
    }
    std::size_t bin_of(double x, double y) const {
        return static_cast<std::size_t>(cell_y(y)) * static_cast<std::size_t>(nx_) +
               static_cast<std::size_t>(cell_x(x));
    }

    double range_ = 0.0, cell_w_ = 0.0, cell_h_ = 0.0;
    int nx_ = 0, ny_ = 0;
    std::vector<std::vector<std::uint32_t>> bins_;
};

struct Scratch {
    Snapshot snap;
    UniformGrid grid;
    std::vector<double> z;                   // per-agent sense this tick
    std::vector<std::uint32_t> candidates;   // radius query buffer
    std::vector<std::uint32_t> neigh;        // phase-filtered neighbor indices
    std::vector<double> neigh_mem;
};

Scratch& scratch() {
    static thread_local Scratch s;
    return s;
}

/// Exploiting agents within range of agent i, ascending. `use_grid` selects
/// the index; both paths apply the identical strict-< distance predicate.
void find_neighbors(const Snapshot& snap, const UniformGrid* grid, std::uint32_t i, double range,
                    std::vector<std::uint32_t>& candidates, std::vector<std::uint32_t>& out) {
    candidates.resize(snap.xs.size());
    std::size_t cnt;
    if (grid != nullptr) {
        grid->query(snap.xs, snap.ys, i, candidates);
        cnt = candidates.size();
    } else {
        cnt = kernels::radius_query(snap.xs, snap.ys, snap.xs[i], snap.ys[i], range, i,
                                    candidates);
    }
    out.clear();
    for (std::size_t k = 0; k < cnt; ++k)
        if (snap.exploiting[candidates[k]]) out.push_back(candidates[k]);
}

void switch_to_exploiting(AgentState& a, std::int64_t t, double z_s, const SimParams& params) {
    a.phase = Phase::Exploiting;
    a.switch_time = t;
    a.memory = (params.init_memory_from_avg && a.has_samples()) ? a.tracker_avg() : z_s;
    a.grad_memory = {0.0, 0.0};
    a.grad_intensity = {0.0, 0.0};
    a.has_prev_objective = false;
    a.has_last_sense = false;
}

char* fmt17(char* buf, std::size_t n, double v) {
    std::snprintf(buf, n, "%.17g", v);
    return buf;
}

}  // namespace

World init_world(const SimParams& params) {
    validate(params);
    World w;
    w.params = params;
    w.field = params.field;
    w.field.sigma = params.noise_sigma;  // run-level sigma wins
    w.arena = params.arena;
    w.t = 0;
    w.z_gt = ground_truth_mean(w.field, w.arena).z_gt;
    const auto n = static_cast<std::size_t>(params.n_agents);
    w.agents.resize(n);
    w.streams.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        w.streams.emplace_back(split_seed(params.seed, static_cast<std::uint64_t>(i) + 1));
    for (std::size_t i = 0; i < n; ++i) {
        auto& a = w.agents[i];
        auto& rng = w.streams[i];
        a.position = {rng.uniform(params.patch.origin.x, params.patch.origin.x + params.patch.width),
                      rng.uniform(params.patch.origin.y,
                                  params.patch.origin.y + params.patch.height)};
        a.heading = rng.uniform_angle();
        a.last_position = a.position;
    }
    return w;
}

std::vector<std::uint32_t> neighbors(const World& world, std::uint32_t i) {
    if (i >= world.agents.size()) throw std::out_of_range("neighbors: bad agent index");
    auto& s = scratch();
    s.snap.capture(world.agents);
    const UniformGrid* grid = nullptr;
    if (world.params.use_spatial_grid) {
        s.grid.build(s.snap.xs, s.snap.ys, world.arena, world.params.comm_range);
        grid = &s.grid;
    }
    std::vector<std::uint32_t> out;
    find_neighbors(s.snap, grid, i, world.params.comm_range, s.candidates, out);
    return out;
}

void tick(World& world) {
    const SimParams& p = world.params;
    const std::size_t n = world.agents.size();
    auto& s = scratch();

    // 1. Sensing (one measurement per agent per tick).
    s.z.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        s.z[i] = sense(world.field, world.arena, world.agents[i].position, world.streams[i]);

    // 2. Exploration trackers + switch decision, effective this tick.
    for (std::size_t i = 0; i < n; ++i) {
        auto& a = world.agents[i];
        if (a.phase != Phase::Exploring) continue;
        update_switch_trackers(a, s.z[i], p);
        if (should_switch(a, p, world.t)) switch_to_exploiting(a, world.t, s.z[i], p);
    }

    // Post-switch snapshot: the buffer every z_col reads from.
    s.snap.capture(world.agents);
    const UniformGrid* grid = nullptr;
    if (p.use_spatial_grid) {
        s.grid.build(s.snap.xs, s.snap.ys, world.arena, p.comm_range);
        grid = &s.grid;
    }

    std::vector<AgentState> next = world.agents;

    // 3. Exploitation: aggregate, update opinion, gradient move.
    double mismatch_total = 0.0;
    std::size_t mismatch_count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!s.snap.exploiting[i]) continue;
        auto& cur = world.agents[i];
        auto& nxt = next[i];
        find_neighbors(s.snap, grid, static_cast<std::uint32_t>(i), p.comm_range, s.candidates,
                       s.neigh);
        s.neigh_mem.clear();
        for (std::uint32_t j : s.neigh) s.neigh_mem.push_back(s.snap.mem[j]);
        const double z_col = collective_signal(s.z[i], s.neigh_mem);
        mismatch_total += std::abs(s.z[i] - z_col);
        ++mismatch_count;
        nxt.memory = memory_update(s.snap.mem[i], z_col, p.memory_weight);

        Vec2 step{0.0, 0.0};
        const double f_now = objective(s.z[i], z_col);
        if (p.gradient_mode == GradientMode::Basic) {
            if (cur.has_prev_objective) {
                step = basic_gradient_step(cur, f_now, cur.prev_objective, p, world.streams[i]);
                nxt.grad_memory = cur.grad_memory;
            } else {
                // First exploitation step: no previous objective, random walk.
                step = basic_gradient_step(cur, f_now, f_now, p, world.streams[i]);
                nxt.grad_memory = cur.grad_memory;
            }
        } else {
            if (cur.has_last_sense) {
                intensity_gradient_estimate(cur, s.z[i], cur.last_sense, p.gradient_decay);
                nxt.grad_intensity = cur.grad_intensity;
            }
            step = extended_gradient_step(cur, s.z[i], z_col, s.neigh.size(), p, world.streams[i]);
        }
        nxt.prev_objective = f_now;
        nxt.has_prev_objective = true;
        nxt.last_position = cur.position;
        nxt.position = reflect_step(world.arena, cur.position, step);
        nxt.last_sense = s.z[i];
        nxt.has_last_sense = true;
    }

    // 4. Exploration: independent random walk.
    for (std::size_t i = 0; i < n; ++i) {
        if (s.snap.exploiting[i]) continue;
        auto& nxt = next[i];
        explore_move(nxt, world.arena, p, world.streams[i]);
        nxt.last_sense = s.z[i];
        nxt.has_last_sense = true;
    }

    // 5. Commit.
    world.agents = std::move(next);
    world.t += 1;
    world.last_mean_mismatch = mismatch_count > 0
                                   ? mismatch_total / static_cast<double>(mismatch_count)
                                   : std::numeric_limits<double>::quiet_NaN();
}

std::vector<double> collect_estimates(const World& world) {
    std::vector<double> est;
    est.reserve(world.agents.size());
    for (const auto& a : world.agents) {
        if (a.phase == Phase::Exploiting) {
            est.push_back(a.memory);
        } else if (world.params.pre_switch_estimate == PreSwitchEstimate::LastSense &&
                   a.has_last_sense) {
            est.push_back(a.last_sense);
        } else if (world.params.pre_switch_estimate == PreSwitchEstimate::TrackerAvg &&
                   a.has_samples()) {
            est.push_back(a.tracker_avg());
        } else {
            // Nothing sampled yet (t = 0): the agent's would-be noise-free
            // perception stands in so the error series is defined from t = 0.
            est.push_back(intensity_at(world.field, world.arena, a.position));
        }
    }
    return est;
}

MetricsSample measure(const World& world) {
    const auto est = collect_estimates(world);
    MetricsSample m;
    m.t = world.t;
    m.e_t = trueness_error(est, world.z_gt);
    m.e_p = precision_error(est);
    m.e_a = accuracy_error(est, world.z_gt);
    m.collective_mean = kernels::sum(est) / static_cast<double>(est.size());
    std::size_t switched = 0;
    for (const auto& a : world.agents)
        if (a.phase == Phase::Exploiting) ++switched;
    m.frac_switched = static_cast<double>(switched) / static_cast<double>(world.agents.size());
    return m;
}

RunRecord run(const SimParams& params, std::int64_t record_stride,
              const std::function<void(const MetricsSample&)>& on_sample) {
    if (record_stride < 1) throw std::invalid_argument("record_stride must be >= 1");
    World world = init_world(params);
    RunRecord rec;
    rec.seed = params.seed;
    rec.params = params;
    rec.z_gt = world.z_gt;
    rec.initial_positions.reserve(world.agents.size());
    for (const auto& a : world.agents) rec.initial_positions.push_back(a.position);

    auto record = [&] {
        rec.samples.push_back(measure(world));
        if (on_sample) on_sample(rec.samples.back());
    };
    record();  // t = 0
    while (world.t < params.total_steps) {
        tick(world);
        if (world.t % record_stride == 0 || world.t == params.total_steps) record();
    }

    rec.switch_times.reserve(world.agents.size());
    rec.final_positions.reserve(world.agents.size());
    for (const auto& a : world.agents) {
        rec.switch_times.push_back(a.switch_time);
        rec.final_positions.push_back(a.position);
    }
    return rec;
}

std::string RunRecord::to_canonical_string() const {
    std::string out;
    out.reserve(4096);
    char buf[64];
    auto put = [&](const char* key, double v) {
        out += key;
        out += '=';
        out += fmt17(buf, sizeof buf, v);
        out += '\n';
    };
    out += "swarmest RunRecord v1\n";
    std::snprintf(buf, sizeof buf, "seed=%llu\n", static_cast<unsigned long long>(seed));
    out += buf;
    std::snprintf(buf, sizeof buf, "n_agents=%d\n", params.n_agents);
    out += buf;
    std::snprintf(buf, sizeof buf, "total_steps=%lld\n",
                  static_cast<long long>(params.total_steps));
    out += buf;
    put("arena_w", params.arena.width);
    put("arena_h", params.arena.height);
    put("z_gt", z_gt);
    std::snprintf(buf, sizeof buf, "samples=%zu\n", samples.size());
    out += buf;
    for (const auto& s : samples) {
        std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(s.t));
        out += buf;
        for (double v : {s.e_t, s.e_p, s.e_a, s.frac_switched, s.collective_mean}) {
            out += ' ';
            out += fmt17(buf, sizeof buf, v);
        }
        out += '\n';
    }
    out += "switch_times\n";
    for (const auto& st : switch_times) {
        std::snprintf(buf, sizeof buf, "%lld\n", st ? static_cast<long long>(*st) : -1LL);
        out += buf;
    }
    out += "positions\n";
    for (std::size_t i = 0; i < initial_positions.size(); ++i) {
        out += fmt17(buf, sizeof buf, initial_positions[i].x);
        out += ' ';
        out += fmt17(buf, sizeof buf, initial_positions[i].y);
        out += ' ';
        out += fmt17(buf, sizeof buf, final_positions[i].x);
        out += ' ';
        out += fmt17(buf, sizeof buf, final_positions[i].y);
        out += '\n';
    }
    return out;
}

}  // namespace swarmest
