#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cmath>

#include "swarmest/engine.hpp"

using namespace swarmest;

namespace {

FieldSpec constant_field(double value) {
    FieldSpec f;
    f.kind = FieldKind::Cone;
    f.center = {0.7, 0.7};
    f.height = value;
    f.slope = 0.0;
    f.sigma = 0.0;
    return f;
}

/// Frozen consensus testbed: no noise, no movement, everyone exploiting.
SimParams consensus_params(int n, double field_value) {
    SimParams p;
    p.n_agents = n;
    p.noise_sigma = 0.0;
    p.step_size = 0.0;
    p.field = constant_field(field_value);
    p.switch_mode = SwitchMode::Fixed;
    p.switch_time = 0;
    return p;
}

void make_exploiting(AgentState& a, Vec2 pos, double memory) {
    a.position = pos;
    a.last_position = pos;
    a.phase = Phase::Exploiting;
    a.switch_time = 0;
    a.memory = memory;
}

double spread(const World& w) {
    double lo = w.agents.front().memory, hi = lo;
    for (const auto& a : w.agents) {
        lo = std::min(lo, a.memory);
        hi = std::max(hi, a.memory);
    }
    return hi - lo;
}

}  // namespace

TEST_CASE("init_world places every agent inside the patch") {
    SimParams p;
    p.n_agents = 100;
    const World w = init_world(p);
    REQUIRE(w.agents.size() == 100);
    for (const auto& a : w.agents) {
        CHECK(a.position.x >= p.patch.origin.x);
        CHECK(a.position.x <= p.patch.origin.x + p.patch.width);
        CHECK(a.position.y >= p.patch.origin.y);
        CHECK(a.position.y <= p.patch.origin.y + p.patch.height);
        CHECK(a.phase == Phase::Exploring);
        CHECK_FALSE(a.has_samples());
    }
}

TEST_CASE("init_world: singleton world is valid") {
    SimParams p;
    p.n_agents = 1;
    const World w = init_world(p);
    CHECK(w.agents.size() == 1);
}

TEST_CASE("init_world is deterministic in the seed") {
    SimParams p;
    p.seed = 77;
    const World a = init_world(p);
    const World b = init_world(p);
    for (std::size_t i = 0; i < a.agents.size(); ++i) {
        CHECK(a.agents[i].position == b.agents[i].position);
        CHECK(a.agents[i].heading == b.agents[i].heading);
    }
}

TEST_CASE("init_world rejects a patch sticking out of the arena") {
    SimParams p;
    p.patch = {{1.0, 1.0}, 0.7, 0.7};
    CHECK_THROWS_AS(init_world(p), std::invalid_argument);
}

TEST_CASE("neighbors: range, boundary and phase filter") {
    SimParams p = consensus_params(3, 1.0);
    p.comm_range = 0.30;
    World w = init_world(p);
    make_exploiting(w.agents[0], {0.0, 0.0}, 0.0);
    make_exploiting(w.agents[1], {0.29, 0.0}, 0.0);
    make_exploiting(w.agents[2], {0.3, 0.7}, 0.0);

    CHECK(neighbors(w, 0) == std::vector<std::uint32_t>{1});
    CHECK(neighbors(w, 1) == std::vector<std::uint32_t>{0});

    // Distance exactly comm_range: excluded (strict inequality).
    w.agents[1].position = {0.3, 0.0};
    CHECK(neighbors(w, 0).empty());

    // An exploring agent in range is invisible to the aggregation.
    w.agents[1].position = {0.1, 0.0};
    w.agents[1].phase = Phase::Exploring;
    CHECK(neighbors(w, 0).empty());
}

TEST_CASE("grid index and brute force agree on random worlds") {
    Rng rng(101);
    for (int cfg = 0; cfg < 50; ++cfg) {
        SimParams p = consensus_params(2 + static_cast<int>(rng.uniform(0.0, 60.0)), 1.0);
        p.arena = {rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0)};
        p.patch = {{0.0, 0.0}, p.arena.width, p.arena.height};
        p.comm_range = rng.uniform(0.05, 0.8);
        p.field = constant_field(1.0);
        World w = init_world(p);
        for (auto& a : w.agents)
            if (rng.uniform01() < 0.7) a.phase = Phase::Exploiting;
        for (std::uint32_t i = 0; i < w.agents.size(); ++i) {
            w.params.use_spatial_grid = false;
            const auto brute = neighbors(w, i);
            w.params.use_spatial_grid = true;
            const auto grid = neighbors(w, i);
            REQUIRE(grid == brute);
        }
    }
}

TEST_CASE("tick: a world of explorers random-walks and keeps memories untouched") {
    SimParams p;
    p.n_agents = 8;
    p.switch_time = 1000000;  // nobody switches
    World w = init_world(p);
    for (auto& a : w.agents) a.memory = 7.0;
    const auto before = w.agents;
    tick(w);
    CHECK(w.t == 1);
    for (std::size_t i = 0; i < w.agents.size(); ++i) {
        CHECK(w.agents[i].phase == Phase::Exploring);
        CHECK(w.agents[i].memory == 7.0);
        const double moved = (w.agents[i].position - before[i].position).norm();
        CHECK(moved <= p.step_size + 1e-12);
        CHECK(moved > 0.0);
    }
}

TEST_CASE("tick: two-agent consensus matches the closed-form iteration") {
    SimParams p = consensus_params(2, 1.0);
    p.comm_range = 0.30;
    World w = init_world(p);
    make_exploiting(w.agents[0], {0.5, 0.5}, 0.0);
    make_exploiting(w.agents[1], {0.6, 0.5}, 1.0);

    double m0 = 0.0, m1 = 1.0;  // independent dense iteration
    double prev_gap = std::abs(m0 - m1);
    const double alpha = p.memory_weight;
    for (int k = 0; k < 2000; ++k) {
        tick(w);
        const double c0 = (1.0 + m1) / 2.0;  // z_s = field value 1.0
        const double c1 = (1.0 + m0) / 2.0;
        const double n0 = alpha * m0 + (1.0 - alpha) * c0;
        const double n1 = alpha * m1 + (1.0 - alpha) * c1;
        m0 = n0;
        m1 = n1;
        CHECK(w.agents[0].memory == doctest::Approx(m0).epsilon(1e-12));
        CHECK(w.agents[1].memory == doctest::Approx(m1).epsilon(1e-12));
        const double gap = std::abs(w.agents[0].memory - w.agents[1].memory);
        CHECK(gap <= prev_gap + 1e-18);
        prev_gap = gap;
    }
    CHECK(prev_gap < 1e-6);
}

TEST_CASE("tick: a lone exploiting agent converges to the local field value") {
    SimParams p = consensus_params(1, 0.6);
    World w = init_world(p);
    make_exploiting(w.agents[0], {0.5, 0.5}, 0.0);
    for (int k = 0; k < 2000; ++k) tick(w);
    CHECK(w.agents[0].memory == doctest::Approx(0.6).epsilon(1e-6));
}

TEST_CASE("tick: aggregation reads the pre-tick snapshot (chain world)") {
    SimParams p = consensus_params(3, 1.0);
    p.comm_range = 0.30;
    World w = init_world(p);
    // A - B - C chain; A and C are out of each other's range.
    make_exploiting(w.agents[0], {0.2, 0.5}, 0.1);
    make_exploiting(w.agents[1], {0.45, 0.5}, 0.5);
    make_exploiting(w.agents[2], {0.7, 0.5}, 0.9);
    const double a = 0.1, b = 0.5, c = 0.9, al = p.memory_weight;
    tick(w);
    CHECK(w.agents[0].memory == doctest::Approx(al * a + (1 - al) * (1.0 + b) / 2.0).epsilon(1e-15));
    CHECK(w.agents[1].memory ==
          doctest::Approx(al * b + (1 - al) * (1.0 + a + c) / 3.0).epsilon(1e-15));
    CHECK(w.agents[2].memory == doctest::Approx(al * c + (1 - al) * (1.0 + b) / 2.0).epsilon(1e-15));
}

TEST_CASE("tick: consensus spread is non-increasing on a homogeneous signal") {
    SimParams p = consensus_params(10, 1.0);
    p.comm_range = 0.30;
    World w = init_world(p);
    for (int i = 0; i < 10; ++i)
        make_exploiting(w.agents[static_cast<std::size_t>(i)], {0.1 + 0.1 * i, 0.5}, i / 10.0);
    double prev = spread(w);
    for (int k = 0; k < 500; ++k) {
        tick(w);
        const double s = spread(w);
        CHECK(s <= prev + 1e-18);
        prev = s;
    }
}

TEST_CASE("tick: full-memory fixed point (alpha = 1, no noise, no movement)") {
    SimParams p = consensus_params(2, 1.0);
    p.memory_weight = 1.0;
    World w = init_world(p);
    make_exploiting(w.agents[0], {0.5, 0.5}, 0.25);
    make_exploiting(w.agents[1], {0.6, 0.5}, 0.75);
    for (int k = 0; k < 100; ++k) tick(w);
    CHECK(w.agents[0].memory == 0.25);
    CHECK(w.agents[1].memory == 0.75);
    CHECK(w.agents[0].position == Vec2{0.5, 0.5});
}

TEST_CASE("tick: fixed-mode switching fires at t_sw, once, for everyone") {
    SimParams p;
    p.n_agents = 6;
    p.switch_mode = SwitchMode::Fixed;
    p.switch_time = 3;
    p.total_steps = 10;
    World w = init_world(p);
    for (int k = 0; k < 10; ++k) {
        tick(w);
        // The switch check runs inside the tick that starts at t = t_sw.
        const Phase expected = w.t <= 3 ? Phase::Exploring : Phase::Exploiting;
        for (const auto& a : w.agents) CHECK(a.phase == expected);
    }
    for (const auto& a : w.agents) {
        CHECK(a.phase == Phase::Exploiting);
        REQUIRE(a.switch_time.has_value());
        CHECK(*a.switch_time == 3);
    }
}

TEST_CASE("tick: phase sequence is exploring then exploiting, switch time set once") {
    SimParams p;
    p.n_agents = 5;
    p.switch_mode = SwitchMode::Adaptive;
    p.delta_prec = 0.05;
    p.delta_mem = 10;
    p.total_steps = 400;
    World w = init_world(p);
    std::vector<bool> switched(w.agents.size(), false);
    std::vector<std::int64_t> first_switch(w.agents.size(), -1);
    for (int k = 0; k < 400; ++k) {
        tick(w);
        for (std::size_t i = 0; i < w.agents.size(); ++i) {
            const auto& a = w.agents[i];
            if (switched[i]) {
                CHECK(a.phase == Phase::Exploiting);  // irreversible
                CHECK(*a.switch_time == first_switch[i]);
            } else if (a.phase == Phase::Exploiting) {
                switched[i] = true;
                first_switch[i] = *a.switch_time;
            }
        }
    }
}

TEST_CASE("tick: memory seeding at switch honors init_memory_from_avg") {
    for (const bool from_avg : {false, true}) {
        SimParams p = consensus_params(1, 5.0);
        p.init_memory_from_avg = from_avg;
        World w = init_world(p);
        w.agents[0].min_seen = 0.0;  // primed exploration trackers
        w.agents[0].max_seen = 0.0;
        w.agents[0].lag = 0.0;
        w.agents[0].lag_started = true;
        tick(w);
        // Tracker update with z_s = 5 first: avg = 2.5. Then switch seeds the
        // memory, then the same-tick aggregation blends with z_col = z_s = 5.
        const double seed_value = from_avg ? 2.5 : 5.0;
        const double expected = 0.99 * seed_value + 0.01 * 5.0;
        CHECK(w.agents[0].memory == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("tick keeps every agent inside the arena") {
    SimParams p;
    p.n_agents = 20;
    p.switch_mode = SwitchMode::Fixed;
    p.switch_time = 50;
    World w = init_world(p);
    for (int k = 0; k < 200; ++k) {
        tick(w);
        for (const auto& a : w.agents) REQUIRE(w.arena.contains(a.position));
    }
}

TEST_CASE("run: zero steps records exactly the initial sample") {
    SimParams p;
    p.n_agents = 10;
    p.total_steps = 0;
    const RunRecord rec = run(p);
    REQUIRE(rec.samples.size() == 1);
    CHECK(rec.samples[0].t == 0);
    CHECK(rec.samples[0].frac_switched == 0.0);
}

TEST_CASE("run: stride sampling always includes the final tick") {
    SimParams p;
    p.n_agents = 4;
    p.total_steps = 5;
    const RunRecord rec = run(p, 2);
    std::vector<std::int64_t> ts;
    for (const auto& s : rec.samples) ts.push_back(s.t);
    CHECK(ts == std::vector<std::int64_t>{0, 2, 4, 5});
}

TEST_CASE("run: identical seeds give byte-identical records") {
    SimParams p;
    p.n_agents = 12;
    p.total_steps = 60;
    p.switch_mode = SwitchMode::Fixed;
    p.switch_time = 20;
    const RunRecord a = run(p, 5);
    const RunRecord b = run(p, 5);
    CHECK(a.to_canonical_string() == b.to_canonical_string());
    SimParams q = p;
    q.seed = p.seed + 1;
    CHECK(run(q, 5).to_canonical_string() != a.to_canonical_string());
}

TEST_CASE("run: fixed mode yields one switch time per agent, all equal t_sw") {
    SimParams p;
    p.n_agents = 15;
    p.total_steps = 30;
    p.switch_mode = SwitchMode::Fixed;
    p.switch_time = 7;
    const RunRecord rec = run(p, 10);
    REQUIRE(rec.switch_times.size() == 15);
    for (const auto& st : rec.switch_times) {
        REQUIRE(st.has_value());
        CHECK(*st == 7);
    }
    CHECK(decision_time(rec).mean == 7.0);
}

TEST_CASE("collective mismatch diagnostic shrinks as a frozen pair agrees") {
    SimParams p = consensus_params(2, 1.0);
    World w = init_world(p);
    make_exploiting(w.agents[0], {0.5, 0.5}, 0.0);
    make_exploiting(w.agents[1], {0.6, 0.5}, 1.0);
    tick(w);
    const double first = w.last_mean_mismatch;
    for (int k = 0; k < 500; ++k) tick(w);
    CHECK(w.last_mean_mismatch < first);
}
