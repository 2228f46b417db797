#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <random>

#include "swarmest/field.hpp"
#include "swarmest/geometry.hpp"
#include "swarmest/rng.hpp"

using namespace swarmest;

TEST_CASE("cone intensity: apex and axis values") {
    FieldSpec f;
    f.kind = FieldKind::Cone;
    f.center = {0.7, 0.7};
    f.height = 1.0;
    f.slope = 1.0;
    const Arena arena{1.4, 1.4};
    CHECK(intensity_at(f, arena, {0.7, 0.7}) == 1.0);
    CHECK(intensity_at(f, arena, {0.7, 0.2}) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("multi-peak intensity matches the closed-form oracle value") {
    const Arena arena{1.4, 1.4};
    const FieldSpec f = FieldSpec::default_multi_peak(arena);
    // Evaluated independently with 40-digit arithmetic.
    CHECK(intensity_at(f, arena, {0.6, 0.8}) ==
          doctest::Approx(0.56379371142999567957).epsilon(1e-12));
    CHECK(intensity_at(f, arena, {0.35, 0.98}) ==
          doctest::Approx(1.0070125534826302958).epsilon(1e-12));
}

TEST_CASE("intensity outside the arena is a domain error") {
    const Arena arena{1.0, 1.0};
    const FieldSpec f = FieldSpec::default_cone(arena);
    CHECK_THROWS_AS(intensity_at(f, arena, {1.2, 0.5}), std::domain_error);
    CHECK_THROWS_AS(intensity_at(f, arena, {0.5, -0.1}), std::domain_error);
}

TEST_CASE("sense with sigma = 0 is bit-identical to intensity_at") {
    const Arena arena{1.4, 1.4};
    FieldSpec f = FieldSpec::default_cone(arena, 0.0);
    Rng rng(1);
    for (int k = 0; k < 100; ++k) {
        Vec2 x{rng.uniform(0.0, arena.width), rng.uniform(0.0, arena.height)};
        CHECK(sense(f, arena, x, rng) == intensity_at(f, arena, x));
    }
}

TEST_CASE("sense is reproducible for a fixed seed") {
    const Arena arena{1.4, 1.4};
    const FieldSpec f = FieldSpec::default_cone(arena, 0.025);
    Rng a(123), b(123);
    for (int k = 0; k < 10; ++k)
        CHECK(sense(f, arena, {0.3, 0.3}, a) == sense(f, arena, {0.3, 0.3}, b));
}

TEST_CASE("sense noise averages out (law of large numbers)") {
    const Arena arena{1.4, 1.4};
    const double sigma = 0.025;
    const FieldSpec f = FieldSpec::default_cone(arena, sigma);
    const Vec2 x{0.5, 0.9};
    Rng rng(99);
    const int n = 100000;
    double total = 0.0;
    for (int k = 0; k < n; ++k) total += sense(f, arena, x, rng);
    const double mean = total / n;
    CHECK(std::abs(mean - intensity_at(f, arena, x)) <= 3.0 * sigma / std::sqrt(double(n)));
}

TEST_CASE("ground truth of a constant field is exact") {
    FieldSpec f;
    f.kind = FieldKind::Cone;
    f.center = {0.7, 0.7};
    f.height = 0.75;
    f.slope = 0.0;  // constant field
    const Arena arena{1.4, 1.4};
    CHECK(ground_truth_mean(f, arena).z_gt == 0.75);
}

TEST_CASE("ground truth of g(x,y) = x on the unit square is 0.5") {
    const Arena arena{1.0, 1.0};
    const double avg = arena_average([](double x, double) { return x; }, arena);
    CHECK(avg == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("ground truth is stable under grid refinement") {
    const Arena arena{1.4, 1.4};
    for (const FieldSpec& f :
         {FieldSpec::default_cone(arena), FieldSpec::default_multi_peak(arena)}) {
        const double coarse = ground_truth_mean(f, arena, 512).z_gt;
        const double fine = ground_truth_mean(f, arena, 1024).z_gt;
        CHECK(std::abs(coarse - fine) < 1e-4);
    }
}

TEST_CASE("ground truth is linear in the integrand") {
    const Arena arena{1.3, 0.9};
    const FieldSpec f = FieldSpec::default_multi_peak(arena);
    auto g = [&](double x, double y) { return intensity_at(f, arena, {x, y}); };
    const double base = arena_average(g, arena, 256);
    const double shifted = arena_average([&](double x, double y) { return g(x, y) + 2.5; },
                                         arena, 256);
    CHECK(shifted == doctest::Approx(base + 2.5).epsilon(1e-12));
}

TEST_CASE("reflect_step: interior, wall and corner cases") {
    const Arena arena{1.0, 1.0};
    CHECK(reflect_step(arena, {0.5, 0.5}, {0.1, 0.0}) == Vec2{0.6, 0.5});
    const Vec2 wall = reflect_step(arena, {0.95, 0.5}, {0.1, 0.0});
    CHECK(wall.x == doctest::Approx(0.95).epsilon(1e-15));
    CHECK(wall.y == 0.5);
    const Vec2 corner = reflect_step(arena, {0.99, 0.99}, {0.05, 0.05});
    CHECK(corner.x == doctest::Approx(0.96).epsilon(1e-12));
    CHECK(corner.y == doctest::Approx(0.96).epsilon(1e-12));
}

TEST_CASE("reflect_step keeps every result inside the closed arena") {
    const Arena arena{1.4, 0.8};
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> ux(0.0, arena.width);
    std::uniform_real_distribution<double> uy(0.0, arena.height);
    std::uniform_real_distribution<double> us(-0.79, 0.79);
    for (int k = 0; k < 20000; ++k) {
        const Vec2 x{ux(gen), uy(gen)};
        const Vec2 step{us(gen), us(gen)};
        const Vec2 r = reflect_step(arena, x, step);
        CHECK(arena.contains(r));
        // Folding can only shorten the displacement.
        CHECK((r - x).norm() <= step.norm() + 1e-12);
    }
}
