#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "helpers.hpp"
#include "offroad/reference.hpp"
#include "offroad/search.hpp"

using namespace offroad;
using testutil::uniform;

namespace {

// Time to cover `dist` rest-to-rest with speed/acceleration caps, marched at
// a fixed tiny step: accelerate while braking distance still fits, else
// brake; cruise at the cap in between.
double simulated_bang_bang_duration(double dist, double v_max, double a_max, int steps) {
    if (dist == 0.0) return 0.0;
    if (!std::isfinite(a_max)) return dist / v_max;
    const double dt = (dist / v_max + v_max / a_max) / steps;  // upper bound horizon / steps
    double x = 0.0;
    double v = 0.0;
    double t = 0.0;
    while (x < dist) {
        const double brake_dist = v * v / (2.0 * a_max);
        double a;
        if (dist - x <= brake_dist) {
            a = -a_max;
        } else if (v < v_max) {
            a = a_max;
        } else {
            a = 0.0;
        }
        v = std::min(std::max(v + a * dt, 0.0), v_max);
        x += v * dt;
        t += dt;
        if (v == 0.0 && dist - x > 1e-9) v = a_max * dt;  // never stall short of the goal
    }
    return t;
}

std::vector<Waypoint> straight_run(Vec2 from, Vec2 to, int n, Direction dir) {
    std::vector<Waypoint> path;
    const double heading = std::atan2(to.y - from.y, to.x - from.x);
    for (int i = 0; i <= n; ++i) {
        const double s = static_cast<double>(i) / n;
        path.push_back({from.x + s * (to.x - from.x), from.y + s * (to.y - from.y),
                        dir == Direction::reverse ? heading + M_PI : heading, dir});
    }
    return path;
}

}  // namespace

TEST_CASE("profile duration matches a brute-force bang-bang simulation") {
    std::mt19937_64 rng(51);
    for (int trial = 0; trial < 100; ++trial) {
        const double dist = uniform(rng, 0.05, 30.0);
        const double v_max = uniform(rng, 0.2, 3.0);
        const double a_max = trial % 5 == 0 ? std::numeric_limits<double>::infinity()
                                            : uniform(rng, 0.2, 5.0);

        const MinTimeProfile p = min_time_profile(dist, v_max, a_max);
        const double simulated = simulated_bang_bang_duration(dist, v_max, a_max, 200000);
        CHECK(p.duration == doctest::Approx(simulated).epsilon(0.01));
    }
}

TEST_CASE("profile closed forms are exact on hand-computed cases") {
    // Unbounded acceleration: boxcar speed, duration = distance / v_max.
    CHECK(min_time_profile(5.0, 1.0, std::numeric_limits<double>::infinity()).duration ==
          doctest::Approx(5.0).epsilon(1e-12));
    // Trapezoid: 1 s ramp up (0.5 m), 1 m cruise, 1 s ramp down.
    CHECK(min_time_profile(2.0, 1.0, 1.0).duration == doctest::Approx(3.0).epsilon(1e-12));
    // Triangle at the trapezoid boundary: peak speed exactly v_max.
    CHECK(min_time_profile(1.0, 1.0, 1.0).duration == doctest::Approx(2.0).epsilon(1e-12));
    // Pure triangle: peak sqrt(a s) = 1 < v_max.
    CHECK(min_time_profile(0.5, 2.0, 2.0).duration == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(min_time_profile(0.0, 1.0, 1.0).duration == 0.0);
}

TEST_CASE("profile sampling is consistent with its own duration and distance") {
    std::mt19937_64 rng(52);
    for (int trial = 0; trial < 100; ++trial) {
        const double dist = uniform(rng, 0.05, 20.0);
        const double v_max = uniform(rng, 0.2, 3.0);
        const double a_max = trial % 4 == 0 ? std::numeric_limits<double>::infinity()
                                            : uniform(rng, 0.2, 5.0);
        const MinTimeProfile p = min_time_profile(dist, v_max, a_max);

        CHECK(p.distance_at(0.0) == 0.0);
        CHECK(p.distance_at(p.duration) == doctest::Approx(dist).epsilon(1e-9));
        CHECK(p.speed_at(0.0) == 0.0);
        CHECK(p.speed_at(p.duration) == 0.0);
        CHECK(p.speed_at(-1.0) == 0.0);
        CHECK(p.speed_at(p.duration + 1.0) == 0.0);

        double prev = 0.0;
        double integral = 0.0;
        const int n = 2000;
        for (int i = 1; i <= n; ++i) {
            const double t = p.duration * i / n;
            const double d = p.distance_at(t);
            CHECK(d >= prev - 1e-12);
            CHECK(p.speed_at(t) <= v_max + 1e-12);
            integral += (p.speed_at(t) + p.speed_at(p.duration * (i - 1) / n)) / 2.0 *
                        (p.duration / n);
            prev = d;
        }
        CHECK(integral == doctest::Approx(dist).epsilon(1e-3));
    }
}

TEST_CASE("profile rejects invalid inputs") {
    CHECK_THROWS_AS(min_time_profile(-1.0, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(min_time_profile(1.0, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(min_time_profile(1.0, 1.0, -2.0), std::invalid_argument);
}

TEST_CASE("cusp splitting groups maximal single-direction runs") {
    std::vector<Waypoint> path;
    auto fwd = straight_run({0.0, 0.0}, {2.0, 0.0}, 4, Direction::forward);
    auto rev = straight_run({2.0, 0.0}, {1.0, 0.0}, 2, Direction::reverse);
    auto fwd2 = straight_run({1.0, 0.0}, {3.0, 0.0}, 4, Direction::forward);
    path = fwd;
    path.insert(path.end(), rev.begin() + 1, rev.end());
    path.insert(path.end(), fwd2.begin() + 1, fwd2.end());

    const auto segments = split_at_cusps(path);
    REQUIRE(segments.size() == 3);
    CHECK(segments[0].direction == Direction::forward);
    CHECK(segments[1].direction == Direction::reverse);
    CHECK(segments[2].direction == Direction::forward);
    CHECK(segments[0].arc_length == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(segments[1].arc_length == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(segments[2].arc_length == doctest::Approx(2.0).epsilon(1e-12));

    // Neighbors share the cusp waypoint.
    CHECK(segments[0].waypoints.back().x == segments[1].waypoints.front().x);
    CHECK(segments[1].waypoints.back().x == segments[2].waypoints.front().x);

    CHECK_THROWS_AS(split_at_cusps({}), std::invalid_argument);
}

TEST_CASE("straight-run reference matches the profile analytically") {
    const VehicleParams vp;
    const DiscGeometry g = DiscGeometry::from_params(vp);
    const auto path = straight_run({10.0, 10.0}, {15.0, 10.0}, 50, Direction::forward);
    const int ne = 60;
    const ReferenceTrajectory ref = build_reference(path, g, vp, ne);

    // 5 m at v_max 1 with unbounded acceleration: a 5 s boxcar.
    CHECK(ref.t_f_bar == doctest::Approx(5.0).epsilon(1e-9));
    CHECK(ref.dt == doctest::Approx(ref.t_f_bar / ne).epsilon(1e-12));
    REQUIRE(ref.samples.size() == ne + 1);
    REQUIRE(ref.traj_f.size() == ne + 1);
    REQUIRE(ref.traj_r.size() == ne + 1);

    CHECK(ref.samples.front().state.v == 0.0);
    CHECK(ref.samples.back().state.v == 0.0);
    CHECK(ref.samples.front().state.x == doctest::Approx(10.0));
    CHECK(ref.samples.back().state.x == doctest::Approx(15.0).epsilon(1e-9));

    for (int k = 0; k <= ne; ++k) {
        const ReferenceSample& s = ref.samples[k];
        CHECK(s.t == doctest::Approx(ref.t_f_bar * k / ne).epsilon(1e-12));
        CHECK(s.state.y == doctest::Approx(10.0).epsilon(1e-9));
        CHECK(std::abs(wrap_angle_diff(s.state.theta)) < 1e-9);
        CHECK(std::abs(s.state.v) <= vp.max_speed + 1e-12);

        const auto [front, rear] = disc_centers(s.state.pose(), g);
        CHECK(distance(ref.traj_f[k], front) < 1e-12);
        CHECK(distance(ref.traj_r[k], rear) < 1e-12);
    }
}

TEST_CASE("reference controls are the finite differences of the sampled states") {
    const VehicleParams vp;
    const DiscGeometry g = DiscGeometry::from_params(vp);
    auto path = straight_run({10.0, 10.0}, {13.0, 10.0}, 30, Direction::forward);
    auto back = straight_run({13.0, 10.0}, {11.5, 10.0}, 15, Direction::reverse);
    path.insert(path.end(), back.begin() + 1, back.end());
    const int ne = 40;
    const ReferenceTrajectory ref = build_reference(path, g, vp, ne);

    for (int k = 0; k < ne; ++k) {
        const double a_fd = (ref.samples[k + 1].state.v - ref.samples[k].state.v) / ref.dt;
        const double w_fd =
            (ref.samples[k + 1].state.phi - ref.samples[k].state.phi) / ref.dt;
        CHECK(ref.samples[k].control.a == doctest::Approx(a_fd).epsilon(1e-9));
        CHECK(ref.samples[k].control.omega == doctest::Approx(w_fd).epsilon(1e-9));
    }
}

TEST_CASE("reverse segments carry negative speed") {
    const VehicleParams vp;
    const DiscGeometry g = DiscGeometry::from_params(vp);
    const auto path = straight_run({10.0, 10.0}, {7.0, 10.0}, 30, Direction::reverse);
    const ReferenceTrajectory ref = build_reference(path, g, vp, 30);

    CHECK(ref.t_f_bar == doctest::Approx(3.0).epsilon(1e-9));
    double v_min = 0.0;
    for (const auto& s : ref.samples) v_min = std::min(v_min, s.state.v);
    CHECK(v_min < -0.5);
    CHECK(ref.samples.front().state.v == 0.0);
    CHECK(ref.samples.back().state.v == 0.0);
}

TEST_CASE("multi-segment timelines chain the per-segment profiles") {
    const VehicleParams vp;
    const DiscGeometry g = DiscGeometry::from_params(vp);
    auto path = straight_run({10.0, 10.0}, {13.0, 10.0}, 30, Direction::forward);
    auto back = straight_run({13.0, 10.0}, {11.0, 10.0}, 20, Direction::reverse);
    path.insert(path.end(), back.begin() + 1, back.end());
    const ReferenceTrajectory ref = build_reference(path, g, vp, 50);

    // 3 m forward + 2 m reverse, each a boxcar at 1 m/s.
    CHECK(ref.t_f_bar == doctest::Approx(5.0).epsilon(1e-9));

    // The cusp is a standstill: positive speeds first, then negative ones,
    // with a zero sample at the switch.
    std::ptrdiff_t last_pos = -1, first_neg = -1;
    for (std::size_t k = 0; k < ref.samples.size(); ++k) {
        if (ref.samples[k].state.v > 0.0) last_pos = static_cast<std::ptrdiff_t>(k);
        if (ref.samples[k].state.v < 0.0 && first_neg < 0)
            first_neg = static_cast<std::ptrdiff_t>(k);
    }
    REQUIRE(last_pos >= 0);
    REQUIRE(first_neg > last_pos);
    bool zero_between = false;
    for (std::ptrdiff_t k = last_pos + 1; k < first_neg; ++k) {
        if (ref.samples[k].state.v == 0.0) zero_between = true;
    }
    CHECK(zero_between);
}

TEST_CASE("a single-waypoint path collapses to one resting sample") {
    const VehicleParams vp;
    const DiscGeometry g = DiscGeometry::from_params(vp);
    const std::vector<Waypoint> path{{5.0, 5.0, 1.0, Direction::forward}};
    const ReferenceTrajectory ref = build_reference(path, g, vp, 60);
    CHECK(ref.t_f_bar == 0.0);
    REQUIRE(ref.samples.size() == 1);
    CHECK(ref.samples[0].state.x == 5.0);
    CHECK(ref.samples[0].state.v == 0.0);
}
