#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "helpers.hpp"
#include "offroad/reeds_shepp.hpp"

using namespace offroad;
using testutil::uniform;

namespace {

Pose apply_segment(Pose p, RsSegmentType type, double signed_len, double rho) {
    switch (type) {
        case RsSegmentType::straight:
            p.x += signed_len * std::cos(p.theta);
            p.y += signed_len * std::sin(p.theta);
            return p;
        case RsSegmentType::left: {
            const double t = signed_len / rho;
            p.x += rho * (std::sin(p.theta + t) - std::sin(p.theta));
            p.y += rho * (std::cos(p.theta) - std::cos(p.theta + t));
            p.theta += t;
            return p;
        }
        case RsSegmentType::right: {
            const double t = signed_len / rho;
            p.x += rho * (std::sin(p.theta) - std::sin(p.theta - t));
            p.y += rho * (std::cos(p.theta - t) - std::cos(p.theta));
            p.theta -= t;
            return p;
        }
    }
    return p;
}

Pose roll_path(const Pose& start, const RsPath& path, double rho) {
    Pose p = start;
    for (const RsSegment& seg : path.segments) p = apply_segment(p, seg.type, seg.length, rho);
    return p;
}

bool pose_close(const Pose& a, const Pose& b, double tol) {
    return std::hypot(a.x - b.x, a.y - b.y) < tol &&
           std::abs(wrap_angle_diff(a.theta - b.theta)) < tol;
}

// Forward curve-straight-curve candidates (LSL, RSR, LSR, RSL), each rolled
// forward to confirm it actually reaches the goal before its length counts.
// Gives a sound upper bound on the shortest path.
std::vector<double> verified_csc_lengths(const Pose& start, const Pose& goal, double rho) {
    const double dx = (goal.x - start.x) / rho;
    const double dy = (goal.y - start.y) / rho;
    const double d = std::hypot(dx, dy);
    const double bearing = std::atan2(dy, dx);
    const double a = wrap_angle_2pi(start.theta - bearing);
    const double b = wrap_angle_2pi(goal.theta - bearing);

    std::vector<double> out;
    const auto try_word = [&](RsSegmentType c1, double t, double p, RsSegmentType c2,
                              double q) {
        if (!(std::isfinite(t) && std::isfinite(p) && std::isfinite(q))) return;
        if (t < 0.0 || p < 0.0 || q < 0.0) return;
        Pose pose = start;
        pose = apply_segment(pose, c1, t * rho, rho);
        pose = apply_segment(pose, RsSegmentType::straight, p * rho, rho);
        pose = apply_segment(pose, c2, q * rho, rho);
        if (pose_close(pose, goal, 1e-7)) out.push_back((t + p + q) * rho);
    };

    {  // LSL
        const double tmp = std::atan2(std::cos(b) - std::cos(a), d + std::sin(a) - std::sin(b));
        const double p2 = 2.0 + d * d - 2.0 * std::cos(a - b) +
                          2.0 * d * (std::sin(a) - std::sin(b));
        if (p2 >= 0.0)
            try_word(RsSegmentType::left, wrap_angle_2pi(-a + tmp), std::sqrt(p2),
                     RsSegmentType::left, wrap_angle_2pi(b - tmp));
    }
    {  // RSR
        const double tmp = std::atan2(std::cos(a) - std::cos(b), d - std::sin(a) + std::sin(b));
        const double p2 = 2.0 + d * d - 2.0 * std::cos(a - b) +
                          2.0 * d * (std::sin(b) - std::sin(a));
        if (p2 >= 0.0)
            try_word(RsSegmentType::right, wrap_angle_2pi(a - tmp), std::sqrt(p2),
                     RsSegmentType::right, wrap_angle_2pi(-b + tmp));
    }
    {  // LSR
        const double p2 = -2.0 + d * d + 2.0 * std::cos(a - b) +
                          2.0 * d * (std::sin(a) + std::sin(b));
        if (p2 >= 0.0) {
            const double p = std::sqrt(p2);
            const double tmp =
                std::atan2(-std::cos(a) - std::cos(b), d + std::sin(a) + std::sin(b)) -
                std::atan2(-2.0, p);
            try_word(RsSegmentType::left, wrap_angle_2pi(-a + tmp), p, RsSegmentType::right,
                     wrap_angle_2pi(-wrap_angle_2pi(b) + wrap_angle_2pi(tmp)));
        }
    }
    {  // RSL
        const double p2 = -2.0 + d * d + 2.0 * std::cos(a - b) -
                          2.0 * d * (std::sin(a) + std::sin(b));
        if (p2 >= 0.0) {
            const double p = std::sqrt(p2);
            const double tmp =
                std::atan2(std::cos(a) + std::cos(b), d - std::sin(a) - std::sin(b)) -
                std::atan2(2.0, p);
            try_word(RsSegmentType::right, wrap_angle_2pi(a - tmp), p, RsSegmentType::left,
                     wrap_angle_2pi(wrap_angle_2pi(b) - wrap_angle_2pi(tmp)));
        }
    }
    return out;
}

}  // namespace

TEST_CASE("shortest path reaches the goal when rolled forward") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 2000; ++trial) {
        const Pose start{uniform(rng, -5.0, 5.0), uniform(rng, -5.0, 5.0),
                         uniform(rng, 0.0, 2.0 * M_PI)};
        const Pose goal{uniform(rng, -5.0, 5.0), uniform(rng, -5.0, 5.0),
                        uniform(rng, 0.0, 2.0 * M_PI)};
        const double rho = uniform(rng, 0.3, 3.0);

        const RsPath path = rs_shortest(start, goal, rho);
        CHECK(pose_close(roll_path(start, path, rho), goal, 1e-7));

        double sum = 0.0;
        for (const RsSegment& seg : path.segments) {
            CHECK(std::abs(seg.length) > 0.0);
            sum += std::abs(seg.length);
        }
        CHECK(path.total_length == doctest::Approx(sum).epsilon(1e-12));
        CHECK(path.segments.size() <= 5);
    }
}

TEST_CASE("length is bounded below by distance and heading change") {
    std::mt19937_64 rng(32);
    for (int trial = 0; trial < 2000; ++trial) {
        const Pose start{uniform(rng, -5.0, 5.0), uniform(rng, -5.0, 5.0),
                         uniform(rng, 0.0, 2.0 * M_PI)};
        const Pose goal{uniform(rng, -5.0, 5.0), uniform(rng, -5.0, 5.0),
                        uniform(rng, 0.0, 2.0 * M_PI)};
        const double rho = uniform(rng, 0.3, 3.0);
        const RsPath path = rs_shortest(start, goal, rho);

        const double eucl = std::hypot(goal.x - start.x, goal.y - start.y);
        const double turn = rho * std::abs(wrap_angle_diff(goal.theta - start.theta));
        CHECK(path.total_length >= eucl - 1e-9);
        CHECK(path.total_length >= turn - 1e-9);
    }
}

TEST_CASE("length never beats a verified curve-straight-curve construction") {
    std::mt19937_64 rng(33);
    int with_candidate = 0;
    for (int trial = 0; trial < 2000; ++trial) {
        const Pose start{uniform(rng, -5.0, 5.0), uniform(rng, -5.0, 5.0),
                         uniform(rng, 0.0, 2.0 * M_PI)};
        const Pose goal{uniform(rng, -20.0, 20.0), uniform(rng, -20.0, 20.0),
                        uniform(rng, 0.0, 2.0 * M_PI)};
        const double rho = uniform(rng, 0.3, 2.0);

        const auto candidates = verified_csc_lengths(start, goal, rho);
        if (candidates.empty()) continue;
        ++with_candidate;
        const RsPath path = rs_shortest(start, goal, rho);
        for (double len : candidates) CHECK(path.total_length <= len + 1e-7);
    }
    CHECK(with_candidate > 1500);
}

TEST_CASE("far forward-cone goals are solved exactly by curve-straight-curve") {
    std::mt19937_64 rng(34);
    int checked = 0;
    while (checked < 500) {
        const double rho = uniform(rng, 0.5, 2.0);
        const Pose start{uniform(rng, -2.0, 2.0), uniform(rng, -2.0, 2.0),
                         uniform(rng, 0.0, 2.0 * M_PI)};
        const double d = uniform(rng, 10.0 * rho, 25.0 * rho);
        const double bearing = start.theta + uniform(rng, -0.4, 0.4);
        const Pose goal{start.x + d * std::cos(bearing), start.y + d * std::sin(bearing),
                        bearing + uniform(rng, -0.4, 0.4)};

        const auto candidates = verified_csc_lengths(start, goal, rho);
        if (candidates.empty()) continue;
        ++checked;
        const double best = *std::min_element(candidates.begin(), candidates.end());
        const RsPath path = rs_shortest(start, goal, rho);
        CHECK(path.total_length == doctest::Approx(best).epsilon(1e-7));
    }
}

TEST_CASE("canonical straight and single-arc connections are exact") {
    const RsPath straight = rs_shortest(Pose{0.0, 0.0, 0.0}, Pose{4.0, 0.0, 0.0}, 1.0);
    CHECK(straight.total_length == doctest::Approx(4.0).epsilon(1e-12));

    // Quarter turn along a left arc of radius 2.
    const RsPath arc =
        rs_shortest(Pose{0.0, 0.0, 0.0}, Pose{2.0, 2.0, M_PI / 2.0}, 2.0);
    CHECK(arc.total_length == doctest::Approx(M_PI).epsilon(1e-9));

    const RsPath null_path = rs_shortest(Pose{1.0, 2.0, 0.5}, Pose{1.0, 2.0, 0.5}, 1.0);
    CHECK(null_path.segments.empty());
    CHECK(null_path.total_length == 0.0);
}

TEST_CASE("length is invariant under rigid motion and reversal") {
    std::mt19937_64 rng(35);
    for (int trial = 0; trial < 500; ++trial) {
        const Pose start{uniform(rng, -5.0, 5.0), uniform(rng, -5.0, 5.0),
                         uniform(rng, 0.0, 2.0 * M_PI)};
        const Pose goal{uniform(rng, -5.0, 5.0), uniform(rng, -5.0, 5.0),
                        uniform(rng, 0.0, 2.0 * M_PI)};
        const double rho = uniform(rng, 0.3, 3.0);
        const double base = rs_shortest(start, goal, rho).total_length;

        const double swapped = rs_shortest(goal, start, rho).total_length;
        CHECK(swapped == doctest::Approx(base).epsilon(1e-9));

        const double tx = uniform(rng, -10.0, 10.0);
        const double ty = uniform(rng, -10.0, 10.0);
        const double rot = uniform(rng, 0.0, 2.0 * M_PI);
        const auto transform = [&](const Pose& p) -> Pose {
            return {tx + p.x * std::cos(rot) - p.y * std::sin(rot),
                    ty + p.x * std::sin(rot) + p.y * std::cos(rot), p.theta + rot};
        };
        const double moved =
            rs_shortest(transform(start), transform(goal), rho).total_length;
        CHECK(moved == doctest::Approx(base).epsilon(1e-9));

        const auto mirror = [](const Pose& p) -> Pose { return {p.x, -p.y, -p.theta}; };
        const double mirrored = rs_shortest(mirror(start), mirror(goal), rho).total_length;
        CHECK(mirrored == doctest::Approx(base).epsilon(1e-9));
    }
}

TEST_CASE("length scales linearly with the frame") {
    std::mt19937_64 rng(36);
    for (int trial = 0; trial < 300; ++trial) {
        const Pose start{uniform(rng, -5.0, 5.0), uniform(rng, -5.0, 5.0),
                         uniform(rng, 0.0, 2.0 * M_PI)};
        const Pose goal{uniform(rng, -5.0, 5.0), uniform(rng, -5.0, 5.0),
                        uniform(rng, 0.0, 2.0 * M_PI)};
        const double rho = uniform(rng, 0.3, 3.0);
        const double k = uniform(rng, 0.2, 5.0);

        const double base = rs_shortest(start, goal, rho).total_length;
        const double scaled = rs_shortest(Pose{k * start.x, k * start.y, start.theta},
                                          Pose{k * goal.x, k * goal.y, goal.theta}, k * rho)
                                  .total_length;
        CHECK(scaled == doctest::Approx(k * base).epsilon(1e-9));
    }
}

TEST_CASE("path sampling starts and ends on the endpoint poses") {
    std::mt19937_64 rng(37);
    for (int trial = 0; trial < 300; ++trial) {
        const Pose start{uniform(rng, -5.0, 5.0), uniform(rng, -5.0, 5.0),
                         uniform(rng, 0.0, 2.0 * M_PI)};
        const Pose goal{uniform(rng, -5.0, 5.0), uniform(rng, -5.0, 5.0),
                        uniform(rng, 0.0, 2.0 * M_PI)};
        const double rho = uniform(rng, 0.4, 2.0);
        const RsPath path = rs_shortest(start, goal, rho);

        CHECK(pose_close(rs_pose_at(start, path, rho, 0.0), start, 1e-9));
        CHECK(pose_close(rs_pose_at(start, path, rho, path.total_length), goal, 1e-7));
        CHECK(pose_close(rs_pose_at(start, path, rho, path.total_length + 5.0), goal, 1e-7));
    }
}

TEST_CASE("path sampling obeys the speed and curvature budget") {
    std::mt19937_64 rng(38);
    for (int trial = 0; trial < 100; ++trial) {
        const Pose start{uniform(rng, -5.0, 5.0), uniform(rng, -5.0, 5.0),
                         uniform(rng, 0.0, 2.0 * M_PI)};
        const Pose goal{uniform(rng, -5.0, 5.0), uniform(rng, -5.0, 5.0),
                        uniform(rng, 0.0, 2.0 * M_PI)};
        const double rho = uniform(rng, 0.4, 2.0);
        const RsPath path = rs_shortest(start, goal, rho);
        if (path.total_length == 0.0) continue;

        const int n = 400;
        const double ds = path.total_length / n;
        Pose prev = rs_pose_at(start, path, rho, 0.0);
        for (int i = 1; i <= n; ++i) {
            const Pose cur = rs_pose_at(start, path, rho, i * ds);
            CHECK(std::hypot(cur.x - prev.x, cur.y - prev.y) <= ds + 1e-9);
            CHECK(std::abs(wrap_angle_diff(cur.theta - prev.theta)) <= ds / rho + 1e-9);
            prev = cur;
        }
    }
}

TEST_CASE("non-positive turning radius is rejected") {
    CHECK_THROWS_AS(rs_shortest(Pose{}, Pose{1.0, 0.0, 0.0}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(rs_shortest(Pose{}, Pose{1.0, 0.0, 0.0}, -1.0), std::invalid_argument);
}
