#pragma once

#include <vector>

#include "offroad/model.hpp"
#include "offroad/search.hpp"
#include "offroad/vec2.hpp"

namespace offroad {

// Maximal run of waypoints with a single driving direction. Neighboring
// segments share their boundary waypoint (the cusp, where v = 0).
struct PathSegment {
    std::vector<Waypoint> waypoints;
    double arc_length = 0.0;
    Direction direction = Direction::forward;
};

// Throws std::invalid_argument on an empty path.
std::vector<PathSegment> split_at_cusps(const std::vector<Waypoint>& path);

// Closed-form rest-to-rest minimum-time ride over a fixed distance. With
// unbounded acceleration the speed is a boxcar: v_max strictly inside
// (0, duration) and exactly 0 at both ends.
struct MinTimeProfile {
    double duration = 0.0;
    double distance = 0.0;
    double v_max = 0.0;
    double a_max = 0.0;

    // Arc length covered after time t (clamped to [0, duration]).
    double distance_at(double t) const;
    // Unsigned speed at time t; 0 exactly at t <= 0 and t >= duration.
    double speed_at(double t) const;
};

// Throws std::invalid_argument when arc_length < 0 or bounds are invalid.
MinTimeProfile min_time_profile(double arc_length, double v_max, double a_max);

struct ReferenceSample {
    double t = 0.0;
    State state;
    Control control;
};

// Time-parameterized reference on a uniform grid of grid_count+1 samples,
// plus the matching disc-center traces.
struct ReferenceTrajectory {
    double t_f_bar = 0.0;
    double dt = 0.0;
    std::vector<ReferenceSample> samples;
    std::vector<Vec2> traj_f;
    std::vector<Vec2> traj_r;
};

// Attaches the per-segment minimum-time profile to the searched path and
// samples states, finite-difference controls, and disc traces on a uniform
// time grid. A zero-length path yields t_f_bar = 0 and a single sample.
ReferenceTrajectory build_reference(const std::vector<Waypoint>& path, const DiscGeometry& g,
                                    const VehicleParams& p, int grid_count);

}  // namespace offroad
