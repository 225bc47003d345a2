#pragma once

#include <array>
#include <limits>
#include <utility>

#include "offroad/vec2.hpp"

namespace offroad {

// Rear-axle midpoint pose of the vehicle.
struct Pose {
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;
};

// Shape and bound parameters of the vehicle. Defaults match the small AGV
// this project was tuned for; acceleration is unbounded by default and every
// consumer must skip the corresponding constraint in that case.
struct VehicleParams {
    double front_hang = 0.55;   // L_F [m]
    double wheelbase = 0.85;    // L_W [m]
    double rear_hang = 0.40;    // L_R [m]
    double body_width = 0.80;   // L_B [m]

    double max_accel = std::numeric_limits<double>::infinity();  // [m/s^2]
    double max_speed = 1.0;                                      // [m/s]
    double max_steer = 0.30;                                     // [rad]
    double max_steer_rate = 0.5;                                 // [rad/s]

    bool accel_bounded() const { return std::isfinite(max_accel); }
    double min_turn_radius() const { return wheelbase / std::tan(max_steer); }

    // Throws std::invalid_argument naming the offending field.
    void validate() const;
};

// Rear-axle state. theta is not normalized; it accumulates across turns.
struct State {
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;
    double v = 0.0;
    double phi = 0.0;

    Pose pose() const { return {x, y, theta}; }
};

struct Control {
    double a = 0.0;      // acceleration [m/s^2]
    double omega = 0.0;  // steering rate [rad/s]
};

// Time derivative of the state, stacked as (x_dot, y_dot, v_dot, phi_dot,
// theta_dot).
struct StateDerivative {
    double x_dot = 0.0;
    double y_dot = 0.0;
    double v_dot = 0.0;
    double phi_dot = 0.0;
    double theta_dot = 0.0;
};

// Two congruent discs covering the rectangular body, centered at quartile
// points of the principal axis. Offsets are signed distances from the
// rear-axle midpoint along the heading.
struct DiscGeometry {
    double front_offset = 0.0;  // [m]
    double rear_offset = 0.0;   // [m]
    double radius = 0.0;        // R_c [m]

    static DiscGeometry from_params(const VehicleParams& p);
};

// Full configuration at a trajectory endpoint.
struct BoundaryState {
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;
    double v = 0.0;
    double phi = 0.0;
    double a = 0.0;
    double omega = 0.0;

    Pose pose() const { return {x, y, theta}; }
};

// Kinematic bicycle model right-hand side.
StateDerivative kinematics_rhs(const State& s, const Control& u, const VehicleParams& p);

// One explicit Euler step of length h.
State euler_step(const State& s, const Control& u, double h, const VehicleParams& p);

// Centers of the front and rear covering discs at a pose.
std::pair<Vec2, Vec2> disc_centers(const Pose& pose, const DiscGeometry& g);

// Body rectangle corners, counter-clockwise starting at the rear-right one.
std::array<Vec2, 4> footprint_vertices(const Pose& pose, const VehicleParams& p);

}  // namespace offroad
