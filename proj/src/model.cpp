#include "offroad/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace offroad {

namespace {

void require(bool ok, const char* field, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("VehicleParams.") + field + ": " + what);
}

}  // namespace

void VehicleParams::validate() const {
    require(front_hang > 0.0, "front_hang", "must be positive");
    require(wheelbase > 0.0, "wheelbase", "must be positive");
    require(rear_hang > 0.0, "rear_hang", "must be positive");
    require(body_width > 0.0, "body_width", "must be positive");
    require(max_accel > 0.0, "max_accel", "must be positive (may be infinite)");
    require(max_speed > 0.0 && std::isfinite(max_speed), "max_speed", "must be positive and finite");
    require(max_steer > 0.0, "max_steer", "must be positive");
    require(max_steer < M_PI / 2.0, "max_steer", "must be below pi/2");
    require(max_steer_rate > 0.0 && std::isfinite(max_steer_rate), "max_steer_rate",
            "must be positive and finite");
}

DiscGeometry DiscGeometry::from_params(const VehicleParams& p) {
    DiscGeometry g;
    g.front_offset = (3.0 * p.wheelbase + 3.0 * p.front_hang - p.rear_hang) / 4.0;
    g.rear_offset = (p.wheelbase + p.front_hang - 3.0 * p.rear_hang) / 4.0;
    const double half_length = (p.rear_hang + p.wheelbase + p.front_hang) / 2.0;
    g.radius = 0.5 * std::sqrt(half_length * half_length + p.body_width * p.body_width);
    return g;
}

StateDerivative kinematics_rhs(const State& s, const Control& u, const VehicleParams& p) {
    StateDerivative d;
    d.x_dot = s.v * std::cos(s.theta);
    d.y_dot = s.v * std::sin(s.theta);
    d.v_dot = u.a;
    d.phi_dot = u.omega;
    d.theta_dot = s.v * std::tan(s.phi) / p.wheelbase;
    return d;
}

State euler_step(const State& s, const Control& u, double h, const VehicleParams& p) {
    const StateDerivative d = kinematics_rhs(s, u, p);
    State next;
    next.x = s.x + h * d.x_dot;
    next.y = s.y + h * d.y_dot;
    next.v = s.v + h * d.v_dot;
    next.phi = s.phi + h * d.phi_dot;
    next.theta = s.theta + h * d.theta_dot;
    return next;
}

std::pair<Vec2, Vec2> disc_centers(const Pose& pose, const DiscGeometry& g) {
    const double c = std::cos(pose.theta);
    const double s = std::sin(pose.theta);
    const Vec2 front{pose.x + g.front_offset * c, pose.y + g.front_offset * s};
    const Vec2 rear{pose.x + g.rear_offset * c, pose.y + g.rear_offset * s};
    return {front, rear};
}

std::array<Vec2, 4> footprint_vertices(const Pose& pose, const VehicleParams& p) {
    const double c = std::cos(pose.theta);
    const double s = std::sin(pose.theta);
    const double lon_min = -p.rear_hang;
    const double lon_max = p.wheelbase + p.front_hang;
    const double half_w = p.body_width / 2.0;

    auto to_world = [&](double lon, double lat) -> Vec2 {
        return {pose.x + lon * c - lat * s, pose.y + lon * s + lat * c};
    };
    return {to_world(lon_min, -half_w), to_world(lon_max, -half_w), to_world(lon_max, half_w),
            to_world(lon_min, half_w)};
}

}  // namespace offroad
