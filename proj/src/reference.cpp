#include "offroad/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace offroad {

std::vector<PathSegment> split_at_cusps(const std::vector<Waypoint>& path) {
    if (path.empty()) {
        throw std::invalid_argument("split_at_cusps: empty path");
    }
    std::vector<PathSegment> segments;
    PathSegment current;
    current.direction = path.front().direction;
    current.waypoints.push_back(path.front());
    for (std::size_t i = 1; i < path.size(); ++i) {
        if (path[i].direction != current.direction) {
            segments.push_back(std::move(current));
            current = PathSegment{};
            current.direction = path[i].direction;
            current.waypoints.push_back(segments.back().waypoints.back());
        }
        current.waypoints.push_back(path[i]);
    }
    segments.push_back(std::move(current));
    for (PathSegment& seg : segments) {
        double len = 0.0;
        for (std::size_t i = 1; i < seg.waypoints.size(); ++i) {
            len += std::hypot(seg.waypoints[i].x - seg.waypoints[i - 1].x,
                              seg.waypoints[i].y - seg.waypoints[i - 1].y);
        }
        seg.arc_length = len;
    }
    return segments;
}

MinTimeProfile min_time_profile(double arc_length, double v_max, double a_max) {
    if (arc_length < 0.0) throw std::invalid_argument("min_time_profile: arc_length < 0");
    if (!(v_max > 0.0)) throw std::invalid_argument("min_time_profile: v_max must be positive");
    if (!(a_max > 0.0)) throw std::invalid_argument("min_time_profile: a_max must be positive");

    MinTimeProfile p;
    p.distance = arc_length;
    p.v_max = v_max;
    p.a_max = a_max;
    if (arc_length == 0.0) {
        p.duration = 0.0;
    } else if (std::isinf(a_max)) {
        p.duration = arc_length / v_max;
    } else if (arc_length >= v_max * v_max / a_max) {
        p.duration = arc_length / v_max + v_max / a_max;
    } else {
        p.duration = 2.0 * std::sqrt(arc_length / a_max);
    }
    return p;
}

double MinTimeProfile::distance_at(double t) const {
    t = std::clamp(t, 0.0, duration);
    if (distance == 0.0 || duration == 0.0) return 0.0;
    if (std::isinf(a_max)) return std::min(v_max * t, distance);
    const double ramp = std::min(v_max / a_max, 0.5 * duration);
    const double peak = a_max * ramp;
    if (t <= ramp) return 0.5 * a_max * t * t;
    if (t <= duration - ramp) return 0.5 * a_max * ramp * ramp + peak * (t - ramp);
    const double r = duration - t;
    return distance - 0.5 * a_max * r * r;
}

double MinTimeProfile::speed_at(double t) const {
    if (t <= 0.0 || t >= duration || distance == 0.0) return 0.0;
    if (std::isinf(a_max)) return v_max;
    const double ramp = std::min(v_max / a_max, 0.5 * duration);
    if (t <= ramp) return a_max * t;
    if (t <= duration - ramp) return a_max * ramp;
    return a_max * (duration - t);
}

namespace {

// Arc-length lookup table over one segment's polyline.
struct SegmentTable {
    const PathSegment* seg = nullptr;
    MinTimeProfile profile;
    double t_start = 0.0;
    std::vector<double> cum;  // prefix arc lengths, cum[0] = 0

    // Pose and local curvature sign data at arc position s from segment start.
    void sample(double s, double wheelbase, double max_steer, State& out) const {
        const auto& wp = seg->waypoints;
        s = std::clamp(s, 0.0, seg->arc_length);
        std::size_t j = std::upper_bound(cum.begin(), cum.end(), s) - cum.begin();
        j = std::min(std::max<std::size_t>(j, 1), wp.size() - 1);
        const double ds = cum[j] - cum[j - 1];
        const double frac = ds > 0.0 ? (s - cum[j - 1]) / ds : 0.0;
        out.x = wp[j - 1].x + frac * (wp[j].x - wp[j - 1].x);
        out.y = wp[j - 1].y + frac * (wp[j].y - wp[j - 1].y);
        out.theta = wp[j - 1].theta + frac * wrap_angle_diff(wp[j].theta - wp[j - 1].theta);

        const double sign = seg->direction == Direction::forward ? 1.0 : -1.0;
        double phi = 0.0;
        if (ds > 0.0) {
            const double dtheta = wrap_angle_diff(wp[j].theta - wp[j - 1].theta);
            phi = std::atan(wheelbase * dtheta / (ds * sign));
        }
        out.phi = std::clamp(phi, -max_steer, max_steer);
    }
};

}  // namespace

ReferenceTrajectory build_reference(const std::vector<Waypoint>& path, const DiscGeometry& g,
                                    const VehicleParams& p, int grid_count) {
    if (path.empty()) throw std::invalid_argument("build_reference: empty path");
    if (grid_count < 1) throw std::invalid_argument("build_reference: grid_count must be >= 1");

    ReferenceTrajectory ref;
    const auto segments = split_at_cusps(path);

    std::vector<SegmentTable> tables(segments.size());
    double t_total = 0.0;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        SegmentTable& tab = tables[i];
        tab.seg = &segments[i];
        tab.profile = min_time_profile(segments[i].arc_length, p.max_speed, p.max_accel);
        tab.t_start = t_total;
        t_total += tab.profile.duration;
        tab.cum.resize(segments[i].waypoints.size(), 0.0);
        for (std::size_t j = 1; j < segments[i].waypoints.size(); ++j) {
            tab.cum[j] = tab.cum[j - 1] +
                         std::hypot(segments[i].waypoints[j].x - segments[i].waypoints[j - 1].x,
                                    segments[i].waypoints[j].y - segments[i].waypoints[j - 1].y);
        }
    }
    ref.t_f_bar = t_total;

    if (t_total == 0.0) {
        ReferenceSample s0;
        s0.state.x = path.front().x;
        s0.state.y = path.front().y;
        s0.state.theta = path.front().theta;
        ref.samples.push_back(s0);
        const auto [front, rear] = disc_centers(s0.state.pose(), g);
        ref.traj_f.push_back(front);
        ref.traj_r.push_back(rear);
        return ref;
    }

    ref.dt = t_total / grid_count;
    ref.samples.resize(grid_count + 1);
    ref.traj_f.resize(grid_count + 1);
    ref.traj_r.resize(grid_count + 1);

    std::size_t seg_idx = 0;
    for (int k = 0; k <= grid_count; ++k) {
        const double t = std::min(k * ref.dt, t_total);
        while (seg_idx + 1 < tables.size() &&
               t > tables[seg_idx].t_start + tables[seg_idx].profile.duration) {
            ++seg_idx;
        }
        const SegmentTable& tab = tables[seg_idx];
        const double t_local = t - tab.t_start;

        ReferenceSample& smp = ref.samples[k];
        smp.t = t;
        tab.sample(tab.profile.distance_at(t_local), p.wheelbase, p.max_steer, smp.state);
        const double sign = tab.seg->direction == Direction::forward ? 1.0 : -1.0;
        smp.state.v = sign * tab.profile.speed_at(t_local);

        const auto [front, rear] = disc_centers(smp.state.pose(), g);
        ref.traj_f[k] = front;
        ref.traj_r[k] = rear;
    }

    for (int k = 0; k < grid_count; ++k) {
        double a = (ref.samples[k + 1].state.v - ref.samples[k].state.v) / ref.dt;
        double omega = (ref.samples[k + 1].state.phi - ref.samples[k].state.phi) / ref.dt;
        if (p.accel_bounded()) a = std::clamp(a, -p.max_accel, p.max_accel);
        omega = std::clamp(omega, -p.max_steer_rate, p.max_steer_rate);
        ref.samples[k].control = {a, omega};
    }
    ref.samples[grid_count].control = ref.samples[grid_count - 1].control;

    return ref;
}

}  // namespace offroad
