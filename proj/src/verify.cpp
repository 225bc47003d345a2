#include "offroad/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "offroad/vec2.hpp"

namespace offroad {

namespace {

// Normalized signed distance to a halfspace boundary; positive = outside.
double halfspace_margin(const HalfspaceCoeffs& h, Vec2 p) {
    return h.eval(p) / std::hypot(h.a, h.b);
}

}  // namespace

VerificationReport verify(const NlpSolution& sol, const Scenario& scenario,
                          const TunnelSet& tunnels, const DiscGeometry& g,
                          const VerificationTolerances& tol) {
    const int ne = static_cast<int>(sol.controls.size());
    if (sol.states.size() != static_cast<std::size_t>(ne + 1) || ne < 1) {
        throw std::invalid_argument("verify: solution grids are incomplete");
    }
    if (tunnels.n_rects < 1 || ne % tunnels.n_rects != 0) {
        throw std::invalid_argument("verify: tunnel count does not divide the grid");
    }

    VerificationReport rep;
    const VehicleParams& p = scenario.vehicle;

    double clearance = std::numeric_limits<double>::infinity();
    for (const State& s : sol.states) {
        const auto [front, rear] = disc_centers(s.pose(), g);
        for (const Vec2& obs : scenario.obstacles) {
            clearance = std::min(clearance, distance(front, obs) - g.radius);
            clearance = std::min(clearance, distance(rear, obs) - g.radius);
        }
    }
    rep.worst_clearance = clearance;
    rep.clearance_ok = clearance >= -tol.clearance;

    double bound = -std::numeric_limits<double>::infinity();
    for (const State& s : sol.states) {
        bound = std::max(bound, std::abs(s.v) - p.max_speed);
        bound = std::max(bound, std::abs(s.phi) - p.max_steer);
    }
    for (const Control& u : sol.controls) {
        if (p.accel_bounded()) bound = std::max(bound, std::abs(u.a) - p.max_accel);
        bound = std::max(bound, std::abs(u.omega) - p.max_steer_rate);
    }
    rep.worst_bound = bound;
    rep.bounds_ok = bound <= tol.bounds;

    const auto endpoint_gap = [](const State& s, const BoundaryState& b) {
        double gap = std::abs(s.x - b.x);
        gap = std::max(gap, std::abs(s.y - b.y));
        gap = std::max(gap, std::abs(wrap_angle_diff(s.theta - b.theta)));
        gap = std::max(gap, std::abs(s.v - b.v));
        return std::max(gap, std::abs(s.phi - b.phi));
    };
    rep.worst_boundary =
        std::max(endpoint_gap(sol.states.front(), scenario.start),
                 endpoint_gap(sol.states.back(), scenario.goal));
    rep.boundary_ok = rep.worst_boundary <= tol.boundary;

    double defect = 0.0;
    const double h = sol.t_f / ne;
    for (int k = 0; k < ne; ++k) {
        const State pred = euler_step(sol.states[k], sol.controls[k], h, p);
        const State& next = sol.states[k + 1];
        defect = std::max(defect, std::abs(next.x - pred.x));
        defect = std::max(defect, std::abs(next.y - pred.y));
        defect = std::max(defect, std::abs(next.theta - pred.theta));
        defect = std::max(defect, std::abs(next.v - pred.v));
        defect = std::max(defect, std::abs(next.phi - pred.phi));
    }
    rep.worst_defect = defect;
    rep.defects_ok = defect <= tol.defect;

    double membership = -std::numeric_limits<double>::infinity();
    const int q = ne / tunnels.n_rects;
    for (int i = 0; i < tunnels.n_rects; ++i) {
        const RectExpansion& rf = tunnels.rects_f[i];
        const RectExpansion& rr = tunnels.rects_r[i];
        if (rf.degenerate || rr.degenerate) {
            throw std::invalid_argument("verify: degenerate tunnel rectangle");
        }
        for (int k = i * q; k <= (i + 1) * q; ++k) {
            const auto [front, rear] = disc_centers(sol.states[k].pose(), g);
            for (int j = 0; j < 4; ++j) {
                membership = std::max(membership, halfspace_margin(rf.rect.halfspaces[j], front));
                membership = std::max(membership, halfspace_margin(rr.rect.halfspaces[j], rear));
            }
        }
    }
    rep.worst_tunnel = membership;
    rep.tunnel_ok = membership <= tol.tunnel;

    return rep;
}

}  // namespace offroad
