#include "offroad/tunnel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace offroad {

void TunnelConfig::validate() const {
    if (n_rects < 0) throw std::invalid_argument("TunnelConfig.n_rects");
    if (!(delta_s > 0.0)) throw std::invalid_argument("TunnelConfig.delta_s");
    if (!(max_expansion >= delta_s)) throw std::invalid_argument("TunnelConfig.max_expansion");
}

const char* to_string(TunnelStatus status) {
    switch (status) {
        case TunnelStatus::success: return "success";
        case TunnelStatus::degenerate_rectangle: return "degenerate_rectangle";
        case TunnelStatus::skeleton_escaped: return "skeleton_escaped";
    }
    return "unknown";
}

int resolve_n_rects(const TunnelConfig& cfg, double t_f_bar, int grid_count) {
    if (cfg.n_rects > 0) return cfg.n_rects;
    const int want = std::clamp(static_cast<int>(std::ceil(t_f_bar / 1.0)), 2, grid_count);
    for (int n = want; n >= 1; --n) {
        if (grid_count % n == 0) return n;
    }
    return 1;
}

std::vector<Vec2> sample_representative_points(const std::vector<Vec2>& trace, int n_rects) {
    if (trace.empty()) throw std::invalid_argument("sample_representative_points: empty trace");
    if (n_rects < 1) throw std::invalid_argument("sample_representative_points: n_rects < 1");
    std::vector<Vec2> points(n_rects + 1);
    if (trace.size() == 1) {
        std::fill(points.begin(), points.end(), trace.front());
        return points;
    }
    const double last = static_cast<double>(trace.size() - 1);
    for (int i = 0; i <= n_rects; ++i) {
        const double pos = last * i / n_rects;
        const auto j = std::min(static_cast<std::size_t>(pos), trace.size() - 2);
        const double frac = pos - static_cast<double>(j);
        points[i] = trace[j] + frac * (trace[j + 1] - trace[j]);
    }
    return points;
}

namespace {

std::array<Vec2, 4> extent_vertices(Vec2 a, Vec2 b, Vec2 u, Vec2 n, const double e[4]) {
    const Vec2 tail = a - e[1] * u;  // behind
    const Vec2 head = b + e[0] * u;  // ahead
    return {tail - e[3] * n, head - e[3] * n, head + e[2] * n, tail + e[2] * n};
}

}  // namespace

RectExpansion expand_rectangle(Vec2 a, Vec2 b, const ObstacleMap& map, double r_c,
                               const TunnelConfig& cfg, double fallback_heading) {
    cfg.validate();
    const double seg_len = distance(a, b);
    Vec2 u;
    if (seg_len > 0.0) {
        u = (1.0 / seg_len) * (b - a);
    } else {
        u = {std::cos(fallback_heading), std::sin(fallback_heading)};
    }
    const Vec2 n = perp(u);

    RectExpansion out;
    const int cap = static_cast<int>(std::floor(cfg.max_expansion / cfg.delta_s + 1e-9));
    bool alive[4] = {true, true, true, true};
    while (alive[0] || alive[1] || alive[2] || alive[3]) {
        for (int d = 0; d < 4; ++d) {
            if (!alive[d]) continue;
            if (out.steps[d] >= cap) {
                alive[d] = false;
                continue;
            }
            double trial[4] = {out.steps[0] * cfg.delta_s, out.steps[1] * cfg.delta_s,
                               out.steps[2] * cfg.delta_s, out.steps[3] * cfg.delta_s};
            trial[d] += cfg.delta_s;
            const auto verts = extent_vertices(a, b, u, n, trial);
            if (rect_clear(std::span<const Vec2, 4>(verts), map, r_c)) {
                ++out.steps[d];
            } else {
                alive[d] = false;
            }
        }
    }

    const double width = (out.steps[2] + out.steps[3]) * cfg.delta_s;
    const double length = seg_len + (out.steps[0] + out.steps[1]) * cfg.delta_s;
    out.degenerate = width == 0.0 || length == 0.0;
    if (!out.degenerate) {
        const double e[4] = {out.steps[0] * cfg.delta_s, out.steps[1] * cfg.delta_s,
                             out.steps[2] * cfg.delta_s, out.steps[3] * cfg.delta_s};
        out.rect = Rect::from_vertices(extent_vertices(a, b, u, n, e));
    }
    return out;
}

namespace {

// Interpolated heading of the reference at normalized time pos in [0, 1].
double heading_at(const ReferenceTrajectory& ref, double pos) {
    if (ref.samples.size() == 1) return ref.samples.front().state.theta;
    const double fpos = pos * static_cast<double>(ref.samples.size() - 1);
    const auto j = std::min(static_cast<std::size_t>(fpos), ref.samples.size() - 2);
    const double frac = fpos - static_cast<double>(j);
    return ref.samples[j].state.theta +
           frac * (ref.samples[j + 1].state.theta - ref.samples[j].state.theta);
}

bool contains_with_slack(const Rect& r, Vec2 p) {
    for (const HalfspaceCoeffs& h : r.halfspaces) {
        const double scale = std::abs(h.a) + std::abs(h.b) + 1.0;
        if (h.eval(p) > 1e-9 * scale) return false;
    }
    return true;
}

}  // namespace

TunnelResult build_tunnels(const ReferenceTrajectory& ref, const ObstacleMap& map,
                           const DiscGeometry& g, const TunnelConfig& cfg, int grid_count) {
    cfg.validate();
    if (ref.traj_f.empty() || ref.traj_r.empty()) {
        throw std::invalid_argument("build_tunnels: reference has no disc traces");
    }

    TunnelResult result;
    TunnelSet& set = result.tunnels;
    set.n_rects = resolve_n_rects(cfg, ref.t_f_bar, grid_count);

    const auto points_f = sample_representative_points(ref.traj_f, set.n_rects);
    const auto points_r = sample_representative_points(ref.traj_r, set.n_rects);

    for (int trace = 0; trace < 2; ++trace) {
        const auto& points = trace == 0 ? points_f : points_r;
        auto& rects = trace == 0 ? set.rects_f : set.rects_r;
        rects.reserve(set.n_rects);
        for (int i = 0; i < set.n_rects; ++i) {
            const double mid = (i + 0.5) / set.n_rects;
            RectExpansion exp =
                expand_rectangle(points[i], points[i + 1], map, g.radius, cfg,
                                 heading_at(ref, mid));
            if (exp.degenerate) {
                result.status = TunnelStatus::degenerate_rectangle;
                return result;
            }
            if (!contains_with_slack(exp.rect, points[i]) ||
                !contains_with_slack(exp.rect, points[i + 1])) {
                result.status = TunnelStatus::skeleton_escaped;
                return result;
            }
            rects.push_back(std::move(exp));
        }
    }

    result.status = TunnelStatus::success;
    return result;
}

}  // namespace offroad
