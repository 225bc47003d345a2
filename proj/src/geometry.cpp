#include "offroad/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace offroad {

HalfspaceCoeffs line_coeffs(Vec2 p1, Vec2 p2) {
    if (p1.x == p2.x && p1.y == p2.y) {
        throw std::invalid_argument("line_coeffs: degenerate segment (p1 == p2)");
    }
    return {p2.y - p1.y, p1.x - p2.x, p2.x * p1.y - p1.x * p2.y};
}

double oriented_g(Vec2 s, const HalfspaceCoeffs& line, Vec2 g) {
    const double at_g = line.eval(g);
    if (at_g == 0.0) {
        throw std::invalid_argument("oriented_g: reference point lies on the line");
    }
    const double at_s = line.eval(s);
    return at_g < 0.0 ? at_s : -at_s;
}

Rect Rect::from_vertices(const std::array<Vec2, 4>& vertices) {
    Rect r;
    r.vertices = vertices;
    r.center = 0.25 * (vertices[0] + vertices[1] + vertices[2] + vertices[3]);
    double twice_area = 0.0;
    for (int i = 0; i < 4; ++i) twice_area += cross(vertices[i], vertices[(i + 1) % 4]);
    if (twice_area <= 0.0) {
        throw std::invalid_argument("Rect: vertices are not convex counter-clockwise");
    }
    for (int i = 0; i < 4; ++i) {
        const Vec2 p1 = vertices[i];
        const Vec2 p2 = vertices[(i + 1) % 4];
        HalfspaceCoeffs line = line_coeffs(p1, p2);  // throws on repeated vertices
        const double at_center = line.eval(r.center);
        if (at_center == 0.0) {
            throw std::invalid_argument("Rect: center lies on an edge line (degenerate quad)");
        }
        if (at_center > 0.0) {
            line = {-line.a, -line.b, -line.c};
        }
        r.halfspaces[i] = line;
    }
    // CCW convexity: every corner must be on the inner side of each edge.
    for (const HalfspaceCoeffs& h : r.halfspaces) {
        for (const Vec2& v : vertices) {
            if (h.eval(v) > 1e-9 * (std::abs(h.a) + std::abs(h.b) + 1.0)) {
                throw std::invalid_argument("Rect: vertices are not convex counter-clockwise");
            }
        }
    }
    return r;
}

bool rect_contains(Vec2 s, const Rect& r) {
    for (const HalfspaceCoeffs& h : r.halfspaces) {
        if (h.eval(s) > 0.0) return false;
    }
    return true;
}

namespace {

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 ab = b - a;
    const double len2 = squared_norm(ab);
    if (len2 == 0.0) return distance(p, a);
    const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return distance(p, a + t * ab);
}

bool inside_convex_ccw(Vec2 p, std::span<const Vec2, 4> v) {
    for (int i = 0; i < 4; ++i) {
        const Vec2 a = v[i];
        const Vec2 b = v[(i + 1) % 4];
        if (cross(b - a, p - a) < 0.0) return false;
    }
    return true;
}

}  // namespace

double point_rect_distance(Vec2 s, std::span<const Vec2, 4> vertices) {
    if (inside_convex_ccw(s, vertices)) return 0.0;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 4; ++i) {
        best = std::min(best, point_segment_distance(s, vertices[i], vertices[(i + 1) % 4]));
    }
    return best;
}

double point_rect_distance(Vec2 s, const Rect& r) {
    return point_rect_distance(s, std::span<const Vec2, 4>(r.vertices));
}

ObstacleMap::ObstacleMap(std::vector<Vec2> points, AxisAlignedBounds bounds, double cell_size)
    : points_(std::move(points)), bounds_(bounds), cell_size_(cell_size) {
    if (bounds_.x_max < bounds_.x_min || bounds_.y_max < bounds_.y_min) {
        throw std::invalid_argument("ObstacleMap: inverted bounds");
    }
    if (!(cell_size_ > 0.0)) {
        throw std::invalid_argument("ObstacleMap: cell_size must be positive");
    }
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (!bounds_.contains(points_[i])) {
            throw std::invalid_argument("ObstacleMap: obstacle point " + std::to_string(i) +
                                        " lies outside bounds");
        }
        cells_[cell_key(points_[i].x, points_[i].y)].push_back(static_cast<std::uint32_t>(i));
    }
}

std::int64_t ObstacleMap::cell_key(double x, double y) const {
    const auto ix = static_cast<std::int64_t>(std::floor(x / cell_size_));
    const auto iy = static_cast<std::int64_t>(std::floor(y / cell_size_));
    return (ix << 32) ^ (iy & 0xFFFFFFFFll);
}

bool ObstacleMap::any_within(Vec2 center, double radius) const {
    if (points_.empty()) return false;
    const double r2 = radius * radius;
    const auto ix0 = static_cast<std::int64_t>(std::floor((center.x - radius) / cell_size_));
    const auto ix1 = static_cast<std::int64_t>(std::floor((center.x + radius) / cell_size_));
    const auto iy0 = static_cast<std::int64_t>(std::floor((center.y - radius) / cell_size_));
    const auto iy1 = static_cast<std::int64_t>(std::floor((center.y + radius) / cell_size_));
    for (std::int64_t ix = ix0; ix <= ix1; ++ix) {
        for (std::int64_t iy = iy0; iy <= iy1; ++iy) {
            const auto it = cells_.find((ix << 32) ^ (iy & 0xFFFFFFFFll));
            if (it == cells_.end()) continue;
            for (const std::uint32_t idx : it->second) {
                if (squared_norm(points_[idx] - center) < r2) return true;
            }
        }
    }
    return false;
}

void ObstacleMap::collect_in_box(const AxisAlignedBounds& box, double margin,
                                 std::vector<std::size_t>& out) const {
    out.clear();
    if (points_.empty()) return;
    const auto ix0 = static_cast<std::int64_t>(std::floor((box.x_min - margin) / cell_size_));
    const auto ix1 = static_cast<std::int64_t>(std::floor((box.x_max + margin) / cell_size_));
    const auto iy0 = static_cast<std::int64_t>(std::floor((box.y_min - margin) / cell_size_));
    const auto iy1 = static_cast<std::int64_t>(std::floor((box.y_max + margin) / cell_size_));
    const double x_lo = box.x_min - margin;
    const double x_hi = box.x_max + margin;
    const double y_lo = box.y_min - margin;
    const double y_hi = box.y_max + margin;
    for (std::int64_t ix = ix0; ix <= ix1; ++ix) {
        for (std::int64_t iy = iy0; iy <= iy1; ++iy) {
            const auto it = cells_.find((ix << 32) ^ (iy & 0xFFFFFFFFll));
            if (it == cells_.end()) continue;
            for (const std::uint32_t idx : it->second) {
                const Vec2 p = points_[idx];
                if (p.x >= x_lo && p.x <= x_hi && p.y >= y_lo && p.y <= y_hi)
                    out.push_back(idx);
            }
        }
    }
}

bool pose_collision_free(const Pose& pose, const DiscGeometry& g, const ObstacleMap& map) {
    const auto [front, rear] = disc_centers(pose, g);
    return !map.any_within(front, g.radius) && !map.any_within(rear, g.radius);
}

bool rect_clear(std::span<const Vec2, 4> vertices, const ObstacleMap& map, double clearance) {
    if (map.empty()) return true;
    AxisAlignedBounds box{vertices[0].x, vertices[0].y, vertices[0].x, vertices[0].y};
    for (const Vec2& v : vertices) {
        box.x_min = std::min(box.x_min, v.x);
        box.x_max = std::max(box.x_max, v.x);
        box.y_min = std::min(box.y_min, v.y);
        box.y_max = std::max(box.y_max, v.y);
    }
    static thread_local std::vector<std::size_t> nearby;
    map.collect_in_box(box, clearance, nearby);
    for (const std::size_t idx : nearby) {
        if (point_rect_distance(map.points()[idx], vertices) < clearance) return false;
    }
    return true;
}

bool rect_clear(const Rect& r, const ObstacleMap& map, double clearance) {
    return rect_clear(std::span<const Vec2, 4>(r.vertices), map, clearance);
}

}  // namespace offroad
