#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "offroad/model.hpp"
#include "offroad/vec2.hpp"

namespace offroad {

// Line a*x + b*y + c = 0. When stored inside a Rect the sign is fixed so
// that the rectangle interior gives a negative value.
struct HalfspaceCoeffs {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;

    double eval(Vec2 p) const { return a * p.x + b * p.y + c; }
};

// Coefficients of the line through p1 and p2 (a = y2-y1, b = x1-x2,
// c = x2*y1 - x1*y2). Throws std::invalid_argument on a degenerate segment.
HalfspaceCoeffs line_coeffs(Vec2 p1, Vec2 p2);

// Value of the line at s, sign-flipped so that a negative result means s is
// strictly on the same side as the reference point g. Throws
// std::invalid_argument when g lies on the line (malformed rectangle).
double oriented_g(Vec2 s, const HalfspaceCoeffs& line, Vec2 g);

struct AxisAlignedBounds {
    double x_min = 0.0;
    double y_min = 0.0;
    double x_max = 0.0;
    double y_max = 0.0;

    bool contains(Vec2 p) const {
        return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
    }
    double width() const { return x_max - x_min; }
    double height() const { return y_max - y_min; }
};

// Convex quadrilateral with counter-clockwise vertices. Halfspaces are
// oriented so the interior is where all four evaluate negative.
struct Rect {
    std::array<Vec2, 4> vertices{};
    Vec2 center{};
    std::array<HalfspaceCoeffs, 4> halfspaces{};

    // Builds center and oriented halfspaces from CCW vertices. Throws
    // std::invalid_argument if the quad is degenerate or not CCW-convex.
    static Rect from_vertices(const std::array<Vec2, 4>& vertices);
};

bool rect_contains(Vec2 s, const Rect& r);

// Exact distance from a point to a closed quadrilateral (0 when inside).
// Works for degenerate (zero-width) vertex sets as well.
double point_rect_distance(Vec2 s, std::span<const Vec2, 4> vertices);
double point_rect_distance(Vec2 s, const Rect& r);

// Immutable obstacle point set with a uniform spatial hash for radius and
// box queries. Cell size should be on the order of the query radius.
class ObstacleMap {
  public:
    ObstacleMap() = default;

    // Throws std::invalid_argument if a point falls outside bounds.
    ObstacleMap(std::vector<Vec2> points, AxisAlignedBounds bounds, double cell_size = 1.0);

    const std::vector<Vec2>& points() const { return points_; }
    const AxisAlignedBounds& bounds() const { return bounds_; }
    std::size_t size() const { return points_.size(); }
    bool empty() const { return points_.empty(); }

    // True if any obstacle point lies strictly within `radius` of `center`.
    bool any_within(Vec2 center, double radius) const;

    // Indices of points inside the axis-aligned box, inflated by `margin`.
    void collect_in_box(const AxisAlignedBounds& box, double margin,
                        std::vector<std::size_t>& out) const;

  private:
    std::int64_t cell_key(double x, double y) const;

    std::vector<Vec2> points_;
    AxisAlignedBounds bounds_{};
    double cell_size_ = 1.0;
    std::unordered_map<std::int64_t, std::vector<std::uint32_t>> cells_;
};

// True when both covering-disc centers keep at least R_c from every obstacle.
bool pose_collision_free(const Pose& pose, const DiscGeometry& g, const ObstacleMap& map);

// True when every obstacle point keeps at least `clearance` from the closed
// rectangle, i.e. no dilated obstacle disc intersects it.
bool rect_clear(std::span<const Vec2, 4> vertices, const ObstacleMap& map, double clearance);
bool rect_clear(const Rect& r, const ObstacleMap& map, double clearance);

}  // namespace offroad
