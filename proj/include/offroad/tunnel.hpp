#pragma once

#include <array>
#include <vector>

#include "offroad/geometry.hpp"
#include "offroad/reference.hpp"

namespace offroad {

struct TunnelConfig {
    int n_rects = 0;            // rectangles per disc trace; 0 = pick automatically
    double delta_s = 0.1;       // expansion increment [m]
    double max_expansion = 4.0; // per-direction extent cap [m]

    // Throws std::invalid_argument naming the offending field.
    void validate() const;
};

// cfg.n_rects when set; otherwise the largest divisor of grid_count that is
// <= clamp(ceil(t_f_bar / 1 s), 2, grid_count), so rectangle intervals align
// exactly with the transcription nodes.
int resolve_n_rects(const TunnelConfig& cfg, double t_f_bar, int grid_count);

// Obstacle-free rectangle grown around a skeleton segment. Extents are
// stored as integer multiples of delta_s in the order ahead, behind, left,
// right. `rect` is only valid when the expansion is not degenerate.
struct RectExpansion {
    std::array<int, 4> steps{};
    bool degenerate = true;
    Rect rect;
};

// Grows the rectangle from the zero-width skeleton (a, b), one delta_s trial
// per direction in round-robin order (ahead, behind, left, right). A
// direction dies permanently at its first rejected trial; extents never pass
// cfg.max_expansion. Coincident endpoints take fallback_heading as the axis.
RectExpansion expand_rectangle(Vec2 a, Vec2 b, const ObstacleMap& map, double r_c,
                               const TunnelConfig& cfg, double fallback_heading);

// Evenly time-spaced skeleton points of a uniformly sampled trace.
std::vector<Vec2> sample_representative_points(const std::vector<Vec2>& trace, int n_rects);

enum class TunnelStatus { success, degenerate_rectangle, skeleton_escaped };

const char* to_string(TunnelStatus status);

struct TunnelSet {
    int n_rects = 0;
    std::vector<RectExpansion> rects_f;
    std::vector<RectExpansion> rects_r;
};

struct TunnelResult {
    TunnelStatus status = TunnelStatus::degenerate_rectangle;
    TunnelSet tunnels;

    bool ok() const { return status == TunnelStatus::success; }
};

// Builds the 2 * n_rects representative rectangles around the disc-center
// traces. grid_count is the transcription node count used when cfg.n_rects
// is automatic. Fails when a rectangle collapses or loses a skeleton
// endpoint.
TunnelResult build_tunnels(const ReferenceTrajectory& ref, const ObstacleMap& map,
                           const DiscGeometry& g, const TunnelConfig& cfg, int grid_count);

}  // namespace offroad
