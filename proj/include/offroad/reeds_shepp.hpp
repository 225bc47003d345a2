#pragma once

#include <vector>

#include "offroad/model.hpp"

namespace offroad {

enum class RsSegmentType { left, straight, right };

// One piece of a Reeds-Shepp word. Length is in meters and signed: negative
// means the piece is driven in reverse.
struct RsSegment {
    RsSegmentType type = RsSegmentType::straight;
    double length = 0.0;

    bool forward() const { return length >= 0.0; }
};

struct RsPath {
    std::vector<RsSegment> segments;
    double total_length = 0.0;  // sum of unsigned segment lengths [m]
};

// Shortest Reeds-Shepp connection over all canonical word families (CSC,
// CCC, CCCC, CCSC, CCSCC with timeflips, reflections and reversals).
// Zero-length pieces are dropped, so coincident poses yield an empty list.
// Throws std::invalid_argument when rho_min is not positive.
RsPath rs_shortest(const Pose& start, const Pose& goal, double rho_min);

// Pose reached after driving the first `s` meters of the path from `start`;
// s is clamped to [0, total_length].
Pose rs_pose_at(const Pose& start, const RsPath& path, double rho_min, double s);

}  // namespace offroad
