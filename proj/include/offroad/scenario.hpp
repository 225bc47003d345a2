#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "offroad/geometry.hpp"
#include "offroad/model.hpp"
#include "offroad/nlp.hpp"
#include "offroad/search.hpp"
#include "offroad/tunnel.hpp"
#include "offroad/vec2.hpp"

namespace offroad {

// Complete problem instance: vehicle, map, boundary conditions and the
// per-stage configuration blocks. Obstacles are stored as raw points; the
// spatial index is built on demand so setup cost lands in pipeline timing.
struct Scenario {
    VehicleParams vehicle;
    AxisAlignedBounds bounds{0.0, 0.0, 80.0, 80.0};
    std::vector<Vec2> obstacles;
    BoundaryState start;
    BoundaryState goal;
    SearchConfig search;
    TunnelConfig tunnel;
    NlpOptions nlp;

    ObstacleMap build_map(double cell_size = 1.0) const;
    void validate() const;
};

// JSON document with top-level keys vehicle, bounds, obstacles, start, goal,
// search, tunnel, nlp. Missing keys take the defaults above; unknown keys
// are rejected by name. Infinite values (max_accel) round-trip as "inf".
Scenario scenario_from_json(const std::string& text);
std::string scenario_to_json(const Scenario& sc);

Scenario load_scenario(const std::filesystem::path& path);
void save_scenario(const Scenario& sc, const std::filesystem::path& path);

struct GenConfig {
    double map_size = 80.0;  // square map side (m)
    double max_goal_distance = 10.0;
    int min_obstacles = 10;
    int max_obstacles = 100;
};

// Deterministic benchmark-protocol case: start uniform in the map, goal at
// uniform distance (0, max_goal_distance] and uniform bearing (redrawn until
// it lands inside the map), headings uniform on [0, 2pi), obstacle count
// uniform on [min, max], obstacle points i.i.d. uniform, rest-to-rest.
Scenario random_case(std::uint64_t seed, const GenConfig& cfg = {});

}  // namespace offroad
