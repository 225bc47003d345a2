#pragma once

#include <cmath>
#include <vector>

#include "offroad/geometry.hpp"
#include "offroad/model.hpp"

namespace offroad {

enum class Direction { forward, reverse };

// Pose sample along the searched path. `direction` is the driving direction
// of the motion that arrives at this waypoint; the first waypoint copies the
// direction of the first motion.
struct Waypoint {
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;
    Direction direction = Direction::forward;

    Pose pose() const { return {x, y, theta}; }
};

struct SearchConfig {
    double xy_resolution = 0.5;        // grid cell edge [m]
    int heading_bins = 24;             // orientation buckets over [0, 2*pi)
    double primitive_arc_length = 0.0; // 0 selects xy_resolution * sqrt(2)
    int steering_samples = 3;          // steering values per direction
    double reverse_penalty = 2.0;      // cost factor on reverse arc length
    double switch_penalty = 2.0;       // flat cost per direction change
    double steering_penalty = 0.1;     // cost factor on |steer| * arc length
    int rs_shot_period = 5;            // expansions between analytic shots
    int node_budget = 200000;          // max expansions before giving up
    // Extra disc clearance enforced by the search beyond the covering radius.
    // Keeping this above one corridor expansion step (0.1 m) plus the sampling
    // and interpolation slack guarantees the corridor builder can always grow
    // its first rectangle off the reference, so a found path never yields a
    // degenerate corridor downstream.
    double collision_margin = 0.12;
    double domain_padding = 16.0;      // roaming room outside map bounds [m]

    double arc_length() const {
        return primitive_arc_length > 0.0 ? primitive_arc_length
                                          : xy_resolution * std::sqrt(2.0);
    }

    // Throws std::invalid_argument naming the offending field.
    void validate() const;
};

enum class SearchStatus {
    success,
    start_in_collision,
    goal_in_collision,
    no_route,
    budget_exhausted,
};

const char* to_string(SearchStatus status);

struct SearchResult {
    SearchStatus status = SearchStatus::no_route;
    std::vector<Waypoint> path;
    int expansions = 0;

    bool ok() const { return status == SearchStatus::success; }
};

// Hybrid A* over (x, y, theta) with forward/reverse arc primitives and
// analytic goal connection. One query per instance at a time; separate
// instances are independent.
class HybridAStar {
  public:
    HybridAStar(const ObstacleMap& map, const VehicleParams& params, SearchConfig cfg = {});

    // Plans from start to goal. The returned path starts exactly at `start`
    // and, on success, ends exactly at `goal`. Throws std::invalid_argument
    // when a pose lies outside the padded map domain.
    SearchResult plan(const Pose& start, const Pose& goal);

  private:
    const ObstacleMap& map_;
    VehicleParams params_;
    DiscGeometry disc_;
    SearchConfig cfg_;
};

SearchResult plan_path(const Pose& start, const Pose& goal, const ObstacleMap& map,
                       const VehicleParams& params, const SearchConfig& cfg = {});

}  // namespace offroad
