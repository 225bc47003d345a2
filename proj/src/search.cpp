#include "offroad/search.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <queue>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "offroad/reeds_shepp.hpp"

namespace offroad {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Goal-backward 8-connected distance field over the padded domain. Cells are
// blocked only when the clearance at the cell center is below an
// under-dilated radius, so an unreachable unblocked cell certifies that no
// collision-free route exists inside the domain.
struct GoalDistanceGrid {
    double x0 = 0.0;
    double y0 = 0.0;
    double res = 1.0;
    int nx = 0;
    int ny = 0;
    std::vector<std::uint8_t> blocked;
    std::vector<double> dist;

    int cell_of(double x, double y) const {
        int ix = static_cast<int>(std::floor((x - x0) / res));
        int iy = static_cast<int>(std::floor((y - y0) / res));
        ix = std::clamp(ix, 0, nx - 1);
        iy = std::clamp(iy, 0, ny - 1);
        return iy * nx + ix;
    }

    void build(const ObstacleMap& map, const AxisAlignedBounds& domain, double resolution,
               double r_eff, Vec2 goal) {
        x0 = domain.x_min;
        y0 = domain.y_min;
        res = resolution;
        nx = std::max(1, static_cast<int>(std::ceil(domain.width() / res)));
        ny = std::max(1, static_cast<int>(std::ceil(domain.height() / res)));
        blocked.assign(static_cast<std::size_t>(nx) * ny, 0);
        dist.assign(static_cast<std::size_t>(nx) * ny, kInf);

        if (r_eff > 0.0 && !map.empty()) {
            for (int iy = 0; iy < ny; ++iy) {
                for (int ix = 0; ix < nx; ++ix) {
                    const Vec2 c{x0 + (ix + 0.5) * res, y0 + (iy + 0.5) * res};
                    if (map.any_within(c, r_eff)) blocked[iy * nx + ix] = 1;
                }
            }
        }

        using Entry = std::pair<double, int>;
        std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
        const int goal_cell = cell_of(goal.x, goal.y);
        if (blocked[goal_cell]) return;
        dist[goal_cell] = 0.0;
        open.emplace(0.0, goal_cell);
        const double diag = res * std::sqrt(2.0);
        while (!open.empty()) {
            const auto [d, c] = open.top();
            open.pop();
            if (d > dist[c]) continue;
            const int cx = c % nx;
            const int cy = c / nx;
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    const int mx = cx + dx;
                    const int my = cy + dy;
                    if (mx < 0 || mx >= nx || my < 0 || my >= ny) continue;
                    const int m = my * nx + mx;
                    if (blocked[m]) continue;
                    const double nd = d + ((dx != 0 && dy != 0) ? diag : res);
                    if (nd < dist[m]) {
                        dist[m] = nd;
                        open.emplace(nd, m);
                    }
                }
            }
        }
    }
};

struct Primitive {
    double delta = 0.0;
    int dir_sign = 1;
};

struct Node {
    Pose pose;
    double g = 0.0;
    double h = 0.0;
    int parent = -1;
    int prim = -1;
    Direction dir = Direction::forward;
};

struct OpenEntry {
    double f = 0.0;
    double h = 0.0;
    std::uint64_t seq = 0;
    int idx = -1;
};

struct OpenLater {
    bool operator()(const OpenEntry& a, const OpenEntry& b) const {
        if (a.f != b.f) return a.f > b.f;
        if (a.h != b.h) return a.h > b.h;
        return a.seq > b.seq;
    }
};

}  // namespace

void SearchConfig::validate() const {
    if (!(xy_resolution > 0.0)) throw std::invalid_argument("SearchConfig.xy_resolution");
    if (heading_bins < 8) throw std::invalid_argument("SearchConfig.heading_bins");
    if (primitive_arc_length < 0.0)
        throw std::invalid_argument("SearchConfig.primitive_arc_length");
    if (steering_samples < 1) throw std::invalid_argument("SearchConfig.steering_samples");
    if (reverse_penalty < 0.0) throw std::invalid_argument("SearchConfig.reverse_penalty");
    if (switch_penalty < 0.0) throw std::invalid_argument("SearchConfig.switch_penalty");
    if (steering_penalty < 0.0) throw std::invalid_argument("SearchConfig.steering_penalty");
    if (rs_shot_period < 1) throw std::invalid_argument("SearchConfig.rs_shot_period");
    if (node_budget < 1) throw std::invalid_argument("SearchConfig.node_budget");
    if (collision_margin < 0.0) throw std::invalid_argument("SearchConfig.collision_margin");
    if (domain_padding < 0.0) throw std::invalid_argument("SearchConfig.domain_padding");
}

const char* to_string(SearchStatus status) {
    switch (status) {
        case SearchStatus::success: return "success";
        case SearchStatus::start_in_collision: return "start_in_collision";
        case SearchStatus::goal_in_collision: return "goal_in_collision";
        case SearchStatus::no_route: return "no_route";
        case SearchStatus::budget_exhausted: return "budget_exhausted";
    }
    return "unknown";
}

HybridAStar::HybridAStar(const ObstacleMap& map, const VehicleParams& params, SearchConfig cfg)
    : map_(map), params_(params), disc_(DiscGeometry::from_params(params)), cfg_(cfg) {
    params_.validate();
    cfg_.validate();
}

SearchResult HybridAStar::plan(const Pose& start, const Pose& goal) {
    const AxisAlignedBounds domain{
        map_.bounds().x_min - cfg_.domain_padding, map_.bounds().y_min - cfg_.domain_padding,
        map_.bounds().x_max + cfg_.domain_padding, map_.bounds().y_max + cfg_.domain_padding};
    if (!domain.contains({start.x, start.y}) || !domain.contains({goal.x, goal.y})) {
        throw std::invalid_argument("HybridAStar::plan: pose outside padded map domain");
    }

    const double check_radius = disc_.radius + cfg_.collision_margin;
    const auto pose_free = [&](const Pose& p) {
        const auto [front, rear] = disc_centers(p, disc_);
        return !map_.any_within(front, check_radius) && !map_.any_within(rear, check_radius);
    };

    SearchResult result;
    if (!pose_free(start)) {
        result.status = SearchStatus::start_in_collision;
        return result;
    }
    if (!pose_free(goal)) {
        result.status = SearchStatus::goal_in_collision;
        return result;
    }

    if (start.x == goal.x && start.y == goal.y &&
        wrap_angle_diff(start.theta - goal.theta) == 0.0) {
        result.status = SearchStatus::success;
        result.path.push_back({start.x, start.y, start.theta, Direction::forward});
        return result;
    }

    // Under-dilation keeps every cell visited by a feasible rear-axle path
    // unblocked, so grid unreachability is a sound infeasibility certificate.
    const double r_eff = std::max(
        disc_.radius - std::min(std::abs(disc_.front_offset), std::abs(disc_.rear_offset)) -
            cfg_.xy_resolution * std::sqrt(2.0) * 0.5,
        0.0);
    GoalDistanceGrid grid;
    grid.build(map_, domain, cfg_.xy_resolution, r_eff, {goal.x, goal.y});

    const double rho = params_.min_turn_radius();
    const double grid_slack = cfg_.xy_resolution * std::sqrt(2.0);
    constexpr double kUnreachable = -1.0;
    const auto heuristic = [&](const Pose& p) {
        const double rs = rs_shortest(p, goal, rho).total_length;
        const int cell = grid.cell_of(p.x, p.y);
        if (grid.blocked[cell]) return rs;
        const double gd = grid.dist[cell];
        if (gd == kInf) return kUnreachable;
        return std::max(rs, std::max(0.0, gd - grid_slack));
    };

    const double h_start = heuristic(start);
    if (h_start == kUnreachable) {
        result.status = SearchStatus::no_route;
        return result;
    }

    std::vector<Primitive> prims;
    prims.reserve(2 * cfg_.steering_samples);
    for (int dir_sign : {1, -1}) {
        for (int j = 0; j < cfg_.steering_samples; ++j) {
            const double delta =
                cfg_.steering_samples == 1
                    ? 0.0
                    : -params_.max_steer +
                          2.0 * params_.max_steer * j / (cfg_.steering_samples - 1);
            prims.push_back({delta, dir_sign});
        }
    }

    const double arc = cfg_.arc_length();
    // Dense enough that the swept discs cannot dip more than ~1 mm below the
    // clearance observed at the sampled poses between consecutive samples.
    const double check_step = std::min(cfg_.xy_resolution, disc_.radius) * 0.125;
    const int n_sub = std::max(1, static_cast<int>(std::ceil(arc / check_step)));
    const double sub = arc / n_sub;

    const double heading_cell = 2.0 * M_PI / cfg_.heading_bins;
    const auto node_key = [&](const Pose& p, Direction d) {
        const int ix = std::clamp(
            static_cast<int>(std::floor((p.x - domain.x_min) / cfg_.xy_resolution)), 0,
            1 << 20);
        const int iy = std::clamp(
            static_cast<int>(std::floor((p.y - domain.y_min) / cfg_.xy_resolution)), 0,
            1 << 20);
        const int it = std::clamp(static_cast<int>(wrap_angle_2pi(p.theta) / heading_cell), 0,
                                  cfg_.heading_bins - 1);
        return ((static_cast<std::int64_t>(ix) << 21 | iy) * cfg_.heading_bins + it) * 2 +
               (d == Direction::reverse ? 1 : 0);
    };

    std::vector<Node> nodes;
    std::unordered_map<std::int64_t, int> best;
    std::unordered_set<std::int64_t> closed;
    std::priority_queue<OpenEntry, std::vector<OpenEntry>, OpenLater> open;
    std::uint64_t seq = 0;

    nodes.push_back({start, 0.0, h_start, -1, -1, Direction::forward});
    best[node_key(start, Direction::forward)] = 0;
    open.push({h_start, h_start, seq++, 0});

    // Walks each primitive of the chain root..leaf again at substep
    // granularity; waypoint poses are bit-identical to the search's.
    const auto reconstruct = [&](int leaf) {
        std::vector<int> chain;
        for (int i = leaf; i >= 0; i = nodes[i].parent) chain.push_back(i);
        std::reverse(chain.begin(), chain.end());

        std::vector<Waypoint> path;
        path.push_back({start.x, start.y, start.theta, Direction::forward});
        for (std::size_t c = 1; c < chain.size(); ++c) {
            const Node& node = nodes[chain[c]];
            const Primitive& prim = prims[node.prim];
            const Direction dir = node.dir;
            Pose p = nodes[chain[c - 1]].pose;
            const double sd = prim.dir_sign * sub;
            const double dth = sd * std::tan(prim.delta) / params_.wheelbase;
            for (int k = 0; k < n_sub; ++k) {
                p.x += sd * std::cos(p.theta);
                p.y += sd * std::sin(p.theta);
                p.theta += dth;
                path.push_back({p.x, p.y, p.theta, dir});
            }
        }
        if (path.size() > 1) path.front().direction = path[1].direction;
        return path;
    };

    // Samples the analytic connection every check_step; all samples must be
    // collision-free and inside the domain. On success appends the samples,
    // snapping the last one onto the goal.
    const auto try_shot = [&](const Pose& from, std::vector<Waypoint>& out) {
        const RsPath rs = rs_shortest(from, goal, rho);
        std::vector<Waypoint> samples;
        Pose p = from;
        for (const RsSegment& seg : rs.segments) {
            const double len = std::abs(seg.length);
            const int n = std::max(1, static_cast<int>(std::ceil(len / check_step)));
            const double d = std::copysign(len / n, seg.length);
            const Direction dir = seg.forward() ? Direction::forward : Direction::reverse;
            for (int k = 0; k < n; ++k) {
                const double t = d / rho;
                const double th = p.theta;
                switch (seg.type) {
                    case RsSegmentType::left:
                        p.x += rho * (std::sin(th + t) - std::sin(th));
                        p.y += rho * (-std::cos(th + t) + std::cos(th));
                        p.theta = th + t;
                        break;
                    case RsSegmentType::right:
                        p.x += rho * (-std::sin(th - t) + std::sin(th));
                        p.y += rho * (std::cos(th - t) - std::cos(th));
                        p.theta = th - t;
                        break;
                    case RsSegmentType::straight:
                        p.x += d * std::cos(th);
                        p.y += d * std::sin(th);
                        break;
                }
                if (!domain.contains({p.x, p.y}) || !pose_free(p)) return false;
                samples.push_back({p.x, p.y, p.theta, dir});
            }
        }
        if (!samples.empty()) {
            Waypoint& last = samples.back();
            last.x = goal.x;
            last.y = goal.y;
            last.theta = goal.theta +
                         2.0 * M_PI * std::round((last.theta - goal.theta) / (2.0 * M_PI));
        }
        out.insert(out.end(), samples.begin(), samples.end());
        return true;
    };

    int expansions = 0;
    while (!open.empty()) {
        const OpenEntry entry = open.top();
        open.pop();
        const Node node = nodes[entry.idx];  // by value: the pool reallocates below
        const std::int64_t key = node_key(node.pose, node.dir);
        auto it = best.find(key);
        if (it == best.end() || it->second != entry.idx) continue;
        if (!closed.insert(key).second) continue;

        ++expansions;
        result.expansions = expansions;
        if (expansions > cfg_.node_budget) {
            result.status = SearchStatus::budget_exhausted;
            return result;
        }

        const double dist_goal = std::hypot(node.pose.x - goal.x, node.pose.y - goal.y);
        const bool near = dist_goal <= cfg_.xy_resolution &&
                          std::abs(wrap_angle_diff(node.pose.theta - goal.theta)) <=
                              heading_cell;
        if (near || (expansions - 1) % cfg_.rs_shot_period == 0) {
            std::vector<Waypoint> path = reconstruct(entry.idx);
            if (try_shot(node.pose, path)) {
                if (path.size() > 1) path.front().direction = path[1].direction;
                result.status = SearchStatus::success;
                result.path = std::move(path);
                return result;
            }
        }

        for (std::size_t pi = 0; pi < prims.size(); ++pi) {
            const Primitive& prim = prims[pi];
            Pose p = node.pose;
            const double sd = prim.dir_sign * sub;
            const double dth = sd * std::tan(prim.delta) / params_.wheelbase;
            bool valid = true;
            for (int k = 0; k < n_sub; ++k) {
                p.x += sd * std::cos(p.theta);
                p.y += sd * std::sin(p.theta);
                p.theta += dth;
                if (!domain.contains({p.x, p.y}) || !pose_free(p)) {
                    valid = false;
                    break;
                }
            }
            if (!valid) continue;

            const Direction dir =
                prim.dir_sign > 0 ? Direction::forward : Direction::reverse;
            const std::int64_t skey = node_key(p, dir);
            if (closed.count(skey)) continue;

            double cost = arc * (dir == Direction::forward ? 1.0 : cfg_.reverse_penalty);
            cost += cfg_.steering_penalty * std::abs(prim.delta) * arc;
            if (node.prim >= 0 && dir != node.dir) cost += cfg_.switch_penalty;
            const double g2 = node.g + cost;

            auto bit = best.find(skey);
            if (bit != best.end() && nodes[bit->second].g <= g2) continue;

            const double h2 = heuristic(p);
            if (h2 == kUnreachable) continue;

            const int idx = static_cast<int>(nodes.size());
            nodes.push_back({p, g2, h2, entry.idx, static_cast<int>(pi), dir});
            best[skey] = idx;
            open.push({g2 + h2, h2, seq++, idx});
        }
    }

    result.status = SearchStatus::no_route;
    return result;
}

SearchResult plan_path(const Pose& start, const Pose& goal, const ObstacleMap& map,
                       const VehicleParams& params, const SearchConfig& cfg) {
    HybridAStar planner(map, params, cfg);
    return planner.plan(start, goal);
}

}  // namespace offroad
