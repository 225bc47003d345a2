#include "offroad/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include <json.hpp>

namespace offroad {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) {
    throw std::runtime_error("scenario: " + msg);
}

// Numbers may arrive as JSON numbers or as the strings "inf"/"-inf"
// (JSON itself cannot represent infinities).
double parse_number(const json& v, const std::string& where) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        std::string s = v.get<std::string>();
        std::transform(s.begin(), s.end(), s.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (s == "inf" || s == "+inf" || s == "infinity") {
            return std::numeric_limits<double>::infinity();
        }
        if (s == "-inf" || s == "-infinity") {
            return -std::numeric_limits<double>::infinity();
        }
    }
    fail(where + ": expected a number");
}

void check_keys(const json& obj, const std::string& block,
                std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) fail("'" + block + "' must be an object");
    for (const auto& item : obj.items()) {
        if (std::find_if(allowed.begin(), allowed.end(), [&](const char* k) {
                return item.key() == k;
            }) == allowed.end()) {
            fail("unknown key '" + item.key() + "' in '" + block + "'");
        }
    }
}

void read_double(const json& obj, const std::string& block, const char* key, double& out) {
    if (auto it = obj.find(key); it != obj.end()) {
        out = parse_number(*it, block + "." + key);
    }
}

void read_int(const json& obj, const std::string& block, const char* key, int& out) {
    if (auto it = obj.find(key); it != obj.end()) {
        if (!it->is_number_integer()) fail(block + "." + std::string(key) + ": expected an integer");
        out = it->get<int>();
    }
}

void read_bool(const json& obj, const std::string& block, const char* key, bool& out) {
    if (auto it = obj.find(key); it != obj.end()) {
        if (!it->is_boolean()) fail(block + "." + std::string(key) + ": expected a boolean");
        out = it->get<bool>();
    }
}

json number_or_inf(double v) {
    if (std::isinf(v)) return json(v > 0 ? "inf" : "-inf");
    return json(v);
}

void read_boundary(const json& obj, const std::string& block, BoundaryState& out) {
    check_keys(obj, block, {"x", "y", "theta", "v", "phi", "a", "omega"});
    read_double(obj, block, "x", out.x);
    read_double(obj, block, "y", out.y);
    read_double(obj, block, "theta", out.theta);
    read_double(obj, block, "v", out.v);
    read_double(obj, block, "phi", out.phi);
    read_double(obj, block, "a", out.a);
    read_double(obj, block, "omega", out.omega);
}

json boundary_to_json(const BoundaryState& b) {
    return json{{"x", b.x},     {"y", b.y}, {"theta", b.theta}, {"v", b.v},
                {"phi", b.phi}, {"a", b.a}, {"omega", b.omega}};
}

}  // namespace

ObstacleMap Scenario::build_map(double cell_size) const {
    return ObstacleMap(obstacles, bounds, cell_size);
}

void Scenario::validate() const {
    if (!(bounds.x_min < bounds.x_max) || !(bounds.y_min < bounds.y_max)) {
        throw std::invalid_argument("Scenario.bounds");
    }
    vehicle.validate();
    search.validate();
    tunnel.validate();
    nlp.validate();
    for (std::size_t i = 0; i < obstacles.size(); ++i) {
        if (!bounds.contains(obstacles[i])) {
            throw std::invalid_argument("Scenario.obstacles[" + std::to_string(i) +
                                        "]: outside bounds");
        }
    }
}

Scenario scenario_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(std::string("parse error: ") + e.what());
    }
    check_keys(doc, "scenario",
               {"vehicle", "bounds", "obstacles", "start", "goal", "search", "tunnel", "nlp"});

    Scenario sc;
    if (auto it = doc.find("vehicle"); it != doc.end()) {
        const json& v = *it;
        check_keys(v, "vehicle",
                   {"front_hang", "wheelbase", "rear_hang", "body_width", "max_accel",
                    "max_speed", "max_steer", "max_steer_rate"});
        read_double(v, "vehicle", "front_hang", sc.vehicle.front_hang);
        read_double(v, "vehicle", "wheelbase", sc.vehicle.wheelbase);
        read_double(v, "vehicle", "rear_hang", sc.vehicle.rear_hang);
        read_double(v, "vehicle", "body_width", sc.vehicle.body_width);
        read_double(v, "vehicle", "max_accel", sc.vehicle.max_accel);
        read_double(v, "vehicle", "max_speed", sc.vehicle.max_speed);
        read_double(v, "vehicle", "max_steer", sc.vehicle.max_steer);
        read_double(v, "vehicle", "max_steer_rate", sc.vehicle.max_steer_rate);
    }
    if (auto it = doc.find("bounds"); it != doc.end()) {
        const json& b = *it;
        check_keys(b, "bounds", {"x_min", "y_min", "x_max", "y_max"});
        read_double(b, "bounds", "x_min", sc.bounds.x_min);
        read_double(b, "bounds", "y_min", sc.bounds.y_min);
        read_double(b, "bounds", "x_max", sc.bounds.x_max);
        read_double(b, "bounds", "y_max", sc.bounds.y_max);
    }
    if (auto it = doc.find("obstacles"); it != doc.end()) {
        if (!it->is_array()) fail("'obstacles' must be an array of [x, y] pairs");
        sc.obstacles.reserve(it->size());
        for (std::size_t i = 0; i < it->size(); ++i) {
            const json& p = (*it)[i];
            const std::string where = "obstacles[" + std::to_string(i) + "]";
            if (!p.is_array() || p.size() != 2) fail(where + ": expected [x, y]");
            sc.obstacles.push_back(
                {parse_number(p[0], where + ".x"), parse_number(p[1], where + ".y")});
        }
    }
    if (auto it = doc.find("start"); it != doc.end()) read_boundary(*it, "start", sc.start);
    if (auto it = doc.find("goal"); it != doc.end()) read_boundary(*it, "goal", sc.goal);
    if (auto it = doc.find("search"); it != doc.end()) {
        const json& s = *it;
        check_keys(s, "search",
                   {"xy_resolution", "heading_bins", "primitive_arc_length", "steering_samples",
                    "reverse_penalty", "switch_penalty", "steering_penalty", "rs_shot_period",
                    "node_budget", "collision_margin", "domain_padding"});
        read_double(s, "search", "xy_resolution", sc.search.xy_resolution);
        read_int(s, "search", "heading_bins", sc.search.heading_bins);
        read_double(s, "search", "primitive_arc_length", sc.search.primitive_arc_length);
        read_int(s, "search", "steering_samples", sc.search.steering_samples);
        read_double(s, "search", "reverse_penalty", sc.search.reverse_penalty);
        read_double(s, "search", "switch_penalty", sc.search.switch_penalty);
        read_double(s, "search", "steering_penalty", sc.search.steering_penalty);
        read_int(s, "search", "rs_shot_period", sc.search.rs_shot_period);
        read_int(s, "search", "node_budget", sc.search.node_budget);
        read_double(s, "search", "collision_margin", sc.search.collision_margin);
        read_double(s, "search", "domain_padding", sc.search.domain_padding);
    }
    if (auto it = doc.find("tunnel"); it != doc.end()) {
        const json& t = *it;
        check_keys(t, "tunnel", {"n_rects", "delta_s", "max_expansion"});
        read_int(t, "tunnel", "n_rects", sc.tunnel.n_rects);
        read_double(t, "tunnel", "delta_s", sc.tunnel.delta_s);
        read_double(t, "tunnel", "max_expansion", sc.tunnel.max_expansion);
    }
    if (auto it = doc.find("nlp"); it != doc.end()) {
        const json& n = *it;
        check_keys(n, "nlp", {"ne", "t_min", "margin", "smooth_weight", "pin_boundary_controls"});
        read_int(n, "nlp", "ne", sc.nlp.ne);
        read_double(n, "nlp", "t_min", sc.nlp.t_min);
        read_double(n, "nlp", "margin", sc.nlp.margin);
        read_double(n, "nlp", "smooth_weight", sc.nlp.smooth_weight);
        read_bool(n, "nlp", "pin_boundary_controls", sc.nlp.pin_boundary_controls);
    }

    try {
        sc.validate();
    } catch (const std::invalid_argument& e) {
        fail(std::string("invalid value: ") + e.what());
    }
    return sc;
}

std::string scenario_to_json(const Scenario& sc) {
    json doc;
    doc["vehicle"] = {{"front_hang", sc.vehicle.front_hang},
                      {"wheelbase", sc.vehicle.wheelbase},
                      {"rear_hang", sc.vehicle.rear_hang},
                      {"body_width", sc.vehicle.body_width},
                      {"max_accel", number_or_inf(sc.vehicle.max_accel)},
                      {"max_speed", sc.vehicle.max_speed},
                      {"max_steer", sc.vehicle.max_steer},
                      {"max_steer_rate", sc.vehicle.max_steer_rate}};
    doc["bounds"] = {{"x_min", sc.bounds.x_min},
                     {"y_min", sc.bounds.y_min},
                     {"x_max", sc.bounds.x_max},
                     {"y_max", sc.bounds.y_max}};
    json obs = json::array();
    for (const Vec2& p : sc.obstacles) obs.push_back(json::array({p.x, p.y}));
    doc["obstacles"] = std::move(obs);
    doc["start"] = boundary_to_json(sc.start);
    doc["goal"] = boundary_to_json(sc.goal);
    doc["search"] = {{"xy_resolution", sc.search.xy_resolution},
                     {"heading_bins", sc.search.heading_bins},
                     {"primitive_arc_length", sc.search.primitive_arc_length},
                     {"steering_samples", sc.search.steering_samples},
                     {"reverse_penalty", sc.search.reverse_penalty},
                     {"switch_penalty", sc.search.switch_penalty},
                     {"steering_penalty", sc.search.steering_penalty},
                     {"rs_shot_period", sc.search.rs_shot_period},
                     {"node_budget", sc.search.node_budget},
                     {"collision_margin", sc.search.collision_margin},
                     {"domain_padding", sc.search.domain_padding}};
    doc["tunnel"] = {{"n_rects", sc.tunnel.n_rects},
                     {"delta_s", sc.tunnel.delta_s},
                     {"max_expansion", sc.tunnel.max_expansion}};
    doc["nlp"] = {{"ne", sc.nlp.ne},
                  {"t_min", sc.nlp.t_min},
                  {"margin", sc.nlp.margin},
                  {"smooth_weight", sc.nlp.smooth_weight},
                  {"pin_boundary_controls", sc.nlp.pin_boundary_controls}};
    return doc.dump(2) + "\n";
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("cannot open '" + path.string() + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return scenario_from_json(text);
}

void save_scenario(const Scenario& sc, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("cannot open '" + path.string() + "' for writing");
    out << scenario_to_json(sc);
    if (!out) fail("write to '" + path.string() + "' failed");
}

Scenario random_case(std::uint64_t seed, const GenConfig& cfg) {
    if (!(cfg.map_size > 0.0) || !(cfg.max_goal_distance > 0.0) || cfg.min_obstacles < 0 ||
        cfg.max_obstacles < cfg.min_obstacles) {
        throw std::invalid_argument("GenConfig");
    }
    std::mt19937_64 rng(seed);
    const auto uniform = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    constexpr double two_pi = 2.0 * std::numbers::pi;

    Scenario sc;
    sc.bounds = {0.0, 0.0, cfg.map_size, cfg.map_size};
    sc.start.x = cfg.map_size * uniform();
    sc.start.y = cfg.map_size * uniform();
    for (;;) {
        const double dist = cfg.max_goal_distance * (1.0 - uniform());  // (0, max]
        const double bearing = two_pi * uniform();
        const double gx = sc.start.x + dist * std::cos(bearing);
        const double gy = sc.start.y + dist * std::sin(bearing);
        if (sc.bounds.contains({gx, gy})) {
            sc.goal.x = gx;
            sc.goal.y = gy;
            break;
        }
    }
    sc.start.theta = two_pi * uniform();
    sc.goal.theta = two_pi * uniform();

    const int span = cfg.max_obstacles - cfg.min_obstacles + 1;
    const int n_obs = cfg.min_obstacles + static_cast<int>(uniform() * span);
    sc.obstacles.reserve(n_obs);
    for (int i = 0; i < n_obs; ++i) {
        const double x = cfg.map_size * uniform();
        const double y = cfg.map_size * uniform();
        sc.obstacles.push_back({x, y});
    }
    return sc;
}

}  // namespace offroad
