// Acceptance suite: nine end-to-end checks, one PASS/FAIL line each.
// Exit code is the number of failed checks.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "offroad/geometry.hpp"
#include "offroad/ipm.hpp"
#include "offroad/model.hpp"
#include "offroad/nlp.hpp"
#include "offroad/pipeline.hpp"
#include "offroad/reference.hpp"
#include "offroad/scenario.hpp"
#include "offroad/search.hpp"
#include "offroad/tunnel.hpp"
#include "offroad/verify.hpp"

using namespace offroad;

namespace {

double uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform(rng);
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
    return lo + static_cast<int>(uniform(rng) * (hi - lo + 1));
}

Rect box_rect(double cx, double cy, double hu, double hv, double angle) {
    const Vec2 u{std::cos(angle), std::sin(angle)};
    const Vec2 n = perp(u);
    const Vec2 c{cx, cy};
    return Rect::from_vertices({c - hu * u - hv * n, c + hu * u - hv * n,
                                c + hu * u + hv * n, c - hu * u + hv * n});
}

// Trial-by-trial reconstruction of the rectangle growth from its documented
// rules: one increment per direction per round, a direction dies at its
// first rejection, extents never pass the cap.
std::array<int, 4> resimulate_extents(Vec2 a, Vec2 b, const ObstacleMap& map, double r_c,
                                      const TunnelConfig& cfg, double fallback_heading) {
    Vec2 u{b.x - a.x, b.y - a.y};
    const double len = norm(u);
    u = len > 0.0 ? (1.0 / len) * u : Vec2{std::cos(fallback_heading), std::sin(fallback_heading)};
    const Vec2 v = perp(u);
    const int cap = static_cast<int>(std::floor(cfg.max_expansion / cfg.delta_s + 1e-9));

    std::array<int, 4> steps{0, 0, 0, 0};
    std::array<bool, 4> alive{true, true, true, true};
    const auto vertices = [&](const std::array<int, 4>& e) -> std::array<Vec2, 4> {
        const Vec2 head = b + e[0] * cfg.delta_s * u;
        const Vec2 tail = a - e[1] * cfg.delta_s * u;
        const Vec2 left = e[2] * cfg.delta_s * v;
        const Vec2 right = e[3] * cfg.delta_s * v;
        return {tail - right, head - right, head + left, tail + left};
    };

    bool progressed = true;
    while (progressed) {
        progressed = false;
        for (int dir = 0; dir < 4; ++dir) {
            if (!alive[dir]) continue;
            if (steps[dir] + 1 > cap) {
                alive[dir] = false;
                continue;
            }
            std::array<int, 4> trial = steps;
            ++trial[dir];
            if (rect_clear(std::span<const Vec2, 4>(vertices(trial)), map, r_c)) {
                steps = trial;
                progressed = true;
            } else {
                alive[dir] = false;
            }
        }
    }
    return steps;
}

// Fixed-step bang-bang controller: full throttle until the remaining
// distance equals the braking distance, then full brake; speed capped.
// Each step integrates the commanded phase exactly, so the only error left
// is the step-rate quantization of the switch instants.
double simulate_min_time(double dist, double v_max, double a_max, int steps) {
    if (dist == 0.0) return 0.0;
    if (std::isinf(a_max)) {
        const double dt = dist / v_max / steps;
        double x = 0.0, t = 0.0;
        while (x + v_max * dt < dist) {
            x += v_max * dt;
            t += dt;
        }
        return t + (dist - x) / v_max;
    }
    const double horizon =
        dist / v_max + 2.0 * v_max / a_max + 2.0 * std::sqrt(dist / a_max);
    const double dt = horizon / steps;

    const auto advance = [&](double v, double a_cmd, double tau) {
        double v_end = v + a_cmd * tau;
        double dx;
        if (a_cmd > 0.0 && v_end > v_max) {
            const double t1 = (v_max - v) / a_cmd;
            dx = v * t1 + 0.5 * a_cmd * t1 * t1 + v_max * (tau - t1);
            v_end = v_max;
        } else {
            dx = 0.5 * (v + v_end) * tau;
        }
        return std::pair<double, double>{dx, v_end};
    };

    // Rest-to-rest: the ride ends when the vehicle stops at or past the
    // goal, not when it first crosses it. Braking always starts at a step
    // boundary with stopping distance >= remaining, so there is no
    // undershoot to re-correct beyond floating-point dust.
    double x = 0.0, v = 0.0, t = 0.0;
    for (long k = 0; k < 100L * steps; ++k) {
        const double remaining = dist - x;
        const double a_cmd = remaining <= v * v / (2.0 * a_max) ? -a_max : a_max;
        if (a_cmd < 0.0 && v - a_max * dt <= 0.0) {
            const double t1 = v / a_max;
            x += 0.5 * v * t1;
            t += t1;
            v = 0.0;
            if (x >= dist) return t;
            continue;
        }
        const auto [dx, v_end] = advance(v, a_cmd, dt);
        x += dx;
        v = v_end;
        t += dt;
    }
    return t;
}

double scaled_gap(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            const double scale = std::max({1.0, std::abs(a(i, j)), std::abs(b(i, j))});
            worst = std::max(worst, std::abs(a(i, j) - b(i, j)) / scale);
        }
    }
    return worst;
}

Scenario straight_scenario() {
    Scenario sc;
    sc.bounds = {0.0, 0.0, 40.0, 40.0};
    sc.start = {10.0, 20.0, 0.0, 0.0, 0.0, 0.0, 0.0};
    sc.goal = {15.0, 20.0, 0.0, 0.0, 0.0, 0.0, 0.0};
    return sc;
}

struct StagePieces {
    ObstacleMap map;
    SearchResult search;
    ReferenceTrajectory reference;
    TunnelResult tunnels;
    bool ok = false;
};

StagePieces run_front_stages(const Scenario& sc) {
    StagePieces out;
    const DiscGeometry g = DiscGeometry::from_params(sc.vehicle);
    out.map = sc.build_map();
    out.search = plan_path(sc.start.pose(), sc.goal.pose(), out.map, sc.vehicle, sc.search);
    if (!out.search.ok()) return out;
    out.reference = build_reference(out.search.path, g, sc.vehicle, sc.nlp.ne);
    out.tunnels = build_tunnels(out.reference, out.map, g, sc.tunnel, sc.nlp.ne);
    out.ok = out.tunnels.ok();
    return out;
}

double nearest_rank(std::vector<double> values, double q) {
    std::sort(values.begin(), values.end());
    const int rank = static_cast<int>(std::ceil(q * values.size()));
    return values[std::max(rank, 1) - 1];
}

bool criterion_clear_rectangles() {
    std::mt19937_64 rng(101);
    const double r_c = DiscGeometry::from_params(VehicleParams{}).radius;
    const TunnelConfig cfg;
    const AxisAlignedBounds bounds{0.0, 0.0, 30.0, 30.0};

    int accepted = 0;
    long long checks = 0;
    for (int attempt = 0; attempt < 200000 && accepted < 1000; ++attempt) {
        std::vector<Vec2> pts;
        const int n_obs = uniform_int(rng, 1, 40);
        pts.reserve(n_obs);
        for (int i = 0; i < n_obs; ++i) {
            pts.push_back({uniform(rng, 0.0, 30.0), uniform(rng, 0.0, 30.0)});
        }
        const ObstacleMap map(pts, bounds);

        Rect rect;
        if (attempt % 2 == 0) {
            rect = box_rect(uniform(rng, 5.0, 25.0), uniform(rng, 5.0, 25.0),
                            uniform(rng, 0.3, 3.0), uniform(rng, 0.3, 3.0),
                            uniform(rng, 0.0, 6.28));
        } else {
            const Vec2 a{uniform(rng, 8.0, 22.0), uniform(rng, 8.0, 22.0)};
            const Vec2 b{a.x + uniform(rng, -1.5, 1.5), a.y + uniform(rng, -1.5, 1.5)};
            const RectExpansion e =
                expand_rectangle(a, b, map, r_c, cfg, uniform(rng, 0.0, 6.28));
            if (e.degenerate) continue;
            rect = e.rect;
        }
        if (!rect_clear(rect, map, r_c)) continue;
        ++accepted;

        // Exact check: the distance from every obstacle to the closed
        // rectangle bounds the distance to each of its interior points.
        for (const Vec2& obs : pts) {
            ++checks;
            if (point_rect_distance(obs, rect) < r_c) return false;
        }

        // Corroborate on concrete interior points (corners, edge midpoints,
        // center, random bilinear fill).
        std::vector<Vec2> inside(rect.vertices.begin(), rect.vertices.end());
        for (int j = 0; j < 4; ++j) {
            inside.push_back(0.5 * (rect.vertices[j] + rect.vertices[(j + 1) % 4]));
        }
        inside.push_back(rect.center);
        for (int j = 0; j < 30; ++j) {
            const double s = uniform(rng), t = uniform(rng);
            inside.push_back((1.0 - s) * (1.0 - t) * rect.vertices[0] +
                             s * (1.0 - t) * rect.vertices[1] + s * t * rect.vertices[2] +
                             (1.0 - s) * t * rect.vertices[3]);
        }
        const double floor2 = (r_c - 1e-12) * (r_c - 1e-12);
        for (const Vec2& p : inside) {
            for (const Vec2& obs : pts) {
                ++checks;
                if (squared_norm(p - obs) < floor2) return false;
            }
        }
    }
    return accepted == 1000 && checks > 0;
}

bool criterion_counts_ignore_obstacles() {
    std::array<std::array<int, 3>, 3> dims{};
    int row = 0;
    for (const int n_obs : {10, 100, 1000}) {
        Scenario sc;
        sc.bounds = {0.0, 0.0, 80.0, 80.0};
        sc.start = {10.0, 40.0, 0.0, 0.0, 0.0, 0.0, 0.0};
        sc.goal = {15.0, 40.0, 0.0, 0.0, 0.0, 0.0, 0.0};
        sc.tunnel.n_rects = 6;
        std::mt19937_64 rng(200 + n_obs);
        for (int i = 0; i < n_obs; ++i) {
            sc.obstacles.push_back({uniform(rng, 55.0, 75.0), uniform(rng, 5.0, 75.0)});
        }

        const StagePieces pieces = run_front_stages(sc);
        if (!pieces.ok) return false;
        const DiscGeometry g = DiscGeometry::from_params(sc.vehicle);
        const NlpProblem nlp =
            transcribe(sc.vehicle, sc.start, sc.goal, pieces.tunnels.tunnels, g, sc.nlp,
                       pieces.reference.samples.back().state.theta);
        dims[row++] = {nlp.n_vars(), nlp.n_eq(), nlp.n_ineq()};
    }
    return dims[0] == dims[1] && dims[1] == dims[2] && dims[0][0] == 426;
}

bool criterion_straight_ride(std::string& detail) {
    const auto t0 = std::chrono::steady_clock::now();
    const PlanResult res = run_pipeline(straight_scenario());
    const double elapsed = std::chrono::duration<double>(
        std::chrono::steady_clock::now() - t0).count();
    if (!res.ok()) {
        detail = "pipeline failed";
        return false;
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), "t_f %.6f s, wall %.2f s", res.solution->t_f, elapsed);
    detail = buf;
    return res.solution->t_f >= 5.0 && res.solution->t_f <= 5.15 && elapsed < 5.0;
}

bool criterion_ride_profiles() {
    std::mt19937_64 rng(404);
    for (int i = 0; i < 100; ++i) {
        const double dist = uniform(rng, 0.5, 30.0);
        const double v_max = uniform(rng, 0.3, 3.0);
        const double a_max =
            i % 5 == 4 ? std::numeric_limits<double>::infinity() : uniform(rng, 0.2, 5.0);
        const MinTimeProfile prof = min_time_profile(dist, v_max, a_max);
        const double sim = simulate_min_time(dist, v_max, a_max, 10000);
        if (std::abs(sim - prof.duration) > 0.01 * prof.duration) return false;
    }
    return true;
}

bool criterion_parking_jacobians(const Scenario& parking) {
    const StagePieces pieces = run_front_stages(parking);
    if (!pieces.ok) return false;
    const DiscGeometry g = DiscGeometry::from_params(parking.vehicle);
    const NlpProblem nlp =
        transcribe(parking.vehicle, parking.start, parking.goal, pieces.tunnels.tunnels, g,
                   parking.nlp, pieces.reference.samples.back().state.theta);
    const Eigen::VectorXd z0 = initial_guess(nlp, pieces.reference);

    std::mt19937_64 rng(505);
    Eigen::VectorXd rp, rm;
    for (int point = 0; point < 50; ++point) {
        Eigen::VectorXd z = z0;
        for (int i = 0; i + 1 < nlp.n_vars(); ++i) z[i] += uniform(rng, -0.05, 0.05);
        z[nlp.idx_tf()] =
            std::max(z0[nlp.idx_tf()] + uniform(rng, -0.3, 0.3), nlp.t_min() + 0.06);

        NlpProblem::SpMat je, ji;
        nlp.eq_jacobian(z, je);
        nlp.ineq_jacobian(z, ji);
        Eigen::MatrixXd fd_e(nlp.n_eq(), nlp.n_vars());
        Eigen::MatrixXd fd_i(nlp.n_ineq(), nlp.n_vars());
        for (int i = 0; i < nlp.n_vars(); ++i) {
            const double h = 1e-6 * std::max(1.0, std::abs(z[i]));
            Eigen::VectorXd zp = z, zm = z;
            zp[i] += h;
            zm[i] -= h;
            nlp.eq_residuals(zp, rp);
            nlp.eq_residuals(zm, rm);
            fd_e.col(i) = (rp - rm) / (2.0 * h);
            nlp.ineq_residuals(zp, rp);
            nlp.ineq_residuals(zm, rm);
            fd_i.col(i) = (rp - rm) / (2.0 * h);
        }
        if (scaled_gap(Eigen::MatrixXd(je), fd_e) > 1e-5) return false;
        if (scaled_gap(Eigen::MatrixXd(ji), fd_i) > 1e-5) return false;
    }
    return true;
}

bool criterion_benchmark_rates(const BenchStats& stats, const std::vector<PlanResult>& results,
                               std::string& detail) {
    const StageStats& s1 = stats.stages[0];
    const StageStats& s2 = stats.stages[1];
    const StageStats& s3 = stats.stages[2];
    char buf[128];
    std::snprintf(buf, sizeof(buf), "stage rates %.1f%% / %.1f%% / %.1f%%",
                  100.0 * s1.success_rate, 100.0 * s2.success_rate, 100.0 * s3.success_rate);
    detail = buf;

    if (s1.succeeded < static_cast<int>(std::ceil(0.90 * s1.attempted))) return false;
    if (s2.succeeded != s2.attempted) return false;
    if (s3.succeeded < 0.85 * s3.attempted) return false;
    for (const PlanResult& r : results) {
        if (r.ok() && !(r.verification && r.verification->all_ok())) return false;
    }
    return true;
}

bool criterion_benchmark_latency(const std::vector<PlanResult>& results, std::string& detail) {
    std::vector<double> times;
    times.reserve(results.size());
    for (const PlanResult& r : results) times.push_back(r.total_time_s());
    const double median = nearest_rank(times, 0.5);
    const double p99 = nearest_rank(times, 0.99);
    char buf[96];
    std::snprintf(buf, sizeof(buf), "median %.3f s, p99 %.3f s", median, p99);
    detail = buf;
    return median <= 1.0 && p99 <= 5.0;
}

bool criterion_expansion_replay() {
    std::mt19937_64 rng(808);
    const double r_c = DiscGeometry::from_params(VehicleParams{}).radius;
    const TunnelConfig cfg;
    const AxisAlignedBounds bounds{-10.0, -10.0, 10.0, 10.0};

    for (int trial = 0; trial < 200; ++trial) {
        const Vec2 a{uniform(rng, -2.0, 2.0), uniform(rng, -2.0, 2.0)};
        const Vec2 b = trial % 10 == 9
                           ? a
                           : Vec2{a.x + uniform(rng, -1.5, 1.5), a.y + uniform(rng, -1.5, 1.5)};
        const double heading = uniform(rng, 0.0, 6.28);
        const ObstacleMap map({{uniform(rng, -6.0, 6.0), uniform(rng, -6.0, 6.0)}}, bounds);

        const RectExpansion got = expand_rectangle(a, b, map, r_c, cfg, heading);
        if (got.steps != resimulate_extents(a, b, map, r_c, cfg, heading)) return false;
    }
    return true;
}

bool criterion_parking_pipeline(const Scenario& parking, std::string& detail) {
    const PlanResult res = run_pipeline(parking);
    if (!res.ok()) {
        detail = "pipeline failed";
        return false;
    }
    const ReferenceTrajectory& ref = *res.reference;
    const NlpSolution& sol = *res.solution;

    double deviation = 0.0;
    double steer = 0.0;
    for (std::size_t k = 0; k < sol.states.size(); ++k) {
        deviation = std::max(deviation, std::hypot(sol.states[k].x - ref.samples[k].state.x,
                                                   sol.states[k].y - ref.samples[k].state.y));
        steer = std::max(steer, std::abs(sol.states[k].phi));
    }

    // The searched path ignores the dynamics grid, so replaying it as if it
    // were a solution must trip the defect check that the real solution
    // passes.
    NlpSolution replay;
    replay.status = IpmStatus::converged;
    replay.t_f = ref.t_f_bar;
    for (const ReferenceSample& s : ref.samples) replay.states.push_back(s.state);
    for (std::size_t k = 0; k + 1 < ref.samples.size(); ++k) {
        replay.controls.push_back(ref.samples[k].control);
    }
    const DiscGeometry g = DiscGeometry::from_params(parking.vehicle);
    const VerificationReport ref_report =
        verify(replay, parking, res.tunnels->tunnels, g);

    char buf[128];
    std::snprintf(buf, sizeof(buf), "deviation %.3f m, reference defect %.3f",
                  deviation, ref_report.worst_defect);
    detail = buf;
    return deviation > 0.01 && steer > 1e-3 && !ref_report.defects_ok &&
           res.verification->defects_ok;
}

}  // namespace

int main() {
    int failures = 0;
    const auto report = [&failures](int n, bool pass, const std::string& what) {
        std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", n, what.c_str());
        std::fflush(stdout);
        if (!pass) ++failures;
    };

    report(1, criterion_clear_rectangles(),
           "interiors of clearance-passing rectangles keep the covering radius from every "
           "obstacle (1000 random rectangle/map pairs)");

    report(2, criterion_counts_ignore_obstacles(),
           "problem dimensions are unchanged across 10/100/1000 obstacles and the variable "
           "count is 426");

    {
        std::string detail;
        const bool pass = criterion_straight_ride(detail);
        report(3, pass, "unobstructed 5 m straight ride converges in bounds (" + detail + ")");
    }

    report(4, criterion_ride_profiles(),
           "closed-form ride durations match a 10000-step bang-bang simulation within 1% "
           "(100 random triples)");

    Scenario parking;
    bool parking_loaded = true;
    try {
        parking = load_scenario(std::string(TEST_DATA_DIR) + "/parking.json");
    } catch (const std::exception&) {
        parking_loaded = false;
    }

    report(5, parking_loaded && criterion_parking_jacobians(parking),
           "constraint jacobians match central differences to 1e-5 at 50 perturbed points "
           "of the parking problem");

    std::vector<PlanResult> results;
    const BenchStats stats = run_benchmark(500, 42, {}, 1, &results);
    {
        std::string detail;
        const bool pass = criterion_benchmark_rates(stats, results, detail);
        report(6, pass,
               "500-case benchmark meets the staged success floors with every success "
               "re-verified (" + detail + ")");
    }
    {
        std::string detail;
        const bool pass = criterion_benchmark_latency(results, detail);
        report(7, pass, "single-worker latency stays in budget (" + detail + ")");
    }

    report(8, criterion_expansion_replay(),
           "rectangle growth equals its trial-by-trial replay on 200 single-obstacle cases");

    {
        std::string detail;
        const bool pass = parking_loaded && criterion_parking_pipeline(parking, detail);
        report(9, pass,
               "parking ride moves off its kinematic draft and restores integration "
               "feasibility (" + detail + ")");
    }

    return failures;
}
