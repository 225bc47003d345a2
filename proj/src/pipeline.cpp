#include "offroad/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "offroad/nlp.hpp"

namespace offroad {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t x = seed + (index + 1) * 0x9E3779B97F4A7C15ull;
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ull;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBull;
    x ^= x >> 31;
    return x;
}

StageStats make_stats(const std::vector<double>& ok_times,
                      const std::vector<double>& fail_times) {
    StageStats st;
    st.attempted = static_cast<int>(ok_times.size() + fail_times.size());
    st.succeeded = static_cast<int>(ok_times.size());
    if (st.attempted == 0) return st;
    st.success_rate = static_cast<double>(st.succeeded) / st.attempted;

    double sum_ok = 0.0;
    double sum_fail = 0.0;
    std::vector<double> all;
    all.reserve(st.attempted);
    for (double t : ok_times) {
        sum_ok += t;
        all.push_back(t);
    }
    for (double t : fail_times) {
        sum_fail += t;
        all.push_back(t);
    }
    if (!ok_times.empty()) st.mean_time_ok_s = sum_ok / ok_times.size();
    if (!fail_times.empty()) st.mean_time_fail_s = sum_fail / fail_times.size();
    st.mean_time_s = (sum_ok + sum_fail) / st.attempted;
    std::sort(all.begin(), all.end());
    st.max_time_s = all.back();
    const int rank = static_cast<int>(std::ceil(0.99 * all.size()));
    st.p99_time_s = all[std::max(rank, 1) - 1];
    return st;
}

nlohmann::json stage_to_json(const StageStats& st) {
    nlohmann::json j{{"attempted", st.attempted},
                     {"succeeded", st.succeeded},
                     {"success_rate", st.success_rate},
                     {"mean_time_ok_s", st.mean_time_ok_s},
                     {"mean_time_fail_s", nullptr},
                     {"mean_time_s", st.mean_time_s},
                     {"max_time_s", st.max_time_s},
                     {"p99_time_s", st.p99_time_s}};
    if (st.attempted - st.succeeded > 0) j["mean_time_fail_s"] = st.mean_time_fail_s;
    if (st.succeeded == 0) j["mean_time_ok_s"] = nullptr;
    return j;
}

}  // namespace

PlanResult run_pipeline(const Scenario& scenario) {
    scenario.validate();
    PlanResult res;
    const VehicleParams& vp = scenario.vehicle;
    const DiscGeometry g = DiscGeometry::from_params(vp);

    const auto t1 = Clock::now();
    const ObstacleMap map = scenario.build_map();
    res.search = plan_path(scenario.start.pose(), scenario.goal.pose(), map, vp,
                           scenario.search);
    if (!res.search.ok()) {
        res.stage1_time_s = seconds_since(t1);
        return res;
    }
    res.reference = build_reference(res.search.path, g, vp, scenario.nlp.ne);
    res.stage1_time_s = seconds_since(t1);
    res.stage1_ok = true;

    const auto t2 = Clock::now();
    res.tunnels = build_tunnels(*res.reference, map, g, scenario.tunnel, scenario.nlp.ne);
    if (!res.tunnels->ok() && scenario.tunnel.n_rects == 0) {
        // Shorter skeleton segments hug the reference more tightly, so a
        // corridor that collapses at the automatic granularity may still
        // succeed with more rectangles. Walk up the valid divisors.
        const int first =
            resolve_n_rects(scenario.tunnel, res.reference->t_f_bar, scenario.nlp.ne);
        TunnelConfig cfg = scenario.tunnel;
        for (int nr = first + 1; nr <= scenario.nlp.ne && !res.tunnels->ok(); ++nr) {
            if (scenario.nlp.ne % nr != 0) continue;
            cfg.n_rects = nr;
            res.tunnels = build_tunnels(*res.reference, map, g, cfg, scenario.nlp.ne);
        }
    }
    res.stage2_time_s = seconds_since(t2);
    if (!res.tunnels->ok()) return res;
    res.stage2_ok = true;

    const auto t3 = Clock::now();
    const NlpProblem nlp =
        transcribe(vp, scenario.start, scenario.goal, res.tunnels->tunnels, g, scenario.nlp,
                   res.reference->samples.back().state.theta);
    res.solution = solve(nlp, *res.reference);
    res.verification = verify(*res.solution, scenario, res.tunnels->tunnels, g);
    res.stage3_time_s = seconds_since(t3);
    res.stage3_ok = res.solution->ok() && res.verification->all_ok();
    return res;
}

BenchStats run_benchmark(int n_cases, std::uint64_t seed, const GenConfig& gen, int workers,
                         std::vector<PlanResult>* results) {
    if (n_cases < 1) throw std::invalid_argument("run_benchmark: n_cases");
    std::vector<PlanResult> local;
    std::vector<PlanResult>& all = results ? *results : local;
    all.assign(n_cases, PlanResult{});

    const auto run_case = [&](int i) { all[i] = run_pipeline(random_case(mix_seed(seed, i), gen)); };

    if (workers <= 1) {
        for (int i = 0; i < n_cases; ++i) run_case(i);
    } else {
        std::atomic<int> next{0};
        const int pool = std::min(workers, n_cases);
        std::vector<std::thread> threads;
        threads.reserve(pool);
        for (int w = 0; w < pool; ++w) {
            threads.emplace_back([&] {
                for (int i = next.fetch_add(1); i < n_cases; i = next.fetch_add(1)) run_case(i);
            });
        }
        for (std::thread& th : threads) th.join();
    }

    BenchStats stats;
    stats.cases = n_cases;
    stats.seed = seed;
    std::vector<double> ok[4], fail[4];  // stages 1..3 plus end-to-end
    for (const PlanResult& r : all) {
        (r.stage1_ok ? ok[0] : fail[0]).push_back(r.stage1_time_s);
        if (r.stage1_ok) (r.stage2_ok ? ok[1] : fail[1]).push_back(r.stage2_time_s);
        if (r.stage2_ok) (r.stage3_ok ? ok[2] : fail[2]).push_back(r.stage3_time_s);
        (r.ok() ? ok[3] : fail[3]).push_back(r.total_time_s());
    }
    for (int i = 0; i < 3; ++i) stats.stages[i] = make_stats(ok[i], fail[i]);
    stats.total = make_stats(ok[3], fail[3]);
    return stats;
}

std::string bench_stats_to_json(const BenchStats& stats) {
    nlohmann::json doc{{"cases", stats.cases},
                       {"seed", stats.seed},
                       {"stage1", stage_to_json(stats.stages[0])},
                       {"stage2", stage_to_json(stats.stages[1])},
                       {"stage3", stage_to_json(stats.stages[2])},
                       {"total", stage_to_json(stats.total)}};
    return doc.dump(2) + "\n";
}

std::string bench_stats_table(const BenchStats& stats) {
    char buf[160];
    std::string out;
    std::snprintf(buf, sizeof(buf), "%-10s %9s %9s %12s %12s %12s %10s %10s\n", "stage",
                  "attempted", "succeeded", "success", "mean ok", "mean fail", "max", "p99");
    out += buf;
    const char* names[4] = {"stage 1", "stage 2", "stage 3", "total"};
    for (int i = 0; i < 4; ++i) {
        const StageStats& st = i < 3 ? stats.stages[i] : stats.total;
        char ok_cell[24];
        char fail_cell[24];
        if (st.succeeded > 0) {
            std::snprintf(ok_cell, sizeof(ok_cell), "%10.4fs", st.mean_time_ok_s);
        } else {
            std::snprintf(ok_cell, sizeof(ok_cell), "%11s", "-");
        }
        if (st.attempted - st.succeeded > 0) {
            std::snprintf(fail_cell, sizeof(fail_cell), "%10.4fs", st.mean_time_fail_s);
        } else {
            std::snprintf(fail_cell, sizeof(fail_cell), "%11s", "-");
        }
        std::snprintf(buf, sizeof(buf), "%-10s %9d %9d %11.2f%% %12s %12s %9.4fs %9.4fs\n",
                      names[i], st.attempted, st.succeeded, 100.0 * st.success_rate, ok_cell,
                      fail_cell, st.max_time_s, st.p99_time_s);
        out += buf;
    }
    return out;
}

void write_trajectory_csv(const std::filesystem::path& path, const NlpSolution& sol) {
    const int ne = static_cast<int>(sol.controls.size());
    if (sol.states.size() != static_cast<std::size_t>(ne + 1) || ne < 1) {
        throw std::invalid_argument("write_trajectory_csv: solution grids are incomplete");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("csv: cannot open '" + path.string() + "' for writing");
    }
    out << "t,x,y,theta,v,phi,a,omega\n";
    char buf[256];
    for (int k = 0; k <= ne; ++k) {
        const State& s = sol.states[k];
        const Control& u = sol.controls[std::min(k, ne - 1)];
        std::snprintf(buf, sizeof(buf),
                      "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      sol.t_f * k / ne, s.x, s.y, s.theta, s.v, s.phi, u.a, u.omega);
        out << buf;
    }
    if (!out) throw std::runtime_error("csv: write to '" + path.string() + "' failed");
}

std::string plan_result_to_json(const Scenario& scenario, const PlanResult& result) {
    using nlohmann::json;
    json doc;
    doc["stages"] = {{"stage1_ok", result.stage1_ok},
                     {"stage2_ok", result.stage2_ok},
                     {"stage3_ok", result.stage3_ok},
                     {"stage1_time_s", result.stage1_time_s},
                     {"stage2_time_s", result.stage2_time_s},
                     {"stage3_time_s", result.stage3_time_s},
                     {"total_time_s", result.total_time_s()}};
    doc["search"] = {{"status", to_string(result.search.status)},
                     {"expansions", result.search.expansions},
                     {"waypoints", result.search.path.size()}};

    if (result.reference) {
        json samples = json::array();
        for (const ReferenceSample& s : result.reference->samples) {
            samples.push_back({{"t", s.t},
                               {"x", s.state.x},
                               {"y", s.state.y},
                               {"theta", s.state.theta},
                               {"v", s.state.v},
                               {"phi", s.state.phi}});
        }
        doc["reference"] = {{"t_f_bar", result.reference->t_f_bar},
                            {"dt", result.reference->dt},
                            {"samples", std::move(samples)}};
    }
    if (result.tunnels) {
        const TunnelResult& tr = *result.tunnels;
        json rects = json::array();
        if (tr.ok()) {
            for (int i = 0; i < tr.tunnels.n_rects; ++i) {
                json front = json::array();
                json rear = json::array();
                for (int j = 0; j < 4; ++j) {
                    const Vec2 vf = tr.tunnels.rects_f[i].rect.vertices[j];
                    const Vec2 vr = tr.tunnels.rects_r[i].rect.vertices[j];
                    front.push_back(json::array({vf.x, vf.y}));
                    rear.push_back(json::array({vr.x, vr.y}));
                }
                rects.push_back({{"front", std::move(front)}, {"rear", std::move(rear)}});
            }
        }
        doc["tunnels"] = {{"status", to_string(tr.status)},
                          {"n_rects", tr.ok() ? tr.tunnels.n_rects : 0},
                          {"rects", std::move(rects)}};
    }
    if (result.solution) {
        const NlpSolution& sol = *result.solution;
        json states = json::array();
        for (const State& s : sol.states) {
            states.push_back(json::array({s.x, s.y, s.theta, s.v, s.phi}));
        }
        json controls = json::array();
        for (const Control& u : sol.controls) controls.push_back(json::array({u.a, u.omega}));
        doc["solution"] = {{"status", to_string(sol.status)},
                           {"t_f", sol.t_f},
                           {"iterations", sol.iterations},
                           {"kkt_stationarity", sol.kkt_stationarity},
                           {"kkt_eq", sol.kkt_eq},
                           {"kkt_ineq", sol.kkt_ineq},
                           {"kkt_comp", sol.kkt_comp},
                           {"wall_time_s", sol.wall_time_s},
                           {"states", std::move(states)},
                           {"controls", std::move(controls)}};
    }
    if (result.verification) {
        const VerificationReport& v = *result.verification;
        doc["verification"] = {{"clearance_ok", v.clearance_ok},
                               {"bounds_ok", v.bounds_ok},
                               {"boundary_ok", v.boundary_ok},
                               {"defects_ok", v.defects_ok},
                               {"tunnel_ok", v.tunnel_ok},
                               {"worst_clearance", v.worst_clearance},
                               {"worst_bound", v.worst_bound},
                               {"worst_boundary", v.worst_boundary},
                               {"worst_defect", v.worst_defect},
                               {"worst_tunnel", v.worst_tunnel}};
    }
    doc["scenario"] = {{"obstacles", scenario.obstacles.size()},
                       {"start", {scenario.start.x, scenario.start.y, scenario.start.theta}},
                       {"goal", {scenario.goal.x, scenario.goal.y, scenario.goal.theta}}};
    return doc.dump(2) + "\n";
}

}  // namespace offroad
