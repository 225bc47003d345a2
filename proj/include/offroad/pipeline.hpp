#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "offroad/ipm.hpp"
#include "offroad/reference.hpp"
#include "offroad/scenario.hpp"
#include "offroad/search.hpp"
#include "offroad/tunnel.hpp"
#include "offroad/verify.hpp"

namespace offroad {

// One end-to-end run. Stage 1 covers map setup, the search and the reference
// trajectory; stage 2 the tunnels; stage 3 transcription, the solve and the
// verification. Later-stage fields are engaged only when the stage ran.
struct PlanResult {
    bool stage1_ok = false;
    bool stage2_ok = false;
    bool stage3_ok = false;
    double stage1_time_s = 0.0;
    double stage2_time_s = 0.0;
    double stage3_time_s = 0.0;

    SearchResult search;
    std::optional<ReferenceTrajectory> reference;
    std::optional<TunnelResult> tunnels;
    std::optional<NlpSolution> solution;
    std::optional<VerificationReport> verification;

    double total_time_s() const { return stage1_time_s + stage2_time_s + stage3_time_s; }
    bool ok() const { return stage1_ok && stage2_ok && stage3_ok; }
};

// Runs the three stages with monotonic per-stage timing, early-exiting on
// failure. Throws std::invalid_argument only for invalid configuration;
// planning failures are returned as data.
PlanResult run_pipeline(const Scenario& scenario);

// Table-style aggregate over one stage (or the end-to-end totals). Times are
// split into succeeded/failed/overall means plus max and nearest-rank p99.
struct StageStats {
    int attempted = 0;
    int succeeded = 0;
    double success_rate = 0.0;
    double mean_time_ok_s = 0.0;    // 0 when no case succeeded
    double mean_time_fail_s = 0.0;  // 0 when no case failed
    double mean_time_s = 0.0;
    double max_time_s = 0.0;
    double p99_time_s = 0.0;
};

struct BenchStats {
    int cases = 0;
    std::uint64_t seed = 0;
    std::array<StageStats, 3> stages{};
    StageStats total;  // end-to-end wall time; success = all stages ok
};

// Runs n_cases seeded scenarios (deterministic per-case seed mix) through the
// pipeline, optionally on a worker pool; per-case outcomes are unaffected by
// pool size. Raw results land in *results when given (indexed by case).
BenchStats run_benchmark(int n_cases, std::uint64_t seed, const GenConfig& gen = {},
                         int workers = 1, std::vector<PlanResult>* results = nullptr);

std::string bench_stats_to_json(const BenchStats& stats);
std::string bench_stats_table(const BenchStats& stats);

// CSV grid `t,x,y,theta,v,phi,a,omega`, NE+1 rows; the terminal row repeats
// the last control interval's values.
void write_trajectory_csv(const std::filesystem::path& path, const NlpSolution& sol);

// Machine-readable record of one run: stage flags/times, solver diagnostics,
// verification margins, reference samples and tunnel rectangles.
std::string plan_result_to_json(const Scenario& scenario, const PlanResult& result);

}  // namespace offroad
