#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <string>

#include <CLI11.hpp>

#include "offroad/pipeline.hpp"
#include "offroad/svg.hpp"

namespace {

namespace fs = std::filesystem;
using namespace offroad;

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

int cmd_plan(const std::string& file, const std::string& out_dir, bool svg, bool verbose) {
    const Scenario scenario = load_scenario(file);
    const PlanResult res = run_pipeline(scenario);

    std::printf("stage 1 (search + reference): %s  %.4f s  [%s, %d expansions]\n",
                res.stage1_ok ? "ok" : "FAIL", res.stage1_time_s,
                to_string(res.search.status), res.search.expansions);
    if (res.stage1_ok) {
        std::printf("stage 2 (tunnels):            %s  %.4f s  [%s]\n",
                    res.stage2_ok ? "ok" : "FAIL", res.stage2_time_s,
                    to_string(res.tunnels->status));
    }
    if (res.stage2_ok) {
        const NlpSolution& sol = *res.solution;
        std::printf("stage 3 (optimize + verify):  %s  %.4f s  [%s, %d iterations]\n",
                    res.stage3_ok ? "ok" : "FAIL", res.stage3_time_s, to_string(sol.status),
                    sol.iterations);
        std::printf("t_f: %.6f s\n", sol.t_f);
        const VerificationReport& v = *res.verification;
        std::printf("verification: %s  (clearance %.4g, bound %.4g, boundary %.4g, "
                    "defect %.4g, tunnel %.4g)\n",
                    v.all_ok() ? "pass" : "FAIL", v.worst_clearance, v.worst_bound,
                    v.worst_boundary, v.worst_defect, v.worst_tunnel);
    }
    std::printf("total: %.4f s\n", res.total_time_s());
    if (verbose) std::fputs(plan_result_to_json(scenario, res).c_str(), stdout);

    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_text(fs::path(out_dir) / "plan.json", plan_result_to_json(scenario, res));
        if (res.solution) {
            write_trajectory_csv(fs::path(out_dir) / "trajectory.csv", *res.solution);
        }
    }
    if (svg) {
        const fs::path dir = out_dir.empty() ? fs::path(".") : fs::path(out_dir);
        fs::create_directories(dir);
        write_plan_svg(dir / "scene.svg", scenario, DiscGeometry::from_params(scenario.vehicle),
                       res.reference ? &*res.reference : nullptr,
                       res.tunnels && res.tunnels->ok() ? &res.tunnels->tunnels : nullptr,
                       res.solution ? &*res.solution : nullptr);
    }
    return res.ok() ? 0 : 2;
}

int cmd_bench(int cases, std::uint64_t seed, int workers, const std::string& out_dir) {
    const BenchStats stats = run_benchmark(cases, seed, GenConfig{}, workers);
    std::fputs(bench_stats_table(stats).c_str(), stdout);
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_text(fs::path(out_dir) / "bench.json", bench_stats_to_json(stats));
    }
    return 0;
}

int cmd_rand_case(std::uint64_t seed, const std::string& out_file) {
    save_scenario(random_case(seed), out_file);
    std::printf("wrote %s\n", out_file.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Off-road trajectory planner: search, tunnels, optimization"};
    app.require_subcommand(1);

    std::string plan_file;
    std::string plan_out;
    bool plan_svg = false;
    bool plan_verbose = false;
    CLI::App* plan = app.add_subcommand("plan", "Run the full pipeline on a scenario file");
    plan->add_option("scenario", plan_file, "Scenario JSON file")->required();
    plan->add_option("--out", plan_out, "Directory for plan.json and trajectory.csv");
    plan->add_flag("--svg", plan_svg, "Write scene.svg next to the outputs");
    plan->add_flag("--verbose", plan_verbose, "Print the full result document");

    int bench_cases = 0;
    std::uint64_t bench_seed = 0;
    int bench_workers = 1;
    std::string bench_out;
    CLI::App* bench = app.add_subcommand("bench", "Random-case benchmark");
    bench->add_option("--cases", bench_cases, "Number of cases")->required();
    bench->add_option("--seed", bench_seed, "Base seed")->required();
    bench->add_option("--workers", bench_workers, "Worker threads (timing runs should use 1)");
    bench->add_option("--out", bench_out, "Directory for bench.json");

    std::uint64_t rand_seed = 0;
    std::string rand_out;
    CLI::App* rand = app.add_subcommand("rand-case", "Generate one random scenario file");
    rand->add_option("--seed", rand_seed, "Case seed")->required();
    rand->add_option("--out", rand_out, "Output scenario path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (plan->parsed()) return cmd_plan(plan_file, plan_out, plan_svg, plan_verbose);
        if (bench->parsed()) return cmd_bench(bench_cases, bench_seed, bench_workers, bench_out);
        if (rand->parsed()) return cmd_rand_case(rand_seed, rand_out);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
