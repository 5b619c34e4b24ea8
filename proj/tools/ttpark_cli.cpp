// ttpark: plan and simulate tractor-trailer parking maneuvers.
//
// Exit codes: 0 success, 1 domain failure (no path, failed run), 2 usage or parse error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ttpark/harness.hpp"
#include "ttpark/planner.hpp"
#include "ttpark/world.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

bool write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot write '" << path << "'\n";
    return false;
  }
  out << text;
  return static_cast<bool>(out);
}

int cmd_gen_lot(const std::string& out) {
  return write_file(out, ttpark::save_scenario(ttpark::builtin_lot())) ? kExitOk : kExitUsage;
}

int cmd_plan(const std::string& scenario_path, int spot, const std::string& out_csv, bool no_smooth) {
  const ttpark::Scenario sc = ttpark::load_scenario_file(scenario_path);
  try {
    ttpark::PlanStats stats;
    ttpark::PlannedPath path = ttpark::plan(sc, spot, &stats);
    if (!no_smooth) path = ttpark::smooth(path, sc);
    if (!write_file(out_csv, ttpark::path_to_csv(path))) return kExitUsage;
    std::printf("planned %zu states, length %.3f m, cost %.3f, %lld expansions\n", path.states.size(),
                path.length(), path.cost, static_cast<long long>(stats.expansions));
    return kExitOk;
  } catch (const ttpark::InvalidSpot& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const ttpark::NoPathFound& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  }
}

int cmd_simulate(const std::string& scenario_path, int spot, const std::string& controller,
                 const std::string& out_csv, const std::string& out_svg, bool no_guard) {
  const ttpark::Scenario sc = ttpark::load_scenario_file(scenario_path);
  ttpark::RunOptions opts;
  // Without --controller the scenario's own choice applies.
  if (!controller.empty()) opts.controller = ttpark::controller_from_string(controller.c_str());
  opts.guard = !no_guard;
  if (no_guard) std::cerr << "warning: hitch guard disabled; jackknifing is possible\n";

  const ttpark::SimResult r = ttpark::run(sc, spot, opts);
  if (!write_file(out_csv, ttpark::trajectory_to_csv(r)) || !write_file(out_svg, ttpark::render_svg(r, sc))) {
    return kExitUsage;
  }
  std::printf(
      "outcome=%s success=%d collision=%d jackknife=%d final_pos_err=%.4f final_heading_err=%.4f "
      "max_abs_hitch=%.4f path_length=%.3f planning_time_s=%.3f sim_time_s=%.3f\n",
      ttpark::to_string(r.outcome), r.success, r.collision, r.jackknife, r.final_pos_err, r.final_heading_err,
      r.max_abs_hitch, r.path_length, r.planning_time, r.sim_time);
  if (!r.message.empty()) std::cerr << r.message << "\n";
  return r.success ? kExitOk : kExitDomain;
}

int cmd_batch(const std::string& dir, const std::string& report_path, int parallel, bool wall_times) {
  ttpark::BatchOptions opts;
  opts.parallel = parallel;
  opts.wall_times = wall_times;
  const ttpark::BatchReport report = ttpark::run_batch(dir, opts);
  if (!write_file(report_path, report.csv()) || !write_file(report_path + ".summary.txt", report.summary())) {
    return kExitUsage;
  }
  std::cout << report.summary();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tractor-trailer parking planner and closed-loop simulator"};
  app.require_subcommand(1);

  std::string out;
  auto* gen = app.add_subcommand("gen-lot", "Write the builtin 24-spot scenario");
  gen->add_option("--out", out, "Output scenario file")->required();

  std::string scenario;
  std::string out_csv;
  std::string out_svg;
  int spot = 0;
  bool no_smooth = false;
  auto* plan = app.add_subcommand("plan", "Plan a path and write the trajectory CSV");
  plan->add_option("--scenario", scenario, "Scenario file")->required()->check(CLI::ExistingFile);
  plan->add_option("--spot", spot, "Target spot id")->required();
  plan->add_option("--out-csv", out_csv, "Trajectory CSV output")->required();
  plan->add_flag("--no-smooth", no_smooth, "Skip B-spline smoothing");

  std::string controller;
  bool no_guard = false;
  unsigned seed = 0;
  auto* sim = app.add_subcommand("simulate", "Plan and track in closed loop");
  sim->add_option("--scenario", scenario, "Scenario file")->required()->check(CLI::ExistingFile);
  sim->add_option("--spot", spot, "Target spot id")->required();
  sim->add_option("--controller", controller, "Tracking controller (default: the scenario's)")
      ->check(CLI::IsMember({"lqr", "nmpc"}));
  sim->add_option("--out-csv", out_csv, "Trajectory CSV output")->required();
  sim->add_option("--out-svg", out_svg, "SVG rendering output")->required();
  sim->add_flag("--no-guard", no_guard, "UNSAFE: disable the hitch-angle guard (reproduces jackknifing)");
  sim->add_option("--seed", seed, "Seed for randomized test utilities; planning and control are seed-independent");

  std::string dir;
  std::string report;
  int parallel = 1;
  bool wall_times = false;
  auto* batch = app.add_subcommand("batch", "Run every free spot of every scenario in a directory");
  batch->add_option("--dir", dir, "Directory of *.json scenarios")->required();
  batch->add_option("--report", report, "Report CSV output")->required();
  batch->add_option("--parallel", parallel, "Worker threads")->check(CLI::PositiveNumber);
  batch->add_flag("--wall-times", wall_times, "Record wall-clock timings (report no longer reproducible)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen) return cmd_gen_lot(out);
    if (*plan) return cmd_plan(scenario, spot, out_csv, no_smooth);
    if (*sim) return cmd_simulate(scenario, spot, controller, out_csv, out_svg, no_guard);
    if (*batch) return cmd_batch(dir, report, parallel, wall_times);
  } catch (const ttpark::ScenarioError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
