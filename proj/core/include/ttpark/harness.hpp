#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ttpark/control.hpp"
#include "ttpark/planner.hpp"
#include "ttpark/world.hpp"

namespace ttpark {

struct TrajectoryPoint {
  double t = 0.0;
  ArticulatedState state;
  /// Control applied from this point to the next; zero on the last point.
  ControlInput control;
};

enum class RunOutcome {
  kSuccess,
  kInvalidSpot,
  kNoPath,
  kCollision,
  kJackknife,
  kTimeout,
  kMissedGoal,
  kControllerFault,
};

const char* to_string(RunOutcome o);

struct SimResult {
  int spot_id = 0;
  ControllerKind controller = ControllerKind::kLqr;
  RunOutcome outcome = RunOutcome::kSuccess;
  std::string message;

  std::vector<TrajectoryPoint> trajectory;
  PlannedPath path;  ///< the tracked path (smoothed unless disabled)

  bool success = false;
  bool collision = false;
  bool jackknife = false;
  bool timeout = false;
  double final_pos_err = 0.0;
  double final_heading_err = 0.0;
  double max_abs_hitch = 0.0;
  double path_length = 0.0;   ///< driven tractor rear-axle distance [m]
  double planning_time = 0.0; ///< wall clock [s]
  double sim_time = 0.0;      ///< wall clock spent in the closed loop [s]
  double sim_duration = 0.0;  ///< simulated time [s]
  std::int64_t expansions = 0;
  /// Every NMPC call produced a nonincreasing accepted-cost sequence.
  bool nmpc_monotone = true;
  std::int64_t guard_interventions = 0;
};

struct RunOptions {
  /// Overrides the scenario's controller when set.
  std::optional<ControllerKind> controller;
  /// Disabling the hitch guard is unsafe; it exists to reproduce jackknifing.
  bool guard = true;
  bool smooth = true;
  double time_budget = 120.0;  ///< simulated seconds
  int hold_steps = 10;
};

/// Plan once, then track the reference in closed loop: controller, hitch guard,
/// vehicle step, collision and jackknife checks. Domain failures are reported in
/// the result, never thrown.
SimResult run(const Scenario& sc, int spot_id, const RunOptions& opts = {});

/// Trajectory CSV of a simulation (same columns as a planned path).
std::string trajectory_to_csv(const SimResult& r);

/// SVG classes: bounds, obstacle, spot, goal-pose, plan, trace-tractor,
/// trace-trailer, footprint-start, footprint-end, footprint-failure.
std::string render_svg(const SimResult& r, const Scenario& sc);

inline constexpr double kSvgPixelsPerMetre = 10.0;

struct BatchRow {
  std::string scenario;
  int spot = -1;
  bool success = false;
  bool collision = false;
  bool jackknife = false;
  double final_pos_err = 0.0;
  double final_heading_err = 0.0;
  double max_abs_hitch = 0.0;
  double path_length = 0.0;
  double planning_time_s = 0.0;
  double sim_time_s = 0.0;
  std::string error;  ///< set for scenario files that failed to load
};

struct BatchOptions {
  int parallel = 1;
  /// Wall-clock timings make reports non-reproducible; they are left blank unless requested.
  bool wall_times = false;
  RunOptions run;
};

struct BatchReport {
  std::vector<BatchRow> rows;
  bool wall_times = false;

  std::string csv() const;
  std::string summary() const;
  double success_rate() const;
};

/// Runs every free spot of every *.json scenario in `dir`, ordered by filename
/// then spot id. Throws std::runtime_error("no scenarios found") on an empty directory.
BatchReport run_batch(const std::filesystem::path& dir, const BatchOptions& opts = {});

}  // namespace ttpark
