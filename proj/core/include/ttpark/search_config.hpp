#pragma once

#include <cstdint>
#include <vector>

namespace ttpark {

struct VehicleParams;

/// Hybrid A* tuning. Goal tolerances come from the target ParkingSpot.
struct SearchConfig {
  double xy_res = 0.5;
  int psi_bins = 72;
  int psi_t_bins = 72;
  double primitive_len = 2.0;
  /// Integration sub-step along a primitive; collision and hitch are checked at every one.
  double substep_len = 0.25;
  std::vector<double> steer_set{-0.55, -0.275, 0.0, 0.275, 0.55};
  double reverse_penalty = 2.0;
  double switch_penalty = 5.0;
  double steer_change_penalty = 1.0;
  double hitch_penalty = 2.0;
  std::int64_t node_budget = 500000;
  /// Weight on the heuristic in f = g + w*h. 1 keeps the search optimal.
  double heuristic_weight = 1.0;
  /// The planner accepts the goal at this fraction of the spot tolerances, leaving
  /// the remainder as margin for tracking.
  double goal_tol_scale = 1.0;
  /// Extra gap kept around both bodies during search and smoothing. Obstacle corners
  /// can otherwise slip between sub-steps.
  double clearance = 0.0;
  /// Cell size of the optional trailer-pose lattice heuristic; 0 disables it.
  double pose_field_res = 0.0;

  /// Five-element steer set {-max, -max/2, 0, max/2, max} for the given limit.
  static std::vector<double> default_steer_set(double max_steer);

  /// Throws std::invalid_argument naming the violated field.
  void validate(const VehicleParams& p) const;

  friend bool operator==(const SearchConfig&, const SearchConfig&) = default;
};

}  // namespace ttpark
