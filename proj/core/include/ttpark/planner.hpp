#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ttpark/search_config.hpp"
#include "ttpark/vehicle.hpp"
#include "ttpark/world.hpp"

namespace ttpark {

enum class Direction : std::int8_t { kForward = 1, kReverse = -1 };

inline double sign_of(Direction d) { return d == Direction::kForward ? 1.0 : -1.0; }

/// Dense kinematic path. controls[i], directions[i] and durations[i] describe the
/// transition from states[i] to states[i + 1].
struct PlannedPath {
  std::vector<ArticulatedState> states;
  std::vector<ControlInput> controls;
  std::vector<Direction> directions;
  std::vector<double> durations;
  double cost = 0.0;

  std::size_t transitions() const { return controls.size(); }
  /// Sum of planar distances between consecutive tractor rear-axle positions.
  double length() const;
};

class NoPathFound : public std::runtime_error {
 public:
  explicit NoPathFound(std::int64_t expansions)
      : std::runtime_error("no path found after " + std::to_string(expansions) + " expansions"),
        expansions_(expansions) {}
  std::int64_t expansions() const { return expansions_; }

 private:
  std::int64_t expansions_;
};

class InvalidSpot : public std::invalid_argument {
 public:
  explicit InvalidSpot(int id)
      : std::invalid_argument("spot " + std::to_string(id) + " does not exist"), id_(id) {}
  int id() const { return id_; }

 private:
  int id_;
};

/// Obstacle-aware 8-connected grid distance to a goal point, at the planner's
/// xy resolution. Cells the trailer axle cannot occupy are blocked.
class HolonomicField {
 public:
  HolonomicField(const Scenario& sc, Vec2 goal, double resolution);

  /// Grid path length from the cell holding `p` to the goal cell; +inf when unreachable.
  double distance(Vec2 p) const;
  bool blocked(Vec2 p) const;

  int cols() const { return cols_; }
  int rows() const { return rows_; }

 private:
  std::ptrdiff_t index(Vec2 p) const;

  AlignedRect bounds_;
  double res_;
  int cols_;
  int rows_;
  std::vector<std::uint8_t> blocked_;
  std::vector<double> dist_;
};

/// Obstacle-aware cost-to-go over trailer poses (x, y, psi_t). The trailer
/// axle is treated as a car that may drive both ways with curvature up to
/// tan(max_hitch) / trailer_length; only the trailer body is checked against
/// obstacles. Edges are priced with the planner's reverse and hitch penalties.
/// Cells are `resolution` metres square with `heading_bins` bins.
class TrailerPoseField {
 public:
  TrailerPoseField(const Scenario& sc, const Pose2& goal, double resolution, int heading_bins = 72);

  /// Lattice path cost from the cell holding `trailer` to the goal cell; +inf when
  /// the cell is blocked or unreachable. `last_direction` (+1, -1, or 0 for none)
  /// is the direction the vehicle arrived in; leaving the other way costs
  /// `switch_penalty`.
  double distance(const Pose2& trailer, int last_direction = 0, double switch_penalty = 0.0) const;

 private:
  std::ptrdiff_t index(double x, double y, double heading) const;

  AlignedRect bounds_;
  double res_;
  int bins_;
  int cols_;
  int rows_;
  std::vector<float> dist_;
};

/// Search heuristic: the larger of the Euclidean and grid distances from the
/// trailer axle to the goal. When sc.planner_config.pose_field_res > 0 it also
/// takes the distance needed to swing the trailer heading to within
/// `heading_tol` of the goal heading and the TrailerPoseField cost.
class Heuristic {
 public:
  Heuristic(const Scenario& sc, const Pose2& goal, double heading_tol = kPi);

  /// `last_direction` is +1 / -1 for the move that reached `s`, 0 at the root.
  double operator()(const ArticulatedState& s, int last_direction = 0) const;
  const HolonomicField& field() const { return field_; }
  /// Present when sc.planner_config.pose_field_res > 0.
  const TrailerPoseField* pose_field() const { return pose_field_ ? &*pose_field_ : nullptr; }

 private:
  VehicleParams params_;
  Pose2 goal_;
  double heading_tol_;
  double switch_penalty_;
  double metres_per_radian_;
  HolonomicField field_;
  std::optional<TrailerPoseField> pose_field_;
};

/// Search-tree node as seen by expand().
struct SearchNode {
  ArticulatedState state;
  double g = 0.0;
  /// 0 for the root, otherwise +1 forward / -1 reverse.
  int direction = 0;
  double steer = 0.0;
};

struct Successor {
  SearchNode node;
  Direction direction = Direction::kForward;
  double steer = 0.0;
  double mean_abs_hitch = 0.0;
};

/// Integrates one primitive in sub-steps; `out` receives the sub-step states
/// (excluding the start). Returns false as soon as a sub-step collides or
/// exceeds the hitch bound.
bool integrate_primitive(const ArticulatedState& from, Direction dir, double steer,
                         const Scenario& sc, std::vector<ArticulatedState>& out);

/// Sub-step count and length used for a primitive under `cfg`.
int substeps_per_primitive(const SearchConfig& cfg);

/// Edge cost of a (possibly truncated) primitive of `length` metres.
double primitive_cost(const SearchConfig& cfg, const SearchNode& parent, Direction dir,
                      double steer, double length, double mean_abs_hitch);

/// All feasible successors of `n` under sc.planner_config.
std::vector<Successor> expand(const SearchNode& n, const Scenario& sc);

struct PlanStats {
  std::int64_t expansions = 0;
};

/// Hybrid A* from sc.start to the trailer goal of `spot_id`.
/// Throws InvalidSpot or NoPathFound.
PlannedPath plan(const Scenario& sc, int spot_id, PlanStats* stats = nullptr);

/// True iff the trailer pose of `s` is within the given tolerances of `goal`.
bool at_goal(const ArticulatedState& s, const Pose2& goal, double pos_tol, double heading_tol,
             const VehicleParams& p);

/// Cubic B-spline smoothing per same-direction segment; returns the input
/// unchanged if the smoothed path fails collision or hitch validation.
PlannedPath smooth(const PlannedPath& path, const Scenario& sc);

/// Re-integrates the path controls from its first state.
std::vector<ArticulatedState> replay(const PlannedPath& path, const VehicleParams& p);

/// Largest per-component deviation between `path.states` and its replay.
double replay_deviation(const PlannedPath& path, const VehicleParams& p);

/// Maximum discrete curvature of the (x, y) polyline (turning angle over mean spacing).
double max_discrete_curvature(std::span<const ArticulatedState> states);

/// Trajectory CSV: t_index,x,y,psi,psi_t,v,delta,direction with 6-decimal fields.
std::string path_to_csv(const PlannedPath& path);

}  // namespace ttpark
