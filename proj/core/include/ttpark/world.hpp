#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ttpark/geometry.hpp"
#include "ttpark/search_config.hpp"
#include "ttpark/track_config.hpp"
#include "ttpark/vehicle.hpp"

namespace ttpark {

/// Raised for malformed scenario text (with a line or field locus) and for
/// scenarios that violate an invariant.
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A target slot. `goal` is the desired trailer-axle pose at rest.
struct ParkingSpot {
  int id = 0;
  Pose2 goal;
  double pos_tol = 0.3;
  double heading_tol = 0.087266;
  friend bool operator==(const ParkingSpot&, const ParkingSpot&) = default;
};

struct Scenario {
  AlignedRect bounds;
  std::vector<OrientedBox> obstacles;
  std::vector<ParkingSpot> spots;
  ArticulatedState start;
  VehicleParams vehicle;
  SearchConfig planner_config;
  TrackConfig controller_config;

  const ParkingSpot* find_spot(int id) const;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Checks every Scenario invariant; throws ScenarioError naming the first violation.
void validate_scenario(const Scenario& sc);

/// Both footprints inside bounds and clear of every obstacle. With `clearance` > 0
/// each footprint is grown by that much on every side first.
bool collision_free(const ArticulatedState& s, const Scenario& sc, double clearance = 0.0);

/// Index of the first obstacle either footprint overlaps, if any.
std::optional<std::size_t> first_obstacle_hit(const ArticulatedState& s, const Scenario& sc);

/// A spot is occupied when an obstacle overlaps the trailer footprint parked at its goal.
bool spot_occupied(const Scenario& sc, const ParkingSpot& spot);
std::vector<int> free_spot_ids(const Scenario& sc);

/// Deterministic 24-spot lot: two facing rows of 12 perpendicular spots across a
/// 20 m aisle, eight of them occupied by parked trucks.
Scenario builtin_lot();

inline constexpr int kBuiltinSpotCount = 24;
inline constexpr std::array<int, 8> kBuiltinOccupiedSpots{2, 5, 7, 10, 14, 17, 19, 22};

Scenario load_scenario(std::string_view text);
Scenario load_scenario_file(const std::string& path);

/// Sorted keys, fixed 6-decimal numbers; load_scenario inverts it exactly for
/// values representable at that precision.
std::string save_scenario(const Scenario& sc);

}  // namespace ttpark
