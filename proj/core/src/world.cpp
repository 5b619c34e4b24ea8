#include "ttpark/world.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace ttpark {

const ParkingSpot* Scenario::find_spot(int id) const {
  auto it = std::ranges::find_if(spots, [id](const ParkingSpot& s) { return s.id == id; });
  return it == spots.end() ? nullptr : &*it;
}

namespace {

[[noreturn]] void fail(const std::string& what) { throw ScenarioError("invalid scenario: " + what); }

}  // namespace

void validate_scenario(const Scenario& sc) {
  if (!(sc.bounds.max_x > sc.bounds.min_x && sc.bounds.max_y > sc.bounds.min_y)) {
    fail("bounds must have positive extent");
  }
  try {
    sc.vehicle.validate();
    sc.planner_config.validate(sc.vehicle);
    sc.controller_config.validate();
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }

  std::set<int> ids;
  for (const auto& spot : sc.spots) {
    const std::string name = "spot " + std::to_string(spot.id);
    if (!ids.insert(spot.id).second) fail("duplicate spot id " + std::to_string(spot.id));
    if (!(spot.pos_tol > 0.0)) fail(name + " pos_tol must be > 0");
    if (!(spot.heading_tol > 0.0)) fail(name + " heading_tol must be > 0");
    if (!sc.bounds.contains(spot.goal.position())) fail(name + " goal outside bounds");
  }

  const auto fp = footprints(sc.start, sc.vehicle);
  if (!rect_contains_box(sc.bounds, fp.tractor) || !rect_contains_box(sc.bounds, fp.trailer)) {
    fail("start outside bounds");
  }
  if (auto hit = first_obstacle_hit(sc.start, sc)) {
    fail("start in collision (overlaps obstacle " + std::to_string(*hit) + ")");
  }
  if (is_jackknifed(sc.start, sc.vehicle)) fail("start hitch angle exceeds max_hitch");
}

std::optional<std::size_t> first_obstacle_hit(const ArticulatedState& s, const Scenario& sc) {
  const auto fp = footprints(s, sc.vehicle);
  for (std::size_t i = 0; i < sc.obstacles.size(); ++i) {
    if (boxes_overlap(fp.tractor, sc.obstacles[i]) || boxes_overlap(fp.trailer, sc.obstacles[i])) {
      return i;
    }
  }
  return std::nullopt;
}

namespace {

// Corner test against the lot and SAT against obstacles, with the body's
// trigonometry evaluated once. Equivalent to footprints() + boxes_overlap().
struct FastBox {
  Vec2 c;
  Vec2 ax;  // unit along
  Vec2 ay;  // unit across
  double hl;
  double hw;
  std::array<Vec2, 4> corners() const {
    const Vec2 f = hl * ax;
    const Vec2 l = hw * ay;
    return {c + f + l, c - f + l, c - f - l, c + f - l};
  }
};

FastBox body_box(Vec2 axle, double c, double s, const BodyDims& b, double grow) {
  const Vec2 ax{c, s};
  const Vec2 center = axle + (0.5 * b.length - b.rear_overhang) * ax;
  return {center, ax, Vec2{-s, c}, 0.5 * b.length + grow, 0.5 * b.width + grow};
}

bool separated_on(Vec2 axis, const std::array<Vec2, 4>& a, const std::array<Vec2, 4>& b) {
  double alo = dot(a[0], axis), ahi = alo, blo = dot(b[0], axis), bhi = blo;
  for (std::size_t i = 1; i < 4; ++i) {
    const double da = dot(a[i], axis);
    const double db = dot(b[i], axis);
    alo = std::min(alo, da);
    ahi = std::max(ahi, da);
    blo = std::min(blo, db);
    bhi = std::max(bhi, db);
  }
  return ahi < blo || bhi < alo;
}

bool hits(const FastBox& body, const OrientedBox& ob) {
  const double reach = std::sqrt(body.hl * body.hl + body.hw * body.hw) + ob.circumradius();
  const Vec2 d = body.c - ob.center().position();
  if (dot(d, d) > reach * reach) return false;
  const auto cb = body.corners();
  const auto co = ob.corners();
  const Vec2 ox = unit(ob.center().heading());
  const Vec2 oy{-ox.y, ox.x};
  return !(separated_on(body.ax, cb, co) || separated_on(body.ay, cb, co) || separated_on(ox, cb, co) ||
           separated_on(oy, cb, co));
}

}  // namespace

bool collision_free(const ArticulatedState& s, const Scenario& sc, double clearance) {
  const VehicleParams& p = sc.vehicle;
  const double c = std::cos(s.psi());
  const double sn = std::sin(s.psi());
  const double ct = std::cos(s.psi_t());
  const double st = std::sin(s.psi_t());
  const Vec2 hitch = s.position() - p.hitch_offset * Vec2{c, sn};
  const Vec2 axle = hitch - p.trailer_length * Vec2{ct, st};
  const FastBox tractor = body_box(s.position(), c, sn, p.tractor_body, clearance);
  const FastBox trailer = body_box(axle, ct, st, p.trailer_body, clearance);
  for (const FastBox* b : {&tractor, &trailer}) {
    for (const Vec2& corner : b->corners()) {
      if (!sc.bounds.contains(corner)) return false;
    }
  }
  for (const auto& ob : sc.obstacles) {
    if (hits(tractor, ob) || hits(trailer, ob)) return false;
  }
  return true;
}

bool spot_occupied(const Scenario& sc, const ParkingSpot& spot) {
  const auto parked = footprints(state_from_trailer_pose(spot.goal, 0.0, sc.vehicle), sc.vehicle);
  return std::ranges::any_of(sc.obstacles,
                             [&](const OrientedBox& ob) { return boxes_overlap(parked.trailer, ob); });
}

std::vector<int> free_spot_ids(const Scenario& sc) {
  std::vector<int> out;
  for (const auto& spot : sc.spots) {
    if (!spot_occupied(sc, spot)) out.push_back(spot.id);
  }
  std::ranges::sort(out);
  return out;
}

namespace lot {
// Layout of the builtin lot. All values are exact at 6 decimals so the
// scenario survives a save/load round trip bit-for-bit.
constexpr double kWidth = 80.0;
constexpr double kHeight = 60.0;
constexpr double kSpotWidth = 4.0;
constexpr double kSpotDepth = 16.0;
constexpr double kAisle = 20.0;
constexpr double kRowStartX = 16.0;
constexpr double kLowerBackY = 4.0;
constexpr double kUpperBackY = kLowerBackY + 2.0 * kSpotDepth + kAisle;  // 56
constexpr double kGoalInset = 2.25;  // trailer axle from the spot's back edge
constexpr double kHalfPi6 = 1.570796;
constexpr double kParkedLength = 14.0;
constexpr double kParkedWidth = 3.0;
}  // namespace lot

Scenario builtin_lot() {
  using namespace lot;
  Scenario sc;
  sc.bounds = {0.0, 0.0, kWidth, kHeight};

  const auto is_occupied = [](int id) {
    return std::ranges::find(kBuiltinOccupiedSpots, id) != kBuiltinOccupiedSpots.end();
  };
  for (int id = 0; id < kBuiltinSpotCount; ++id) {
    const bool upper = id >= 12;
    const int col = id % 12;
    const double cx = kRowStartX + kSpotWidth * (col + 0.5);
    // Trailer reversed in, nose toward the aisle.
    const double gy = upper ? kUpperBackY - kGoalInset : kLowerBackY + kGoalInset;
    const double heading = upper ? -kHalfPi6 : kHalfPi6;
    sc.spots.push_back({id, Pose2(cx, gy, heading), 0.3, 0.087266});
    if (is_occupied(id)) {
      const double oy = upper ? kUpperBackY - 0.5 * kSpotDepth : kLowerBackY + 0.5 * kSpotDepth;
      sc.obstacles.emplace_back(Pose2(cx, oy, heading), kParkedLength, kParkedWidth);
    }
  }

  sc.start = ArticulatedState(14.0, kLowerBackY + kSpotDepth + 0.5 * kAisle, 0.0, 0.0);
  sc.vehicle = VehicleParams{};

  SearchConfig& pc = sc.planner_config;
  pc.steer_set = SearchConfig::default_steer_set(sc.vehicle.max_steer);
  pc.heuristic_weight = 2.0;
  pc.pose_field_res = 1.0;
  pc.goal_tol_scale = 0.5;
  pc.clearance = 0.15;
  sc.controller_config.nmpc_lambda = 0.01;
  return sc;
}

}  // namespace ttpark
