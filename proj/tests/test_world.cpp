#include <doctest.h>

#include <random>
#include <set>

#include "oracles.hpp"
#include "ttpark/world.hpp"

using namespace ttpark;

namespace {

Scenario open_lot() {
  Scenario sc;
  sc.bounds = {0.0, 0.0, 60.0, 40.0};
  sc.start = ArticulatedState(20.0, 20.0, 0.0, 0.0);
  sc.spots.push_back({0, Pose2(40.0, 20.0, 0.0)});
  return sc;
}

std::string replace_once(std::string text, const std::string& from, const std::string& to) {
  const auto at = text.find(from);
  REQUIRE(at != std::string::npos);
  return text.replace(at, from.size(), to);
}

}  // namespace

TEST_SUITE("world") {

TEST_CASE("builtin lot layout") {
  const Scenario sc = builtin_lot();
  CHECK(sc.spots.size() == static_cast<std::size_t>(kBuiltinSpotCount));
  CHECK(sc.bounds.width() == 80.0);
  CHECK(sc.bounds.height() == 60.0);
  CHECK(sc.obstacles.size() == 8);
  CHECK_NOTHROW(validate_scenario(sc));
  CHECK(collision_free(sc.start, sc));
  CHECK(hitch_angle(sc.start) == 0.0);

  const std::vector<int> free = free_spot_ids(sc);
  CHECK(free.size() == 16);
  const std::set<int> occupied(kBuiltinOccupiedSpots.begin(), kBuiltinOccupiedSpots.end());
  for (const auto& spot : sc.spots) CHECK(spot_occupied(sc, spot) == (occupied.count(spot.id) == 1));
}

TEST_CASE("builtin lot spots are 16 m by 4 m and clear when free") {
  const Scenario sc = builtin_lot();
  // Rows are 16 m deep against the lot's long edges, leaving a 20 m aisle.
  for (int id : free_spot_ids(sc)) {
    const ParkingSpot* spot = sc.find_spot(id);
    REQUIRE(spot != nullptr);
    const bool lower = spot->goal.heading() > 0.0;
    const double cy = lower ? 12.0 : 48.0;
    const oracle::Rect area{spot->goal.x(), cy, 0.5 * kPi, 16.0, 4.0};
    CHECK(oracle::contains(area, spot->goal.x(), spot->goal.y()));
    CHECK(area.cx - 2.0 >= sc.bounds.min_x);
    CHECK(area.cx + 2.0 <= sc.bounds.max_x);
    for (const auto& ob : sc.obstacles) {
      const oracle::Rect o{ob.center().x(), ob.center().y(), ob.center().heading(), ob.length(), ob.width()};
      CHECK(oracle::overlap_with_margin(area, o, 0.001) == oracle::Verdict::kSeparate);
    }
    // The parked trailer fits inside its spot.
    const Footprints parked = footprints(state_from_trailer_pose(spot->goal, 0.0, sc.vehicle), sc.vehicle);
    for (const Vec2& c : parked.trailer.corners()) CHECK(oracle::contains(area, c.x, c.y));
  }
}

TEST_CASE("builtin lot is deterministic and round-trips") {
  const std::string a = save_scenario(builtin_lot());
  const std::string b = save_scenario(builtin_lot());
  CHECK(a == b);
  const Scenario back = load_scenario(a);
  CHECK(back == builtin_lot());
  CHECK(save_scenario(back) == a);
}

TEST_CASE("round trip of a scenario with every field changed") {
  Scenario sc = open_lot();
  sc.obstacles.emplace_back(Pose2(30.0, 5.0, 0.25), 3.5, 1.25);
  sc.spots.push_back({7, Pose2(10.0, 30.0, -1.5), 0.5, 0.1});
  sc.vehicle.wheelbase = 4.0;
  sc.vehicle.hitch_offset = 0.5;
  sc.planner_config.node_budget = 1234;
  sc.planner_config.steer_set = {-0.5, 0.0, 0.5};
  sc.planner_config.pose_field_res = 1.5;
  sc.controller_config.controller = ControllerKind::kNmpc;
  sc.controller_config.q_diag = {2.0, 3.0, 4.0, 5.0};
  sc.controller_config.dare_tol = 1e-10;
  const Scenario back = load_scenario(save_scenario(sc));
  CHECK(back == sc);
}

TEST_CASE("validation errors name the problem") {
  const std::string base = save_scenario(builtin_lot());
  SUBCASE("zero position tolerance") {
    const std::string bad = replace_once(base, "\"pos_tol\": 0.300000", "\"pos_tol\": 0.000000");
    try {
      load_scenario(bad);
      FAIL("expected ScenarioError");
    } catch (const ScenarioError& e) {
      CHECK(std::string(e.what()).find("spot 0") != std::string::npos);
      CHECK(std::string(e.what()).find("pos_tol") != std::string::npos);
    }
  }
  SUBCASE("start inside an obstacle") {
    Scenario sc = builtin_lot();
    sc.obstacles.emplace_back(sc.start.tractor_pose(), 2.0, 2.0);
    CHECK_THROWS_WITH_AS(load_scenario(save_scenario(sc)), doctest::Contains("start in collision"), ScenarioError);
  }
  SUBCASE("unknown key") {
    const std::string bad = replace_once(base, "\"max_x\"", "\"extra\": 1, \"max_x\"");
    CHECK_THROWS_WITH_AS(load_scenario(bad), doctest::Contains("bounds.extra"), ScenarioError);
  }
  SUBCASE("missing key") {
    const std::string bad = replace_once(base, "\"max_x\": 80.000000,", "");
    CHECK_THROWS_WITH_AS(load_scenario(bad), doctest::Contains("bounds.max_x"), ScenarioError);
  }
  SUBCASE("integer field given a fraction") {
    const std::string bad = replace_once(base, "\"nmpc_horizon\": 20", "\"nmpc_horizon\": 20.5");
    CHECK_THROWS_WITH_AS(load_scenario(bad), doctest::Contains("nmpc_horizon"), ScenarioError);
  }
  SUBCASE("syntax error reports a line") {
    CHECK_THROWS_WITH_AS(load_scenario("{\n\"bounds\": [1,\n}"), doctest::Contains("line 3"), ScenarioError);
  }
  SUBCASE("duplicate spot id") {
    Scenario sc = builtin_lot();
    sc.spots[1].id = sc.spots[0].id;
    CHECK_THROWS_WITH_AS(validate_scenario(sc), doctest::Contains("duplicate"), ScenarioError);
  }
  SUBCASE("bad controller name") {
    const std::string bad = replace_once(base, "\"controller\": \"lqr\"", "\"controller\": \"pid\"");
    CHECK_THROWS_AS(load_scenario(bad), ScenarioError);
  }
}

TEST_CASE("collision_free checks bounds and obstacles") {
  Scenario sc = open_lot();
  CHECK(collision_free(sc.start, sc));
  // Tractor front past the right edge.
  CHECK_FALSE(collision_free({59.0, 20.0, 0.0, 0.0}, sc));
  // Trailer tail past the left edge.
  CHECK_FALSE(collision_free({9.0, 20.0, 0.0, 0.0}, sc));

  // Tractor front edge sits at x = 20 + 6 - 1 = 25.
  const double front = 20.0 + sc.vehicle.tractor_body.length - sc.vehicle.tractor_body.rear_overhang;
  for (double gap : {0.001, -0.001}) {
    Scenario s2 = sc;
    s2.obstacles.emplace_back(Pose2(front + gap + 0.5, 20.0, 0.0), 1.0, 1.0);
    const Footprints f = footprints(s2.start, s2.vehicle);
    const auto& t = f.tractor;
    const auto verdict = oracle::overlap_with_margin(
        {t.center().x(), t.center().y(), t.center().heading(), t.length(), t.width()},
        {front + gap + 0.5, 20.0, 0.0, 1.0, 1.0}, 0.0004);
    REQUIRE(verdict != oracle::Verdict::kAmbiguous);
    CHECK(collision_free(s2.start, s2) == (verdict == oracle::Verdict::kSeparate));
    CHECK(first_obstacle_hit(s2.start, s2).has_value() == (verdict == oracle::Verdict::kOverlap));
  }
}

TEST_CASE("collision_free agrees with footprints and boxes_overlap") {
  Scenario sc = builtin_lot();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> x(0.0, 80.0);
  std::uniform_real_distribution<double> y(0.0, 60.0);
  std::uniform_real_distribution<double> h(-kPi, kPi);
  std::uniform_real_distribution<double> g(-1.0, 1.0);
  for (int i = 0; i < 5000; ++i) {
    const double psi = h(rng);
    const ArticulatedState s(x(rng), y(rng), psi, psi - g(rng));
    const Footprints f = footprints(s, sc.vehicle);
    bool expect = rect_contains_box(sc.bounds, f.tractor) && rect_contains_box(sc.bounds, f.trailer);
    for (const auto& ob : sc.obstacles) {
      expect = expect && !boxes_overlap(f.tractor, ob) && !boxes_overlap(f.trailer, ob);
    }
    CHECK(collision_free(s, sc) == expect);
  }
}

TEST_CASE("adding an obstacle never frees a state") {
  Scenario sc = builtin_lot();
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> x(0.0, 80.0);
  std::uniform_real_distribution<double> y(0.0, 60.0);
  std::uniform_real_distribution<double> h(-kPi, kPi);
  for (int i = 0; i < 2000; ++i) {
    const double psi = h(rng);
    const ArticulatedState s(x(rng), y(rng), psi, psi + 0.3);
    const bool before = collision_free(s, sc);
    Scenario more = sc;
    more.obstacles.emplace_back(Pose2(x(rng), y(rng), h(rng)), 5.0, 2.0);
    if (!before) CHECK_FALSE(collision_free(s, more));
  }
}

TEST_CASE("find_spot") {
  const Scenario sc = builtin_lot();
  REQUIRE(sc.find_spot(23) != nullptr);
  CHECK(sc.find_spot(23)->id == 23);
  CHECK(sc.find_spot(24) == nullptr);
  CHECK(sc.find_spot(-1) == nullptr);
}

}  // TEST_SUITE
