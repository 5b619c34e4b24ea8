#include "ttpark/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <unordered_map>
#include <unordered_set>

namespace ttpark {

std::vector<double> SearchConfig::default_steer_set(double max_steer) {
  return {-max_steer, -0.5 * max_steer, 0.0, 0.5 * max_steer, max_steer};
}

void SearchConfig::validate(const VehicleParams& p) const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("SearchConfig: ") + what);
  };
  require(xy_res > 0.0, "xy_res must be > 0");
  require(psi_bins >= 8 && psi_t_bins >= 8, "heading bins must be >= 8");
  require(psi_bins <= 4096 && psi_t_bins <= 4096, "heading bins must be <= 4096");
  require(primitive_len >= xy_res, "primitive_len must be >= xy_res");
  require(substep_len > 0.0 && substep_len <= 0.25, "substep_len must be in (0, 0.25]");
  require(!steer_set.empty(), "steer_set must be non-empty");
  for (double s : steer_set) {
    require(std::abs(s) <= p.max_steer + 1e-12, "steer_set must lie within +/- max_steer");
    const bool mirrored = std::ranges::any_of(steer_set, [&](double o) { return std::abs(o + s) < 1e-9; });
    require(mirrored, "steer_set must be symmetric about 0");
  }
  require(reverse_penalty >= 1.0, "reverse_penalty must be >= 1");
  require(switch_penalty >= 0.0, "switch_penalty must be >= 0");
  require(steer_change_penalty >= 0.0, "steer_change_penalty must be >= 0");
  require(hitch_penalty >= 0.0, "hitch_penalty must be >= 0");
  require(node_budget > 0, "node_budget must be > 0");
  require(heuristic_weight >= 1.0, "heuristic_weight must be >= 1");
  require(goal_tol_scale > 0.0 && goal_tol_scale <= 1.0, "goal_tol_scale must be in (0, 1]");
  require(clearance >= 0.0 && clearance <= 1.0, "clearance must be in [0, 1]");
  require(pose_field_res == 0.0 || (pose_field_res >= 0.25 && pose_field_res <= 10.0),
          "pose_field_res must be 0 or in [0.25, 10]");
}

double PlannedPath::length() const {
  double total = 0.0;
  for (std::size_t i = 1; i < states.size(); ++i) {
    total += distance(states[i - 1].position(), states[i].position());
  }
  return total;
}

int substeps_per_primitive(const SearchConfig& cfg) {
  return std::max(1, static_cast<int>(std::ceil(cfg.primitive_len / cfg.substep_len - 1e-9)));
}

bool integrate_primitive(const ArticulatedState& from, Direction dir, double steer, const Scenario& sc,
                         std::vector<ArticulatedState>& out) {
  out.clear();
  const int n = substeps_per_primitive(sc.planner_config);
  const double ds = sc.planner_config.primitive_len / n;
  const ControlInput u{sign_of(dir), steer};
  ArticulatedState s = from;
  for (int k = 0; k < n; ++k) {
    s = step(s, u, ds, sc.vehicle);
    if (is_jackknifed(s, sc.vehicle) || !collision_free(s, sc, sc.planner_config.clearance)) return false;
    out.push_back(s);
  }
  return true;
}

double primitive_cost(const SearchConfig& cfg, const SearchNode& parent, Direction dir, double steer,
                      double length, double mean_abs_hitch) {
  double cost = length * (dir == Direction::kReverse ? cfg.reverse_penalty : 1.0);
  if (parent.direction != 0 && parent.direction != static_cast<int>(dir)) cost += cfg.switch_penalty;
  cost += cfg.steer_change_penalty * std::abs(steer - parent.steer);
  cost += cfg.hitch_penalty * mean_abs_hitch;
  return cost;
}

namespace {

double mean_abs_hitch(std::span<const ArticulatedState> states) {
  if (states.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& s : states) sum += std::abs(hitch_angle(s));
  return sum / static_cast<double>(states.size());
}

constexpr std::array<Direction, 2> kDirections{Direction::kForward, Direction::kReverse};

}  // namespace

std::vector<Successor> expand(const SearchNode& n, const Scenario& sc) {
  const auto& cfg = sc.planner_config;
  std::vector<Successor> out;
  std::vector<ArticulatedState> trace;
  for (Direction dir : kDirections) {
    for (double steer : cfg.steer_set) {
      if (!integrate_primitive(n.state, dir, steer, sc, trace)) continue;
      const double hitch = mean_abs_hitch(trace);
      Successor succ;
      succ.direction = dir;
      succ.steer = steer;
      succ.mean_abs_hitch = hitch;
      succ.node.state = trace.back();
      succ.node.g = n.g + primitive_cost(cfg, n, dir, steer, cfg.primitive_len, hitch);
      succ.node.direction = static_cast<int>(dir);
      succ.node.steer = steer;
      out.push_back(succ);
    }
  }
  return out;
}

bool at_goal(const ArticulatedState& s, const Pose2& goal, double pos_tol, double heading_tol,
             const VehicleParams& p) {
  const Pose2 t = trailer_pose(s, p);
  return distance(t.position(), goal.position()) <= pos_tol &&
         std::abs(normalize_angle(t.heading() - goal.heading())) <= heading_tol;
}

namespace {

struct Node {
  ArticulatedState state;
  double g = 0.0;
  std::int32_t parent = -1;
  std::int16_t substeps = 0;
  std::int8_t direction = 0;
  std::int8_t steer_index = -1;
  bool terminal = false;
};

struct OpenItem {
  double f;
  double g;
  std::uint64_t order;
  std::uint32_t index;
};

// Lowest f first; ties prefer larger g, then earlier insertion.
struct OpenOrder {
  bool operator()(const OpenItem& a, const OpenItem& b) const {
    if (a.f != b.f) return a.f > b.f;
    if (a.g != b.g) return a.g < b.g;
    return a.order > b.order;
  }
};

class CellKey {
 public:
  explicit CellKey(const SearchConfig& cfg) : cfg_(cfg) {}

  std::uint64_t operator()(const ArticulatedState& s) const {
    const auto ix = static_cast<std::int64_t>(std::floor(s.x() / cfg_.xy_res));
    const auto iy = static_cast<std::int64_t>(std::floor(s.y() / cfg_.xy_res));
    const auto bin = [](double a, int bins) {
      const double t = (a + kPi) / kTwoPi;  // (0, 1]
      auto b = static_cast<std::int64_t>(std::floor(t * bins));
      return static_cast<std::uint64_t>(std::clamp<std::int64_t>(b, 0, bins - 1) % bins);
    };
    constexpr std::int64_t kBias = 1 << 19;
    const auto ux = static_cast<std::uint64_t>((ix + kBias) & 0xFFFFF);
    const auto uy = static_cast<std::uint64_t>((iy + kBias) & 0xFFFFF);
    return (ux << 44) | (uy << 24) | (bin(s.psi(), cfg_.psi_bins) << 12) | bin(s.psi_t(), cfg_.psi_t_bins);
  }

 private:
  const SearchConfig& cfg_;
};

PlannedPath reconstruct(const std::vector<Node>& nodes, std::uint32_t last, const Scenario& sc) {
  const auto& cfg = sc.planner_config;
  std::vector<std::uint32_t> chain;
  for (auto i = static_cast<std::int64_t>(last); i >= 0; i = nodes[static_cast<std::size_t>(i)].parent) {
    chain.push_back(static_cast<std::uint32_t>(i));
  }
  std::ranges::reverse(chain);

  const double ds = cfg.primitive_len / substeps_per_primitive(cfg);
  PlannedPath path;
  path.states.push_back(nodes[chain.front()].state);
  std::vector<ArticulatedState> trace;
  for (std::size_t c = 1; c < chain.size(); ++c) {
    const Node& n = nodes[chain[c]];
    const Node& parent = nodes[chain[c - 1]];
    const auto dir = static_cast<Direction>(n.direction);
    const double steer = cfg.steer_set[static_cast<std::size_t>(n.steer_index)];
    integrate_primitive(parent.state, dir, steer, sc, trace);
    for (int k = 0; k < n.substeps; ++k) {
      path.states.push_back(trace[static_cast<std::size_t>(k)]);
      path.controls.push_back({sign_of(dir), steer});
      path.directions.push_back(dir);
      path.durations.push_back(ds);
    }
  }
  path.cost = nodes[last].g;
  return path;
}

}  // namespace

PlannedPath plan(const Scenario& sc, int spot_id, PlanStats* stats) {
  const ParkingSpot* spot = sc.find_spot(spot_id);
  if (spot == nullptr) throw InvalidSpot(spot_id);

  const auto& cfg = sc.planner_config;
  const auto& vp = sc.vehicle;
  const double pos_tol = spot->pos_tol * cfg.goal_tol_scale;
  const double heading_tol = spot->heading_tol * cfg.goal_tol_scale;
  if (stats) stats->expansions = 0;

  if (at_goal(sc.start, spot->goal, pos_tol, heading_tol, vp)) {
    PlannedPath trivial;
    trivial.states.push_back(sc.start);
    return trivial;
  }

  const Heuristic heuristic(sc, spot->goal, heading_tol);
  const CellKey key(cfg);
  const int n_sub = substeps_per_primitive(cfg);
  const double ds = cfg.primitive_len / n_sub;

  std::vector<Node> nodes;
  std::priority_queue<OpenItem, std::vector<OpenItem>, OpenOrder> open;
  std::unordered_map<std::uint64_t, double> best_g;
  std::unordered_set<std::uint64_t> closed;
  std::uint64_t order = 0;

  auto push = [&](Node n) {
    const double h = heuristic(n.state, n.direction);
    if (!std::isfinite(h)) return;
    nodes.push_back(n);
    open.push({n.g + cfg.heuristic_weight * h, n.g, order++, static_cast<std::uint32_t>(nodes.size() - 1)});
  };

  {
    Node root;
    root.state = sc.start;
    push(root);
    best_g[key(sc.start)] = 0.0;
  }

  auto goal_score = [&](const ArticulatedState& s) {
    const Pose2 t = trailer_pose(s, vp);
    return std::max(distance(t.position(), spot->goal.position()) / pos_tol,
                    std::abs(normalize_angle(t.heading() - spot->goal.heading())) / heading_tol);
  };

  std::int64_t expansions = 0;
  std::vector<ArticulatedState> trace;
  while (!open.empty()) {
    const OpenItem top = open.top();
    open.pop();
    const Node current = nodes[top.index];
    if (current.terminal) {
      if (stats) stats->expansions = expansions;
      return reconstruct(nodes, top.index, sc);
    }
    const std::uint64_t current_key = key(current.state);
    if (!closed.insert(current_key).second) continue;

    if (expansions >= cfg.node_budget) break;
    ++expansions;

    SearchNode parent_view;
    parent_view.state = current.state;
    parent_view.g = current.g;
    parent_view.direction = current.direction;
    parent_view.steer = current.steer_index < 0 ? 0.0 : cfg.steer_set[static_cast<std::size_t>(current.steer_index)];

    for (Direction dir : kDirections) {
      for (std::size_t si = 0; si < cfg.steer_set.size(); ++si) {
        const double steer = cfg.steer_set[si];
        const bool complete = integrate_primitive(current.state, dir, steer, sc, trace);

        // Goal acceptance is checked at every valid sub-step; keep the best one.
        int best_k = -1;
        double best_score = 1.0;
        for (std::size_t k = 0; k < trace.size(); ++k) {
          const double score = goal_score(trace[k]);
          if (score <= best_score) {
            best_score = score;
            best_k = static_cast<int>(k);
          }
        }
        if (best_k >= 0) {
          const std::span<const ArticulatedState> prefix(trace.data(), static_cast<std::size_t>(best_k) + 1);
          Node t;
          t.state = trace[static_cast<std::size_t>(best_k)];
          t.g = current.g + primitive_cost(cfg, parent_view, dir, steer, ds * (best_k + 1), mean_abs_hitch(prefix));
          t.parent = static_cast<std::int32_t>(top.index);
          t.substeps = static_cast<std::int16_t>(best_k + 1);
          t.direction = static_cast<std::int8_t>(dir);
          t.steer_index = static_cast<std::int8_t>(si);
          t.terminal = true;
          push(t);
        }
        if (!complete) continue;

        const ArticulatedState& end = trace.back();
        const std::uint64_t k = key(end);
        if (k == current_key || closed.contains(k)) continue;
        const double g = current.g + primitive_cost(cfg, parent_view, dir, steer, cfg.primitive_len, mean_abs_hitch(trace));
        auto [it, inserted] = best_g.try_emplace(k, g);
        if (!inserted) {
          if (it->second <= g) continue;
          it->second = g;
        }
        Node child;
        child.state = end;
        child.g = g;
        child.parent = static_cast<std::int32_t>(top.index);
        child.substeps = static_cast<std::int16_t>(n_sub);
        child.direction = static_cast<std::int8_t>(dir);
        child.steer_index = static_cast<std::int8_t>(si);
        push(child);
      }
    }
  }
  if (stats) stats->expansions = expansions;
  throw NoPathFound(expansions);
}

std::vector<ArticulatedState> replay(const PlannedPath& path, const VehicleParams& p) {
  std::vector<ArticulatedState> out;
  if (path.states.empty()) return out;
  out.push_back(path.states.front());
  for (std::size_t i = 0; i < path.controls.size(); ++i) {
    out.push_back(step(out.back(), path.controls[i], path.durations[i], p));
  }
  return out;
}

double replay_deviation(const PlannedPath& path, const VehicleParams& p) {
  const auto re = replay(path, p);
  if (re.size() != path.states.size()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (std::size_t i = 0; i < re.size(); ++i) {
    worst = std::max({worst, std::abs(re[i].x() - path.states[i].x()), std::abs(re[i].y() - path.states[i].y()),
                      std::abs(normalize_angle(re[i].psi() - path.states[i].psi())),
                      std::abs(normalize_angle(re[i].psi_t() - path.states[i].psi_t()))});
  }
  return worst;
}

double max_discrete_curvature(std::span<const ArticulatedState> states) {
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < states.size(); ++i) {
    const Vec2 a = states[i].position() - states[i - 1].position();
    const Vec2 b = states[i + 1].position() - states[i].position();
    const double la = norm(a);
    const double lb = norm(b);
    if (la < 1e-9 || lb < 1e-9) continue;
    const double turn = std::abs(normalize_angle(std::atan2(b.y, b.x) - std::atan2(a.y, a.x)));
    // Cusps reverse the chord direction; they are not curvature.
    if (turn > 0.5 * kPi) continue;
    worst = std::max(worst, turn / (0.5 * (la + lb)));
  }
  return worst;
}

}  // namespace ttpark
