#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>

#include "ttpark/planner.hpp"

namespace ttpark {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double point_box_distance(Vec2 p, const OrientedBox& b) {
  const Vec2 d = p - b.center().position();
  const double along = std::abs(dot(d, unit(b.center().heading()))) - 0.5 * b.length();
  const double across = std::abs(dot(d, unit(b.center().heading() + 0.5 * kPi))) - 0.5 * b.width();
  return std::hypot(std::max(along, 0.0), std::max(across, 0.0));
}

}  // namespace

HolonomicField::HolonomicField(const Scenario& sc, Vec2 goal, double resolution)
    : bounds_(sc.bounds), res_(resolution) {
  cols_ = std::max(1, static_cast<int>(std::ceil(bounds_.width() / res_)));
  rows_ = std::max(1, static_cast<int>(std::ceil(bounds_.height() / res_)));
  const auto n = static_cast<std::size_t>(cols_) * static_cast<std::size_t>(rows_);
  blocked_.assign(n, 0);
  dist_.assign(n, kInf);

  // The trailer axle sits inside the trailer body, at least `clearance` from
  // its edge, so it can never come closer than that to an obstacle or the lot
  // boundary. Shrink by half a cell diagonal so blocking stays conservative.
  const auto& body = sc.vehicle.trailer_body;
  const double clearance = std::min({body.rear_overhang, body.length - body.rear_overhang, 0.5 * body.width});
  const double margin = clearance - 0.5 * std::sqrt(2.0) * res_;

  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) {
      const Vec2 center{bounds_.min_x + (c + 0.5) * res_, bounds_.min_y + (r + 0.5) * res_};
      bool block = false;
      if (margin > 0.0) {
        block = center.x - bounds_.min_x < margin || bounds_.max_x - center.x < margin ||
                center.y - bounds_.min_y < margin || bounds_.max_y - center.y < margin;
      }
      for (const auto& ob : sc.obstacles) {
        if (block) break;
        block = point_box_distance(center, ob) < std::max(margin, 0.0) || box_contains_point(ob, center);
      }
      blocked_[static_cast<std::size_t>(r) * cols_ + c] = block ? 1 : 0;
    }
  }

  const std::ptrdiff_t start = index(goal);
  if (start < 0 || blocked_[static_cast<std::size_t>(start)]) return;

  using Item = std::pair<double, std::ptrdiff_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  dist_[static_cast<std::size_t>(start)] = 0.0;
  open.emplace(0.0, start);
  const double diag = std::sqrt(2.0) * res_;
  while (!open.empty()) {
    const auto [d, i] = open.top();
    open.pop();
    if (d > dist_[static_cast<std::size_t>(i)]) continue;
    const int r = static_cast<int>(i / cols_);
    const int c = static_cast<int>(i % cols_);
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) {
        if (dr == 0 && dc == 0) continue;
        const int nr = r + dr;
        const int nc = c + dc;
        if (nr < 0 || nr >= rows_ || nc < 0 || nc >= cols_) continue;
        const auto j = static_cast<std::size_t>(nr) * cols_ + nc;
        if (blocked_[j]) continue;
        const double nd = d + ((dr != 0 && dc != 0) ? diag : res_);
        if (nd < dist_[j]) {
          dist_[j] = nd;
          open.emplace(nd, static_cast<std::ptrdiff_t>(j));
        }
      }
    }
  }
}

std::ptrdiff_t HolonomicField::index(Vec2 p) const {
  const auto c = static_cast<std::ptrdiff_t>(std::floor((p.x - bounds_.min_x) / res_));
  const auto r = static_cast<std::ptrdiff_t>(std::floor((p.y - bounds_.min_y) / res_));
  if (c < 0 || c >= cols_ || r < 0 || r >= rows_) return -1;
  return r * cols_ + c;
}

double HolonomicField::distance(Vec2 p) const {
  const auto i = index(p);
  return i < 0 ? kInf : dist_[static_cast<std::size_t>(i)];
}

bool HolonomicField::blocked(Vec2 p) const {
  const auto i = index(p);
  return i < 0 || blocked_[static_cast<std::size_t>(i)] != 0;
}

TrailerPoseField::TrailerPoseField(const Scenario& sc, const Pose2& goal, double resolution, int heading_bins)
    : bounds_(sc.bounds), res_(resolution), bins_(heading_bins) {
  cols_ = std::max(1, static_cast<int>(std::ceil(bounds_.width() / res_)));
  rows_ = std::max(1, static_cast<int>(std::ceil(bounds_.height() / res_)));
  const std::size_t n = static_cast<std::size_t>(cols_) * rows_ * bins_;
  dist_.assign(2 * n, std::numeric_limits<float>::infinity());
  const double dtheta = kTwoPi / bins_;
  auto bin_heading = [&](int b) { return -kPi + (b + 0.5) * dtheta; };

  const auto& vp = sc.vehicle;
  const auto& body = vp.trailer_body;
  std::vector<std::uint8_t> free(n, 0);
  for (int b = 0; b < bins_; ++b) {
    const Vec2 ax = unit(bin_heading(b));
    const double heading = bin_heading(b);
    for (int r = 0; r < rows_; ++r) {
      for (int c = 0; c < cols_; ++c) {
        const Vec2 axle{bounds_.min_x + (c + 0.5) * res_, bounds_.min_y + (r + 0.5) * res_};
        const Vec2 centre = axle + (0.5 * body.length - body.rear_overhang) * ax;
        const OrientedBox box(Pose2(centre.x, centre.y, heading), body.length, body.width);
        bool ok = rect_contains_box(bounds_, box);
        for (std::size_t i = 0; ok && i < sc.obstacles.size(); ++i) ok = !boxes_overlap(box, sc.obstacles[i]);
        free[(static_cast<std::size_t>(r) * cols_ + c) * bins_ + b] = ok ? 1 : 0;
      }
    }
  }

  // Motions start at cell centres, so each (heading bin, motion) pair maps to a
  // fixed cell offset. Each motion is checked at its midpoint and end.
  struct Offset {
    int dc, dr, bin;
  };
  struct Motion {
    Offset mid, end;
    float cost;
  };
  const double kappa = std::tan(std::min(vp.max_hitch, 1.5)) / vp.trailer_length;
  const double len = std::max(2.0 * res_, 1.0);
  const std::array<double, 5> curvatures{-kappa, -0.5 * kappa, 0.0, 0.5 * kappa, kappa};
  auto offset = [&](int b, double k, double s) {
    const double th = bin_heading(b);
    double dx, dy;
    const double th2 = th + k * s;
    if (std::abs(k) < 1e-12) {
      dx = s * std::cos(th);
      dy = s * std::sin(th);
    } else {
      dx = (std::sin(th2) - std::sin(th)) / k;
      dy = -(std::cos(th2) - std::cos(th)) / k;
    }
    const int nb = static_cast<int>(std::floor((normalize_angle(th2) + kPi) / dtheta)) % bins_;
    return Offset{static_cast<int>(std::floor(dx / res_ + 0.5)), static_cast<int>(std::floor(dy / res_ + 0.5)), nb};
  };
  std::vector<Motion> motions;
  motions.reserve(static_cast<std::size_t>(bins_) * curvatures.size() * 2);
  // The search runs outward from the goal, so a motion with dir = +1 here is
  // driven in reverse by the vehicle. Holding curvature k needs a hitch angle of
  // atan(|k| L_t), charged per primitive length.
  const auto& cfg = sc.planner_config;
  for (int b = 0; b < bins_; ++b) {
    for (double dir : {1.0, -1.0}) {
      for (double k : curvatures) {
        const double per_metre = dir > 0.0 ? cfg.reverse_penalty : 1.0;
        const double hitch = cfg.hitch_penalty * std::atan(std::abs(k) * vp.trailer_length) / cfg.primitive_len;
        motions.push_back({offset(b, k, 0.5 * dir * len), offset(b, k, dir * len),
                           static_cast<float>(len * (per_metre + hitch))});
      }
    }
  }
  const std::size_t per_bin = curvatures.size() * 2;

  // State = (cell, heading bin, direction of the vehicle's next move); index 0
  // is forward, 1 reverse. Changing direction costs the switch penalty.
  const std::ptrdiff_t start = index(goal.x(), goal.y(), goal.heading());
  if (start < 0 || !free[static_cast<std::size_t>(start)]) return;

  using Item = std::pair<float, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  for (std::size_t m = 0; m < 2; ++m) {
    dist_[2 * static_cast<std::size_t>(start) + m] = 0.0f;
    open.emplace(0.0f, 2 * static_cast<std::size_t>(start) + m);
  }
  auto cell = [&](int c, int r, const Offset& o) -> std::ptrdiff_t {
    const int nc = c + o.dc;
    const int nr = r + o.dr;
    if (nc < 0 || nc >= cols_ || nr < 0 || nr >= rows_) return -1;
    const auto j = (static_cast<std::size_t>(nr) * cols_ + nc) * bins_ + o.bin;
    return free[j] ? static_cast<std::ptrdiff_t>(j) : -1;
  };
  const auto sw = static_cast<float>(cfg.switch_penalty);
  while (!open.empty()) {
    const auto [d, k] = open.top();
    open.pop();
    if (d > dist_[k]) continue;
    const std::size_t next_move = k % 2;
    const std::size_t i = k / 2;
    const int b = static_cast<int>(i % bins_);
    const int c = static_cast<int>((i / bins_) % cols_);
    const int r = static_cast<int>(i / bins_ / cols_);
    for (std::size_t m = 0; m < per_bin; ++m) {
      const Motion& mo = motions[static_cast<std::size_t>(b) * per_bin + m];
      if (cell(c, r, mo.mid) < 0) continue;
      const std::ptrdiff_t j = cell(c, r, mo.end);
      if (j < 0) continue;
      // The first half of `motions` per bin runs outward forward: a vehicle reverse move.
      const std::size_t move = m < curvatures.size() ? 1 : 0;
      const float nd = d + mo.cost + (move != next_move ? sw : 0.0f);
      const std::size_t jk = 2 * static_cast<std::size_t>(j) + move;
      if (nd < dist_[jk]) {
        dist_[jk] = nd;
        open.emplace(nd, jk);
      }
    }
  }
}

std::ptrdiff_t TrailerPoseField::index(double x, double y, double heading) const {
  const auto c = static_cast<std::ptrdiff_t>(std::floor((x - bounds_.min_x) / res_));
  const auto r = static_cast<std::ptrdiff_t>(std::floor((y - bounds_.min_y) / res_));
  if (c < 0 || c >= cols_ || r < 0 || r >= rows_) return -1;
  const auto b =
      static_cast<std::ptrdiff_t>(std::floor((normalize_angle(heading) + kPi) / (kTwoPi / bins_))) % bins_;
  return (r * cols_ + c) * bins_ + b;
}

double TrailerPoseField::distance(const Pose2& trailer, int last_direction, double switch_penalty) const {
  const auto i = index(trailer.x(), trailer.y(), trailer.heading());
  if (i < 0) return kInf;
  const double fwd = dist_[2 * static_cast<std::size_t>(i)];
  const double rev = dist_[2 * static_cast<std::size_t>(i) + 1];
  if (last_direction > 0) return std::min(fwd, rev + switch_penalty);
  if (last_direction < 0) return std::min(rev, fwd + switch_penalty);
  return std::min(fwd, rev);
}

Heuristic::Heuristic(const Scenario& sc, const Pose2& goal, double heading_tol)
    : params_(sc.vehicle),
      goal_(goal),
      heading_tol_(heading_tol),
      switch_penalty_(sc.planner_config.switch_penalty),
      metres_per_radian_(sc.vehicle.trailer_length / std::sin(std::min(sc.vehicle.max_hitch, 0.5 * kPi))),
      field_(sc, goal.position(), sc.planner_config.xy_res) {
  if (sc.planner_config.pose_field_res > 0.0) pose_field_.emplace(sc, goal, sc.planner_config.pose_field_res);
}

double Heuristic::operator()(const ArticulatedState& s, int last_direction) const {
  const Vec2 axle = trailer_axle(s, params_);
  const double base = std::max(ttpark::distance(axle, goal_.position()), field_.distance(axle));
  if (!pose_field_) return base;
  // |psi_t'| <= |v| sin(max_hitch) / L_t bounds how fast the trailer can turn.
  const double turn = std::abs(normalize_angle(s.psi_t() - goal_.heading())) - heading_tol_;
  // A blocked or unreachable lattice cell only means the coarse lattice missed
  // it; fall back to the other bounds rather than pruning.
  const double lattice = pose_field_->distance(Pose2(axle.x, axle.y, s.psi_t()), last_direction, switch_penalty_);
  return std::max({base, metres_per_radian_ * std::max(turn, 0.0), std::isfinite(lattice) ? lattice : 0.0});
}

}  // namespace ttpark
