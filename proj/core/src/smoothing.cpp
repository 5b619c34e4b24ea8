#include <algorithm>
#include <cmath>

#include "ttpark/planner.hpp"

namespace ttpark {

namespace {

/// Clamped uniform cubic B-spline over the given control points, parameter in [0, 1].
class CubicBSpline {
 public:
  explicit CubicBSpline(std::vector<Vec2> ctrl) : ctrl_(std::move(ctrl)) {
    const int n = static_cast<int>(ctrl_.size()) - 1;
    const int interior = n - 3;
    knots_.assign(4, 0.0);
    for (int i = 1; i <= interior; ++i) knots_.push_back(static_cast<double>(i) / (interior + 1));
    knots_.insert(knots_.end(), 4, 1.0);
  }

  Vec2 point(double u) const { return eval(u, ctrl_, knots_, 3); }

  Vec2 derivative(double u) const {
    // Derivative of a degree-3 spline is a degree-2 spline on the inner knots.
    std::vector<Vec2> d;
    for (std::size_t i = 0; i + 1 < ctrl_.size(); ++i) {
      const double span = knots_[i + 4] - knots_[i + 1];
      d.push_back(span > 0.0 ? (3.0 / span) * (ctrl_[i + 1] - ctrl_[i]) : Vec2{});
    }
    const std::vector<double> inner(knots_.begin() + 1, knots_.end() - 1);
    return eval(u, d, inner, 2);
  }

 private:
  static Vec2 eval(double u, const std::vector<Vec2>& c, const std::vector<double>& t, int p) {
    const int n = static_cast<int>(c.size()) - 1;
    u = std::clamp(u, 0.0, 1.0);
    int k = p;
    while (k < n && u >= t[static_cast<std::size_t>(k + 1)]) ++k;
    std::vector<Vec2> d(static_cast<std::size_t>(p + 1));
    for (int j = 0; j <= p; ++j) d[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j + k - p)];
    for (int r = 1; r <= p; ++r) {
      for (int j = p; j >= r; --j) {
        const double lo = t[static_cast<std::size_t>(j + k - p)];
        const double hi = t[static_cast<std::size_t>(j + 1 + k - r)];
        const double a = hi > lo ? (u - lo) / (hi - lo) : 0.0;
        d[static_cast<std::size_t>(j)] = (1.0 - a) * d[static_cast<std::size_t>(j - 1)] + a * d[static_cast<std::size_t>(j)];
      }
    }
    return d[static_cast<std::size_t>(p)];
  }

  std::vector<Vec2> ctrl_;
  std::vector<double> knots_;
};

/// Uniform arc-length sampling of a spline via a dense chord table plus Newton refinement.
class ArcLengthTable {
 public:
  explicit ArcLengthTable(const CubicBSpline& spline, int samples) : spline_(spline) {
    u_.reserve(static_cast<std::size_t>(samples) + 1);
    s_.reserve(static_cast<std::size_t>(samples) + 1);
    Vec2 prev = spline.point(0.0);
    double acc = 0.0;
    for (int i = 0; i <= samples; ++i) {
      const double u = static_cast<double>(i) / samples;
      const Vec2 p = spline.point(u);
      acc += distance(p, prev);
      prev = p;
      u_.push_back(u);
      s_.push_back(acc);
    }
  }

  double total() const { return s_.back(); }

  double parameter_at(double s) const {
    const auto it = std::ranges::upper_bound(s_, s);
    if (it == s_.begin()) return 0.0;
    if (it == s_.end()) return 1.0;
    const auto hi = static_cast<std::size_t>(it - s_.begin());
    const std::size_t lo = hi - 1;
    const double span = s_[hi] - s_[lo];
    double u = span > 0.0 ? u_[lo] + (s - s_[lo]) / span * (u_[hi] - u_[lo]) : u_[lo];
    const Vec2 base = spline_.point(u_[lo]);
    for (int iter = 0; iter < 3; ++iter) {
      const double speed = norm(spline_.derivative(u));
      if (speed < 1e-12) break;
      const double err = s - (s_[lo] + distance(spline_.point(u), base));
      u = std::clamp(u + err / speed, u_[lo], u_[hi]);
    }
    return u;
  }

 private:
  const CubicBSpline& spline_;
  std::vector<double> u_;
  std::vector<double> s_;
};

constexpr double kControlSpacing = 1.0;  // metres between decimated control points

struct Segment {
  std::size_t first;  // state index
  std::size_t last;   // state index, inclusive
  Direction dir;
};

std::vector<Segment> split_segments(const PlannedPath& path) {
  std::vector<Segment> out;
  std::size_t begin = 0;
  for (std::size_t i = 1; i <= path.transitions(); ++i) {
    if (i == path.transitions() || path.directions[i] != path.directions[begin]) {
      out.push_back({begin, i, path.directions[begin]});
      begin = i;
    }
  }
  return out;
}

bool smooth_segment(const PlannedPath& in, const Segment& seg, const VehicleParams& vp, PlannedPath& out) {
  const std::size_t m = seg.last - seg.first;
  const double sigma = sign_of(seg.dir);
  const ArticulatedState& s0 = in.states[seg.first];
  const ArticulatedState& s1 = in.states[seg.last];

  double polyline = 0.0;
  for (std::size_t i = seg.first + 1; i <= seg.last; ++i) {
    polyline += distance(in.states[i - 1].position(), in.states[i].position());
  }
  if (m < 4 || polyline < 1e-6) return false;
  const double mean_ds = polyline / static_cast<double>(m);
  const auto stride = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(kControlSpacing / mean_ds)));

  std::vector<std::size_t> picks;
  for (std::size_t i = seg.first; i < seg.last; i += stride) picks.push_back(i);
  if (picks.size() > 1 && seg.last - picks.back() < stride / 2) picks.pop_back();
  picks.push_back(seg.last);

  // Pin the end tangents to the original headings (direction of travel). A lead of
  // d / sqrt(6) gives the clamped end the curvature of an arc through the first pick.
  const Vec2 t0 = sigma * unit(s0.psi());
  const Vec2 t1 = sigma * unit(s1.psi());
  const double lead = distance(in.states[picks[0]].position(), in.states[picks[1]].position()) / std::sqrt(6.0);
  const double tail = distance(in.states[picks[picks.size() - 2]].position(), s1.position()) / std::sqrt(6.0);
  std::vector<Vec2> ctrl;
  ctrl.push_back(s0.position());
  ctrl.push_back(s0.position() + lead * t0);
  for (std::size_t i = 1; i + 1 < picks.size(); ++i) ctrl.push_back(in.states[picks[i]].position());
  ctrl.push_back(s1.position() - tail * t1);
  ctrl.push_back(s1.position());

  const CubicBSpline spline(ctrl);
  const ArcLengthTable table(spline, static_cast<int>(ctrl.size()) * 64);
  const double total = table.total();

  std::vector<ArticulatedState> states;
  states.reserve(m + 1);
  states.push_back(s0);
  double psi_t = s0.psi_t();
  for (std::size_t i = 1; i < m; ++i) {
    const double u = table.parameter_at(total * static_cast<double>(i) / static_cast<double>(m));
    const Vec2 p = spline.point(u);
    const Vec2 d = spline.derivative(u);
    const double psi = normalize_angle(std::atan2(d.y, d.x) + (sigma < 0.0 ? kPi : 0.0));
    const ArticulatedState& prev = states.back();
    const double ds = distance(p, prev.position());
    // Trailer heading along the resampled path, midpoint rule on the tractor heading.
    const double psi_mid = prev.psi() + 0.5 * normalize_angle(psi - prev.psi());
    const double k1 = std::sin(prev.psi() - psi_t);
    const double k2 = std::sin(psi_mid - (psi_t + 0.5 * sigma * ds / vp.trailer_length * k1));
    psi_t += sigma * ds / vp.trailer_length * k2;
    states.emplace_back(p.x, p.y, psi, psi_t);
  }
  states.push_back(s1);

  // Smoothing must not sharpen the segment.
  const std::span<const ArticulatedState> original(in.states.data() + seg.first, m + 1);
  if (max_discrete_curvature(states) > max_discrete_curvature(original)) return false;

  for (std::size_t i = 0; i < m; ++i) {
    const double ds = distance(states[i].position(), states[i + 1].position());
    if (ds < 1e-9) return false;
    const double dpsi = normalize_angle(states[i + 1].psi() - states[i].psi());
    const double delta = std::atan(vp.wheelbase * dpsi / (sigma * ds));
    if (std::abs(delta) > vp.max_steer) return false;
    out.controls.push_back({sigma, delta});
    out.directions.push_back(seg.dir);
    out.durations.push_back(ds);
    out.states.push_back(states[i + 1]);
  }
  return true;
}

void copy_segment(const PlannedPath& in, const Segment& seg, PlannedPath& out) {
  for (std::size_t i = seg.first; i < seg.last; ++i) {
    out.controls.push_back(in.controls[i]);
    out.directions.push_back(in.directions[i]);
    out.durations.push_back(in.durations[i]);
    out.states.push_back(in.states[i + 1]);
  }
}

}  // namespace

PlannedPath smooth(const PlannedPath& path, const Scenario& sc) {
  if (path.transitions() == 0) return path;
  PlannedPath out;
  out.cost = path.cost;
  out.states.push_back(path.states.front());
  for (const Segment& seg : split_segments(path)) {
    PlannedPath trial = out;
    if (smooth_segment(path, seg, sc.vehicle, trial)) {
      out = std::move(trial);
    } else {
      copy_segment(path, seg, out);
    }
  }
  for (const auto& s : out.states) {
    if (is_jackknifed(s, sc.vehicle) || !collision_free(s, sc, sc.planner_config.clearance)) return path;
  }
  return out;
}

}  // namespace ttpark
