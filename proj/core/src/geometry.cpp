#include "ttpark/geometry.hpp"

#include <algorithm>
#include <stdexcept>

namespace ttpark {

double detail::wrap_angle_slow(double a) {
  if (!std::isfinite(a)) {
    throw std::invalid_argument("normalize_angle: non-finite angle");
  }
  double r = std::remainder(a, kTwoPi);  // [-pi, pi]
  if (r <= -kPi) r += kTwoPi;
  return r;
}

OrientedBox::OrientedBox(Pose2 center, double length, double width)
    : center_(center), length_(length), width_(width) {
  if (!(length > 0.0) || !(width > 0.0) || !std::isfinite(length) || !std::isfinite(width)) {
    throw std::invalid_argument("OrientedBox: length and width must be positive and finite");
  }
}

std::array<Vec2, 4> OrientedBox::corners() const {
  const Vec2 c = center_.position();
  const Vec2 u = unit(center_.heading());
  const Vec2 f = (0.5 * length_) * u;
  const Vec2 l = (0.5 * width_) * Vec2{-u.y, u.x};
  return {c + f + l, c - f + l, c - f - l, c + f - l};
}

namespace {

struct Interval {
  double lo;
  double hi;
};

Interval project(const std::array<Vec2, 4>& pts, Vec2 axis) {
  Interval out{dot(pts[0], axis), dot(pts[0], axis)};
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double d = dot(pts[i], axis);
    out.lo = std::min(out.lo, d);
    out.hi = std::max(out.hi, d);
  }
  return out;
}

}  // namespace

bool boxes_overlap(const OrientedBox& a, const OrientedBox& b) {
  const double reach = a.circumradius() + b.circumradius();
  if (distance(a.center().position(), b.center().position()) > reach) return false;

  const auto ca = a.corners();
  const auto cb = b.corners();
  const Vec2 ua = unit(a.center().heading());
  const Vec2 ub = unit(b.center().heading());
  const std::array<Vec2, 4> axes = {ua, Vec2{-ua.y, ua.x}, ub, Vec2{-ub.y, ub.x}};
  for (const Vec2& axis : axes) {
    const Interval pa = project(ca, axis);
    const Interval pb = project(cb, axis);
    if (pa.hi < pb.lo || pb.hi < pa.lo) return false;
  }
  return true;
}

bool box_contains_point(const OrientedBox& b, Vec2 p) {
  const Vec2 d = p - b.center().position();
  const Vec2 u = unit(b.center().heading());
  const double along = dot(d, u);
  const double across = dot(d, Vec2{-u.y, u.x});
  // Corner points computed through sin/cos carry ~1e-15 rounding; accept it.
  constexpr double eps = 1e-12;
  return std::abs(along) <= 0.5 * b.length() + eps && std::abs(across) <= 0.5 * b.width() + eps;
}

bool rect_contains_box(const AlignedRect& r, const OrientedBox& b) {
  return std::ranges::all_of(b.corners(), [&](Vec2 p) { return r.contains(p); });
}

}  // namespace ttpark
