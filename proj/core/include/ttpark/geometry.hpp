#pragma once

#include <array>
#include <cmath>
#include <numbers>

namespace ttpark {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

namespace detail {
double wrap_angle_slow(double a);
}

/// Wraps an angle into (-pi, pi]. Throws std::invalid_argument on non-finite input.
inline double normalize_angle(double a) {
  if (a > -kPi && a <= kPi) return a;
  return detail::wrap_angle_slow(a);
}

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::sqrt(a.x * a.x + a.y * a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }
inline Vec2 unit(double heading) { return {std::cos(heading), std::sin(heading)}; }

/// Planar pose. The heading is kept in (-pi, pi] by construction.
class Pose2 {
 public:
  Pose2() = default;
  Pose2(double x, double y, double heading)
      : x_(x), y_(y), heading_(normalize_angle(heading)) {}

  double x() const { return x_; }
  double y() const { return y_; }
  double heading() const { return heading_; }
  Vec2 position() const { return {x_, y_}; }

  friend bool operator==(const Pose2&, const Pose2&) = default;

 private:
  double x_ = 0.0;
  double y_ = 0.0;
  double heading_ = 0.0;
};

/// Rectangle of the given length (along heading) and width, centered on `center`.
class OrientedBox {
 public:
  OrientedBox(Pose2 center, double length, double width);

  const Pose2& center() const { return center_; }
  double length() const { return length_; }
  double width() const { return width_; }

  /// Counter-clockwise starting from the front-left corner.
  std::array<Vec2, 4> corners() const;
  double circumradius() const { return 0.5 * std::sqrt(length_ * length_ + width_ * width_); }

  friend bool operator==(const OrientedBox&, const OrientedBox&) = default;

 private:
  Pose2 center_;
  double length_;
  double width_;
};

/// Closed intersection test (touching counts) via separating axes.
bool boxes_overlap(const OrientedBox& a, const OrientedBox& b);

/// Closed containment test.
bool box_contains_point(const OrientedBox& b, Vec2 p);

struct AlignedRect {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  double width() const { return max_x - min_x; }
  double height() const { return max_y - min_y; }
  bool contains(Vec2 p) const {
    return p.x >= min_x && p.x <= max_x && p.y >= min_y && p.y <= max_y;
  }
  friend bool operator==(const AlignedRect&, const AlignedRect&) = default;
};

/// True iff every corner of `b` lies inside `r` (closed).
bool rect_contains_box(const AlignedRect& r, const OrientedBox& b);

}  // namespace ttpark
