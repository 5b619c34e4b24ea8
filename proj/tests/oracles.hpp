#pragma once

// Reference implementations used only by tests. They deliberately avoid the
// library code paths they check.

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "ttpark/geometry.hpp"
#include "ttpark/vehicle.hpp"

namespace oracle {

inline double wrap(double a) {
  constexpr double two_pi = 6.283185307179586476925286766559;
  constexpr double pi = 3.141592653589793238462643383279;
  while (a > pi) a -= two_pi;
  while (a <= -pi) a += two_pi;
  return a;
}

struct Rect {
  double cx, cy, heading, length, width;
};

inline Rect inflate(Rect r, double by) { return {r.cx, r.cy, r.heading, r.length + 2 * by, r.width + 2 * by}; }

inline bool contains(const Rect& r, double px, double py) {
  const double dx = px - r.cx;
  const double dy = py - r.cy;
  const double c = std::cos(r.heading);
  const double s = std::sin(r.heading);
  const double along = c * dx + s * dy;
  const double across = -s * dx + c * dy;
  return std::abs(along) <= 0.5 * r.length && std::abs(across) <= 0.5 * r.width;
}

/// Points on the outline of `r` at most `spacing` apart, plus its centre.
inline std::vector<std::pair<double, double>> outline(const Rect& r, double spacing) {
  std::vector<std::pair<double, double>> pts{{r.cx, r.cy}};
  const double c = std::cos(r.heading);
  const double s = std::sin(r.heading);
  auto emit = [&](double a, double b) { pts.emplace_back(r.cx + c * a - s * b, r.cy + s * a + c * b); };
  const double hl = 0.5 * r.length;
  const double hw = 0.5 * r.width;
  const int nl = static_cast<int>(std::ceil(r.length / spacing));
  const int nw = static_cast<int>(std::ceil(r.width / spacing));
  for (int i = 0; i <= nl; ++i) {
    const double a = -hl + r.length * i / nl;
    emit(a, hw);
    emit(a, -hw);
  }
  for (int i = 0; i <= nw; ++i) {
    const double b = -hw + r.width * i / nw;
    emit(hl, b);
    emit(-hl, b);
  }
  return pts;
}

/// Two convex rectangles intersect iff an outline point of one lies in the other
/// (the centres cover full containment). Exact up to the sampling spacing.
inline bool sampled_overlap(const Rect& a, const Rect& b, double spacing) {
  for (auto [x, y] : outline(a, spacing)) {
    if (contains(b, x, y)) return true;
  }
  for (auto [x, y] : outline(b, spacing)) {
    if (contains(a, x, y)) return true;
  }
  return false;
}

enum class Verdict { kOverlap, kSeparate, kAmbiguous };

/// Decides overlap with a `margin` dead band: shrunk boxes that still touch
/// overlap, grown boxes that still miss are separate.
inline Verdict overlap_with_margin(const Rect& a, const Rect& b, double margin) {
  const bool shrunk = sampled_overlap(inflate(a, -margin), inflate(b, -margin), margin);
  if (shrunk) return Verdict::kOverlap;
  const bool grown = sampled_overlap(inflate(a, margin), inflate(b, margin), margin);
  return grown ? Verdict::kAmbiguous : Verdict::kSeparate;
}

/// Forward-Euler integration of the tractor-trailer model with `substeps`
/// equal steps.
inline std::array<double, 4> euler(std::array<double, 4> q, double v, double delta, double dt, int substeps,
                                   double wheelbase, double trailer_length) {
  const double h = dt / substeps;
  for (int i = 0; i < substeps; ++i) {
    const double dx = v * std::cos(q[2]);
    const double dy = v * std::sin(q[2]);
    const double dpsi = v / wheelbase * std::tan(delta);
    const double dpsit = v / trailer_length * std::sin(q[2] - q[3]);
    q[0] += h * dx;
    q[1] += h * dy;
    q[2] += h * dpsi;
    q[3] += h * dpsit;
  }
  return q;
}

}  // namespace oracle
