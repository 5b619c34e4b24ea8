#include "ttpark/vehicle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ttpark {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("VehicleParams: ") + what);
}

void require_body(const BodyDims& b, const char* name) {
  const std::string n(name);
  if (!(b.length > 0.0 && std::isfinite(b.length))) {
    throw std::invalid_argument("VehicleParams: " + n + " length must be > 0");
  }
  if (!(b.width > 0.0 && std::isfinite(b.width))) {
    throw std::invalid_argument("VehicleParams: " + n + " width must be > 0");
  }
  if (!(b.rear_overhang >= 0.0 && b.rear_overhang < b.length)) {
    throw std::invalid_argument("VehicleParams: " + n + " rear_overhang must be in [0, length)");
  }
}

// cos and sin of an angle.
struct Rot {
  double c;
  double s;

  static Rot of(double angle) { return {std::cos(angle), std::sin(angle)}; }

  // Rotated by `e`; short series for the small increments of one step.
  Rot turned(double e) const {
    double ce, se;
    if (std::abs(e) < 0.05) {
      const double e2 = e * e;
      se = e * (1.0 - e2 * (1.0 / 6.0) * (1.0 - e2 * (1.0 / 20.0) * (1.0 - e2 * (1.0 / 42.0))));
      ce = 1.0 - e2 * 0.5 * (1.0 - e2 * (1.0 / 12.0) * (1.0 - e2 * (1.0 / 30.0) * (1.0 - e2 * (1.0 / 56.0))));
    } else {
      ce = std::cos(e);
      se = std::sin(e);
    }
    return {c * ce - s * se, s * ce + c * se};
  }
};

}  // namespace

void VehicleParams::validate() const {
  require(wheelbase > 0.0 && std::isfinite(wheelbase), "wheelbase must be > 0");
  require(trailer_length > 0.0 && std::isfinite(trailer_length), "trailer_length must be > 0");
  require(hitch_offset >= 0.0 && std::isfinite(hitch_offset), "hitch_offset must be >= 0");
  require_body(tractor_body, "tractor_body");
  require_body(trailer_body, "trailer_body");
  require(max_steer > 0.0 && max_steer < 0.5 * kPi, "max_steer must be in (0, pi/2)");
  require(max_hitch > 0.0 && max_hitch < kPi, "max_hitch must be in (0, pi)");
  require(min_speed < 0.0 && max_speed > 0.0, "speed limits must satisfy min_speed < 0 < max_speed");
}

ControlInput clamp_control(ControlInput u, const VehicleParams& p) {
  return {std::clamp(u.v, p.min_speed, p.max_speed), std::clamp(u.delta, -p.max_steer, p.max_steer)};
}

ArticulatedState step(const ArticulatedState& s, ControlInput u, double dt, const VehicleParams& p) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("step: dt must be > 0");
  if (!std::isfinite(u.v) || !std::isfinite(u.delta)) {
    throw std::invalid_argument("step: non-finite control");
  }
  if (!std::isfinite(s.x()) || !std::isfinite(s.y())) {
    throw std::invalid_argument("step: non-finite state");
  }
  if (u.v == 0.0) return s;

  // Yaw rate is constant over the step. Stage headings are the start headings
  // turned by small increments.
  const double yaw = u.v / p.wheelbase * std::tan(u.delta);
  const double fold = u.v / p.trailer_length;
  const double psi0 = s.psi();
  const double pt0 = s.psi_t();
  const double a = 0.5 * dt * yaw;
  const Rot r0 = Rot::of(psi0);
  const Rot rm = r0.turned(a);
  const Rot re = r0.turned(2.0 * a);
  const Rot g0 = Rot::of(psi0 - pt0);
  const double t1 = fold * g0.s;
  const double t2 = fold * g0.turned(a - 0.5 * dt * t1).s;
  const double t3 = fold * g0.turned(a - 0.5 * dt * t2).s;
  const double t4 = fold * g0.turned(2.0 * a - dt * t3).s;
  const double v = u.v;
  const std::array<double, 4> q1{
      s.x() + dt / 6.0 * (v * r0.c + 4.0 * (v * rm.c) + v * re.c),
      s.y() + dt / 6.0 * (v * r0.s + 4.0 * (v * rm.s) + v * re.s),
      psi0 + dt * yaw,
      pt0 + dt / 6.0 * (t1 + 2.0 * t2 + 2.0 * t3 + t4)};
  return {q1[0], q1[1], q1[2], q1[3]};
}

double hitch_angle(const ArticulatedState& s) { return normalize_angle(s.psi() - s.psi_t()); }

bool is_jackknifed(const ArticulatedState& s, const VehicleParams& p) {
  return std::abs(hitch_angle(s)) > p.max_hitch;
}

Vec2 hitch_point(const ArticulatedState& s, const VehicleParams& p) {
  return s.position() - p.hitch_offset * unit(s.psi());
}

Vec2 trailer_axle(const ArticulatedState& s, const VehicleParams& p) {
  return hitch_point(s, p) - p.trailer_length * unit(s.psi_t());
}

Pose2 trailer_pose(const ArticulatedState& s, const VehicleParams& p) {
  const Vec2 a = trailer_axle(s, p);
  return {a.x, a.y, s.psi_t()};
}

Footprints footprints(const ArticulatedState& s, const VehicleParams& p) {
  const auto& tb = p.tractor_body;
  const auto& rb = p.trailer_body;
  const Vec2 tc = s.position() + (0.5 * tb.length - tb.rear_overhang) * unit(s.psi());
  const Vec2 rc = trailer_axle(s, p) + (0.5 * rb.length - rb.rear_overhang) * unit(s.psi_t());
  return {OrientedBox({tc.x, tc.y, s.psi()}, tb.length, tb.width),
          OrientedBox({rc.x, rc.y, s.psi_t()}, rb.length, rb.width)};
}

ArticulatedState state_from_trailer_pose(const Pose2& trailer, double hitch, const VehicleParams& p) {
  const double psi = trailer.heading() + hitch;
  const Vec2 h = trailer.position() + p.trailer_length * unit(trailer.heading());
  const Vec2 rear = h + p.hitch_offset * unit(psi);
  return {rear.x, rear.y, psi, trailer.heading()};
}

}  // namespace ttpark
