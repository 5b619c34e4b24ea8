#pragma once

#include <utility>

#include "ttpark/geometry.hpp"

namespace ttpark {

struct BodyDims {
  double length = 0.0;
  double width = 0.0;
  /// Distance from the body's axle to its rear edge.
  double rear_overhang = 0.0;
  friend bool operator==(const BodyDims&, const BodyDims&) = default;
};

/// Geometry and actuation limits of a tractor with a single on-axle (or offset) trailer.
struct VehicleParams {
  double wheelbase = 3.8;        ///< tractor rear axle to front axle [m]
  double trailer_length = 8.5;   ///< hitch point to trailer axle [m]
  double hitch_offset = 0.0;     ///< tractor rear axle to hitch, positive rearward [m]
  BodyDims tractor_body{6.0, 2.5, 1.0};
  BodyDims trailer_body{7.5, 2.5, 1.0};
  double max_steer = 0.55;       ///< [rad]
  double max_hitch = 1.047;      ///< [rad]
  double min_speed = -2.0;       ///< [m/s], negative
  double max_speed = 2.0;        ///< [m/s], positive

  /// Throws std::invalid_argument naming the first violated constraint.
  void validate() const;

  friend bool operator==(const VehicleParams&, const VehicleParams&) = default;
};

/// Tractor rear-axle pose plus trailer heading. Headings are normalized on construction.
class ArticulatedState {
 public:
  ArticulatedState() = default;
  ArticulatedState(double x, double y, double psi, double psi_t)
      : x_(x), y_(y), psi_(normalize_angle(psi)), psi_t_(normalize_angle(psi_t)) {}

  double x() const { return x_; }
  double y() const { return y_; }
  double psi() const { return psi_; }
  double psi_t() const { return psi_t_; }
  Vec2 position() const { return {x_, y_}; }
  Pose2 tractor_pose() const { return {x_, y_, psi_}; }

  friend bool operator==(const ArticulatedState&, const ArticulatedState&) = default;

 private:
  double x_ = 0.0;
  double y_ = 0.0;
  double psi_ = 0.0;
  double psi_t_ = 0.0;
};

struct ControlInput {
  double v = 0.0;      ///< signed speed, negative is reverse [m/s]
  double delta = 0.0;  ///< front steering angle [rad]
  friend bool operator==(const ControlInput&, const ControlInput&) = default;
};

/// Clamps speed and steering into the limits of `p`.
ControlInput clamp_control(ControlInput u, const VehicleParams& p);

/// Integrates the tractor bicycle model and the trailer heading equation
///   psi_t' = (v / L_t) sin(psi - psi_t)
/// over `dt` with one classical RK4 step.
ArticulatedState step(const ArticulatedState& s, ControlInput u, double dt, const VehicleParams& p);

/// psi - psi_t wrapped into (-pi, pi].
double hitch_angle(const ArticulatedState& s);

/// True iff |hitch| strictly exceeds max_hitch; the bound itself is admissible.
bool is_jackknifed(const ArticulatedState& s, const VehicleParams& p);

Vec2 hitch_point(const ArticulatedState& s, const VehicleParams& p);
Vec2 trailer_axle(const ArticulatedState& s, const VehicleParams& p);
Pose2 trailer_pose(const ArticulatedState& s, const VehicleParams& p);

struct Footprints {
  OrientedBox tractor;
  OrientedBox trailer;
};

Footprints footprints(const ArticulatedState& s, const VehicleParams& p);

/// State whose trailer axle sits at `trailer` with hitch angle `hitch`.
ArticulatedState state_from_trailer_pose(const Pose2& trailer, double hitch, const VehicleParams& p);

}  // namespace ttpark
