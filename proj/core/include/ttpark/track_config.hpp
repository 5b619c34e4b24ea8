#pragma once

#include <array>

namespace ttpark {

enum class ControllerKind { kLqr, kNmpc };

const char* to_string(ControllerKind k);
/// Accepts "lqr" or "nmpc"; throws std::invalid_argument otherwise.
ControllerKind controller_from_string(const char* s);

struct TrackConfig {
  ControllerKind controller = ControllerKind::kLqr;
  double dt = 0.1;
  std::array<double, 4> q_diag{1.0, 1.0, 0.5, 0.5};  ///< x, y, psi, psi_t
  std::array<double, 2> r_diag{0.1, 0.1};            ///< v, delta
  int nmpc_horizon = 20;
  double nmpc_lambda = 0.1;
  int nmpc_iters = 50;
  double nmpc_step = 0.05;
  double dare_tol = 1e-9;
  int dare_max_iters = 10000;
  /// Nominal reference speed magnitude when resampling a planned path [m/s].
  double cruise_speed = 1.0;

  void validate() const;

  friend bool operator==(const TrackConfig&, const TrackConfig&) = default;
};

}  // namespace ttpark
