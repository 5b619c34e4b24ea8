#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ttpark/planner.hpp"
#include "ttpark/track_config.hpp"
#include "ttpark/vehicle.hpp"

namespace ttpark {

// ---- Riccati -------------------------------------------------------------

class NoConvergence : public std::runtime_error {
 public:
  NoConvergence(int iterations, double residual)
      : std::runtime_error("DARE did not converge after " + std::to_string(iterations) +
                           " iterations (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

class SingularR : public std::invalid_argument {
 public:
  SingularR() : std::invalid_argument("DARE: R is not positive definite") {}
};

struct DareSolution {
  Eigen::MatrixXd P;
  Eigen::MatrixXd K;
  int iterations = 0;
  double residual = 0.0;
};

/// Fixed-point iteration P <- Q + A'PA - A'PB (R + B'PB)^-1 B'PA until the
/// induced infinity-norm residual drops below `tol`.
DareSolution solve_dare(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::MatrixXd& Q,
                        const Eigen::MatrixXd& R, double tol = 1e-9, int max_iters = 10000);

/// ||P - (Q + A'PA - A'PB(R + B'PB)^-1 B'PA)||_inf
double dare_residual(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::MatrixXd& Q,
                     const Eigen::MatrixXd& R, const Eigen::MatrixXd& P);

// ---- reference -----------------------------------------------------------

struct ReferenceSample {
  ArticulatedState state;
  ControlInput control;  ///< applied from this sample to the next
};

/// Time-indexed reference at a uniform period `dt`.
struct ReferenceTrajectory {
  double dt = 0.1;
  std::vector<ReferenceSample> samples;

  std::size_t size() const { return samples.size(); }
};

/// Resamples a planned path at cruise_speed * dt per period. Every
/// same-direction segment starts and ends exactly on a sample, and the speed
/// within a segment is adjusted so that it does.
ReferenceTrajectory build_reference(const PlannedPath& path, const TrackConfig& cfg, const VehicleParams& p);

/// 4-vector state error s - ref with both heading components wrapped.
Eigen::Vector4d state_error(const ArticulatedState& s, const ArticulatedState& ref);

// ---- LQR -----------------------------------------------------------------

struct Linearization {
  Eigen::Matrix4d A;
  Eigen::Matrix<double, 4, 2> B;
};

/// Central-difference Jacobians of step(., ., dt) about (s, u).
Linearization linearize(const ArticulatedState& s, ControlInput u, double dt, const VehicleParams& p,
                        double eps = 1e-5);

ControlInput track_lqr(const ArticulatedState& s, const ReferenceTrajectory& ref, std::size_t k,
                       const TrackConfig& cfg, const VehicleParams& p);

// ---- NMPC ----------------------------------------------------------------

/// Projected gradient descent with step halving on cost increase.
struct ProjectedGradientResult {
  std::vector<double> x;
  double cost = 0.0;
  /// Cost of the initial guess followed by every accepted iterate.
  std::vector<double> history;
};

using CostFn = std::function<double(std::span<const double>)>;
using GradientFn = std::function<std::vector<double>(std::span<const double>)>;

ProjectedGradientResult projected_gradient(const CostFn& cost, const GradientFn& gradient, std::vector<double> x0,
                                           std::span<const double> lower, std::span<const double> upper, int iters,
                                           double step);

/// Central-difference gradient of an arbitrary cost.
std::vector<double> numeric_gradient(const CostFn& cost, std::span<const double> x, double h);

/// Horizon tracking problem anchored at reference index k.
class NmpcProblem {
 public:
  NmpcProblem(const ArticulatedState& s, const ReferenceTrajectory& ref, std::size_t k, const TrackConfig& cfg,
              const VehicleParams& p);

  /// Number of controls in the horizon (N, truncated at the end of the reference).
  std::size_t horizon() const { return horizon_; }

  /// sum_{j=0..N} ||x_ref,k+j - x_j||_Q^2 + lambda * sum_{j=0..N-1} ||u_j||^2
  /// over the flattened sequence [v0, d0, v1, d1, ...].
  double cost(std::span<const double> u) const;

  /// Central differences over the control sequence, reusing the unperturbed
  /// rollout prefix for each perturbed control.
  std::vector<double> gradient(std::span<const double> u, double h = 1e-5) const;

  std::vector<double> initial_guess() const;
  std::vector<double> lower_bounds() const;
  std::vector<double> upper_bounds() const;

 private:
  double stage_cost(std::size_t j, const ArticulatedState& x) const;

  ArticulatedState start_;
  const ReferenceTrajectory& ref_;
  std::size_t k_;
  const TrackConfig& cfg_;
  const VehicleParams& params_;
  std::size_t horizon_;
};

struct NmpcResult {
  std::vector<ControlInput> controls;
  double cost = 0.0;
  std::vector<double> history;
};

NmpcResult nmpc_refine(const ArticulatedState& s, const ReferenceTrajectory& ref, std::size_t k,
                       const TrackConfig& cfg, const VehicleParams& p);

// ---- hitch guard ---------------------------------------------------------

inline constexpr int kGuardSteerCandidates = 21;

/// Returns u if one step keeps |hitch| within bounds, else the steering (at the
/// same speed) that minimizes the next |hitch| among admissible candidates, else a stop.
ControlInput hitch_guard(ControlInput u, const ArticulatedState& s, const TrackConfig& cfg, const VehicleParams& p);

}  // namespace ttpark
