#include <cstring>

#include "ttpark/control.hpp"

namespace ttpark {

const char* to_string(ControllerKind k) { return k == ControllerKind::kLqr ? "lqr" : "nmpc"; }

ControllerKind controller_from_string(const char* s) {
  if (std::strcmp(s, "lqr") == 0) return ControllerKind::kLqr;
  if (std::strcmp(s, "nmpc") == 0) return ControllerKind::kNmpc;
  throw std::invalid_argument(std::string("unknown controller '") + s + "'");
}

void TrackConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("TrackConfig: ") + what);
  };
  require(dt > 0.0, "dt must be > 0");
  for (double q : q_diag) require(q >= 0.0, "q_diag entries must be >= 0");
  for (double r : r_diag) require(r > 0.0, "r_diag entries must be > 0");
  require(nmpc_horizon >= 1, "nmpc_horizon must be >= 1");
  require(nmpc_lambda >= 0.0, "nmpc_lambda must be >= 0");
  require(nmpc_iters >= 1, "nmpc_iters must be >= 1");
  require(nmpc_step > 0.0, "nmpc_step must be > 0");
  require(dare_tol > 0.0, "dare_tol must be > 0");
  require(dare_max_iters >= 1, "dare_max_iters must be >= 1");
  require(cruise_speed > 0.0, "cruise_speed must be > 0");
}

namespace {

Eigen::MatrixXd riccati_map(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::MatrixXd& Q,
                            const Eigen::MatrixXd& R, const Eigen::MatrixXd& P) {
  const Eigen::MatrixXd BtP = B.transpose() * P;
  const Eigen::MatrixXd gain = (R + BtP * B).ldlt().solve(BtP * A);
  Eigen::MatrixXd next = Q + A.transpose() * P * A - A.transpose() * P * B * gain;
  return 0.5 * (next + next.transpose());
}

double inf_norm(const Eigen::MatrixXd& M) { return M.cwiseAbs().rowwise().sum().maxCoeff(); }

}  // namespace

double dare_residual(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::MatrixXd& Q,
                     const Eigen::MatrixXd& R, const Eigen::MatrixXd& P) {
  return inf_norm(P - riccati_map(A, B, Q, R, P));
}

DareSolution solve_dare(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::MatrixXd& Q,
                        const Eigen::MatrixXd& R, double tol, int max_iters) {
  const auto n = A.rows();
  if (A.cols() != n || B.rows() != n || Q.rows() != n || Q.cols() != n || R.rows() != B.cols() ||
      R.cols() != B.cols()) {
    throw std::invalid_argument("solve_dare: dimension mismatch");
  }
  const Eigen::LLT<Eigen::MatrixXd> chol(0.5 * (R + R.transpose()));
  if (chol.info() != Eigen::Success) throw SingularR();

  DareSolution sol;
  Eigen::MatrixXd P = Q;
  double residual = 0.0;
  for (int it = 1; it <= max_iters; ++it) {
    Eigen::MatrixXd next = riccati_map(A, B, Q, R, P);
    residual = inf_norm(next - P);
    P = std::move(next);
    if (!P.allFinite()) break;
    if (residual < tol) {
      sol.iterations = it;
      break;
    }
  }
  if (sol.iterations == 0) throw NoConvergence(max_iters, residual);

  sol.residual = dare_residual(A, B, Q, R, P);
  const Eigen::MatrixXd BtP = B.transpose() * P;
  sol.K = (R + BtP * B).ldlt().solve(BtP * A);
  sol.P = std::move(P);
  return sol;
}

}  // namespace ttpark
