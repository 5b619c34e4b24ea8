#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "ttpark/control.hpp"

using namespace ttpark;

namespace {

using Eigen::MatrixXd;

MatrixXd scalar(double v) { return MatrixXd::Constant(1, 1, v); }

// Riccati fixed-point residual written out independently of the library.
double riccati_gap(const MatrixXd& A, const MatrixXd& B, const MatrixXd& Q, const MatrixXd& R, const MatrixXd& P) {
  const MatrixXd S = R + B.transpose() * P * B;
  const MatrixXd rhs = Q + A.transpose() * P * A - A.transpose() * P * B * S.inverse() * B.transpose() * P * A;
  double worst = 0.0;
  for (int i = 0; i < P.rows(); ++i) {
    double row = 0.0;
    for (int j = 0; j < P.cols(); ++j) row += std::abs(P(i, j) - rhs(i, j));
    worst = std::max(worst, row);
  }
  return worst;
}

/// Reference built by replaying `controls` from `start`, so it is dynamically consistent.
ReferenceTrajectory replayed(const ArticulatedState& start, const std::vector<ControlInput>& controls, double dt,
                             const VehicleParams& p) {
  ReferenceTrajectory ref;
  ref.dt = dt;
  ArticulatedState s = start;
  for (const ControlInput& u : controls) {
    ref.samples.push_back({s, u});
    s = step(s, u, dt, p);
  }
  ref.samples.push_back({s, {0.0, 0.0}});
  return ref;
}

ReferenceTrajectory straight_line(int samples) {
  return replayed({0.0, 0.0, 0.0, 0.0}, std::vector<ControlInput>(static_cast<std::size_t>(samples), {1.0, 0.0}),
                  0.1, VehicleParams{});
}

ReferenceTrajectory gentle_curve() {
  std::vector<ControlInput> u;
  for (int i = 0; i < 60; ++i) u.push_back({i < 30 ? 1.0 : -1.0, 0.2 * std::sin(0.1 * i)});
  return replayed({10.0, 5.0, 0.4, 0.3}, u, 0.1, VehicleParams{});
}

}  // namespace

TEST_SUITE("control") {

TEST_CASE("dare scalar closed forms") {
  const DareSolution golden = solve_dare(scalar(1.0), scalar(1.0), scalar(1.0), scalar(1.0));
  CHECK(std::abs(golden.P(0, 0) - (1.0 + std::sqrt(5.0)) / 2.0) < 1e-9);
  // K = P / (1 + P) for A = B = R = 1.
  CHECK(std::abs(golden.K(0, 0) - golden.P(0, 0) / (1.0 + golden.P(0, 0))) < 1e-12);

  const DareSolution stable = solve_dare(scalar(0.5), scalar(0.0), scalar(1.0), scalar(1.0));
  CHECK(std::abs(stable.P(0, 0) - 4.0 / 3.0) < 1e-9);
  CHECK(stable.K(0, 0) == 0.0);
}

TEST_CASE("dare with zero state cost") {
  const MatrixXd A = MatrixXd::Identity(4, 4) * 1.1;
  const MatrixXd B = MatrixXd::Ones(4, 2);
  const DareSolution sol = solve_dare(A, B, MatrixXd::Zero(4, 4), MatrixXd::Identity(2, 2));
  CHECK(sol.P.isZero(0.0));
  CHECK(sol.K.isZero(0.0));
}

TEST_CASE("dare residual on random 4x4 systems") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> w(0.1, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    MatrixXd A(4, 4);
    MatrixXd B(4, 2);
    for (int i = 0; i < 16; ++i) A(i / 4, i % 4) = 0.6 * u(rng);
    for (int i = 0; i < 8; ++i) B(i / 2, i % 2) = u(rng);
    MatrixXd Q = MatrixXd::Zero(4, 4);
    for (int i = 0; i < 4; ++i) Q(i, i) = w(rng);
    MatrixXd R = MatrixXd::Zero(2, 2);
    for (int i = 0; i < 2; ++i) R(i, i) = w(rng);
    const DareSolution sol = solve_dare(A, B, Q, R);
    CHECK(riccati_gap(A, B, Q, R, sol.P) < 1e-9);
    CHECK(sol.residual < 1e-9);
    const MatrixXd K = (R + B.transpose() * sol.P * B).inverse() * B.transpose() * sol.P * A;
    CHECK((K - sol.K).cwiseAbs().maxCoeff() < 1e-9);
    // Symmetric and positive semidefinite.
    CHECK((sol.P - sol.P.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(sol.P);
    CHECK(eig.eigenvalues().minCoeff() > -1e-9);
  }
}

TEST_CASE("dare errors") {
  CHECK_THROWS_AS(solve_dare(scalar(1.0), scalar(1.0), scalar(1.0), scalar(0.0)), SingularR);
  CHECK_THROWS_AS(solve_dare(scalar(1.0), scalar(1.0), scalar(1.0), scalar(-1.0)), SingularR);
  // Unstable and uncontrollable: P grows without bound.
  try {
    solve_dare(scalar(2.0), scalar(0.0), scalar(1.0), scalar(1.0), 1e-9, 200);
    FAIL("expected NoConvergence");
  } catch (const NoConvergence& e) {
    CHECK(e.residual() > 1.0);
  }
}

TEST_CASE("linearize matches the analytic Jacobian of a straight step") {
  const VehicleParams p;
  const Linearization lin = linearize({0.0, 0.0, 0.0, 0.0}, {1.0, 0.0}, 0.1, p);
  // Position along x depends on v only; dy/dpsi ~ v dt.
  CHECK(lin.A(0, 0) == doctest::Approx(1.0));
  CHECK(lin.B(0, 0) == doctest::Approx(0.1));
  CHECK(lin.A(1, 2) == doctest::Approx(0.1).epsilon(1e-3));
  CHECK(lin.B(2, 1) == doctest::Approx(0.1 / p.wheelbase).epsilon(1e-6));
}

TEST_CASE("lqr returns the reference control on zero error") {
  const ReferenceTrajectory ref = gentle_curve();
  TrackConfig cfg;
  const VehicleParams p;
  for (std::size_t k = 0; k + 1 < ref.size(); k += 7) {
    const ControlInput u = track_lqr(ref.samples[k].state, ref, k, cfg, p);
    const ControlInput want = clamp_control(ref.samples[k].control, p);
    CHECK(u.v == want.v);
    CHECK(u.delta == want.delta);
  }
  CHECK_THROWS_AS(track_lqr({}, ref, ref.size(), cfg, p), std::out_of_range);
}

TEST_CASE("lqr steers right when left of a straight reference") {
  const ReferenceTrajectory ref = straight_line(50);
  const ControlInput u = track_lqr({0.0, 0.2, 0.0, 0.0}, ref, 0, TrackConfig{}, VehicleParams{});
  CHECK(u.delta < 0.0);
  const ControlInput mirror = track_lqr({0.0, -0.2, 0.0, 0.0}, ref, 0, TrackConfig{}, VehicleParams{});
  CHECK(mirror.delta > 0.0);
}

TEST_CASE("lqr removes a lateral offset") {
  const ReferenceTrajectory ref = straight_line(150);
  const TrackConfig cfg;
  const VehicleParams p;
  ArticulatedState s(0.0, 0.3, 0.0, 0.0);
  for (std::size_t k = 0; k < 100; ++k) s = step(s, track_lqr(s, ref, k, cfg, p), cfg.dt, p);
  const ArticulatedState& want = ref.samples[100].state;
  CHECK(std::hypot(s.x() - want.x(), s.y() - want.y()) < 0.03);
}

TEST_CASE("nmpc on reference with zero lambda keeps the reference") {
  const ReferenceTrajectory ref = gentle_curve();
  TrackConfig cfg;
  cfg.nmpc_lambda = 0.0;
  const VehicleParams p;
  const NmpcResult res = nmpc_refine(ref.samples[5].state, ref, 5, cfg, p);
  REQUIRE(res.controls.size() == 20);
  for (std::size_t j = 0; j < res.controls.size(); ++j) {
    CHECK(res.controls[j].v == ref.samples[5 + j].control.v);
    CHECK(res.controls[j].delta == ref.samples[5 + j].control.delta);
  }
  CHECK(res.cost < 1e-20);
}

TEST_CASE("nmpc horizon truncates at the end of the reference") {
  const ReferenceTrajectory ref = gentle_curve();
  const NmpcProblem near_end(ref.samples[55].state, ref, 55, TrackConfig{}, VehicleParams{});
  CHECK(near_end.horizon() == ref.size() - 1 - 55);
  CHECK_THROWS_AS(NmpcProblem(ref.samples[0].state, ref, ref.size() - 1, TrackConfig{}, VehicleParams{}),
                  std::out_of_range);
}

TEST_CASE("nmpc cost counts every state and control term") {
  const ReferenceTrajectory ref = gentle_curve();
  TrackConfig cfg;
  cfg.nmpc_horizon = 3;
  const VehicleParams p;
  const ArticulatedState s0(10.2, 4.9, 0.45, 0.3);
  const NmpcProblem prob(s0, ref, 0, cfg, p);
  const std::vector<double> u{0.8, 0.1, 1.2, -0.2, 0.9, 0.05};
  double want = 0.0;
  ArticulatedState x = s0;
  for (std::size_t j = 0; j <= 3; ++j) {
    const ArticulatedState& r = ref.samples[j].state;
    const double e[4] = {x.x() - r.x(), x.y() - r.y(), oracle::wrap(x.psi() - r.psi()),
                         oracle::wrap(x.psi_t() - r.psi_t())};
    for (int i = 0; i < 4; ++i) want += cfg.q_diag[static_cast<std::size_t>(i)] * e[i] * e[i];
    if (j < 3) {
      want += cfg.nmpc_lambda * (u[2 * j] * u[2 * j] + u[2 * j + 1] * u[2 * j + 1]);
      x = step(x, {u[2 * j], u[2 * j + 1]}, cfg.dt, p);
    }
  }
  CHECK(prob.cost(u) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("nmpc gradient matches central differences") {
  const ReferenceTrajectory ref = gentle_curve();
  const TrackConfig cfg;
  const VehicleParams p;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> speed(-2.0, 2.0);
  std::uniform_real_distribution<double> steer(-0.55, 0.55);
  std::uniform_real_distribution<double> off(-0.5, 0.5);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = static_cast<std::size_t>(trial % 30);
    const ArticulatedState& r = ref.samples[k].state;
    const ArticulatedState s0(r.x() + off(rng), r.y() + off(rng), r.psi() + off(rng), r.psi_t() + 0.5 * off(rng));
    const NmpcProblem prob(s0, ref, k, cfg, p);
    std::vector<double> u;
    for (std::size_t j = 0; j < prob.horizon(); ++j) {
      u.push_back(speed(rng));
      u.push_back(steer(rng));
    }
    const std::vector<double> g = prob.gradient(u);
    double diff = 0.0;
    double norm = 0.0;
    std::vector<double> probe = u;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double h = 1e-6;
      probe[i] = u[i] + h;
      const double fp = prob.cost(probe);
      probe[i] = u[i] - h;
      const double fm = prob.cost(probe);
      probe[i] = u[i];
      const double want = (fp - fm) / (2.0 * h);
      diff += (g[i] - want) * (g[i] - want);
      norm += want * want;
    }
    CHECK(std::sqrt(diff) <= 1e-3 * std::sqrt(norm));
  }
}

TEST_CASE("projected gradient solves the scalar surrogate") {
  for (double lambda : {0.0, 0.1, 1.0, 3.0}) {
    for (auto [x, xr] : {std::pair{0.0, 1.0}, std::pair{2.0, -1.5}, std::pair{-0.3, 0.4}}) {
      auto cost = [&](std::span<const double> u) {
        const double e = xr - (x + u[0]);
        return e * e + lambda * u[0] * u[0];
      };
      auto grad = [&](std::span<const double> u) { return numeric_gradient(cost, u, 1e-6); };
      const std::vector<double> lo{-10.0};
      const std::vector<double> hi{10.0};
      const auto res = projected_gradient(cost, grad, {0.0}, lo, hi, 200, 0.2);
      CHECK(std::abs(res.x[0] - (xr - x) / (1.0 + lambda)) < 1e-6);
    }
  }
}

TEST_CASE("projected gradient respects bounds and never increases cost") {
  auto cost = [](std::span<const double> u) { return (u[0] - 5.0) * (u[0] - 5.0) + std::pow(u[1] + 1.0, 4); };
  auto grad = [&](std::span<const double> u) { return numeric_gradient(cost, u, 1e-6); };
  const std::vector<double> lo{-1.0, -0.5};
  const std::vector<double> hi{2.0, 0.5};
  const auto res = projected_gradient(cost, grad, {0.0, 0.0}, lo, hi, 100, 1.0);
  CHECK(res.x[0] == 2.0);
  CHECK(res.x[1] == -0.5);
  for (std::size_t i = 1; i < res.history.size(); ++i) CHECK(res.history[i] <= res.history[i - 1]);
  CHECK(res.cost == res.history.back());
}

TEST_CASE("nmpc cost never rises from an off-reference start") {
  const ReferenceTrajectory ref = gentle_curve();
  TrackConfig cfg;
  cfg.nmpc_iters = 15;
  const VehicleParams p;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> off(-0.6, 0.6);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t k = static_cast<std::size_t>(3 * trial);
    const ArticulatedState& r = ref.samples[k].state;
    const ArticulatedState s0(r.x() + off(rng), r.y() + off(rng), r.psi() + off(rng), r.psi_t());
    const NmpcResult res = nmpc_refine(s0, ref, k, cfg, p);
    REQUIRE_FALSE(res.history.empty());
    for (std::size_t i = 1; i < res.history.size(); ++i) CHECK(res.history[i] <= res.history[i - 1]);
    CHECK(res.cost <= res.history.front());
    for (const ControlInput& c : res.controls) CHECK(clamp_control(c, p) == c);
  }
}

TEST_CASE("hitch guard leaves safe controls alone") {
  const TrackConfig cfg;
  const VehicleParams p;
  const ControlInput u{1.0, 0.3};
  CHECK(hitch_guard(u, {0.0, 0.0, 0.0, 0.0}, cfg, p) == u);
  CHECK(hitch_guard({-1.0, -0.2}, {0.0, 0.0, 0.0, 0.0}, cfg, p) == ControlInput{-1.0, -0.2});
}

TEST_CASE("hitch guard corrects an aggravating steer in reverse") {
  const TrackConfig cfg;
  const VehicleParams p;
  const ArticulatedState s(0.0, 0.0, p.max_hitch - 0.02, 0.0);
  const ControlInput u{-2.0, -p.max_steer};
  REQUIRE(std::abs(hitch_angle(step(s, u, cfg.dt, p))) > p.max_hitch);
  const ControlInput g = hitch_guard(u, s, cfg, p);
  CHECK(g.delta != u.delta);
  CHECK(g.v == u.v);
  CHECK(std::abs(hitch_angle(step(s, g, cfg.dt, p))) <= p.max_hitch);

  // Best of the 21-value grid by direct replay.
  double best = INFINITY;
  for (int i = 0; i <= 20; ++i) {
    const double d = -p.max_steer + p.max_steer * i / 10.0;
    const double next = std::abs(hitch_angle(step(s, {u.v, d}, cfg.dt, p)));
    if (next <= p.max_hitch) best = std::min(best, next);
  }
  CHECK(std::abs(hitch_angle(step(s, g, cfg.dt, p))) == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("hitch guard stops when no steer can hold the bound") {
  const TrackConfig cfg;
  VehicleParams p;
  // Long tractor, short trailer: steering cannot out-turn the fold rate.
  p.wheelbase = 8.0;
  p.trailer_length = 4.0;
  const ArticulatedState s(0.0, 0.0, p.max_hitch, 0.0);
  for (int i = 0; i <= 20; ++i) {
    const double d = -p.max_steer + p.max_steer * i / 10.0;
    REQUIRE(std::abs(hitch_angle(step(s, {-1.0, d}, cfg.dt, p))) > p.max_hitch);
  }
  CHECK(hitch_guard({-1.0, 0.1}, s, cfg, p) == ControlInput{0.0, 0.0});
}

TEST_CASE("hitch guard output is always safe or stopped") {
  const TrackConfig cfg;
  const VehicleParams p;
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> g(-p.max_hitch, p.max_hitch);
  std::uniform_real_distribution<double> h(-kPi, kPi);
  std::uniform_real_distribution<double> v(p.min_speed, p.max_speed);
  std::uniform_real_distribution<double> d(-p.max_steer, p.max_steer);
  for (int i = 0; i < 5000; ++i) {
    const double psi = h(rng);
    const ArticulatedState s(0.0, 0.0, psi, psi - g(rng));
    const ControlInput out = hitch_guard({v(rng), d(rng)}, s, cfg, p);
    CHECK((std::abs(hitch_angle(step(s, out, cfg.dt, p))) <= p.max_hitch || out.v == 0.0));
  }
}

TEST_CASE("track config validation") {
  TrackConfig c;
  CHECK_NOTHROW(c.validate());
  c.r_diag[1] = 0.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.nmpc_lambda = -0.1;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  CHECK(controller_from_string("nmpc") == ControllerKind::kNmpc);
  CHECK_THROWS_AS(controller_from_string("pid"), std::invalid_argument);
}

TEST_CASE("reference from a planned path is uniform and ends on the path") {
  PlannedPath path;
  const VehicleParams p;
  ArticulatedState s(5.0, 5.0, 0.0, 0.0);
  path.states.push_back(s);
  for (int i = 0; i < 16; ++i) {
    const ControlInput u{i < 8 ? 1.0 : -1.0, 0.2};
    s = step(s, u, 0.25, p);
    path.states.push_back(s);
    path.controls.push_back(u);
    path.durations.push_back(0.25);
    path.directions.push_back(i < 8 ? Direction::kForward : Direction::kReverse);
  }
  const ReferenceTrajectory ref = build_reference(path, TrackConfig{}, p);
  CHECK(ref.dt == 0.1);
  CHECK(ref.samples.front().state == path.states.front());
  CHECK(ref.samples.back().state == path.states.back());
  CHECK(ref.samples.back().control == ControlInput{0.0, 0.0});
  // 2 m per direction at 0.1 m spacing.
  CHECK(ref.size() == 41);
  CHECK(ref.samples[10].control.v > 0.0);
  CHECK(ref.samples[30].control.v < 0.0);
  // The reversal sample coincides with the cusp state.
  CHECK(ref.samples[20].state == path.states[8]);
}

}  // TEST_SUITE
