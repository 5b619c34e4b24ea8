#include <algorithm>
#include <cmath>
#include <optional>

#include "ttpark/control.hpp"

namespace ttpark {

// ---- reference -----------------------------------------------------------

namespace {

ArticulatedState lerp_state(const ArticulatedState& a, const ArticulatedState& b, double f) {
  return {a.x() + f * (b.x() - a.x()), a.y() + f * (b.y() - a.y()), a.psi() + f * normalize_angle(b.psi() - a.psi()),
          a.psi_t() + f * normalize_angle(b.psi_t() - a.psi_t())};
}

}  // namespace

ReferenceTrajectory build_reference(const PlannedPath& path, const TrackConfig& cfg, const VehicleParams& p) {
  ReferenceTrajectory ref;
  ref.dt = cfg.dt;
  if (path.states.empty()) return ref;

  std::size_t begin = 0;
  const std::size_t m = path.transitions();
  while (begin < m) {
    std::size_t end = begin;
    while (end < m && path.directions[end] == path.directions[begin]) ++end;
    const double sigma = sign_of(path.directions[begin]);

    // Cumulative arc length over transitions [begin, end).
    std::vector<double> cum{0.0};
    for (std::size_t i = begin; i < end; ++i) {
      cum.push_back(cum.back() + std::abs(path.controls[i].v) * path.durations[i]);
    }
    const double total = cum.back();
    const auto n = std::max<long>(1, std::lround(total / (cfg.cruise_speed * cfg.dt)));
    const double spacing = total / static_cast<double>(n);
    const double speed = spacing / cfg.dt;

    // Length-weighted mean of tan(delta) over [s0, s1] within the segment.
    auto mean_tan = [&](double s0, double s1) {
      double acc = 0.0;
      for (std::size_t i = 0; i + 1 < cum.size(); ++i) {
        const double lo = std::max(s0, cum[i]);
        const double hi = std::min(s1, cum[i + 1]);
        if (hi > lo) acc += (hi - lo) * std::tan(path.controls[begin + i].delta);
      }
      return s1 > s0 ? acc / (s1 - s0) : std::tan(path.controls[begin].delta);
    };

    std::size_t cursor = 0;
    for (long j = 0; j < n; ++j) {
      const double s = spacing * static_cast<double>(j);
      while (cursor + 1 < cum.size() - 1 && cum[cursor + 1] <= s) ++cursor;
      ArticulatedState state;
      if (j == 0) {
        state = path.states[begin];
      } else {
        const double len = cum[cursor + 1] - cum[cursor];
        const double f = len > 0.0 ? std::clamp((s - cum[cursor]) / len, 0.0, 1.0) : 0.0;
        state = lerp_state(path.states[begin + cursor], path.states[begin + cursor + 1], f);
      }
      const double delta = std::atan(mean_tan(s, s + spacing));
      ref.samples.push_back({state, {sigma * speed, std::clamp(delta, -p.max_steer, p.max_steer)}});
    }
    begin = end;
  }
  ref.samples.push_back({path.states.back(), {0.0, 0.0}});
  return ref;
}

Eigen::Vector4d state_error(const ArticulatedState& s, const ArticulatedState& ref) {
  return {s.x() - ref.x(), s.y() - ref.y(), normalize_angle(s.psi() - ref.psi()),
          normalize_angle(s.psi_t() - ref.psi_t())};
}

// ---- LQR -----------------------------------------------------------------

Linearization linearize(const ArticulatedState& s, ControlInput u, double dt, const VehicleParams& p, double eps) {
  Linearization lin;
  const std::array<double, 4> base{s.x(), s.y(), s.psi(), s.psi_t()};
  for (int c = 0; c < 4; ++c) {
    auto plus = base;
    auto minus = base;
    plus[static_cast<std::size_t>(c)] += eps;
    minus[static_cast<std::size_t>(c)] -= eps;
    const auto sp = step({plus[0], plus[1], plus[2], plus[3]}, u, dt, p);
    const auto sm = step({minus[0], minus[1], minus[2], minus[3]}, u, dt, p);
    lin.A.col(c) = state_error(sp, sm) / (2.0 * eps);
  }
  const auto sv = [&](ControlInput du) { return step(s, {u.v + du.v, u.delta + du.delta}, dt, p); };
  lin.B.col(0) = state_error(sv({eps, 0.0}), sv({-eps, 0.0})) / (2.0 * eps);
  lin.B.col(1) = state_error(sv({0.0, eps}), sv({0.0, -eps})) / (2.0 * eps);
  return lin;
}

ControlInput track_lqr(const ArticulatedState& s, const ReferenceTrajectory& ref, std::size_t k,
                       const TrackConfig& cfg, const VehicleParams& p) {
  if (k >= ref.size()) throw std::out_of_range("track_lqr: reference index out of range");
  const ReferenceSample& r = ref.samples[k];
  const Eigen::Vector4d err = state_error(s, r.state);
  if (err.isZero(0.0)) return clamp_control(r.control, p);

  const Linearization lin = linearize(r.state, r.control, ref.dt, p);
  const Eigen::Vector4d q(cfg.q_diag[0], cfg.q_diag[1], cfg.q_diag[2], cfg.q_diag[3]);
  const Eigen::Vector2d rw(cfg.r_diag[0], cfg.r_diag[1]);
  const DareSolution sol = solve_dare(lin.A, lin.B, q.asDiagonal().toDenseMatrix(),
                                      rw.asDiagonal().toDenseMatrix(), cfg.dare_tol, cfg.dare_max_iters);
  const Eigen::Vector2d du = -sol.K * err;
  return clamp_control({r.control.v + du(0), r.control.delta + du(1)}, p);
}

// ---- optimizer -----------------------------------------------------------

std::vector<double> numeric_gradient(const CostFn& cost, std::span<const double> x, double h) {
  std::vector<double> probe(x.begin(), x.end());
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double fp = cost(probe);
    probe[i] = x[i] - h;
    const double fm = cost(probe);
    probe[i] = x[i];
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

ProjectedGradientResult projected_gradient(const CostFn& cost, const GradientFn& gradient, std::vector<double> x0,
                                           std::span<const double> lower, std::span<const double> upper, int iters,
                                           double step) {
  auto project = [&](std::vector<double>& x) {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lower[i], upper[i]);
  };
  ProjectedGradientResult out;
  out.x = std::move(x0);
  project(out.x);
  out.cost = cost(out.x);
  out.history.push_back(out.cost);

  constexpr int kMaxHalvings = 30;
  std::vector<double> trial(out.x.size());
  for (int it = 0; it < iters; ++it) {
    const std::vector<double> g = gradient(out.x);
    if (std::ranges::all_of(g, [](double v) { return std::abs(v) < 1e-12; })) break;
    double alpha = step;
    bool accepted = false;
    for (int h = 0; h < kMaxHalvings && !accepted; ++h, alpha *= 0.5) {
      for (std::size_t i = 0; i < trial.size(); ++i) trial[i] = out.x[i] - alpha * g[i];
      project(trial);
      const double ft = cost(trial);
      if (ft < out.cost) {
        out.x = trial;
        out.cost = ft;
        out.history.push_back(ft);
        accepted = true;
      }
    }
    if (!accepted) break;
  }
  return out;
}

// ---- NMPC ----------------------------------------------------------------

NmpcProblem::NmpcProblem(const ArticulatedState& s, const ReferenceTrajectory& ref, std::size_t k,
                         const TrackConfig& cfg, const VehicleParams& p)
    : start_(s), ref_(ref), k_(k), cfg_(cfg), params_(p) {
  if (k + 1 >= ref.size()) throw std::out_of_range("NmpcProblem: no reference beyond index");
  horizon_ = std::min<std::size_t>(static_cast<std::size_t>(cfg.nmpc_horizon), ref.size() - 1 - k);
}

double NmpcProblem::stage_cost(std::size_t j, const ArticulatedState& x) const {
  const Eigen::Vector4d e = state_error(x, ref_.samples[k_ + j].state);
  double c = 0.0;
  for (int i = 0; i < 4; ++i) c += cfg_.q_diag[static_cast<std::size_t>(i)] * e(i) * e(i);
  return c;
}

double NmpcProblem::cost(std::span<const double> u) const {
  ArticulatedState x = start_;
  double total = stage_cost(0, x);
  for (std::size_t j = 0; j < horizon_; ++j) {
    const double v = u[2 * j];
    const double d = u[2 * j + 1];
    total += cfg_.nmpc_lambda * (v * v + d * d);
    x = step(x, {v, d}, ref_.dt, params_);
    total += stage_cost(j + 1, x);
  }
  return total;
}

std::vector<double> NmpcProblem::gradient(std::span<const double> u, double h) const {
  std::vector<ArticulatedState> xs{start_};
  for (std::size_t j = 0; j < horizon_; ++j) xs.push_back(step(xs.back(), {u[2 * j], u[2 * j + 1]}, ref_.dt, params_));

  std::vector<double> g(2 * horizon_);
  for (std::size_t j = 0; j < horizon_; ++j) {
    for (std::size_t c = 0; c < 2; ++c) {
      // Only the tail after control j changes; its prefix cancels in the difference.
      auto tail = [&](double delta_u) {
        ControlInput uj{u[2 * j], u[2 * j + 1]};
        (c == 0 ? uj.v : uj.delta) += delta_u;
        ArticulatedState x = step(xs[j], uj, ref_.dt, params_);
        double t = stage_cost(j + 1, x);
        for (std::size_t i = j + 1; i < horizon_; ++i) {
          x = step(x, {u[2 * i], u[2 * i + 1]}, ref_.dt, params_);
          t += stage_cost(i + 1, x);
        }
        const double val = u[2 * j + c] + delta_u;
        return t + cfg_.nmpc_lambda * val * val;
      };
      g[2 * j + c] = (tail(h) - tail(-h)) / (2.0 * h);
    }
  }
  return g;
}

std::vector<double> NmpcProblem::initial_guess() const {
  std::vector<double> u;
  for (std::size_t j = 0; j < horizon_; ++j) {
    const ControlInput c = clamp_control(ref_.samples[k_ + j].control, params_);
    u.push_back(c.v);
    u.push_back(c.delta);
  }
  return u;
}

std::vector<double> NmpcProblem::lower_bounds() const {
  std::vector<double> lo;
  for (std::size_t j = 0; j < horizon_; ++j) {
    lo.push_back(params_.min_speed);
    lo.push_back(-params_.max_steer);
  }
  return lo;
}

std::vector<double> NmpcProblem::upper_bounds() const {
  std::vector<double> hi;
  for (std::size_t j = 0; j < horizon_; ++j) {
    hi.push_back(params_.max_speed);
    hi.push_back(params_.max_steer);
  }
  return hi;
}

NmpcResult nmpc_refine(const ArticulatedState& s, const ReferenceTrajectory& ref, std::size_t k,
                       const TrackConfig& cfg, const VehicleParams& p) {
  const NmpcProblem problem(s, ref, k, cfg, p);
  const auto lo = problem.lower_bounds();
  const auto hi = problem.upper_bounds();
  const auto res = projected_gradient([&](std::span<const double> u) { return problem.cost(u); },
                                      [&](std::span<const double> u) { return problem.gradient(u); },
                                      problem.initial_guess(), lo, hi, cfg.nmpc_iters, cfg.nmpc_step);
  NmpcResult out;
  out.cost = res.cost;
  out.history = res.history;
  for (std::size_t j = 0; j < problem.horizon(); ++j) out.controls.push_back({res.x[2 * j], res.x[2 * j + 1]});
  return out;
}

// ---- hitch guard ---------------------------------------------------------

ControlInput hitch_guard(ControlInput u, const ArticulatedState& s, const TrackConfig& cfg, const VehicleParams& p) {
  if (std::abs(hitch_angle(step(s, u, cfg.dt, p))) <= p.max_hitch) return u;

  std::optional<ControlInput> best;
  double best_hitch = 0.0;
  for (int i = 0; i < kGuardSteerCandidates; ++i) {
    const double delta = -p.max_steer + 2.0 * p.max_steer * i / (kGuardSteerCandidates - 1);
    const ControlInput cand{u.v, delta};
    const double next = std::abs(hitch_angle(step(s, cand, cfg.dt, p)));
    if (next <= p.max_hitch && (!best || next < best_hitch)) {
      best = cand;
      best_hitch = next;
    }
  }
  return best.value_or(ControlInput{0.0, 0.0});
}

}  // namespace ttpark
