#include <chrono>
#include <cmath>
#include <cstdio>

#include "ttpark/harness.hpp"

namespace ttpark {

const char* to_string(RunOutcome o) {
  switch (o) {
    case RunOutcome::kSuccess: return "success";
    case RunOutcome::kInvalidSpot: return "invalid-spot";
    case RunOutcome::kNoPath: return "no-path";
    case RunOutcome::kCollision: return "collision";
    case RunOutcome::kJackknife: return "jackknife";
    case RunOutcome::kTimeout: return "timeout";
    case RunOutcome::kMissedGoal: return "missed-goal";
    case RunOutcome::kControllerFault: return "controller-fault";
  }
  return "unknown";
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool nonincreasing(const std::vector<double>& h) {
  for (std::size_t i = 1; i < h.size(); ++i) {
    if (h[i] > h[i - 1]) return false;
  }
  return true;
}

}  // namespace

SimResult run(const Scenario& sc, int spot_id, const RunOptions& opts) {
  SimResult r;
  r.spot_id = spot_id;
  const TrackConfig& cfg = sc.controller_config;
  r.controller = opts.controller.value_or(cfg.controller);
  r.trajectory.push_back({0.0, sc.start, {}});

  const ParkingSpot* spot = sc.find_spot(spot_id);
  if (spot == nullptr) {
    r.outcome = RunOutcome::kInvalidSpot;
    r.message = InvalidSpot(spot_id).what();
    return r;
  }

  const auto plan_start = Clock::now();
  try {
    PlanStats stats;
    PlannedPath raw = plan(sc, spot_id, &stats);
    r.expansions = stats.expansions;
    r.path = opts.smooth ? smooth(raw, sc) : std::move(raw);
  } catch (const NoPathFound& e) {
    r.planning_time = seconds_since(plan_start);
    r.expansions = e.expansions();
    r.outcome = RunOutcome::kNoPath;
    r.message = e.what();
    return r;
  }
  r.planning_time = seconds_since(plan_start);

  const auto sim_start = Clock::now();
  const VehicleParams& vp = sc.vehicle;
  const ReferenceTrajectory ref = build_reference(r.path, cfg, vp);
  ArticulatedState state = sc.start;
  r.max_abs_hitch = std::abs(hitch_angle(state));
  const double budget_steps = opts.time_budget / cfg.dt + 1e-9;

  for (std::size_t k = 0; k + 1 < ref.size(); ++k) {
    if (static_cast<double>(k + 1) > budget_steps) {
      r.timeout = true;
      break;
    }
    ControlInput u;
    try {
      if (r.controller == ControllerKind::kLqr) {
        u = track_lqr(state, ref, k, cfg, vp);
      } else {
        const NmpcResult res = nmpc_refine(state, ref, k, cfg, vp);
        r.nmpc_monotone = r.nmpc_monotone && nonincreasing(res.history);
        u = res.controls.front();
      }
    } catch (const std::exception& e) {
      r.outcome = RunOutcome::kControllerFault;
      r.message = e.what();
      break;
    }
    if (opts.guard) {
      const ControlInput guarded = hitch_guard(u, state, cfg, vp);
      if (!(guarded == u)) ++r.guard_interventions;
      u = guarded;
    }
    const ArticulatedState next = step(state, u, cfg.dt, vp);
    r.trajectory.back().control = u;
    r.trajectory.push_back({static_cast<double>(r.trajectory.size()) * cfg.dt, next, {}});
    state = next;
    r.max_abs_hitch = std::max(r.max_abs_hitch, std::abs(hitch_angle(state)));
    if (is_jackknifed(state, vp)) {
      r.jackknife = true;
      break;
    }
    if (!collision_free(state, sc)) {
      r.collision = true;
      break;
    }
  }

  const bool aborted = r.jackknife || r.collision || r.outcome == RunOutcome::kControllerFault;
  if (!aborted) {
    // Settle at rest before measuring.
    for (int i = 0; i < opts.hold_steps; ++i) {
      const ArticulatedState next = step(state, {0.0, 0.0}, cfg.dt, vp);
      r.trajectory.push_back({static_cast<double>(r.trajectory.size()) * cfg.dt, next, {}});
      state = next;
    }
  }
  r.sim_time = seconds_since(sim_start);
  r.sim_duration = r.trajectory.back().t;

  for (std::size_t i = 1; i < r.trajectory.size(); ++i) {
    r.path_length += distance(r.trajectory[i - 1].state.position(), r.trajectory[i].state.position());
  }
  const Pose2 trailer = trailer_pose(state, vp);
  r.final_pos_err = distance(trailer.position(), spot->goal.position());
  r.final_heading_err = std::abs(normalize_angle(trailer.heading() - spot->goal.heading()));

  if (r.outcome == RunOutcome::kControllerFault) return r;
  if (r.jackknife) {
    r.outcome = RunOutcome::kJackknife;
  } else if (r.collision) {
    r.outcome = RunOutcome::kCollision;
  } else if (r.timeout) {
    r.outcome = RunOutcome::kTimeout;
  } else if (r.final_pos_err > spot->pos_tol || r.final_heading_err > spot->heading_tol) {
    r.outcome = RunOutcome::kMissedGoal;
  } else {
    r.outcome = RunOutcome::kSuccess;
  }
  r.success = r.outcome == RunOutcome::kSuccess;
  return r;
}

std::string trajectory_to_csv(const SimResult& r) {
  std::string out = "t_index,x,y,psi,psi_t,v,delta,direction\n";
  char line[256];
  int dir = 1;
  for (std::size_t i = 0; i < r.trajectory.size(); ++i) {
    const auto& p = r.trajectory[i];
    if (p.control.v > 0.0) dir = 1;
    if (p.control.v < 0.0) dir = -1;
    std::snprintf(line, sizeof line, "%zu,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%d\n", i, p.state.x(), p.state.y(),
                  p.state.psi(), p.state.psi_t(), p.control.v, p.control.delta, dir);
    out += line;
  }
  return out;
}

}  // namespace ttpark
