#include <benchmark/benchmark.h>

#include "ttpark/control.hpp"
#include "ttpark/harness.hpp"

using namespace ttpark;

namespace {

Scenario yard() {
  Scenario sc = builtin_lot();
  sc.bounds = {0.0, 0.0, 70.0, 26.0};
  sc.start = ArticulatedState(22.0, 12.0, 0.0, 0.0);
  sc.obstacles = {OrientedBox(Pose2(30.0, 22.0, 0.0), 14.0, 3.0)};
  sc.spots = {{1, Pose2(40.0, 12.0, 0.0)}};
  return sc;
}

ReferenceTrajectory arc_reference() {
  const VehicleParams p;
  ReferenceTrajectory ref;
  ArticulatedState s(30.0, 20.0, 0.2, 0.1);
  for (int i = 0; i < 60; ++i) {
    const ControlInput u{i < 30 ? 1.0 : -1.0, 0.25 * std::sin(0.07 * i)};
    ref.samples.push_back({s, u});
    s = step(s, u, ref.dt, p);
  }
  ref.samples.push_back({s, {0.0, 0.0}});
  return ref;
}

void BM_Step(benchmark::State& state) {
  const VehicleParams p;
  ArticulatedState s(0.0, 0.0, 0.3, 0.1);
  for (auto _ : state) {
    s = step(s, {1.0, 0.2}, 0.1, p);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_Step);

void BM_BoxesOverlap(benchmark::State& state) {
  const OrientedBox a(Pose2(0.0, 0.0, 0.3), 6.0, 2.5);
  const OrientedBox b(Pose2(4.0, 1.0, 1.1), 7.5, 2.5);
  for (auto _ : state) benchmark::DoNotOptimize(boxes_overlap(a, b));
}
BENCHMARK(BM_BoxesOverlap);

void BM_CollisionFreeBuiltinLot(benchmark::State& state) {
  const Scenario sc = builtin_lot();
  for (auto _ : state) benchmark::DoNotOptimize(collision_free(sc.start, sc));
}
BENCHMARK(BM_CollisionFreeBuiltinLot);

void BM_SolveDare4x4(benchmark::State& state) {
  const VehicleParams p;
  const Linearization lin = linearize({0.0, 0.0, 0.2, 0.1}, {1.0, 0.1}, 0.1, p);
  const Eigen::MatrixXd Q = Eigen::Vector4d(1.0, 1.0, 0.5, 0.5).asDiagonal();
  const Eigen::MatrixXd R = Eigen::Vector2d(0.1, 0.1).asDiagonal();
  for (auto _ : state) benchmark::DoNotOptimize(solve_dare(lin.A, lin.B, Q, R));
}
BENCHMARK(BM_SolveDare4x4)->Unit(benchmark::kMicrosecond);

void BM_TrackLqr(benchmark::State& state) {
  const ReferenceTrajectory ref = arc_reference();
  const TrackConfig cfg;
  const VehicleParams p;
  const ArticulatedState& r = ref.samples[10].state;
  const ArticulatedState s(r.x() + 0.2, r.y() - 0.1, r.psi(), r.psi_t());
  for (auto _ : state) benchmark::DoNotOptimize(track_lqr(s, ref, 10, cfg, p));
}
BENCHMARK(BM_TrackLqr)->Unit(benchmark::kMicrosecond);

void BM_NmpcRefine(benchmark::State& state) {
  const ReferenceTrajectory ref = arc_reference();
  const TrackConfig cfg;
  const VehicleParams p;
  const ArticulatedState& r = ref.samples[10].state;
  const ArticulatedState s(r.x() + 0.2, r.y() - 0.1, r.psi(), r.psi_t());
  for (auto _ : state) benchmark::DoNotOptimize(nmpc_refine(s, ref, 10, cfg, p));
}
BENCHMARK(BM_NmpcRefine)->Unit(benchmark::kMillisecond);

void BM_PlanYard(benchmark::State& state) {
  const Scenario sc = yard();
  for (auto _ : state) benchmark::DoNotOptimize(plan(sc, 1));
}
BENCHMARK(BM_PlanYard)->Unit(benchmark::kMillisecond);

void BM_SmoothYard(benchmark::State& state) {
  const Scenario sc = yard();
  const PlannedPath path = plan(sc, 1);
  for (auto _ : state) benchmark::DoNotOptimize(smooth(path, sc));
}
BENCHMARK(BM_SmoothYard)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
