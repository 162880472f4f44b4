#include <benchmark/benchmark.h>

#include "ssrs/analysis.hpp"
#include "ssrs/estimator.hpp"
#include "ssrs/losses.hpp"

using namespace ssrs;

namespace {

constexpr std::size_t kStateDim = 32;
constexpr std::size_t kActions = 4;

std::vector<Transition> batch(std::size_t n, bool rewarded, std::uint64_t seed) {
  Engine rng(seed);
  std::vector<Transition> out;
  for (std::size_t i = 0; i < n; ++i) {
    Transition t;
    for (std::size_t d = 0; d < kStateDim; ++d) {
      t.state.push_back(std::floor(uniform01(rng) * 256.0));
      t.next_state.push_back(std::floor(uniform01(rng) * 256.0));
    }
    t.action = one_hot(uniform_index(rng, kActions), kActions);
    t.reward = rewarded ? static_cast<double>(1 + uniform_index(rng, 12)) : 0.0;
    out.push_back(t);
  }
  return out;
}

Exec exec_of(const benchmark::State& state) { return state.range(0) == 0 ? Exec::serial : Exec::parallel; }

void BM_TotalLoss(benchmark::State& state) {
  const auto params = EstimatorParams::create(kStateDim, kActions, 12, {128, 64, 32}, 0.2, 1);
  const auto labeled = batch(static_cast<std::size_t>(state.range(1)), true, 2);
  const auto unlabeled = batch(static_cast<std::size_t>(state.range(1)), false, 3);
  const auto views = make_consistency_views(unlabeled, make_pairing(AugmentConfig{}, 8, kStateDim), 4);
  std::vector<double> z(12);
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = static_cast<double>(i + 1);
  LossSettings s;
  s.lambda = 0.1;
  for (auto _ : state) benchmark::DoNotOptimize(total_loss(params, labeled, views, z, s, 0.7, 1.0, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * state.range(1) * 2);
}
BENCHMARK(BM_TotalLoss)->ArgNames({"parallel", "batch"})->ArgsProduct({{0, 1}, {32, 256}});

void BM_ShapeBuffer(benchmark::State& state) {
  const auto params = EstimatorParams::create(kStateDim, kActions, 12, {128, 64, 32}, 0.2, 1);
  ReplayBuffer buffer(4096);
  for (const auto& t : batch(4000, false, 5)) buffer.push(t);
  for (const auto& t : batch(40, true, 6)) buffer.push(t);
  RewardSet zset(12);
  zset.update(1.0);
  zset.update(12.0);
  Engine rng(7);
  for (auto _ : state) benchmark::DoNotOptimize(shape_buffer(params, buffer, zset, 0.0, 0.25, 0.5, rng, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_ShapeBuffer)->ArgNames({"parallel"})->Arg(0)->Arg(1);

void BM_Consensus(benchmark::State& state) {
  Engine rng(8);
  std::vector<Point> pts;
  for (int i = 0; i < 300; ++i) {
    Point p(6);
    for (double& v : p) v = uniform01(rng) * 10.0 + 20.0 * (i % 3);
    pts.push_back(p);
  }
  for (auto _ : state) benchmark::DoNotOptimize(consensus(pts, 3, 20, 9, exec_of(state)));
}
BENCHMARK(BM_Consensus)->ArgNames({"parallel"})->Arg(0)->Arg(1);

}  // namespace

BENCHMARK_MAIN();
