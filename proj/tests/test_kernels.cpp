#include <numeric>

#include "doctest.h"
#include "ssrs/augment.hpp"
#include "ssrs/estimator.hpp"
#include "ssrs/kernels.hpp"
#include "ssrs/losses.hpp"

using namespace ssrs;

namespace {

std::vector<Transition> random_transitions(Engine& rng, std::size_t n, std::size_t m1, std::size_t m2,
                                           bool rewarded) {
  std::vector<Transition> out;
  for (std::size_t i = 0; i < n; ++i) {
    Transition t;
    for (std::size_t d = 0; d < m1; ++d) t.state.push_back(uniform01(rng) * 255.0);
    t.action = one_hot(uniform_index(rng, m2), m2);
    for (std::size_t d = 0; d < m1; ++d) t.next_state.push_back(uniform01(rng) * 255.0);
    t.reward = rewarded ? static_cast<double>(1 + uniform_index(rng, 3)) : 0.0;
    out.push_back(t);
  }
  return out;
}

}  // namespace

TEST_CASE("reduce_batch result does not depend on the execution policy") {
  for (std::size_t n : {0u, 1u, 7u, 8u, 9u, 100u}) {
    auto fn = [](std::size_t i, std::span<double> g) {
      if (!g.empty()) g[i % g.size()] += 0.1 * static_cast<double>(i);
      return SampleResult{1.0 / (1.0 + static_cast<double>(i)), i % 3 == 0};
    };
    const auto s = reduce_batch(n, 5, fn, Exec::serial);
    const auto p = reduce_batch(n, 5, fn, Exec::parallel);
    CHECK(s.value == doctest::Approx(p.value).epsilon(1e-15));
    CHECK(s.gate_passes == p.gate_passes);
    for (std::size_t j = 0; j < 5; ++j) CHECK(s.grad[j] == doctest::Approx(p.grad[j]).epsilon(1e-15));
  }
}

TEST_CASE("parallel reduction is reproducible across repeated calls") {
  auto fn = [](std::size_t i, std::span<double> g) {
    g[0] += 1e-3 * static_cast<double>(i * i);
    return SampleResult{std::sin(static_cast<double>(i)), false};
  };
  const auto a = reduce_batch(1000, 1, fn, Exec::parallel);
  const auto b = reduce_batch(1000, 1, fn, Exec::parallel);
  CHECK(a.value == b.value);
  CHECK(a.grad == b.grad);
}

TEST_CASE("serial and parallel losses agree") {
  Engine rng(21);
  const std::size_t m1 = 6, m2 = 3;
  const auto params = EstimatorParams::create(m1, m2, 3, {8}, 0.0, 4);
  const auto labeled = random_transitions(rng, 37, m1, m2, true);
  const auto unlabeled = random_transitions(rng, 45, m1, m2, false);
  const auto pairing = make_pairing(AugmentConfig{}, 2, m1);
  const auto views = make_consistency_views(unlabeled, pairing, 8);
  const std::vector<double> z = {1, 2, 3};
  for (auto mode : {LossMode::hard, LossMode::smooth}) {
    LossSettings st;
    st.mode = mode;
    st.lambda = 0.3;
    const auto s = total_loss(params, labeled, views, z, st, 0.4, 1.0, Exec::serial);
    const auto p = total_loss(params, labeled, views, z, st, 0.4, 1.0, Exec::parallel);
    CHECK(s.breakdown.total == doctest::Approx(p.breakdown.total).epsilon(1e-13));
    CHECK(s.breakdown.gate_r == p.breakdown.gate_r);
    CHECK(s.breakdown.gate_s == p.breakdown.gate_s);
    REQUIRE(s.grad.values.size() == p.grad.values.size());
    for (std::size_t j = 0; j < s.grad.values.size(); ++j)
      CHECK(s.grad.values[j] == doctest::Approx(p.grad.values[j]).epsilon(1e-12));
  }
}

TEST_CASE("for_each_index visits every index once") {
  std::vector<int> hits(257, 0);
  for_each_index(hits.size(), [&](std::size_t i) { hits[i] += 1; }, Exec::parallel);
  CHECK(std::accumulate(hits.begin(), hits.end(), 0) == 257);
  CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
}
