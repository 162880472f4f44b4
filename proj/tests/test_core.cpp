#include <cmath>
#include <set>

#include "doctest.h"
#include "ssrs/error.hpp"
#include "ssrs/replay_buffer.hpp"
#include "ssrs/reward_set.hpp"
#include "ssrs/rng.hpp"
#include "ssrs/types.hpp"

using namespace ssrs;

namespace {

Transition make_t(double r, double s = 1.0, std::size_t m1 = 3) {
  return {std::vector<double>(m1, s), one_hot(0, 2), r, std::vector<double>(m1, s + 1), false};
}

// nonzero fraction recomputed from scratch
double recount_mu(const ReplayBuffer& b) {
  std::size_t nz = 0;
  for (std::size_t i = 0; i < b.size(); ++i) nz += b.original_reward(i) != 0.0 ? 1 : 0;
  return b.size() == 0 ? 0.0 : static_cast<double>(nz) / static_cast<double>(b.size());
}

}  // namespace

TEST_CASE("transition validation") {
  CHECK_NOTHROW(validate(make_t(0.0)));
  Transition bad = make_t(0.0);
  bad.next_state.pop_back();
  CHECK_THROWS_AS(validate(bad), DimensionError);
  bad = make_t(0.0);
  bad.state[1] = -0.5;
  CHECK_THROWS_AS(validate(bad), DomainError);
  bad = make_t(0.0);
  bad.state.clear();
  bad.next_state.clear();
  CHECK_THROWS_AS(validate(bad), DimensionError);
}

TEST_CASE("argmax breaks ties toward the lowest index") {
  const std::vector<double> v = {0.2, 0.4, 0.4, 0.1};
  CHECK(argmax(v) == 1);
  CHECK(one_hot(2, 4) == std::vector<double>{0, 0, 1, 0});
}

TEST_CASE("stack_transitions builds [S | A | R]") {
  std::vector<Transition> ts = {make_t(0.0, 1.0), make_t(2.0, 3.0)};
  const auto traj = stack_transitions(ts);
  CHECK(traj.length() == 2);
  CHECK(traj.states(1, 0) == 3.0);
  CHECK(traj.actions(0, 0) == 1.0);
  CHECK(traj.rewards == std::vector<double>{0.0, 2.0});
}

TEST_CASE("buffer push examples") {
  ReplayBuffer b(2);
  b.push(make_t(0.0));
  CHECK(b.size() == 1);
  CHECK(b.nonzero_fraction() == 0.0);
  ReplayBuffer c(2);
  c.push(make_t(3.0));
  CHECK(c.nonzero_fraction() == 1.0);

  ReplayBuffer ring(2);
  ring.push(make_t(0.0, 1.0));
  ring.push(make_t(0.0, 2.0));
  ring.push(make_t(0.0, 3.0));
  CHECK(ring.size() == 2);
  CHECK(ring.at(0).state[0] == 2.0);
  CHECK(ring.at(1).state[0] == 3.0);

  ReplayBuffer four(4);
  for (double r : {0.0, 0.0, 5.0, 0.0}) four.push(make_t(r));
  CHECK(four.nonzero_fraction() == 0.25);
}

TEST_CASE("buffer rejects mismatched shapes") {
  ReplayBuffer b(4);
  b.push(make_t(0.0, 1.0, 3));
  CHECK_THROWS_AS(b.push(make_t(0.0, 1.0, 4)), DimensionError);
}

TEST_CASE("cached sparsity matches a recount under random push/evict/shape sequences") {
  Engine rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    ReplayBuffer b(1 + uniform_index(rng, 9));
    for (int step = 0; step < 60; ++step) {
      const double r = uniform01(rng) < 0.3 ? 1.0 + static_cast<double>(uniform_index(rng, 3)) : 0.0;
      b.push(make_t(r, static_cast<double>(step)));
      if (uniform01(rng) < 0.3) {
        auto zeros = b.zero_reward_indices();
        if (!zeros.empty()) b.set_shaped_reward(zeros[uniform_index(rng, zeros.size())], 0.5);
      }
      CHECK(b.nonzero_fraction() == recount_mu(b));
      for (std::size_t i = 0; i < b.size(); ++i)
        if (!b.is_shaped(i)) CHECK(b.at(i).reward == b.original_reward(i));
    }
  }
}

TEST_CASE("shaping never touches nonzero entries and is reversible") {
  ReplayBuffer b(4);
  b.push(make_t(0.0));
  b.push(make_t(2.0));
  CHECK_THROWS_AS(b.set_shaped_reward(1, 0.5), ArgumentError);
  b.set_shaped_reward(0, 0.5);
  CHECK(b.is_shaped(0));
  CHECK(b.at(0).reward == 0.5);
  CHECK(b.shaped_count() == 1);
  CHECK(b.nonzero_fraction() == 0.5);
  b.clear_all_shaping();
  CHECK(!b.is_shaped(0));
  CHECK(b.at(0).reward == 0.0);
}

TEST_CASE("sampling") {
  ReplayBuffer one(3);
  one.push(make_t(1.0, 4.0));
  Engine rng(1);
  const auto s = one.sample(1, rng);
  REQUIRE(s.size() == 1);
  CHECK(s[0].first == 0);
  CHECK(s[0].second.state[0] == 4.0);

  ReplayBuffer ten(10);
  for (int i = 0; i < 10; ++i) ten.push(make_t(0.0, i));
  Engine a(99), b(99);
  const auto ia = ten.sample_indices(64, a);
  CHECK(ia == ten.sample_indices(64, b));
  CHECK(ia.size() == 64);
  for (auto i : ia) CHECK(i < 10);
  CHECK_THROWS_AS(ten.sample_indices(0, a), ArgumentError);
  ReplayBuffer empty(3);
  CHECK_THROWS_AS(empty.sample_indices(1, a), ArgumentError);
}

TEST_CASE("reward set interpolation examples") {
  RewardSet two(5);
  two.update(1.0);
  two.update(9.0);
  CHECK(two.values() == std::vector<double>{1, 3, 5, 7, 9});

  RewardSet first(3);
  first.update(4.0);
  CHECK(first.values() == std::vector<double>{0, 2, 4});

  RewardSet binary(2);
  binary.update(-1.0);
  binary.update(0.0);
  CHECK(binary.values() == std::vector<double>{-1, 0});
}

TEST_CASE("reward set update is idempotent and keeps observed extremes") {
  Engine rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    RewardSet z(2 + uniform_index(rng, 14));
    std::set<double> seen;
    for (int k = 0; k < 6; ++k) {
      const double r = std::round((uniform01(rng) * 20.0 - 10.0) * 4.0) / 4.0;
      if (r == 0.0) continue;
      const bool fresh = !seen.contains(r);
      seen.insert(r);
      CHECK(z.update(r) == fresh);
      const auto before = z.values();
      CHECK_FALSE(z.update(r));
      CHECK(z.values() == before);
      for (std::size_t i = 1; i < z.size(); ++i) CHECK(z[i] > z[i - 1]);
      if (seen.size() >= 2) {
        CHECK(z.contains(*seen.begin()));
        CHECK(z.contains(*seen.rbegin()));
      }
    }
  }
}

TEST_CASE("linspace matches the affine oracle") {
  const auto v = linspace(-2.0, 3.0, 11);
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(v[i] == doctest::Approx(-2.0 + 0.5 * static_cast<double>(i)).epsilon(1e-15));
  CHECK(v.front() == -2.0);
  CHECK(v.back() == 3.0);
}

TEST_CASE("derived seeds give independent, reproducible streams") {
  CHECK(derive_seed(1, 1) != derive_seed(1, 2));
  CHECK(derive_seed(1, 1) != derive_seed(2, 1));
  CHECK(derive_seed(5, 3, 0) == derive_seed(derive_seed(5, 3), 0));
  Engine a = make_engine(11, Stream::exploration), b = make_engine(11, Stream::exploration);
  CHECK(a() == b());
}
