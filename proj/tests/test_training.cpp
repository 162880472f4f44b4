#include "doctest.h"
#include "ssrs/training.hpp"
#include "vanilla_oracle.hpp"

using namespace ssrs;

namespace {

RunConfig small_chain(int length, int episodes) {
  RunConfig c;
  c.env.length = length;
  c.episodes = episodes;
  c.buffer_capacity = 300;
  c.epsilon_decay_episodes = episodes / 2;
  c.hidden = {16, 8};
  c.estimator_batch = 16;
  return c;
}

}  // namespace

TEST_CASE("random rollouts are reproducible") {
  SparseChain env(10, 0, 8);
  TabularQ q(2, 0.99, 0.1);
  Engine a(3), b(3);
  const auto ra = run_episode(env, q, 1.0, a, 0);
  const auto rb = run_episode(env, q, 1.0, b, 0);
  REQUIRE(ra.transitions.size() == rb.transitions.size());
  for (std::size_t i = 0; i < ra.transitions.size(); ++i) CHECK(ra.transitions[i] == rb.transitions[i]);
}

TEST_CASE("greedy rollout follows the table and a solved chain has one reward") {
  SparseChain env(12, 0, 8);
  TabularQ q(2, 0.99, 0.1);
  for (int s = 0; s < 12; ++s) q.set(s, SparseChain::kRight, 1.0);
  Engine rng(1);
  const auto ro = run_episode(env, q, 0.0, rng, 0);
  CHECK(ro.transitions.size() == 11);
  int nonzero = 0;
  for (const auto& t : ro.transitions) {
    CHECK(t.action == one_hot(SparseChain::kRight, 2));
    nonzero += t.reward != 0.0;
  }
  CHECK(nonzero == 1);
  CHECK(ro.total_reward == 1.0);
  CHECK(evaluate_greedy(env, q, 3, 0) == 1.0);
}

TEST_CASE("epsilon schedule") {
  RunConfig c;
  c.epsilon_start = 1.0;
  c.epsilon_end = 0.1;
  c.epsilon_decay_episodes = 10;
  CHECK(epsilon_at(c, 0) == 1.0);
  CHECK(epsilon_at(c, 5) == doctest::Approx(0.55));
  CHECK(epsilon_at(c, 10) == doctest::Approx(0.1));
  CHECK(epsilon_at(c, 50) == doctest::Approx(0.1));
}

TEST_CASE("shaping and estimator off reproduce the reference learner bit-exactly") {
  for (std::uint64_t seed : {1u, 2u}) {
    auto c = small_chain(8, 40);
    c.seed = seed;
    c.shaping = false;
    c.estimator_updates = false;
    Trainer t(c);
    const auto rec = t.run();
    const auto ref = oracle::vanilla_q_learning(c);
    CHECK(t.backbone().table() == ref.q);
    CHECK(rec.transitions == ref.transitions);
    for (std::size_t e = 0; e < ref.returns.size(); ++e) CHECK(rec.episodes[e].train_return == ref.returns[e]);
  }
}

TEST_CASE("first episode is identical with and without shaping") {
  auto on = small_chain(6, 5);
  auto off = on;
  off.shaping = false;
  off.estimator_updates = false;
  Trainer a(on), b(off);
  a.step_episode();
  b.step_episode();
  CHECK(a.buffer() == b.buffer());
  CHECK(a.backbone() == b.backbone());
}

TEST_CASE("run bookkeeping invariants") {
  auto c = small_chain(6, 40);
  c.q_init = 1.0;
  c.p_u = 0.2;
  Trainer t(c);
  const auto rec = t.run();
  std::size_t steps = 0;
  double best = -1e300;
  for (const auto& e : rec.episodes) {
    steps += static_cast<std::size_t>(e.steps);
    best = std::max(best, e.score);
    CHECK(e.best == best);
  }
  CHECK(steps == rec.transitions);
  const auto& buf = t.buffer();
  for (std::size_t i = 0; i < buf.size(); ++i) {
    if (buf.is_shaped(i)) {
      CHECK(t.reward_set().contains(buf.at(i).reward));
      CHECK(buf.original_reward(i) == 0.0);
    } else {
      CHECK(buf.at(i).reward == buf.original_reward(i));
    }
  }
  CHECK(rec.first_train_success > 0);
}

TEST_CASE("training outputs are deterministic") {
  auto c = small_chain(6, 25);
  c.q_init = 1.0;
  c.p_u = 0.2;
  const auto a = train(c);
  const auto b = train(c);
  CHECK_FALSE(a.failed);
  CHECK(curve_csv(a) == curve_csv(b));
  CHECK(curve_csv(a).rfind("episode,score,best,L_r,L_QV,L_s,lambda,alpha,p_u,shaped_count\n", 0) == 0);
  Trainer s(c, Exec::serial), p(c, Exec::parallel);
  CHECK(curve_csv(s.run()) == curve_csv(p.run()));
  const auto ts = s.estimator().flatten(), tp = p.estimator().flatten();
  for (std::size_t i = 0; i < ts.size(); ++i) CHECK(ts[i] == doctest::Approx(tp[i]).epsilon(1e-9));
}

TEST_CASE("component errors become a failure record") {
  auto c = small_chain(6, 3);
  c.env.kind = EnvKind::key_door_grid;
  c.env.key_x = 0;
  c.env.key_y = 0;
  const auto rec = train(c);
  CHECK(rec.failed);
  CHECK_FALSE(rec.error.empty());
}
