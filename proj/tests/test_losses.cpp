#include <cmath>

#include "doctest.h"
#include "ssrs/error.hpp"
#include "ssrs/losses.hpp"

using namespace ssrs;

namespace {

double logit(double p) { return std::log(p / (1.0 - p)); }

// Two-class estimator with confidence [sigmoid(s / 255), 1 - sigmoid(s / 255)] for scalar state s.
EstimatorParams two_class_estimator() {
  auto p = EstimatorParams::create(1, 1, 2, {1}, 0.0, 1);
  auto set = [](MlpNet& net) {
    auto th = net.params();
    std::fill(th.begin(), th.end(), 0.0);
    th[net.layers()[0].offset] = 1.0;
    const auto& last = net.layers()[1];
    th[last.offset] = 1.0;
  };
  set(p.q_net);
  set(p.v_net);
  return p;
}

std::vector<double> state_for(double q0) { return {255.0 * logit(q0)}; }

Transition labeled_at(double q0, double r) { return {state_for(q0), {1.0}, r, state_for(q0), false}; }

ConsistencyView view(double qw0, double qs0) {
  return {{1.0}, state_for(qw0), state_for(qw0), state_for(qs0), state_for(qs0)};
}

struct Toy {
  EstimatorParams params;
  std::vector<Transition> labeled;
  std::vector<ConsistencyView> views;
  std::vector<double> z;
};

Toy random_toy(std::uint64_t seed) {
  Engine rng(seed);
  Toy t;
  t.z = {1.0, 2.0, 3.0};
  t.params = EstimatorParams::create(3, 2, 3, {4}, 0.0, rng());
  auto theta = t.params.flatten();
  for (double& v : theta) v += 0.05 * (uniform01(rng) - 0.5);
  t.params.unflatten(theta);
  for (int i = 0; i < 5; ++i) {
    Transition tr;
    for (int d = 0; d < 3; ++d) {
      tr.state.push_back(std::floor(uniform01(rng) * 256));
      tr.next_state.push_back(std::floor(uniform01(rng) * 256));
    }
    tr.action = one_hot(uniform_index(rng, 2), 2);
    tr.reward = t.z[uniform_index(rng, 3)];
    t.labeled.push_back(tr);
    tr.reward = 0.0;
    t.views.push_back({tr.action, tr.state, tr.next_state, tr.next_state, tr.state});
  }
  return t;
}

double fd_error(const EstimatorParams& params, const std::function<LossValue(const EstimatorParams&)>& loss) {
  const auto theta = params.flatten();
  const auto fd = finite_diff_gradient(
      [&](std::span<const double> th) {
        auto p = params;
        p.unflatten(th);
        return loss(p).value;
      },
      theta, 1e-5);
  const auto bp = loss(params).grad.values;
  double worst = 0.0;
  for (std::size_t i = 0; i < bp.size(); ++i)
    worst = std::max(worst, std::abs(bp[i] - fd.values[i]) / (std::abs(fd.values[i]) + 1e-2));
  return worst;
}

}  // namespace

TEST_CASE("toy estimator realizes the requested confidences") {
  const auto p = two_class_estimator();
  const auto q = confidence(p, state_for(0.95), std::vector<double>{1.0}, state_for(0.95), 0.5);
  CHECK(q[0] == doctest::Approx(0.95).epsilon(1e-12));
}

TEST_CASE("hard L_r examples") {
  const auto p = two_class_estimator();
  const std::vector<double> z = {1.0, 2.0};
  LossSettings s;
  s.mode = LossMode::hard;
  s.lambda = 0.9;
  CHECK(loss_r(p, std::vector<Transition>{labeled_at(0.95, 1.0)}, z, s).value == doctest::Approx(0.0));
  CHECK(loss_r(p, std::vector<Transition>{labeled_at(0.95, 3.0)}, z, s).value == doctest::Approx(4.0));
  CHECK(loss_r(p, std::vector<Transition>{labeled_at(0.6, 3.0)}, z, s).value == 0.0);
  CHECK(loss_r(p, std::vector<Transition>{labeled_at(0.95, 3.0)}, z, s).grad.values.empty());
}

TEST_CASE("hard L_s examples") {
  const auto p = two_class_estimator();
  LossSettings s;
  s.mode = LossMode::hard;
  s.lambda = 0.9;
  CHECK(std::abs(loss_s(p, std::vector<ConsistencyView>{view(0.92, 0.91)}, s).value - 0.094311) < 1e-6);
  CHECK(loss_s(p, std::vector<ConsistencyView>{view(0.6, 0.95)}, s).value == 0.0);
  CHECK(loss_s(p, std::vector<ConsistencyView>{view(0.95, 1.0 - 1e-12)}, s).value < 1e-9);
}

TEST_CASE("empty batches give zero value and zero gradient") {
  const auto p = two_class_estimator();
  LossSettings s;
  const auto r = loss_r(p, {}, std::vector<double>{1, 2}, s);
  CHECK(r.value == 0.0);
  CHECK(r.grad.values == std::vector<double>(p.param_count(), 0.0));
  CHECK(loss_qv(p, {}).grad.norm() == 0.0);
  CHECK(loss_s(p, {}, s).grad.norm() == 0.0);
}

TEST_CASE("L_QV examples") {
  auto p = two_class_estimator();
  const std::vector<Transition> batch = {labeled_at(0.7, 1.0), labeled_at(0.3, 2.0)};
  const auto same = loss_qv(p, batch);
  CHECK(same.value == 0.0);
  CHECK(same.grad.norm() == 0.0);
  CHECK(monotonicity_penalty(std::vector<double>{1.0}) == 1.0);
  CHECK(monotonicity_penalty(std::vector<double>{-1.0}) == 0.0);
  CHECK((monotonicity_penalty(std::vector<double>{1.0}) + monotonicity_penalty(std::vector<double>{-1.0})) / 2 == 0.5);
  CHECK(monotonicity_penalty(std::vector<double>{0.5, -0.2, 0.1}) == doctest::Approx(0.26));
}

TEST_CASE("negative advantages contribute nothing") {
  CHECK(monotonicity_penalty(std::vector<double>{-0.3, -0.1, 0.0}) == 0.0);
}

TEST_CASE("combination arithmetic") {
  CHECK(combine_losses(0.2, 0.4, 0.6, 0.7) == doctest::Approx(0.66).epsilon(1e-15));
  CHECK(combine_losses(0.2, 0.4, 0.6, 1.0) == 0.2 + 0.4);
  CHECK(combine_losses(0.2, 0.4, 0.6, 0.0) == 0.2 + 0.6);
  auto toy = random_toy(3);
  LossSettings s;
  s.lambda = 0.3;
  const auto t = total_loss(toy.params, toy.labeled, toy.views, toy.z, s, 0.7);
  const auto& b = t.breakdown;
  CHECK(std::abs(b.total - (b.l_qv + 0.7 * b.l_s + 0.3 * b.l_r)) <= 1e-12);
  const auto r = loss_r(toy.params, toy.labeled, toy.z, s);
  const auto qv = loss_qv(toy.params, toy.labeled);
  const auto ls = loss_s(toy.params, toy.views, s);
  for (std::size_t i = 0; i < t.grad.values.size(); ++i)
    CHECK(t.grad.values[i] == doctest::Approx(qv.grad.values[i] + 0.7 * ls.grad.values[i] + 0.3 * r.grad.values[i]));
}

TEST_CASE("smoothed gradients match finite differences") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    auto toy = random_toy(seed);
    LossSettings s;
    s.lambda = 0.35;
    s.k = 4.0;
    s.t_sel = 0.5;
    CHECK(fd_error(toy.params, [&](const EstimatorParams& p) { return loss_r(p, toy.labeled, toy.z, s); }) <= 1e-4);
    CHECK(fd_error(toy.params, [&](const EstimatorParams& p) { return loss_qv(p, toy.labeled); }) <= 1e-4);
    CHECK(fd_error(toy.params, [&](const EstimatorParams& p) { return loss_s(p, toy.views, s); }) <= 1e-4);
  }
}

TEST_CASE("smooth losses approach the hard ones for sharp gates") {
  const auto p = two_class_estimator();
  const std::vector<double> z = {1.0, 2.0};
  LossSettings hard, smooth;
  hard.mode = LossMode::hard;
  smooth.k = 1e3;
  smooth.t_sel = 1e-3;
  hard.lambda = smooth.lambda = 0.8;
  for (double q0 : {0.1, 0.3, 0.7, 0.95, 0.99}) {
    for (double r : {1.0, 2.0, 3.5}) {
      const std::vector<Transition> b = {labeled_at(q0, r)};
      CHECK(std::abs(loss_r(p, b, z, smooth).value - loss_r(p, b, z, hard).value) <= 1e-2);
    }
  }
}

TEST_CASE("sgd step and finite differences on closed forms") {
  std::vector<double> w = {1.0};
  sgd_step(w, std::vector<double>{2.0}, 0.1);
  CHECK(w[0] == doctest::Approx(0.8));
  sgd_step(w, std::vector<double>{2.0}, 0.1);
  CHECK(w[0] == doctest::Approx(0.6));
  sgd_step(w, std::vector<double>{0.0}, 0.1);
  CHECK(w[0] == doctest::Approx(0.6));
  CHECK_THROWS_AS(sgd_step(w, std::vector<double>{NAN}, 0.1), NumericError);
  CHECK(w[0] == doctest::Approx(0.6));

  const std::vector<double> theta = {1.0, 2.0};
  const auto g = finite_diff_gradient([](std::span<const double> t) { return t[0] * t[0] + t[1] * t[1]; }, theta, 1e-5);
  CHECK(std::abs(g.values[0] - 2.0) <= 1e-8);
  CHECK(std::abs(g.values[1] - 4.0) <= 1e-8);
  const auto c = finite_diff_gradient([](std::span<const double>) { return 3.0; }, theta, 1e-5);
  CHECK(c.values == std::vector<double>{0.0, 0.0});
}

TEST_CASE("L_QV descent drives the positive advantage to zero on a frozen batch") {
  auto toy = random_toy(9);
  double before = loss_qv(toy.params, toy.labeled).value;
  REQUIRE(before > 0.0);
  for (int step = 0; step < 20000 && before >= 1e-6; ++step) {
    const auto v = loss_qv(toy.params, toy.labeled);
    sgd_step(toy.params, v.grad, 0.5);
    before = v.value;
  }
  CHECK(loss_qv(toy.params, toy.labeled).value < 1e-6);
}
