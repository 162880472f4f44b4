#include <cmath>
#include <numeric>

#include "doctest.h"
#include "ssrs/error.hpp"
#include "ssrs/estimator.hpp"
#include "ssrs/mlp.hpp"

using namespace ssrs;

namespace {

std::vector<double> random_input(Engine& rng, std::size_t n) {
  std::vector<double> x(n);
  for (double& v : x) v = uniform01(rng) * 2.0 - 0.5;
  return x;
}

// Estimator whose heads ignore their input: zero final weights, biases ln(q) + 10.
EstimatorParams constant_estimator(const std::vector<double>& q, std::size_t m1 = 2, std::size_t m2 = 2) {
  auto p = EstimatorParams::create(m1, m2, q.size(), {3}, 0.0, 1);
  for (MlpNet* net : {&p.q_net, &p.v_net}) {
    const auto& last = net->layers().back();
    auto theta = net->params();
    for (std::size_t i = 0; i < last.in * last.out; ++i) theta[last.offset + i] = 0.0;
    for (std::size_t c = 0; c < last.out; ++c) theta[last.offset + last.in * last.out + c] = std::log(q[c]) + 10.0;
  }
  return p;
}

}  // namespace

TEST_CASE("mlp softmax output is a probability vector") {
  Engine rng(3);
  MlpNet net(5, {8, 4}, 6, 0.2);
  net.initialize(rng);
  for (int trial = 0; trial < 50; ++trial) {
    const auto y = net.forward(random_input(rng, 5));
    double s = 0.0;
    for (double v : y) {
      CHECK(v >= 0.0);
      s += v;
    }
    CHECK(std::abs(s - 1.0) <= 1e-12);
  }
}

TEST_CASE("eval forward is deterministic and train mode applies dropout") {
  Engine rng(4);
  MlpNet net(4, {16}, 3, 0.5);
  net.initialize(rng);
  const auto x = random_input(rng, 4);
  CHECK(net.forward(x) == net.forward(x));
  CHECK(net.forward_tape(x).output == net.forward(x));
  Engine d1(9), d2(9);
  const auto a = net.forward_tape(x, NetMode::train, &d1);
  const auto b = net.forward_tape(x, NetMode::train, &d2);
  CHECK(a.output == b.output);
  bool any_zero = false;
  for (double m : a.masks.front()) {
    CHECK((m == 0.0 || m == doctest::Approx(2.0)));
    any_zero = any_zero || m == 0.0;
  }
  CHECK(any_zero);
}

TEST_CASE("flatten and unflatten are inverse") {
  auto p = EstimatorParams::create(6, 2, 4, {8, 4}, 0.2, 5);
  const auto theta = p.flatten();
  CHECK(theta.size() == p.param_count());
  auto q = EstimatorParams::create(6, 2, 4, {8, 4}, 0.2, 6);
  CHECK_FALSE(q == p);
  q.unflatten(theta);
  CHECK(q == p);
  CHECK(q.flatten() == theta);
  CHECK_THROWS_AS(q.unflatten(std::vector<double>(3)), DimensionError);
}

TEST_CASE("mlp backward matches central differences") {
  Engine rng(8);
  MlpNet net(3, {5, 4}, 3, 0.0);
  net.initialize(rng);
  const auto x = random_input(rng, 3);
  const std::vector<double> w = {0.3, -1.2, 0.7};
  auto loss = [&](const MlpNet& n) {
    const auto y = n.forward(x);
    return std::inner_product(y.begin(), y.end(), w.begin(), 0.0);
  };
  std::vector<double> grad(net.param_count(), 0.0);
  net.backward(net.forward_tape(x), w, grad);
  const double h = 1e-6;
  for (std::size_t i = 0; i < net.param_count(); ++i) {
    MlpNet up = net, down = net;
    up.params()[i] += h;
    down.params()[i] -= h;
    const double fd = (loss(up) - loss(down)) / (2 * h);
    CHECK(grad[i] == doctest::Approx(fd).epsilon(1e-5).scale(1e-9));
  }
}

TEST_CASE("confidence is the beta mixture of the two heads") {
  Engine rng(2);
  auto p = EstimatorParams::create(4, 2, 5, {8}, 0.0, 3);
  std::vector<double> s(4), s2(4);
  for (double& v : s) v = std::floor(uniform01(rng) * 256);
  for (double& v : s2) v = std::floor(uniform01(rng) * 256);
  const auto a = one_hot(1, 2);
  const auto qh = p.q_net.forward(p.q_input(s, a));
  const auto vh = p.v_net.forward(p.v_input(s2));
  const auto q1 = confidence(p, s, a, s2, 1.0);
  CHECK(q1 == qh);
  const auto q = confidence(p, s, a, s2, 0.3);
  double sum = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    CHECK(q[i] == doctest::Approx(0.3 * qh[i] + 0.7 * vh[i]).epsilon(1e-15));
    sum += q[i];
  }
  CHECK(std::abs(sum - 1.0) <= 1e-12);
  CHECK_THROWS_AS(confidence(p, std::vector<double>(3), a, s2, 0.5), DimensionError);
}

TEST_CASE("confidence mixes given head outputs") {
  auto p = constant_estimator({0.2, 0.8});
  auto v = constant_estimator({0.4, 0.6});
  p.v_net = v.v_net;
  const std::vector<double> s = {1, 2};
  const auto q = confidence(p, s, one_hot(0, 2), s, 0.5);
  CHECK(q[0] == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(q[1] == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("select examples") {
  CHECK(select(std::vector<double>{0.3, 0.7}, std::vector<double>{1, 5}, 0.9) == 0.0);
  CHECK(select(std::vector<double>{0.05, 0.95}, std::vector<double>{1, 5}, 0.9) == 5.0);
  CHECK(select(std::vector<double>{0.5, 0.5}, std::vector<double>{2, 7}, 0.4) == 2.0);
  CHECK(select(std::vector<double>{0.1, 0.9}, std::vector<double>{2, 7}, 0.9) == 0.0);
}

TEST_CASE("select keeps its argmax under positive rescaling") {
  Engine rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> q(5);
    for (double& v : q) v = uniform01(rng);
    const double c = 0.1 + uniform01(rng) * 5;
    std::vector<double> scaled = q;
    for (double& v : scaled) v *= c;
    CHECK(argmax(scaled) == argmax(q));
  }
}

TEST_CASE("soft selection examples and limit") {
  const std::vector<double> z = {1, 5};
  for (double t : {0.01, 0.1, 1.0, 10.0}) {
    CHECK(soft_select(std::vector<double>{0.5, 0.5}, z, t) == doctest::Approx(3.0).epsilon(1e-15));
  }
  CHECK(std::abs(soft_select(std::vector<double>{0.0, 1.0}, z, 0.01) - 5.0) <= 1e-6);
  CHECK(std::abs(soft_select(std::vector<double>{0.05, 0.95}, z, 0.01) - 5.0) <= 1e-6);
  Engine rng(13);
  const std::vector<double> z4 = {-1, 0.5, 2, 4};
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> q(4);
    for (double& v : q) v = uniform01(rng) * 0.1;
    q[uniform_index(rng, 4)] += 0.8;
    double s = 0.0;
    for (double v : q) s += v;
    for (double& v : q) v /= s;
    std::vector<double> sorted = q;
    std::sort(sorted.rbegin(), sorted.rend());
    if (sorted[0] - sorted[1] < 0.05) continue;
    CHECK(std::abs(soft_select(q, z4, 1e-3) - select(q, z4, 0.6)) <= 1e-4);
  }
}

TEST_CASE("pseudo label examples") {
  CHECK(*pseudo_label(std::vector<double>{0.95, 0.05}, 0.9) == std::vector<double>{1, 0});
  CHECK_FALSE(pseudo_label(std::vector<double>{0.6, 0.4}, 0.9).has_value());
  CHECK(*pseudo_label(std::vector<double>{0.9, 0.1}, 0.9) == std::vector<double>{1, 0});
}

TEST_CASE("shape_buffer counting rule") {
  const std::vector<double> s = {1, 2};
  ReplayBuffer b(200);
  for (int i = 0; i < 100; ++i) b.push({s, one_hot(0, 2), 0.0, s, false});
  for (int i = 0; i < 5; ++i) b.push({s, one_hot(1, 2), 2.0, s, true});
  RewardSet z(2);
  z.update(2.0);
  Engine rng(1);

  auto confident = constant_estimator({0.02, 0.98});
  CHECK(shape_buffer(confident, b, z, 0.9, 0.0, 0.5, rng).shaped == 0);

  auto unsure = constant_estimator({0.45, 0.55});
  const auto none = shape_buffer(unsure, b, z, 0.9, 1.0, 0.5, rng);
  CHECK(none.visited == 100);
  CHECK(none.shaped == 0);
  CHECK(b.shaped_count() == 0);

  const auto ten = shape_buffer(confident, b, z, 0.9, 0.1, 0.5, rng);
  CHECK(ten.visited == 10);
  CHECK(ten.shaped == 10);
  CHECK(b.shaped_count() == 10);
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (b.original_reward(i) != 0.0) CHECK_FALSE(b.is_shaped(i));
    if (b.is_shaped(i)) CHECK(z.contains(b.at(i).reward));
  }

  ReplayBuffer c = b;
  Engine r1(5), r2(5);
  shape_buffer(confident, b, z, 0.9, 0.5, 0.5, r1, Exec::serial);
  shape_buffer(confident, c, z, 0.9, 0.5, 0.5, r2, Exec::parallel);
  CHECK(b == c);
}
