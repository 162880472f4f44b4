#include "ssrs/estimator.hpp"

#include <algorithm>
#include <cmath>

#include "ssrs/error.hpp"

namespace ssrs {

EstimatorParams EstimatorParams::create(std::size_t state_dim, std::size_t action_dim, std::size_t n_z,
                                        const std::vector<std::size_t>& hidden, double dropout, std::uint64_t seed) {
  EstimatorParams p;
  p.state_dim = state_dim;
  p.action_dim = action_dim;
  p.q_net = MlpNet(state_dim + action_dim, hidden, n_z, dropout);
  p.v_net = MlpNet(state_dim, hidden, n_z, dropout);
  Engine rng(seed);
  p.q_net.initialize(rng);
  p.v_net.initialize(rng);
  return p;
}

std::vector<double> EstimatorParams::flatten() const {
  std::vector<double> theta(q_net.params().begin(), q_net.params().end());
  theta.insert(theta.end(), v_net.params().begin(), v_net.params().end());
  return theta;
}

void EstimatorParams::unflatten(std::span<const double> theta) {
  if (theta.size() != param_count()) throw DimensionError("parameter vector length mismatch");
  const auto split = theta.begin() + static_cast<std::ptrdiff_t>(q_net.param_count());
  std::copy(theta.begin(), split, q_net.params().begin());
  std::copy(split, theta.end(), v_net.params().begin());
}

std::vector<double> EstimatorParams::q_input(std::span<const double> state, std::span<const double> action) const {
  if (state.size() != state_dim || action.size() != action_dim)
    throw DimensionError("estimator expects state/action of length " + std::to_string(state_dim) + "/" +
                         std::to_string(action_dim));
  std::vector<double> x;
  x.reserve(state.size() + action.size());
  for (double v : state) x.push_back(v * state_scale);
  x.insert(x.end(), action.begin(), action.end());
  return x;
}

std::vector<double> EstimatorParams::v_input(std::span<const double> state) const {
  if (state.size() != state_dim) throw DimensionError("estimator expects state of length " + std::to_string(state_dim));
  std::vector<double> x(state.begin(), state.end());
  for (double& v : x) v *= state_scale;
  return x;
}

ConfidenceVector confidence(const EstimatorParams& params, std::span<const double> state,
                            std::span<const double> action, std::span<const double> next_state, double beta) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw ArgumentError("beta must be in [0,1]");
  const auto q = params.q_net.forward(params.q_input(state, action));
  const auto v = params.v_net.forward(params.v_input(next_state));
  ConfidenceVector out(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) out[i] = beta * q[i] + (1.0 - beta) * v[i];
  return out;
}

double select(std::span<const double> q, std::span<const double> z_values, double lambda) {
  if (q.size() != z_values.size()) throw DimensionError("confidence and reward set sizes differ");
  const std::size_t i = argmax(q);
  return q[i] > lambda ? z_values[i] : 0.0;
}

double select(std::span<const double> q, const RewardSet& zset, double lambda) {
  return select(q, std::span<const double>(zset.values()), lambda);
}

std::vector<double> tempered_softmax(std::span<const double> q, double temperature) {
  if (!(temperature > 0.0)) throw ArgumentError("temperature must be > 0");
  std::vector<double> w(q.begin(), q.end());
  for (double& x : w) x /= temperature;
  softmax_inplace(w);
  return w;
}

double soft_select(std::span<const double> q, std::span<const double> z_values, double temperature) {
  if (q.size() != z_values.size()) throw DimensionError("confidence and reward set sizes differ");
  const auto w = tempered_softmax(q, temperature);
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * z_values[i];
  return s;
}

std::optional<std::vector<double>> pseudo_label(std::span<const double> q, double lambda) {
  const std::size_t i = argmax(q);
  if (!(q[i] >= lambda)) return std::nullopt;
  return one_hot(i, q.size());
}

ShapingResult shape_buffer(const EstimatorParams& params, ReplayBuffer& buffer, const RewardSet& zset, double lambda,
                           double p_u, double beta, Engine& rng, Exec exec) {
  if (!(p_u >= 0.0 && p_u <= 1.0)) throw ArgumentError("p_u must be in [0,1]");
  auto pool = buffer.zero_reward_indices();
  const auto count = static_cast<std::size_t>(std::floor(p_u * static_cast<double>(pool.size())));
  ShapingResult result;
  if (count == 0) return result;
  for (std::size_t i = 0; i < count; ++i) std::swap(pool[i], pool[i + uniform_index(rng, pool.size() - i)]);
  pool.resize(count);

  std::vector<double> estimates(count);
  for_each_index(
      count,
      [&](std::size_t i) {
        const auto& t = buffer.at(pool[i]);
        estimates[i] = select(confidence(params, t.state, t.action, t.next_state, beta), zset, lambda);
      },
      exec);

  result.visited = count;
  for (std::size_t i = 0; i < count; ++i) {
    if (estimates[i] != 0.0) {
      buffer.set_shaped_reward(pool[i], estimates[i]);
      ++result.shaped;
    } else {
      buffer.clear_shaped(pool[i]);
    }
  }
  return result;
}

}  // namespace ssrs
