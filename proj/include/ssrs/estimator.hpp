#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ssrs/kernels.hpp"
#include "ssrs/mlp.hpp"
#include "ssrs/replay_buffer.hpp"
#include "ssrs/reward_set.hpp"

namespace ssrs {

/// The two reward heads: Q(s, a; theta1) over concat(state, one-hot action) and
/// V(s; theta2) over the state. States are multiplied by state_scale before
/// entering either network (RAM-style observations live in [0, 255]).
struct EstimatorParams {
  MlpNet q_net;
  MlpNet v_net;
  std::size_t state_dim = 0;
  std::size_t action_dim = 0;
  double state_scale = 1.0 / 255.0;

  static EstimatorParams create(std::size_t state_dim, std::size_t action_dim, std::size_t n_z,
                                const std::vector<std::size_t>& hidden, double dropout, std::uint64_t seed);

  std::size_t n_z() const { return q_net.output_dim(); }
  std::size_t param_count() const { return q_net.param_count() + v_net.param_count(); }

  /// theta1 followed by theta2.
  std::vector<double> flatten() const;
  void unflatten(std::span<const double> theta);

  std::vector<double> q_input(std::span<const double> state, std::span<const double> action) const;
  std::vector<double> v_input(std::span<const double> state) const;

  bool operator==(const EstimatorParams&) const = default;
};

using ConfidenceVector = std::vector<double>;

/// q = beta * Q(s, a) + (1 - beta) * V(s'), eval mode.
ConfidenceVector confidence(const EstimatorParams& params, std::span<const double> state,
                            std::span<const double> action, std::span<const double> next_state, double beta);

/// Reward of the most confident candidate if its confidence is strictly above
/// lambda (ties -> lowest index), otherwise 0.
double select(std::span<const double> q, std::span<const double> z_values, double lambda);
double select(std::span<const double> q, const RewardSet& zset, double lambda);

/// sum_i softmax(q / temperature)_i * z_i; tends to hard argmax selection as temperature -> 0.
double soft_select(std::span<const double> q, std::span<const double> z_values, double temperature);

/// softmax(q / temperature).
std::vector<double> tempered_softmax(std::span<const double> q, double temperature);

/// One-hot at argmax(q) when max(q) >= lambda.
std::optional<std::vector<double>> pseudo_label(std::span<const double> q, double lambda);

struct ShapingResult {
  std::size_t visited = 0;
  std::size_t shaped = 0;
};

/// Re-estimates the reward of floor(p_u * #zero-reward entries) zero-reward entries
/// chosen without replacement. Entries whose selection is 0 revert to their
/// environment reward.
ShapingResult shape_buffer(const EstimatorParams& params, ReplayBuffer& buffer, const RewardSet& zset, double lambda,
                           double p_u, double beta, Engine& rng, Exec exec = Exec::parallel);

}  // namespace ssrs
