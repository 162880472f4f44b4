#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "ssrs/envs.hpp"
#include "ssrs/rng.hpp"
#include "ssrs/types.hpp"

namespace ssrs {

/// One TD backup as seen by the tabular learner.
struct Backup {
  std::int64_t state = 0;
  std::size_t action = 0;
  double reward = 0.0;  // shaped or environment reward
  std::int64_t next_state = 0;
  bool terminal = false;
};

/// Tabular Q-learning over discrete state keys. Unvisited entries read as the initial value.
class TabularQ {
 public:
  TabularQ(std::size_t num_actions, double gamma, double learning_rate, double initial_value = 0.0);

  std::vector<double> values(std::int64_t state) const;
  double value(std::int64_t state, std::size_t action) const;
  double max_value(std::int64_t state) const;
  std::size_t greedy(std::int64_t state) const;  // ties -> lowest action index

  /// Draws u ~ U[0,1); explores uniformly when u < epsilon, otherwise acts greedily.
  std::size_t act(std::int64_t state, double epsilon, Engine& rng) const;

  /// Synchronous batch backup: every TD error is computed against the table as it
  /// was before the call, then each (s, a) moves by lr * mean of its TD errors.
  /// Terminal backups use the reward alone as target.
  void update(std::span<const Backup> batch);

  std::size_t num_actions() const { return num_actions_; }
  const std::map<std::int64_t, std::vector<double>>& table() const { return table_; }
  void set(std::int64_t state, std::size_t action, double v);

  bool operator==(const TabularQ&) const = default;

 private:
  std::size_t num_actions_;
  double gamma_;
  double lr_;
  double init_;
  std::map<std::int64_t, std::vector<double>> table_;
};

Backup make_backup(const Transition& t, const Environment& env);

}  // namespace ssrs
