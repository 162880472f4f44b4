#include "ssrs/backbone.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "ssrs/error.hpp"

namespace ssrs {

TabularQ::TabularQ(std::size_t num_actions, double gamma, double learning_rate, double initial_value)
    : num_actions_(num_actions), gamma_(gamma), lr_(learning_rate), init_(initial_value) {
  if (num_actions == 0) throw ArgumentError("need at least one action");
}

std::vector<double> TabularQ::values(std::int64_t state) const {
  auto it = table_.find(state);
  return it == table_.end() ? std::vector<double>(num_actions_, init_) : it->second;
}

double TabularQ::value(std::int64_t state, std::size_t action) const {
  auto it = table_.find(state);
  return it == table_.end() ? init_ : it->second[action];
}

double TabularQ::max_value(std::int64_t state) const {
  auto it = table_.find(state);
  if (it == table_.end()) return init_;
  return *std::max_element(it->second.begin(), it->second.end());
}

std::size_t TabularQ::greedy(std::int64_t state) const {
  auto it = table_.find(state);
  if (it == table_.end()) return 0;
  return argmax(it->second);
}

std::size_t TabularQ::act(std::int64_t state, double epsilon, Engine& rng) const {
  const double u = uniform01(rng);
  if (u < epsilon) return uniform_index(rng, num_actions_);
  return greedy(state);
}

void TabularQ::set(std::int64_t state, std::size_t action, double v) {
  auto& row = table_.try_emplace(state, std::vector<double>(num_actions_, init_)).first->second;
  row.at(action) = v;
}

void TabularQ::update(std::span<const Backup> batch) {
  if (batch.empty()) throw ArgumentError("backbone update needs a nonempty batch");
  std::map<std::pair<std::int64_t, std::size_t>, std::pair<double, std::size_t>> td;
  for (const auto& b : batch) {
    if (b.action >= num_actions_) throw ArgumentError("action out of range");
    const double target = b.terminal ? b.reward : b.reward + gamma_ * max_value(b.next_state);
    if (!std::isfinite(target)) throw NumericError("non-finite TD target; update rejected");
    auto& acc = td[{b.state, b.action}];
    acc.first += target - value(b.state, b.action);
    acc.second += 1;
  }
  std::vector<std::pair<std::pair<std::int64_t, std::size_t>, double>> updated;
  for (const auto& [key, acc] : td) {
    const double next = value(key.first, key.second) + lr_ * (acc.first / static_cast<double>(acc.second));
    if (!std::isfinite(next)) throw NumericError("non-finite Q value after update");
    updated.emplace_back(key, next);
  }
  for (const auto& [key, v] : updated) set(key.first, key.second, v);
}

Backup make_backup(const Transition& t, const Environment& env) {
  return {env.state_key(t.state), argmax(t.action), t.reward, env.state_key(t.next_state), t.terminal};
}

}  // namespace ssrs
