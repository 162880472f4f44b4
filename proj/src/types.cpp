#include "ssrs/types.hpp"

#include <string>

#include "ssrs/error.hpp"

namespace ssrs {

Matrix::Matrix(std::size_t r, std::size_t c, std::vector<double> values) : rows(r), cols(c), data(std::move(values)) {
  if (data.size() != r * c) throw DimensionError("matrix payload size does not match shape");
}

Matrix Matrix::column_block(std::size_t first, std::size_t count) const {
  Matrix out(rows, count);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < count; ++c) out(r, c) = (*this)(r, first + c);
  return out;
}

void validate(const Transition& t) {
  if (t.state.empty()) throw DimensionError("transition state must have at least one component");
  if (t.state.size() != t.next_state.size())
    throw DimensionError("state and next_state lengths differ (" + std::to_string(t.state.size()) + " vs " +
                         std::to_string(t.next_state.size()) + ")");
  for (double v : t.state)
    if (!(v >= 0.0)) throw DomainError("state components must be nonnegative");
  for (double v : t.next_state)
    if (!(v >= 0.0)) throw DomainError("next_state components must be nonnegative");
}

void validate(const TrajectoryMatrix& traj) {
  const std::size_t n = traj.rewards.size();
  if (traj.states.rows != n || traj.actions.rows != n) throw DimensionError("trajectory row counts differ");
  if (traj.states.data.size() != traj.states.rows * traj.states.cols ||
      traj.actions.data.size() != traj.actions.rows * traj.actions.cols)
    throw DimensionError("trajectory payload size does not match shape");
  for (double v : traj.states.data)
    if (!(v >= 0.0)) throw DomainError("trajectory states must be nonnegative");
}

TrajectoryMatrix stack_transitions(std::span<const Transition> transitions) {
  TrajectoryMatrix traj;
  if (transitions.empty()) return traj;
  const std::size_t m1 = transitions.front().state.size();
  const std::size_t m2 = transitions.front().action.size();
  traj.states = Matrix(transitions.size(), m1);
  traj.actions = Matrix(transitions.size(), m2);
  traj.rewards.reserve(transitions.size());
  for (std::size_t i = 0; i < transitions.size(); ++i) {
    const auto& t = transitions[i];
    if (t.state.size() != m1 || t.action.size() != m2) throw DimensionError("ragged transitions");
    std::copy(t.state.begin(), t.state.end(), traj.states.row(i).begin());
    std::copy(t.action.begin(), t.action.end(), traj.actions.row(i).begin());
    traj.rewards.push_back(t.reward);
  }
  return traj;
}

std::vector<double> one_hot(std::size_t index, std::size_t size) {
  if (index >= size) throw ArgumentError("one_hot index out of range");
  std::vector<double> v(size, 0.0);
  v[index] = 1.0;
  return v;
}

std::size_t argmax(std::span<const double> v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

}  // namespace ssrs
