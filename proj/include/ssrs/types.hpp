#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ssrs {

/// Dense row-major matrix of doubles.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}
  Matrix(std::size_t r, std::size_t c, std::vector<double> values);

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

  /// Copy of columns [first, first + count).
  Matrix column_block(std::size_t first, std::size_t count) const;

  bool operator==(const Matrix&) const = default;
};

/// One environment step <s, a, r, s', done>.
struct Transition {
  std::vector<double> state;
  std::vector<double> action;
  double reward = 0.0;
  std::vector<double> next_state;
  bool terminal = false;

  bool operator==(const Transition&) const = default;
};

/// Throws DimensionError / DomainError if the transition breaks its invariants.
void validate(const Transition& t);

/// Stacked episode [S | A | R].
struct TrajectoryMatrix {
  Matrix states;
  Matrix actions;
  std::vector<double> rewards;

  std::size_t length() const { return rewards.size(); }
  std::size_t state_dim() const { return states.cols; }
  std::size_t action_dim() const { return actions.cols; }

  bool operator==(const TrajectoryMatrix&) const = default;
};

void validate(const TrajectoryMatrix& traj);

/// Stack transitions (s, a, r) into a trajectory matrix; next states are dropped.
TrajectoryMatrix stack_transitions(std::span<const Transition> transitions);

std::vector<double> one_hot(std::size_t index, std::size_t size);
std::size_t argmax(std::span<const double> v);  // ties -> lowest index

}  // namespace ssrs
