#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "ssrs/run_config.hpp"

namespace ssrs {

struct StepResult {
  std::vector<double> observation;
  double reward = 0.0;
  bool terminal = false;
};

/// Deterministic sparse-reward task with RAM-style observations: nonnegative
/// integer-valued vectors in [0, 255], zero-padded to a multiple of the
/// double-entropy partition count.
class Environment {
 public:
  virtual ~Environment() = default;
  virtual std::vector<double> reset(std::uint64_t seed) = 0;
  virtual StepResult step(std::size_t action) = 0;
  virtual std::size_t num_actions() const = 0;
  virtual std::size_t observation_dim() const = 0;
  virtual int max_steps() const = 0;
  /// Discrete id of an observation (ignores the step counter); used by tabular learners.
  virtual std::int64_t state_key(std::span<const double> observation) const = 0;
  /// Steps an optimal policy needs from reset.
  virtual int optimal_steps() const = 0;
};

/// Cells 0..L-1, start at 0, actions {left, right}; reward 1 on reaching L-1.
/// Observation: position one-hot x255, scaled position, scaled steps taken,
/// scaled distance to goal, goal flag, then zero padding.
class SparseChain final : public Environment {
 public:
  SparseChain(int length, int max_steps, int pad_multiple);
  std::vector<double> reset(std::uint64_t seed) override;
  StepResult step(std::size_t action) override;
  std::size_t num_actions() const override { return 2; }
  std::size_t observation_dim() const override { return obs_dim_; }
  int max_steps() const override { return max_steps_; }
  std::int64_t state_key(std::span<const double> observation) const override;
  int optimal_steps() const override { return length_ - 1; }
  int position() const { return pos_; }

  static constexpr std::size_t kLeft = 0;
  static constexpr std::size_t kRight = 1;

 private:
  std::vector<double> observe() const;

  int length_;
  int max_steps_;
  std::size_t obs_dim_;
  int pos_ = 0;
  int steps_ = 0;
  bool done_ = true;
};

/// W x H grid, start (0,0), actions {up, down, left, right}. Entering the key cell
/// picks the key up (observation flag, no reward); reaching the door while holding
/// the key pays 1 and ends the episode.
class KeyDoorGrid final : public Environment {
 public:
  KeyDoorGrid(const EnvConfig& cfg, int pad_multiple);
  std::vector<double> reset(std::uint64_t seed) override;
  StepResult step(std::size_t action) override;
  std::size_t num_actions() const override { return 4; }
  std::size_t observation_dim() const override { return obs_dim_; }
  int max_steps() const override { return max_steps_; }
  std::int64_t state_key(std::span<const double> observation) const override;
  int optimal_steps() const override;
  bool has_key() const { return has_key_; }

  static constexpr std::size_t kUp = 0;
  static constexpr std::size_t kDown = 1;
  static constexpr std::size_t kLeft = 2;
  static constexpr std::size_t kRight = 3;

 private:
  std::vector<double> observe() const;

  EnvConfig cfg_;
  int max_steps_;
  std::size_t obs_dim_;
  int x_ = 0;
  int y_ = 0;
  bool has_key_ = false;
  int steps_ = 0;
  bool done_ = true;
};

/// Observation width rounded up to a multiple of pad_multiple.
std::size_t padded_width(std::size_t width, int pad_multiple);

std::unique_ptr<Environment> make_environment(const EnvConfig& cfg, int pad_multiple);

}  // namespace ssrs
