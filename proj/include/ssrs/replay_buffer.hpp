#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "ssrs/rng.hpp"
#include "ssrs/types.hpp"

namespace ssrs {

/// Fixed-capacity FIFO replay memory that keeps the environment reward of every
/// entry next to the (possibly shaped) reward the learner sees. Sparsity
/// statistics are always computed from the environment rewards.
///
/// Entries are addressed by logical index: 0 is the oldest live entry.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(const Transition& t);

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  std::size_t state_dim() const { return state_dim_; }
  std::size_t action_dim() const { return action_dim_; }

  const Transition& at(std::size_t i) const { return entries_[slot(i)]; }
  double original_reward(std::size_t i) const { return original_[slot(i)]; }
  bool is_shaped(std::size_t i) const { return shaped_[slot(i)] != 0; }

  /// Replace the learner-visible reward of entry i and flag it as shaped.
  void set_shaped_reward(std::size_t i, double r);
  /// Restore entry i to its environment reward.
  void clear_shaped(std::size_t i);
  void clear_all_shaping();

  /// Fraction of entries whose environment reward is nonzero.
  double nonzero_fraction() const;
  std::size_t nonzero_count() const { return nonzero_count_; }
  std::size_t shaped_count() const;
  /// Logical indices of entries whose environment reward is zero.
  std::vector<std::size_t> zero_reward_indices() const;

  /// B uniform draws with replacement.
  std::vector<std::pair<std::size_t, Transition>> sample(std::size_t batch_size, Engine& rng) const;
  std::vector<std::size_t> sample_indices(std::size_t batch_size, Engine& rng) const;

  /// Restores a full entry; used by checkpoint loading.
  void push_raw(const Transition& stored, double original_reward, bool shaped);

  bool operator==(const ReplayBuffer& other) const;

 private:
  std::size_t slot(std::size_t i) const { return (head_ + i) % capacity_; }

  std::size_t capacity_;
  std::size_t head_ = 0;  // physical slot of the oldest entry
  std::size_t size_ = 0;
  std::size_t state_dim_ = 0;
  std::size_t action_dim_ = 0;
  std::size_t nonzero_count_ = 0;
  std::vector<Transition> entries_;
  std::vector<double> original_;
  std::vector<char> shaped_;
};

}  // namespace ssrs
