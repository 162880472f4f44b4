#include "ssrs/replay_buffer.hpp"

#include <string>

#include "ssrs/error.hpp"

namespace ssrs {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw ArgumentError("buffer capacity must be positive");
  entries_.resize(capacity);
  original_.resize(capacity, 0.0);
  shaped_.resize(capacity, 0);
}

void ReplayBuffer::push(const Transition& t) { push_raw(t, t.reward, false); }

void ReplayBuffer::push_raw(const Transition& stored, double original_reward, bool shaped) {
  validate(stored);
  if (size_ == 0 && state_dim_ == 0) {
    state_dim_ = stored.state.size();
    action_dim_ = stored.action.size();
  } else if (stored.state.size() != state_dim_ || stored.action.size() != action_dim_) {
    throw DimensionError("transition shape (" + std::to_string(stored.state.size()) + ", " +
                         std::to_string(stored.action.size()) + ") does not match buffer (" +
                         std::to_string(state_dim_) + ", " + std::to_string(action_dim_) + ")");
  }
  if (!shaped && stored.reward != original_reward) throw ArgumentError("unshaped entry must carry its original reward");

  std::size_t pos;
  if (size_ < capacity_) {
    pos = slot(size_);
    ++size_;
  } else {
    pos = head_;
    if (original_[pos] != 0.0) --nonzero_count_;
    head_ = (head_ + 1) % capacity_;
  }
  entries_[pos] = stored;
  original_[pos] = original_reward;
  shaped_[pos] = shaped ? 1 : 0;
  if (original_reward != 0.0) ++nonzero_count_;
}

void ReplayBuffer::set_shaped_reward(std::size_t i, double r) {
  if (i >= size_) throw ArgumentError("buffer index out of range");
  const std::size_t s = slot(i);
  if (original_[s] != 0.0) throw ArgumentError("only zero-reward entries can be shaped");
  entries_[s].reward = r;
  shaped_[s] = 1;
}

void ReplayBuffer::clear_shaped(std::size_t i) {
  if (i >= size_) throw ArgumentError("buffer index out of range");
  const std::size_t s = slot(i);
  entries_[s].reward = original_[s];
  shaped_[s] = 0;
}

void ReplayBuffer::clear_all_shaping() {
  for (std::size_t i = 0; i < size_; ++i) clear_shaped(i);
}

double ReplayBuffer::nonzero_fraction() const {
  if (size_ == 0) return 0.0;
  return static_cast<double>(nonzero_count_) / static_cast<double>(size_);
}

std::size_t ReplayBuffer::shaped_count() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < size_; ++i) n += shaped_[slot(i)] ? 1 : 0;
  return n;
}

std::vector<std::size_t> ReplayBuffer::zero_reward_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < size_; ++i)
    if (original_[slot(i)] == 0.0) out.push_back(i);
  return out;
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t batch_size, Engine& rng) const {
  if (batch_size == 0) throw ArgumentError("batch size must be positive");
  if (size_ == 0) throw ArgumentError("cannot sample from an empty buffer");
  std::vector<std::size_t> out(batch_size);
  for (auto& idx : out) idx = uniform_index(rng, size_);
  return out;
}

std::vector<std::pair<std::size_t, Transition>> ReplayBuffer::sample(std::size_t batch_size, Engine& rng) const {
  std::vector<std::pair<std::size_t, Transition>> out;
  for (std::size_t idx : sample_indices(batch_size, rng)) out.emplace_back(idx, at(idx));
  return out;
}

bool ReplayBuffer::operator==(const ReplayBuffer& other) const {
  if (capacity_ != other.capacity_ || size_ != other.size_) return false;
  for (std::size_t i = 0; i < size_; ++i) {
    if (!(at(i) == other.at(i)) || original_reward(i) != other.original_reward(i) ||
        is_shaped(i) != other.is_shaped(i))
      return false;
  }
  return true;
}

}  // namespace ssrs
