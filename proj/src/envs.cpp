#include "ssrs/envs.hpp"

#include <cmath>
#include <cstdlib>

#include "ssrs/error.hpp"

namespace ssrs {

namespace {
double scaled(int value, int max) { return max > 0 ? std::floor(255.0 * value / max) : 0.0; }
}  // namespace

std::size_t padded_width(std::size_t width, int pad_multiple) {
  const auto m = static_cast<std::size_t>(pad_multiple > 0 ? pad_multiple : 1);
  return (width + m - 1) / m * m;
}

SparseChain::SparseChain(int length, int max_steps, int pad_multiple)
    : length_(length), max_steps_(max_steps > 0 ? max_steps : 2 * length) {
  if (length < 2) throw ArgumentError("chain length must be >= 2");
  obs_dim_ = padded_width(static_cast<std::size_t>(length) + 4, pad_multiple);
}

std::vector<double> SparseChain::reset(std::uint64_t) {
  pos_ = 0;
  steps_ = 0;
  done_ = false;
  return observe();
}

StepResult SparseChain::step(std::size_t action) {
  if (action >= num_actions()) throw ArgumentError("chain action out of range");
  if (done_) throw ArgumentError("step called on a finished episode; call reset first");
  if (action == kRight)
    ++pos_;
  else if (pos_ > 0)
    --pos_;
  ++steps_;
  StepResult r;
  if (pos_ == length_ - 1) {
    r.reward = 1.0;
    r.terminal = true;
  }
  if (steps_ >= max_steps_) r.terminal = true;
  done_ = r.terminal;
  r.observation = observe();
  return r;
}

std::vector<double> SparseChain::observe() const {
  std::vector<double> obs(obs_dim_, 0.0);
  const auto L = static_cast<std::size_t>(length_);
  obs[static_cast<std::size_t>(pos_)] = 255.0;
  obs[L] = scaled(pos_, length_ - 1);
  obs[L + 1] = scaled(steps_, max_steps_);
  obs[L + 2] = scaled(length_ - 1 - pos_, length_ - 1);
  obs[L + 3] = pos_ == length_ - 1 ? 255.0 : 0.0;
  return obs;
}

std::int64_t SparseChain::state_key(std::span<const double> observation) const {
  for (int i = 0; i < length_; ++i)
    if (observation[static_cast<std::size_t>(i)] > 0.0) return i;
  return -1;
}

KeyDoorGrid::KeyDoorGrid(const EnvConfig& cfg, int pad_multiple)
    : cfg_(cfg), max_steps_(cfg.max_steps > 0 ? cfg.max_steps : 4 * cfg.width * cfg.height) {
  if (cfg.width < 1 || cfg.height < 1 || cfg.width * cfg.height < 2) throw ArgumentError("grid too small");
  if (cfg.key_x < 0 || cfg.key_x >= cfg.width || cfg.key_y < 0 || cfg.key_y >= cfg.height || cfg.door_x < 0 ||
      cfg.door_x >= cfg.width || cfg.door_y < 0 || cfg.door_y >= cfg.height)
    throw ArgumentError("key/door outside the grid");
  if (cfg.key_x == cfg.door_x && cfg.key_y == cfg.door_y) throw ArgumentError("key and door must differ");
  if (cfg.key_x == 0 && cfg.key_y == 0) throw ArgumentError("key may not sit on the start cell");
  obs_dim_ = padded_width(static_cast<std::size_t>(cfg.width * cfg.height) + 4, pad_multiple);
}

std::vector<double> KeyDoorGrid::reset(std::uint64_t) {
  x_ = 0;
  y_ = 0;
  has_key_ = false;
  steps_ = 0;
  done_ = false;
  return observe();
}

StepResult KeyDoorGrid::step(std::size_t action) {
  if (action >= num_actions()) throw ArgumentError("grid action out of range");
  if (done_) throw ArgumentError("step called on a finished episode; call reset first");
  switch (action) {
    case kUp: y_ = y_ > 0 ? y_ - 1 : y_; break;
    case kDown: y_ = y_ + 1 < cfg_.height ? y_ + 1 : y_; break;
    case kLeft: x_ = x_ > 0 ? x_ - 1 : x_; break;
    default: x_ = x_ + 1 < cfg_.width ? x_ + 1 : x_; break;
  }
  ++steps_;
  if (x_ == cfg_.key_x && y_ == cfg_.key_y) has_key_ = true;
  StepResult r;
  if (has_key_ && x_ == cfg_.door_x && y_ == cfg_.door_y) {
    r.reward = 1.0;
    r.terminal = true;
  }
  if (steps_ >= max_steps_) r.terminal = true;
  done_ = r.terminal;
  r.observation = observe();
  return r;
}

std::vector<double> KeyDoorGrid::observe() const {
  std::vector<double> obs(obs_dim_, 0.0);
  const auto cells = static_cast<std::size_t>(cfg_.width * cfg_.height);
  obs[static_cast<std::size_t>(y_ * cfg_.width + x_)] = 255.0;
  obs[cells] = has_key_ ? 255.0 : 0.0;
  obs[cells + 1] = scaled(steps_, max_steps_);
  obs[cells + 2] = scaled(x_, cfg_.width - 1);
  obs[cells + 3] = scaled(y_, cfg_.height - 1);
  return obs;
}

std::int64_t KeyDoorGrid::state_key(std::span<const double> observation) const {
  const auto cells = static_cast<std::size_t>(cfg_.width * cfg_.height);
  for (std::size_t i = 0; i < cells; ++i)
    if (observation[i] > 0.0) return static_cast<std::int64_t>(i) * 2 + (observation[cells] > 0.0 ? 1 : 0);
  return -1;
}

int KeyDoorGrid::optimal_steps() const {
  return std::abs(cfg_.key_x) + std::abs(cfg_.key_y) + std::abs(cfg_.door_x - cfg_.key_x) +
         std::abs(cfg_.door_y - cfg_.key_y);
}

std::unique_ptr<Environment> make_environment(const EnvConfig& cfg, int pad_multiple) {
  if (cfg.kind == EnvKind::sparse_chain) return std::make_unique<SparseChain>(cfg.length, cfg.max_steps, pad_multiple);
  return std::make_unique<KeyDoorGrid>(cfg, pad_multiple);
}

}  // namespace ssrs
