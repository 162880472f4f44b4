#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ssrs/estimator.hpp"
#include "ssrs/replay_buffer.hpp"
#include "ssrs/types.hpp"

namespace ssrs {

// Replay buffer checkpoint, version 1. All integers are unsigned 64-bit little
// endian, all reals IEEE-754 binary64 little endian.
//
//   offset  size  field
//   0       8     magic "SSRSBUF\0"
//   8       8     format_version (= 1)
//   16      8     m1 (state width)
//   24      8     m2 (action width)
//   32      8     capacity
//   40      8     count (live entries)
//   48      ...   count rows, oldest first, each 2*m1 + m2 + 4 reals:
//                 state[m1], action[m2], reward (as stored, possibly shaped),
//                 next_state[m1], terminal (0/1), original_reward, shaped (0/1)
inline constexpr std::uint64_t kBufferFormatVersion = 1;
inline constexpr std::size_t kBufferHeaderBytes = 48;

std::vector<std::uint8_t> encode_buffer(const ReplayBuffer& buffer);
ReplayBuffer decode_buffer(std::span<const std::uint8_t> bytes);
void save_buffer(const std::filesystem::path& path, const ReplayBuffer& buffer);
ReplayBuffer load_buffer(const std::filesystem::path& path);

// Estimator parameter checkpoint, text, version 1:
//
//   ssrs-estimator 1
//   state_dim <m1>
//   action_dim <m2>
//   state_scale <real>
//   net q <layer count> <dropout>
//   dense <out> <in>
//   <out lines of <in> weights>
//   <one line of <out> biases>
//   ... remaining layers, then the same block for "net v" ...
//   end
//
// Reals are written with 17 significant digits so loading reproduces every bit.
std::string encode_params(const EstimatorParams& params);
EstimatorParams decode_params(std::string_view text);
void save_params(const std::filesystem::path& path, const EstimatorParams& params);
EstimatorParams load_params(const std::filesystem::path& path);

// Trajectory file: CSV with header s0..s{m1-1},a0..a{m2-1},r and one row per step.
std::string encode_trajectory(const TrajectoryMatrix& traj);
TrajectoryMatrix decode_trajectory(std::string_view text);

}  // namespace ssrs
