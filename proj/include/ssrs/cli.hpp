#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ssrs/analysis.hpp"
#include "ssrs/replay_buffer.hpp"
#include "ssrs/run_config.hpp"

namespace ssrs {

/// Entry point of the `ssrs` tool. Returns the process exit code.
int run_cli(int argc, char** argv);

/// Parses "1,2,5-7" into {1,2,5,6,7}. Empty input raises ArgumentError.
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

/// Reads --config (may be empty) and applies the --set overrides in order.
RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides);

struct GradcheckReport {
  double l_r = 0.0;
  double l_qv = 0.0;
  double l_s = 0.0;
  int estimators = 0;
  bool pass(double tol = 1e-4) const { return l_r <= tol && l_qv <= tol && l_s <= tol; }
};

/// Max relative error between backprop and central differences over `estimators`
/// random toy estimators, per smoothed loss.
GradcheckReport gradcheck(std::uint64_t seed, int estimators, double h = 1e-5);

/// Per-trajectory clustering features from a buffer: the buffer is cut into episodes
/// at terminal entries; each entry contributes concat(state, action, reward).
struct TrajectoryFeatures {
  std::vector<Point> points;
  std::vector<std::size_t> group;  // trajectory id per point
  std::size_t trajectories = 0;
};
TrajectoryFeatures trajectory_features(const ReplayBuffer& buffer, std::size_t max_trajectories);

/// Aggregated best-score curve across seed directories: episode, mean, std, seeds.
std::string aggregate_csv(const std::vector<std::filesystem::path>& seed_dirs);

}  // namespace ssrs
