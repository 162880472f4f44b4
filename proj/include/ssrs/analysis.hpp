#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ssrs/kernels.hpp"
#include "ssrs/types.hpp"
#include "ssrs/replay_buffer.hpp"

namespace ssrs {

using Point = std::vector<double>;

/// Diagonal-covariance Gaussian mixture.
struct GmmModel {
  std::vector<double> weights;
  std::vector<Point> means;
  std::vector<Point> variances;
  std::vector<double> log_likelihood_trace;  // total log-likelihood before each M-step
  int iterations = 0;

  std::size_t components() const { return weights.size(); }
  /// log(w_k) + log N(x | mu_k, diag var_k) for every component.
  std::vector<double> joint_log_density(const Point& x) const;
  /// Component with the highest responsibility (ties -> lowest index).
  std::size_t assign(const Point& x) const;
  double log_likelihood(std::span<const Point> points) const;
  bool operator==(const GmmModel&) const = default;
};

struct GmmOptions {
  std::size_t components = 2;
  std::uint64_t seed = 0;
  int max_iter = 200;
  double tolerance = 1e-8;
  double variance_floor = 1e-6;
};

/// EM from a k-means++ style seeded initialization. Stops after max_iter
/// iterations or once the log-likelihood gains less than `tolerance`.
GmmModel gmm_fit(std::span<const Point> points, const GmmOptions& options);

/// Pairwise co-assignment frequencies over repeated clusterings.
struct ConsensusMatrix {
  std::size_t size = 0;
  std::size_t runs = 0;
  std::vector<double> entries;  // size x size, row-major

  double operator()(std::size_t i, std::size_t j) const { return entries[i * size + j]; }
};

/// Fits `runs` mixtures with derived seeds; entry (i, j) is the fraction of runs
/// in which points i and j land in the same component.
ConsensusMatrix consensus(std::span<const Point> features, std::size_t components, std::size_t runs,
                          std::uint64_t seed, Exec exec = Exec::parallel);

/// Clusters individual points but reports co-assignment between groups: each group
/// (trajectory) takes the majority component of its points in every run.
ConsensusMatrix consensus_grouped(std::span<const Point> features, std::span<const std::size_t> group_of_point,
                                  std::size_t components, std::size_t runs, std::uint64_t seed,
                                  Exec exec = Exec::parallel);

/// sign(r) * ln(1 + |r|).
double signed_log(double r);

struct HistogramRow {
  int epoch = 0;
  double bin_left = 0.0;
  double bin_right = 0.0;
  double probability = 0.0;
};

/// Normalized histogram of signed-log rewards with bins [k w, (k + 1) w). Only
/// nonempty bins are emitted, in increasing order.
std::vector<HistogramRow> reward_distribution(std::span<const double> rewards, int epoch, double bin_width = 0.05);
/// Uses the rewards currently stored in the buffer (shaped where shaped).
std::vector<HistogramRow> reward_distribution(const ReplayBuffer& buffer, int epoch, double bin_width = 0.05);

struct BestScorePoint {
  int episode = 0;
  double best = 0.0;
};

struct SeriesPoint {
  int episode = 0;
  double mean = 0.0;
  double std = 0.0;  // population
  std::size_t seeds = 0;
};

/// Per-episode mean and population std of the best-so-far score across seeds.
std::vector<SeriesPoint> best_score_series(std::span<const std::vector<BestScorePoint>> per_seed);

}  // namespace ssrs
