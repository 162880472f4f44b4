#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ssrs/augment.hpp"
#include "ssrs/backbone.hpp"
#include "ssrs/envs.hpp"
#include "ssrs/estimator.hpp"
#include "ssrs/losses.hpp"
#include "ssrs/replay_buffer.hpp"
#include "ssrs/reward_set.hpp"
#include "ssrs/run_config.hpp"

namespace ssrs {

struct EpisodeRecord {
  int episode = 0;  // 1-based
  int steps = 0;
  double train_return = 0.0;
  double score = 0.0;  // mean greedy evaluation return (carried forward between evaluations)
  double best = 0.0;   // running maximum of score
  bool evaluated = false;
  LossBreakdown loss;     // hard-mode values on the last estimator batch
  double smooth_total = 0.0;
  double lambda = 0.0;
  double alpha = 0.0;
  double p_u = 0.0;  // value at the last step of the episode
  std::size_t shaped_count = 0;  // flagged entries in the buffer at episode end
  std::size_t shaping_visits = 0;
  double wall_seconds = 0.0;
};

struct RunRecord {
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
  std::vector<EpisodeRecord> episodes;
  std::size_t transitions = 0;
  int first_train_success = -1;  // first episode whose training rollout earned a reward
  int first_eval_success = -1;   // first episode whose greedy evaluation reached the optimal return
  bool failed = false;
  std::string error;
};

struct Rollout {
  std::vector<Transition> transitions;
  double total_reward = 0.0;
};

/// Runs one episode with epsilon-greedy actions from the backbone.
Rollout run_episode(Environment& env, const TabularQ& backbone, double epsilon, Engine& rng,
                    std::uint64_t reset_seed);

/// Mean return of `episodes` greedy rollouts.
double evaluate_greedy(Environment& env, const TabularQ& backbone, int episodes, std::uint64_t reset_seed);

/// Linear decay from epsilon.start to epsilon.end over epsilon.decay_episodes (0-based episode index).
double epsilon_at(const RunConfig& cfg, int episode_index);

/// The SSRS training loop for one seed. Owns the environment, backbone, buffer, reward set
/// and estimator; every source of randomness has its own derived stream.
class Trainer {
 public:
  explicit Trainer(const RunConfig& cfg, Exec exec = Exec::parallel);

  /// Trains one episode, updates the estimator, evaluates. Returns the new record.
  const EpisodeRecord& step_episode();
  /// Runs the remaining episodes. Writes checkpoints and snapshots under out_dir when given.
  RunRecord run(const std::optional<std::filesystem::path>& out_dir = std::nullopt);

  const RunConfig& config() const { return cfg_; }
  const TabularQ& backbone() const { return backbone_; }
  const ReplayBuffer& buffer() const { return buffer_; }
  const RewardSet& reward_set() const { return zset_; }
  const EstimatorParams& estimator() const { return estimator_; }
  const AugmentPairing& pairing() const { return pairing_; }
  const RunRecord& record() const { return record_; }
  const Environment& environment() const { return *env_; }

 private:
  void estimator_update(EpisodeRecord& rec);
  void write_checkpoints(const std::filesystem::path& dir, int episode) const;

  RunConfig cfg_;
  Exec exec_;
  std::unique_ptr<Environment> env_;
  std::unique_ptr<Environment> eval_env_;
  TabularQ backbone_;
  ReplayBuffer buffer_;
  RewardSet zset_;
  EstimatorParams estimator_;
  AugmentPairing pairing_;
  Engine explore_rng_;
  Engine replay_rng_;
  Engine shaping_rng_;
  Engine estimator_rng_;
  std::uint64_t estimator_updates_ = 0;
  RunRecord record_;
};

/// Runs cfg to completion; component errors are captured in the record.
RunRecord train(const RunConfig& cfg, const std::optional<std::filesystem::path>& out_dir = std::nullopt);

std::string curve_csv(const RunRecord& record);
std::string run_json(const RunConfig& cfg, const RunRecord& record);
/// Writes run.json and curve.csv.
void write_run_outputs(const std::filesystem::path& dir, const RunConfig& cfg, const RunRecord& record);
/// Reads back the per-episode (episode, best) pairs of a curve.csv.
std::vector<std::pair<int, double>> read_best_curve(const std::filesystem::path& curve_path);

}  // namespace ssrs
