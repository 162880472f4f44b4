#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ssrs {

enum class EnvKind { sparse_chain, key_door_grid };

struct EnvConfig {
  EnvKind kind = EnvKind::sparse_chain;
  int length = 20;  // chain cells
  int width = 5;
  int height = 5;
  int key_x = 4;
  int key_y = 0;
  int door_x = 4;
  int door_y = 4;
  int max_steps = 0;  // 0 -> environment default
  bool operator==(const EnvConfig&) const = default;
};

struct AugmentConfig {
  std::string pairing = "ssrs_s";  // ssrs_s | ssrs_m | ssrs_c | custom
  std::string weak = "gaussian";   // used when pairing == custom
  std::string strong = "double_entropy";
  double sigma = 0.1;
  int cutout_n = 0;  // 0 -> ceil(m1 / 8)
  int smooth_n = 3;
  bool operator==(const AugmentConfig&) const = default;
};

/// Every knob of a training run. SSRS hyperparameter defaults:
/// beta 0.5, lambda 0.9, alpha 0.7, p_u 0.01, N_z 12, n 8.
struct RunConfig {
  std::uint64_t seed = 1;
  int episodes = 500;
  int buffer_capacity = 2000;
  int batch_size = 32;
  double learning_rate = 0.1;  // backbone step size
  double gamma = 0.99;
  double q_init = 0.0;  // initial backbone Q value
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  int epsilon_decay_episodes = 100;

  double beta = 0.5;
  double lambda_final = 0.9;
  double alpha_final = 0.7;
  double p_u = 0.01;
  int n_z = 12;
  int n = 8;

  double sigmoid_k = 1.0;
  double t_sel = 0.1;
  double estimator_lr = 0.05;
  int estimator_steps = 1;
  int estimator_batch = 0;  // 0 -> batch_size
  bool dynamic_schedules = true;
  bool static_pu = false;
  bool monotonicity = true;
  bool shaping = true;
  bool estimator_updates = true;

  std::vector<int> hidden = {128, 64, 32};
  double dropout = 0.2;
  bool train_dropout = false;

  int eval_interval = 1;
  int eval_episodes = 5;
  int checkpoint_interval = 0;
  std::vector<int> snapshot_epochs = {200, 400, 600, 800, 1000};

  EnvConfig env;
  AugmentConfig augment;

  bool operator==(const RunConfig&) const = default;
};

/// Parses `key = value` lines (`#` starts a comment). Unknown keys, malformed values
/// and out-of-range values raise ParseError with the offending line.
RunConfig parse_config(std::string_view text);

/// Applies one `key=value` override on top of cfg.
void apply_override(RunConfig& cfg, std::string_view assignment);

/// Canonical text form; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& cfg);

/// Cross-field checks; throws ParseError(0, ...) on violation.
void validate_config(const RunConfig& cfg);

/// FNV-1a of the canonical text form.
std::uint64_t config_hash(const RunConfig& cfg);

std::vector<std::string> config_keys();

}  // namespace ssrs
