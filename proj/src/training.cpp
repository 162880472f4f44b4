#include "ssrs/training.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "ssrs/checkpoint.hpp"
#include "ssrs/csv.hpp"
#include "ssrs/error.hpp"
#include "ssrs/schedules.hpp"

namespace ssrs {
namespace {

constexpr std::uint64_t kResetStream = 100;
constexpr std::uint64_t kEvalResetStream = 101;

bool is_success(double score) { return score >= 1.0 - 1e-12; }

}  // namespace

Rollout run_episode(Environment& env, const TabularQ& backbone, double epsilon, Engine& rng,
                    std::uint64_t reset_seed) {
  Rollout out;
  auto obs = env.reset(reset_seed);
  for (;;) {
    const std::size_t a = backbone.act(env.state_key(obs), epsilon, rng);
    auto res = env.step(a);
    out.total_reward += res.reward;
    out.transitions.push_back({obs, one_hot(a, env.num_actions()), res.reward, res.observation, res.terminal});
    if (res.terminal) break;
    obs = std::move(res.observation);
  }
  return out;
}

double evaluate_greedy(Environment& env, const TabularQ& backbone, int episodes, std::uint64_t reset_seed) {
  double total = 0.0;
  for (int e = 0; e < episodes; ++e) {
    auto obs = env.reset(derive_seed(reset_seed, static_cast<std::uint64_t>(e)));
    for (;;) {
      auto res = env.step(backbone.greedy(env.state_key(obs)));
      total += res.reward;
      if (res.terminal) break;
      obs = std::move(res.observation);
    }
  }
  return total / static_cast<double>(episodes);
}

double epsilon_at(const RunConfig& cfg, int episode_index) {
  if (cfg.epsilon_decay_episodes == 0) return cfg.epsilon_end;
  const double f = std::min(1.0, static_cast<double>(episode_index) / cfg.epsilon_decay_episodes);
  return cfg.epsilon_start + (cfg.epsilon_end - cfg.epsilon_start) * f;
}

Trainer::Trainer(const RunConfig& cfg, Exec exec)
    : cfg_(cfg),
      exec_(exec),
      env_(make_environment(cfg.env, cfg.n)),
      eval_env_(make_environment(cfg.env, cfg.n)),
      backbone_(env_->num_actions(), cfg.gamma, cfg.learning_rate, cfg.q_init),
      buffer_(static_cast<std::size_t>(cfg.buffer_capacity)),
      zset_(static_cast<std::size_t>(cfg.n_z)),
      estimator_(EstimatorParams::create(env_->observation_dim(), env_->num_actions(),
                                         static_cast<std::size_t>(cfg.n_z),
                                         std::vector<std::size_t>(cfg.hidden.begin(), cfg.hidden.end()), cfg.dropout,
                                         derive_seed(cfg.seed, static_cast<std::uint64_t>(Stream::estimator_init)))),
      pairing_(make_pairing(cfg.augment, cfg.n, env_->observation_dim())),
      explore_rng_(make_engine(cfg.seed, Stream::exploration)),
      replay_rng_(make_engine(cfg.seed, Stream::replay_sampling)),
      shaping_rng_(make_engine(cfg.seed, Stream::shaping)),
      estimator_rng_(make_engine(cfg.seed, Stream::estimator_batch)) {
  validate_config(cfg);
  record_.seed = cfg.seed;
  record_.config_hash = config_hash(cfg);
}

const EpisodeRecord& Trainer::step_episode() {
  const auto start = std::chrono::steady_clock::now();
  const int index = static_cast<int>(record_.episodes.size());
  if (index >= cfg_.episodes) throw ArgumentError("all episodes already trained");
  EpisodeRecord rec;
  rec.episode = index + 1;
  const double t = index;
  const double T = cfg_.episodes;
  rec.lambda = cfg_.dynamic_schedules ? lambda_at(t, T, cfg_.lambda_final) : cfg_.lambda_final;
  rec.alpha = cfg_.dynamic_schedules ? alpha_at(t, T, cfg_.alpha_final) : cfg_.alpha_final;
  const double epsilon = epsilon_at(cfg_, index);
  const auto batch_size = static_cast<std::size_t>(cfg_.batch_size);

  auto obs = env_->reset(derive_seed(cfg_.seed, kResetStream, static_cast<std::uint64_t>(index)));
  for (;;) {
    const std::size_t a = backbone_.act(env_->state_key(obs), epsilon, explore_rng_);
    auto res = env_->step(a);
    const Transition tr{obs, one_hot(a, env_->num_actions()), res.reward, res.observation, res.terminal};
    buffer_.push(tr);
    ++rec.steps;
    rec.train_return += res.reward;

    if (res.reward != 0.0) {
      if (record_.first_train_success < 0) record_.first_train_success = rec.episode;
      if (zset_.update(res.reward)) buffer_.clear_all_shaping();
    } else if (cfg_.shaping && buffer_.nonzero_count() > 0) {
      rec.p_u = cfg_.static_pu ? cfg_.p_u
                               : p_u_at({t, T, buffer_.nonzero_count(), buffer_.size()}, cfg_.p_u);
      const auto shaped = shape_buffer(estimator_, buffer_, zset_, rec.lambda, rec.p_u, cfg_.beta, shaping_rng_, exec_);
      rec.shaping_visits += shaped.visited;
    }

    std::vector<Backup> backups;
    backups.reserve(batch_size);
    for (const auto& [i, sampled] : buffer_.sample(batch_size, replay_rng_)) backups.push_back(make_backup(sampled, *env_));
    backbone_.update(backups);

    if (res.terminal) break;
    obs = std::move(res.observation);
  }
  record_.transitions += static_cast<std::size_t>(rec.steps);

  if (cfg_.estimator_updates) estimator_update(rec);
  rec.shaped_count = buffer_.shaped_count();

  const double prev_best = record_.episodes.empty() ? -std::numeric_limits<double>::infinity()
                                                    : record_.episodes.back().best;
  const bool eval_now = rec.episode % cfg_.eval_interval == 0 || rec.episode == cfg_.episodes || index == 0;
  if (eval_now) {
    rec.evaluated = true;
    rec.score = evaluate_greedy(*eval_env_, backbone_, cfg_.eval_episodes, derive_seed(cfg_.seed, kEvalResetStream));
    if (record_.first_eval_success < 0 && is_success(rec.score)) record_.first_eval_success = rec.episode;
  } else {
    rec.score = record_.episodes.back().score;
  }
  rec.best = std::max(prev_best, rec.score);
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  record_.episodes.push_back(rec);
  return record_.episodes.back();
}

void Trainer::estimator_update(EpisodeRecord& rec) {
  if (buffer_.empty()) return;
  const auto batch_size = static_cast<std::size_t>(cfg_.estimator_batch > 0 ? cfg_.estimator_batch : cfg_.batch_size);
  const double qv_weight = cfg_.monotonicity ? 1.0 : 0.0;
  for (int step = 0; step < cfg_.estimator_steps; ++step) {
    std::vector<Transition> labeled, unlabeled;
    for (std::size_t i : buffer_.sample_indices(batch_size, estimator_rng_)) {
      Transition t = buffer_.at(i);
      t.reward = buffer_.original_reward(i);
      (t.reward != 0.0 ? labeled : unlabeled).push_back(std::move(t));
    }
    const std::uint64_t update = estimator_updates_++;
    const auto views = make_consistency_views(
        unlabeled, pairing_, derive_seed(cfg_.seed, static_cast<std::uint64_t>(Stream::augmentation), update));

    LossSettings settings;
    settings.beta = cfg_.beta;
    settings.lambda = rec.lambda;
    settings.k = cfg_.sigmoid_k;
    settings.t_sel = cfg_.t_sel;
    settings.mode = LossMode::hard;
    rec.loss = total_loss(estimator_, labeled, views, zset_.values(), settings, rec.alpha, qv_weight, exec_).breakdown;

    settings.mode = LossMode::smooth;
    if (cfg_.train_dropout) {
      settings.net_mode = NetMode::train;
      settings.dropout_seed = derive_seed(cfg_.seed, static_cast<std::uint64_t>(Stream::dropout), update);
    }
    const auto smooth = total_loss(estimator_, labeled, views, zset_.values(), settings, rec.alpha, qv_weight, exec_);
    rec.smooth_total = smooth.breakdown.total;
    sgd_step(estimator_, smooth.grad, cfg_.estimator_lr);
  }
}

void Trainer::write_checkpoints(const std::filesystem::path& dir, int episode) const {
  const auto tag = std::to_string(episode);
  if (cfg_.checkpoint_interval > 0 && episode % cfg_.checkpoint_interval == 0) {
    save_params(dir / ("params_" + tag + ".txt"), estimator_);
    save_buffer(dir / ("buffer_" + tag + ".bin"), buffer_);
  }
  if (std::find(cfg_.snapshot_epochs.begin(), cfg_.snapshot_epochs.end(), episode) != cfg_.snapshot_epochs.end())
    save_buffer(dir / ("snapshot_" + tag + ".bin"), buffer_);
}

RunRecord Trainer::run(const std::optional<std::filesystem::path>& out_dir) {
  while (static_cast<int>(record_.episodes.size()) < cfg_.episodes) {
    const auto& rec = step_episode();
    if (out_dir) write_checkpoints(*out_dir, rec.episode);
  }
  return record_;
}

RunRecord train(const RunConfig& cfg, const std::optional<std::filesystem::path>& out_dir) {
  std::unique_ptr<Trainer> trainer;
  try {
    trainer = std::make_unique<Trainer>(cfg);
    return trainer->run(out_dir);
  } catch (const std::exception& e) {
    RunRecord rec = trainer ? trainer->record() : RunRecord{};
    rec.seed = cfg.seed;
    rec.config_hash = config_hash(cfg);
    rec.failed = true;
    rec.error = e.what();
    return rec;
  }
}

std::string curve_csv(const RunRecord& record) {
  CsvWriter w({"episode", "score", "best", "L_r", "L_QV", "L_s", "lambda", "alpha", "p_u", "shaped_count"});
  for (const auto& e : record.episodes) {
    w.row({std::to_string(e.episode), format_real(e.score), format_real(e.best), format_real(e.loss.l_r),
           format_real(e.loss.l_qv), format_real(e.loss.l_s), format_real(e.lambda), format_real(e.alpha),
           format_real(e.p_u), std::to_string(e.shaped_count)});
  }
  return w.str();
}

std::string run_json(const RunConfig& cfg, const RunRecord& record) {
  nlohmann::ordered_json j;
  std::ostringstream hash;
  hash << std::hex << record.config_hash;
  j["seed"] = record.seed;
  j["config_hash"] = hash.str();
  nlohmann::ordered_json config;
  std::istringstream lines(serialize_config(cfg));
  for (std::string line; std::getline(lines, line);) {
    const auto eq = line.find(" = ");
    if (eq != std::string::npos) config[line.substr(0, eq)] = line.substr(eq + 3);
  }
  j["config"] = config;
  j["episodes"] = record.episodes.size();
  j["transitions"] = record.transitions;
  if (!record.episodes.empty()) {
    j["final_score"] = record.episodes.back().score;
    j["final_best"] = record.episodes.back().best;
    j["final_shaped_count"] = record.episodes.back().shaped_count;
  }
  j["first_train_success"] = record.first_train_success;
  j["first_eval_success"] = record.first_eval_success;
  j["failed"] = record.failed;
  if (record.failed) j["error"] = record.error;
  return j.dump(2) + "\n";
}

void write_run_outputs(const std::filesystem::path& dir, const RunConfig& cfg, const RunRecord& record) {
  write_text(dir / "run.json", run_json(cfg, record));
  write_text(dir / "curve.csv", curve_csv(record));
}

std::vector<std::pair<int, double>> read_best_curve(const std::filesystem::path& curve_path) {
  const auto table = read_csv(curve_path);
  const auto ep = table.column("episode");
  const auto best = table.column("best");
  std::vector<std::pair<int, double>> out;
  for (const auto& row : table.rows) out.emplace_back(std::stoi(row[ep]), std::stod(row[best]));
  return out;
}

}  // namespace ssrs
