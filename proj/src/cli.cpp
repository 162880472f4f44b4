#include "ssrs/cli.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "ssrs/augment.hpp"
#include "ssrs/checkpoint.hpp"
#include "ssrs/csv.hpp"
#include "ssrs/envs.hpp"
#include "ssrs/error.hpp"
#include "ssrs/estimator.hpp"
#include "ssrs/losses.hpp"
#include "ssrs/training.hpp"

namespace fs = std::filesystem;

namespace ssrs {

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    if (item.empty()) continue;
    const auto dash = item.find('-');
    try {
      if (dash == std::string::npos) {
        seeds.push_back(std::stoull(item));
      } else {
        const auto lo = std::stoull(item.substr(0, dash));
        const auto hi = std::stoull(item.substr(dash + 1));
        if (hi < lo) throw ArgumentError("descending seed range: " + item);
        for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
      }
    } catch (const std::logic_error&) {
      throw ArgumentError("bad seed list entry: " + item);
    }
  }
  if (seeds.empty()) throw ArgumentError("seed list is empty");
  return seeds;
}

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  RunConfig cfg = path.empty() ? RunConfig{} : parse_config(read_text(path));
  for (const auto& o : overrides) apply_override(cfg, o);
  validate_config(cfg);
  return cfg;
}

GradcheckReport gradcheck(std::uint64_t seed, int estimators, double h) {
  GradcheckReport rep;
  rep.estimators = estimators;
  const std::vector<double> z = {1.0, 2.0, 3.0};
  for (int e = 0; e < estimators; ++e) {
    Engine rng(derive_seed(seed, 0x6C, static_cast<std::uint64_t>(e)));
    const std::size_t m1 = 3, m2 = 2;
    auto params = EstimatorParams::create(m1, m2, z.size(), {4}, 0.0, rng());
    std::vector<Transition> labeled, unlabeled;
    for (int i = 0; i < 6; ++i) {
      Transition t;
      for (std::size_t d = 0; d < m1; ++d) {
        t.state.push_back(std::floor(uniform01(rng) * 256.0));
        t.next_state.push_back(std::floor(uniform01(rng) * 256.0));
      }
      t.action = one_hot(uniform_index(rng, m2), m2);
      t.reward = i % 2 == 0 ? z[uniform_index(rng, z.size())] : 0.0;
      (t.reward != 0.0 ? labeled : unlabeled).push_back(t);
    }
    AugmentConfig acfg;
    const auto views = make_consistency_views(unlabeled, make_pairing(acfg, 1, m1), rng());
    LossSettings s;
    s.lambda = 0.4;
    s.k = 5.0;
    s.t_sel = 0.5;
    auto theta = params.flatten();
    for (double& v : theta) v += 0.05 * (uniform01(rng) - 0.5);
    params.unflatten(theta);
    auto check = [&](auto&& loss) {
      const auto bp = loss(params).grad.values;
      const auto fd = finite_diff_gradient(
          [&](std::span<const double> th) {
            auto p = params;
            p.unflatten(th);
            return loss(p).value;
          },
          theta, h);
      return max_relative_error(bp, fd.values);
    };
    rep.l_r = std::max(rep.l_r, check([&](const EstimatorParams& p) { return loss_r(p, labeled, z, s, Exec::serial); }));
    rep.l_qv = std::max(rep.l_qv, check([&](const EstimatorParams& p) { return loss_qv(p, labeled, Exec::serial); }));
    rep.l_s = std::max(rep.l_s, check([&](const EstimatorParams& p) { return loss_s(p, views, s, Exec::serial); }));
  }
  return rep;
}

TrajectoryFeatures trajectory_features(const ReplayBuffer& buffer, std::size_t max_trajectories) {
  std::vector<std::pair<std::size_t, std::size_t>> spans;  // [first, last)
  std::size_t first = 0;
  for (std::size_t i = 0; i < buffer.size(); ++i) {
    if (buffer.at(i).terminal) {
      spans.emplace_back(first, i + 1);
      first = i + 1;
    }
  }
  if (first < buffer.size()) spans.emplace_back(first, buffer.size());
  if (max_trajectories > 0 && spans.size() > max_trajectories)
    spans.erase(spans.begin(), spans.end() - static_cast<std::ptrdiff_t>(max_trajectories));
  TrajectoryFeatures f;
  f.trajectories = spans.size();
  for (std::size_t g = 0; g < spans.size(); ++g) {
    for (std::size_t i = spans[g].first; i < spans[g].second; ++i) {
      const auto& t = buffer.at(i);
      Point p(t.state.begin(), t.state.end());
      p.insert(p.end(), t.action.begin(), t.action.end());
      p.push_back(t.reward);
      f.points.push_back(std::move(p));
      f.group.push_back(g);
    }
  }
  return f;
}

std::string aggregate_csv(const std::vector<fs::path>& seed_dirs) {
  std::vector<std::vector<BestScorePoint>> curves;
  for (const auto& dir : seed_dirs) {
    std::vector<BestScorePoint> c;
    for (const auto& [ep, best] : read_best_curve(dir / "curve.csv")) c.push_back({ep, best});
    curves.push_back(std::move(c));
  }
  CsvWriter w({"episode", "mean", "std", "seeds"});
  for (const auto& p : best_score_series(curves))
    w.row({std::to_string(p.episode), format_real(p.mean), format_real(p.std), std::to_string(p.seeds)});
  return w.str();
}

namespace {

struct Common {
  std::string config;
  std::vector<std::string> overrides;
  std::string seeds = "1";
  std::string out;
  bool force = false;
};

void add_common(CLI::App* app, Common& c, bool with_seeds = true) {
  app->add_option("--config", c.config, "Run config file (key = value lines)");
  app->add_option("--set", c.overrides, "Override one config key (key=value), repeatable");
  if (with_seeds) app->add_option("--seed", c.seeds, "Seed list, e.g. 1,2,3 or 1-5");
  app->add_option("--out", c.out, "Output path");
  app->add_flag("--force", c.force, "Overwrite existing outputs");
}

fs::path output_root(const Common& c, const std::string& fallback) {
  if (!c.out.empty()) return c.out;
  if (const char* env = std::getenv("SSRS_OUT"); env && *env) return fs::path(env) / fallback;
  return fs::path("runs") / fallback;
}

void guard_output(const fs::path& p, bool force) {
  if (fs::exists(p) && !force) throw ArgumentError("output exists (use --force to overwrite): " + p.string());
}

int cmd_train(const Common& c) {
  const auto base = load_config(c.config, c.overrides);
  const auto seeds = parse_seed_list(c.seeds);
  const fs::path root = output_root(c, "train");
  if (fs::exists(root / "run.json") && !c.force)
    throw ArgumentError("output exists (use --force to overwrite): " + root.string());
  fs::create_directories(root);

  std::vector<std::pair<std::uint64_t, pid_t>> children;
  std::cout.flush();
  for (auto seed : seeds) {
    const pid_t pid = fork();
    if (pid < 0) throw std::runtime_error("fork failed");
    if (pid == 0) {
      int code = 1;
      try {
        RunConfig cfg = base;
        cfg.seed = seed;
        const fs::path dir = root / ("seed_" + std::to_string(seed));
        fs::create_directories(dir);
        const auto rec = train(cfg, dir);
        write_run_outputs(dir, cfg, rec);
        code = rec.failed ? 1 : 0;
        if (rec.failed) std::cerr << "seed " << seed << ": " << rec.error << "\n";
      } catch (const std::exception& e) {
        std::cerr << "seed " << seed << ": " << e.what() << "\n";
      }
      std::fflush(nullptr);
      _exit(code);
    }
    children.emplace_back(seed, pid);
  }

  nlohmann::ordered_json summary;
  summary["seeds"] = seeds;
  summary["config"] = serialize_config(base);
  summary["failures"] = nlohmann::json::array();
  std::vector<fs::path> ok_dirs;
  for (const auto& [seed, pid] : children) {
    int status = 0;
    waitpid(pid, &status, 0);
    const int code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
    if (code == 0) {
      ok_dirs.push_back(root / ("seed_" + std::to_string(seed)));
    } else {
      summary["failures"].push_back({{"seed", seed}, {"exit_code", code}});
    }
  }
  if (!ok_dirs.empty()) write_text(root / "aggregate.csv", aggregate_csv(ok_dirs));
  write_text(root / "run.json", summary.dump(2) + "\n");
  std::cout << "trained " << ok_dirs.size() << "/" << seeds.size() << " seeds into " << root.string() << "\n";
  return summary["failures"].empty() ? 0 : 1;
}

int cmd_eval(const Common& c, const std::string& params_path, const std::string& traj_path,
             const std::vector<double>& z_values) {
  const auto cfg = load_config(c.config, c.overrides);
  const auto params = load_params(params_path);
  const auto traj = decode_trajectory(read_text(traj_path));
  std::vector<double> z = z_values;
  if (z.empty()) {
    RewardSet zset(params.n_z());
    for (double r : traj.rewards)
      if (r != 0.0) zset.update(r);
    z = zset.values();
  }
  if (z.size() != params.n_z()) throw ArgumentError("--z must list n_z values");
  std::vector<std::string> header = {"row"};
  for (std::size_t i = 0; i < z.size(); ++i) header.push_back("q" + std::to_string(i));
  header.insert(header.end(), {"max_q", "selected"});
  CsvWriter w(header);
  for (std::size_t i = 0; i + 1 < traj.states.rows; ++i) {
    const auto q = confidence(params, traj.states.row(i), traj.actions.row(i), traj.states.row(i + 1), cfg.beta);
    std::vector<std::string> row = {std::to_string(i)};
    for (double v : q) row.push_back(format_real(v));
    row.push_back(format_real(*std::max_element(q.begin(), q.end())));
    row.push_back(format_real(select(q, z, cfg.lambda_final)));
    w.row(row);
  }
  const fs::path out = c.out.empty() ? output_root(c, "eval.csv") : fs::path(c.out);
  guard_output(out, c.force);
  w.save(out);
  return 0;
}

int cmd_gradcheck(const Common& c, int estimators) {
  const auto seed = parse_seed_list(c.seeds).front();
  const auto rep = gradcheck(seed, estimators);
  std::cout << std::scientific << std::setprecision(3);
  std::cout << "L_r  max relative error " << rep.l_r << "\n";
  std::cout << "L_QV max relative error " << rep.l_qv << "\n";
  std::cout << "L_s  max relative error " << rep.l_s << "\n";
  std::cout << (rep.pass() ? "PASS" : "FAIL") << " (bound 1e-4, " << rep.estimators << " estimators)\n";
  return rep.pass() ? 0 : 2;
}

TrajectoryMatrix rollout_trajectory(const RunConfig& cfg, double epsilon) {
  auto env = make_environment(cfg.env, cfg.n);
  TabularQ q(env->num_actions(), cfg.gamma, cfg.learning_rate, cfg.q_init);
  Engine rng = make_engine(cfg.seed, Stream::exploration);
  const auto ro = run_episode(*env, q, epsilon, rng, derive_seed(cfg.seed, 100, 0));
  TrajectoryMatrix traj;
  traj.states = Matrix(ro.transitions.size(), env->observation_dim());
  traj.actions = Matrix(ro.transitions.size(), env->num_actions());
  for (std::size_t i = 0; i < ro.transitions.size(); ++i) {
    const auto& t = ro.transitions[i];
    std::copy(t.state.begin(), t.state.end(), traj.states.row(i).begin());
    std::copy(t.action.begin(), t.action.end(), traj.actions.row(i).begin());
    traj.rewards.push_back(t.reward);
  }
  return traj;
}

int cmd_rollout(const Common& c, double epsilon) {
  auto cfg = load_config(c.config, c.overrides);
  cfg.seed = parse_seed_list(c.seeds).front();
  const fs::path out = c.out.empty() ? output_root(c, "rollout.csv") : fs::path(c.out);
  guard_output(out, c.force);
  write_text(out, encode_trajectory(rollout_trajectory(cfg, epsilon)));
  return 0;
}

int cmd_augment_check(const Common& c, const std::string& traj_path) {
  auto cfg = load_config(c.config, c.overrides);
  cfg.seed = parse_seed_list(c.seeds).front();
  const auto traj = traj_path.empty() ? rollout_trajectory(cfg, 1.0) : decode_trajectory(read_text(traj_path));
  validate(traj);
  const auto pairing = make_pairing(cfg.augment, cfg.n, traj.states.cols);
  const auto [weak, strong] = weak_strong_pair(pairing, traj, derive_seed(cfg.seed, static_cast<std::uint64_t>(Stream::augmentation)));

  const fs::path dir = output_root(c, "augment");
  guard_output(dir / "report.json", c.force);
  write_text(dir / "weak.csv", encode_trajectory(weak));
  write_text(dir / "strong.csv", encode_trajectory(strong));

  auto shape = [](const TrajectoryMatrix& t) {
    return nlohmann::ordered_json{{"S", {t.states.rows, t.states.cols}},
                                  {"A", {t.actions.rows, t.actions.cols}},
                                  {"R", {t.rewards.size(), 1}}};
  };
  nlohmann::ordered_json rep;
  rep["pairing"] = pairing.name;
  rep["weak"] = to_string(pairing.weak.kind);
  rep["strong"] = to_string(pairing.strong.kind);
  rep["partitions"] = cfg.n;
  rep["entropy_per_partition"] = partition_entropies(traj.states, cfg.n);
  rep["shapes"]["input"] = shape(traj);
  rep["shapes"]["weak"] = shape(weak);
  rep["shapes"]["strong"] = shape(strong);
  rep["actions_rewards_unchanged"] = weak.actions == traj.actions && strong.actions == traj.actions &&
                                     weak.rewards == traj.rewards && strong.rewards == traj.rewards;
  write_text(dir / "report.json", rep.dump(2) + "\n");
  return 0;
}

std::vector<std::pair<int, fs::path>> snapshots_in(const fs::path& dir) {
  std::vector<std::pair<int, fs::path>> snaps;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (name.rfind("snapshot_", 0) == 0 && entry.path().extension() == ".bin")
      snaps.emplace_back(std::stoi(name.substr(9)), entry.path());
  }
  std::sort(snaps.begin(), snaps.end());
  return snaps;
}

ReplayBuffer buffer_from(const std::string& run_dir, const std::string& buffer_path) {
  if (!buffer_path.empty()) return load_buffer(buffer_path);
  if (run_dir.empty()) throw ArgumentError("give --run or --buffer");
  const auto snaps = snapshots_in(run_dir);
  if (snaps.empty()) throw ArgumentError("no snapshot_<epoch>.bin in " + run_dir);
  return load_buffer(snaps.back().second);
}

int cmd_consensus(const Common& c, const std::string& run_dir, const std::string& buffer_path, int k, int runs,
                  int max_traj) {
  const auto cfg = load_config(c.config, c.overrides);
  const auto buffer = buffer_from(run_dir, buffer_path);
  const auto feats = trajectory_features(buffer, static_cast<std::size_t>(max_traj));
  const std::size_t components = k > 0 ? static_cast<std::size_t>(k) : static_cast<std::size_t>(cfg.n_z);
  const auto cm = consensus_grouped(feats.points, feats.group, components, static_cast<std::size_t>(runs),
                                    parse_seed_list(c.seeds).front());
  const fs::path dir = output_root(c, "consensus");
  guard_output(dir / "consensus.csv", c.force);
  CsvWriter longform({"trajectory_i", "trajectory_j", "frequency"});
  std::vector<std::string> header = {"trajectory"};
  for (std::size_t j = 0; j < cm.size; ++j) header.push_back(std::to_string(j));
  CsvWriter grid(header);
  for (std::size_t i = 0; i < cm.size; ++i) {
    std::vector<std::string> row = {std::to_string(i)};
    for (std::size_t j = 0; j < cm.size; ++j) {
      longform.row({std::to_string(i), std::to_string(j), format_real(cm(i, j))});
      row.push_back(format_real(cm(i, j)));
    }
    grid.row(row);
  }
  longform.save(dir / "consensus.csv");
  grid.save(dir / "consensus_grid.csv");
  return 0;
}

int cmd_dist(const Common& c, const std::string& run_dir, const std::vector<std::string>& buffers, double width) {
  std::vector<std::pair<int, fs::path>> snaps;
  if (!run_dir.empty()) snaps = snapshots_in(run_dir);
  for (const auto& b : buffers) {
    const auto name = fs::path(b).stem().string();
    const auto us = name.rfind('_');
    snaps.emplace_back(us == std::string::npos ? 0 : std::stoi(name.substr(us + 1)), b);
  }
  if (snaps.empty()) throw ArgumentError("no buffer snapshots given");
  CsvWriter w({"epoch", "bin_left", "bin_right", "probability"});
  for (const auto& [epoch, path] : snaps)
    for (const auto& r : reward_distribution(load_buffer(path), epoch, width))
      w.row({std::to_string(r.epoch), format_real(r.bin_left), format_real(r.bin_right), format_real(r.probability)});
  const fs::path out = c.out.empty() ? output_root(c, "dist.csv") : fs::path(c.out);
  guard_output(out, c.force);
  w.save(out);
  return 0;
}

int cmd_compare(const Common& c, const std::vector<std::string>& dirs) {
  if (dirs.size() < 2) throw ArgumentError("compare needs at least two run directories");
  struct Row {
    std::string name;
    double mean, std;
    std::string seeds;
  };
  std::vector<Row> rows;
  for (const auto& d : dirs) {
    const fs::path agg = fs::path(d) / "aggregate.csv";
    if (!fs::exists(agg)) throw ArgumentError("missing aggregate.csv in " + d);
    const auto table = read_csv(agg);
    if (table.rows.empty()) throw FormatError("empty aggregate.csv in " + d);
    const auto& last = table.rows.back();
    rows.push_back({fs::path(d).filename().string(), std::stod(last[table.column("mean")]),
                    std::stod(last[table.column("std")]), last[table.column("seeds")]});
  }
  CsvWriter w({"variant", "final_best_mean", "final_best_std", "seeds"});
  std::size_t width = 7;
  for (const auto& r : rows) {
    w.row({r.name, format_real(r.mean), format_real(r.std), r.seeds});
    width = std::max(width, r.name.size());
  }
  const fs::path out = c.out.empty() ? output_root(c, "compare.csv") : fs::path(c.out);
  guard_output(out, c.force);
  w.save(out);
  std::cout << std::left << std::setw(static_cast<int>(width)) << "variant" << "  best score (mean +- std)  seeds\n";
  for (const auto& r : rows) {
    std::ostringstream cell;
    cell << std::fixed << std::setprecision(4) << r.mean << " +- " << r.std;
    std::cout << std::left << std::setw(static_cast<int>(width)) << r.name << "  " << std::setw(24) << cell.str()
              << "  " << r.seeds << "\n";
  }
  return 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Semi-supervised reward shaping laboratory"};
  app.require_subcommand(1);

  Common train_opts, eval_opts, grad_opts, aug_opts, roll_opts, cons_opts, dist_opts, cmp_opts;

  auto* train_cmd = app.add_subcommand("train", "Train one process per seed; writes seed_<s>/ and aggregate.csv");
  add_common(train_cmd, train_opts);

  std::string params_path, traj_path;
  std::vector<double> z_values;
  auto* eval_cmd = app.add_subcommand("eval", "Confidence and selected reward for each step of a trajectory");
  add_common(eval_cmd, eval_opts, false);
  eval_cmd->add_option("--params", params_path, "Estimator checkpoint")->required();
  eval_cmd->add_option("--trajectory", traj_path, "Trajectory CSV")->required();
  eval_cmd->add_option("--z", z_values, "Explicit reward set values");

  int estimators = 10;
  auto* grad_cmd = app.add_subcommand("gradcheck", "Backprop vs finite differences for the smoothed losses");
  add_common(grad_cmd, grad_opts);
  grad_cmd->add_option("--estimators", estimators, "Number of random toy estimators");

  std::string aug_traj;
  auto* aug_cmd = app.add_subcommand("augment-check", "Weak/strong views of a trajectory plus an entropy report");
  add_common(aug_cmd, aug_opts);
  aug_cmd->add_option("--trajectory", aug_traj, "Trajectory CSV (default: a random rollout)");

  double epsilon = 1.0;
  auto* roll_cmd = app.add_subcommand("rollout", "Dump one episode as a trajectory CSV");
  add_common(roll_cmd, roll_opts);
  roll_cmd->add_option("--epsilon", epsilon, "Exploration rate of the rollout policy");

  std::string cons_run, cons_buffer;
  int k = 0, runs = 100, max_traj = 50;
  auto* cons_cmd = app.add_subcommand("consensus", "Consensus matrix over trajectory clusterings");
  add_common(cons_cmd, cons_opts);
  cons_cmd->add_option("--run", cons_run, "Seed directory (uses its last snapshot)");
  cons_cmd->add_option("--buffer", cons_buffer, "Buffer checkpoint");
  cons_cmd->add_option("--k", k, "Mixture components (default n_z)");
  cons_cmd->add_option("--runs", runs, "Clustering repetitions");
  cons_cmd->add_option("--max-trajectories", max_traj, "Most recent trajectories to cluster (0 = all)");

  std::string dist_run;
  std::vector<std::string> dist_buffers;
  double bin_width = 0.05;
  auto* dist_cmd = app.add_subcommand("dist", "Signed-log reward histograms of buffer snapshots");
  add_common(dist_cmd, dist_opts, false);
  dist_cmd->add_option("--run", dist_run, "Seed directory with snapshot_<epoch>.bin files");
  dist_cmd->add_option("--buffer", dist_buffers, "Buffer files named <name>_<epoch>.bin");
  dist_cmd->add_option("--bin-width", bin_width, "Histogram bin width");

  std::vector<std::string> cmp_dirs;
  auto* cmp_cmd = app.add_subcommand("compare", "Final best score table across run directories");
  add_common(cmp_cmd, cmp_opts, false);
  cmp_cmd->add_option("dirs", cmp_dirs, "Run directories containing aggregate.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*train_cmd) return cmd_train(train_opts);
    if (*eval_cmd) return cmd_eval(eval_opts, params_path, traj_path, z_values);
    if (*grad_cmd) return cmd_gradcheck(grad_opts, estimators);
    if (*aug_cmd) return cmd_augment_check(aug_opts, aug_traj);
    if (*roll_cmd) return cmd_rollout(roll_opts, epsilon);
    if (*cons_cmd) return cmd_consensus(cons_opts, cons_run, cons_buffer, k, runs, max_traj);
    if (*dist_cmd) return cmd_dist(dist_opts, dist_run, dist_buffers, bin_width);
    if (*cmp_cmd) return cmd_compare(cmp_opts, cmp_dirs);
  } catch (const ParseError& e) {
    std::cerr << "config error at line " << e.line() << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace ssrs
