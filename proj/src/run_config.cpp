#include "ssrs/run_config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

#include "ssrs/error.hpp"

namespace ssrs {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double to_double(std::string_view s) {
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v))
    throw std::invalid_argument("expected a real number, got '" + std::string(s) + "'");
  return v;
}

long long to_int(std::string_view s) {
  long long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw std::invalid_argument("expected an integer, got '" + std::string(s) + "'");
  return v;
}

bool to_bool(std::string_view s) {
  if (s == "on" || s == "true" || s == "1") return true;
  if (s == "off" || s == "false" || s == "0") return false;
  throw std::invalid_argument("expected on|off, got '" + std::string(s) + "'");
}

std::vector<int> to_int_list(std::string_view s) {
  std::vector<int> out;
  if (trim(s).empty()) return out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    auto comma = s.find(',', pos);
    if (comma == std::string_view::npos) comma = s.size();
    out.push_back(static_cast<int>(to_int(trim(s.substr(pos, comma - pos)))));
    pos = comma + 1;
  }
  return out;
}

std::string from_int_list(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

void require(bool ok, const char* what) {
  if (!ok) throw std::out_of_range(what);
}

struct Key {
  std::string name;
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

Key real_key(std::string name, double RunConfig::*field, std::function<bool(double)> ok, const char* range) {
  return {name,
          [=](RunConfig& c, std::string_view v) {
            const double x = to_double(v);
            require(ok(x), range);
            c.*field = x;
          },
          [=](const RunConfig& c) { return format_double(c.*field); }};
}

Key int_key(std::string name, int RunConfig::*field, long long lo, const char* range) {
  return {name,
          [=](RunConfig& c, std::string_view v) {
            const long long x = to_int(v);
            require(x >= lo && x <= 1000000000LL, range);
            c.*field = static_cast<int>(x);
          },
          [=](const RunConfig& c) { return std::to_string(c.*field); }};
}

Key bool_key(std::string name, bool RunConfig::*field) {
  return {name, [=](RunConfig& c, std::string_view v) { c.*field = to_bool(v); },
          [=](const RunConfig& c) { return std::string(c.*field ? "on" : "off"); }};
}

template <class Sub, class T>
Key nested_int(std::string name, Sub RunConfig::*sub, T Sub::*field, long long lo) {
  return {name,
          [=](RunConfig& c, std::string_view v) {
            const long long x = to_int(v);
            require(x >= lo && x <= 1000000, "integer out of range");
            c.*sub.*field = static_cast<T>(x);
          },
          [=](const RunConfig& c) { return std::to_string(c.*sub.*field); }};
}

const std::vector<Key>& keys() {
  static const std::vector<Key> table = [] {
    std::vector<Key> k;
    k.push_back({"seed", [](RunConfig& c, std::string_view v) {
                   const long long x = to_int(v);
                   require(x >= 0, "seed must be >= 0");
                   c.seed = static_cast<std::uint64_t>(x);
                 },
                 [](const RunConfig& c) { return std::to_string(c.seed); }});
    k.push_back(int_key("episodes", &RunConfig::episodes, 1, "episodes must be >= 1"));
    k.push_back(int_key("buffer_capacity", &RunConfig::buffer_capacity, 1, "buffer_capacity must be >= 1"));
    k.push_back(int_key("batch_size", &RunConfig::batch_size, 1, "batch_size must be >= 1"));
    k.push_back(real_key("learning_rate", &RunConfig::learning_rate, [](double x) { return x > 0; },
                         "learning_rate must be > 0"));
    k.push_back(real_key("gamma", &RunConfig::gamma, [](double x) { return x > 0 && x < 1; },
                         "gamma must be in (0,1)"));
    k.push_back(real_key("q_init", &RunConfig::q_init, [](double x) { return std::abs(x) <= 1e6; },
                         "q_init must be in [-1e6,1e6]"));
    k.push_back(real_key("epsilon.start", &RunConfig::epsilon_start, [](double x) { return x >= 0 && x <= 1; },
                         "epsilon.start must be in [0,1]"));
    k.push_back(real_key("epsilon.end", &RunConfig::epsilon_end, [](double x) { return x >= 0 && x <= 1; },
                         "epsilon.end must be in [0,1]"));
    k.push_back(int_key("epsilon.decay_episodes", &RunConfig::epsilon_decay_episodes, 0,
                        "epsilon.decay_episodes must be >= 0"));
    k.push_back(real_key("beta", &RunConfig::beta, [](double x) { return x > 0 && x < 1; }, "beta must be in (0,1)"));
    k.push_back(real_key("lambda", &RunConfig::lambda_final, [](double x) { return x > 0 && x <= 1; },
                         "lambda must be in (0,1]"));
    k.push_back(real_key("alpha", &RunConfig::alpha_final, [](double x) { return x >= 0 && x <= 1; },
                         "alpha must be in [0,1]"));
    k.push_back(real_key("p_u", &RunConfig::p_u, [](double x) { return x >= 0 && x <= 1; }, "p_u must be in [0,1]"));
    k.push_back(int_key("n_z", &RunConfig::n_z, 2, "n_z must be >= 2"));
    k.push_back(int_key("n", &RunConfig::n, 1, "n must be >= 1"));
    k.push_back(real_key("sigmoid_k", &RunConfig::sigmoid_k, [](double x) { return x > 0; }, "sigmoid_k must be > 0"));
    k.push_back(real_key("t_sel", &RunConfig::t_sel, [](double x) { return x > 0; }, "t_sel must be > 0"));
    k.push_back(real_key("estimator_lr", &RunConfig::estimator_lr, [](double x) { return x > 0; },
                         "estimator_lr must be > 0"));
    k.push_back(int_key("estimator_steps", &RunConfig::estimator_steps, 0, "estimator_steps must be >= 0"));
    k.push_back(int_key("estimator_batch", &RunConfig::estimator_batch, 0, "estimator_batch must be >= 0"));
    k.push_back(bool_key("dynamic_schedules", &RunConfig::dynamic_schedules));
    k.push_back(bool_key("static_pu", &RunConfig::static_pu));
    k.push_back(bool_key("monotonicity", &RunConfig::monotonicity));
    k.push_back(bool_key("shaping", &RunConfig::shaping));
    k.push_back(bool_key("estimator_updates", &RunConfig::estimator_updates));
    k.push_back({"net.hidden",
                 [](RunConfig& c, std::string_view v) {
                   auto h = to_int_list(v);
                   require(!h.empty(), "net.hidden needs at least one layer");
                   for (int w : h) require(w >= 1, "net.hidden widths must be >= 1");
                   c.hidden = std::move(h);
                 },
                 [](const RunConfig& c) { return from_int_list(c.hidden); }});
    k.push_back(real_key("net.dropout", &RunConfig::dropout, [](double x) { return x >= 0 && x < 1; },
                         "net.dropout must be in [0,1)"));
    k.push_back(bool_key("net.train_dropout", &RunConfig::train_dropout));
    k.push_back(int_key("eval_interval", &RunConfig::eval_interval, 1, "eval_interval must be >= 1"));
    k.push_back(int_key("eval_episodes", &RunConfig::eval_episodes, 1, "eval_episodes must be >= 1"));
    k.push_back(int_key("checkpoint_interval", &RunConfig::checkpoint_interval, 0, "checkpoint_interval must be >= 0"));
    k.push_back({"snapshot_epochs",
                 [](RunConfig& c, std::string_view v) {
                   auto e = to_int_list(v);
                   for (int x : e) require(x >= 1, "snapshot epochs must be >= 1");
                   c.snapshot_epochs = std::move(e);
                 },
                 [](const RunConfig& c) { return from_int_list(c.snapshot_epochs); }});
    k.push_back({"env.kind",
                 [](RunConfig& c, std::string_view v) {
                   if (v == "sparse_chain")
                     c.env.kind = EnvKind::sparse_chain;
                   else if (v == "key_door_grid")
                     c.env.kind = EnvKind::key_door_grid;
                   else
                     throw std::out_of_range("env.kind must be sparse_chain or key_door_grid");
                 },
                 [](const RunConfig& c) {
                   return std::string(c.env.kind == EnvKind::sparse_chain ? "sparse_chain" : "key_door_grid");
                 }});
    k.push_back(nested_int("env.length", &RunConfig::env, &EnvConfig::length, 2));
    k.push_back(nested_int("env.width", &RunConfig::env, &EnvConfig::width, 1));
    k.push_back(nested_int("env.height", &RunConfig::env, &EnvConfig::height, 1));
    k.push_back(nested_int("env.key_x", &RunConfig::env, &EnvConfig::key_x, 0));
    k.push_back(nested_int("env.key_y", &RunConfig::env, &EnvConfig::key_y, 0));
    k.push_back(nested_int("env.door_x", &RunConfig::env, &EnvConfig::door_x, 0));
    k.push_back(nested_int("env.door_y", &RunConfig::env, &EnvConfig::door_y, 0));
    k.push_back(nested_int("env.max_steps", &RunConfig::env, &EnvConfig::max_steps, 0));
    auto str_key = [](std::string name, std::string AugmentConfig::*field, std::vector<std::string> allowed) {
      return Key{name,
                 [=](RunConfig& c, std::string_view v) {
                   for (const auto& a : allowed)
                     if (v == a) {
                       c.augment.*field = std::string(v);
                       return;
                     }
                   throw std::out_of_range(name + ": unsupported value '" + std::string(v) + "'");
                 },
                 [=](const RunConfig& c) { return c.augment.*field; }};
    };
    const std::vector<std::string> kinds = {"gaussian", "cutout", "smooth", "scale", "translate", "flip",
                                            "double_entropy"};
    k.push_back(str_key("augment.pairing", &AugmentConfig::pairing, {"ssrs_s", "ssrs_m", "ssrs_c", "custom"}));
    k.push_back(str_key("augment.weak", &AugmentConfig::weak, kinds));
    k.push_back(str_key("augment.strong", &AugmentConfig::strong, kinds));
    k.push_back({"augment.sigma",
                 [](RunConfig& c, std::string_view v) {
                   const double x = to_double(v);
                   require(x >= 0, "augment.sigma must be >= 0");
                   c.augment.sigma = x;
                 },
                 [](const RunConfig& c) { return format_double(c.augment.sigma); }});
    k.push_back(nested_int("augment.cutout_n", &RunConfig::augment, &AugmentConfig::cutout_n, 0));
    k.push_back(nested_int("augment.smooth_n", &RunConfig::augment, &AugmentConfig::smooth_n, 1));
    return k;
  }();
  return table;
}

void assign(RunConfig& cfg, std::string_view key, std::string_view value, std::size_t line) {
  for (const auto& k : keys()) {
    if (k.name != key) continue;
    try {
      k.set(cfg, value);
    } catch (const std::out_of_range& e) {
      throw ParseError(line, std::string("range error: ") + e.what());
    } catch (const std::invalid_argument& e) {
      throw ParseError(line, "type error for '" + std::string(key) + "': " + e.what());
    }
    return;
  }
  throw ParseError(line, "unknown key '" + std::string(key) + "'");
}

void assign_line(RunConfig& cfg, std::string_view raw, std::size_t line) {
  const auto eq = raw.find('=');
  if (eq == std::string_view::npos) throw ParseError(line, "expected key = value");
  const auto key = trim(raw.substr(0, eq));
  const auto value = trim(raw.substr(eq + 1));
  if (key.empty()) throw ParseError(line, "empty key");
  assign(cfg, key, value, line);
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    ++line_no;
    auto line = text.substr(pos, nl - pos);
    pos = nl + 1;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    assign_line(cfg, line, line_no);
  }
  validate_config(cfg);
  return cfg;
}

void apply_override(RunConfig& cfg, std::string_view assignment) {
  assign_line(cfg, trim(assignment), 0);
  validate_config(cfg);
}

void validate_config(const RunConfig& cfg) {
  if (cfg.epsilon_end > cfg.epsilon_start) throw ParseError(0, "epsilon.end must not exceed epsilon.start");
  if (cfg.env.kind == EnvKind::key_door_grid) {
    const auto& e = cfg.env;
    if (e.key_x >= e.width || e.door_x >= e.width || e.key_y >= e.height || e.door_y >= e.height)
      throw ParseError(0, "key/door positions must lie inside the grid");
    if (e.key_x == e.door_x && e.key_y == e.door_y) throw ParseError(0, "key and door must differ");
  }
}

std::string serialize_config(const RunConfig& cfg) {
  std::string out;
  for (const auto& k : keys()) out += k.name + " = " + k.get(cfg) + "\n";
  return out;
}

std::uint64_t config_hash(const RunConfig& cfg) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : serialize_config(cfg)) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& k : keys()) out.push_back(k.name);
  return out;
}

}  // namespace ssrs
