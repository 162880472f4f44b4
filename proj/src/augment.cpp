#include "ssrs/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ssrs/error.hpp"

namespace ssrs {

AugmentKind parse_augment_kind(const std::string& name) {
  if (name == "gaussian") return AugmentKind::gaussian;
  if (name == "cutout") return AugmentKind::cutout;
  if (name == "smooth") return AugmentKind::smooth;
  if (name == "scale") return AugmentKind::scale;
  if (name == "translate") return AugmentKind::translate;
  if (name == "flip") return AugmentKind::flip;
  if (name == "double_entropy") return AugmentKind::double_entropy;
  throw ArgumentError("unknown augmentation kind '" + name + "'");
}

std::string to_string(AugmentKind kind) {
  switch (kind) {
    case AugmentKind::gaussian: return "gaussian";
    case AugmentKind::cutout: return "cutout";
    case AugmentKind::smooth: return "smooth";
    case AugmentKind::scale: return "scale";
    case AugmentKind::translate: return "translate";
    case AugmentKind::flip: return "flip";
    case AugmentKind::double_entropy: return "double_entropy";
  }
  return "unknown";
}

AugmentSpec AugmentSpec::gaussian(double sigma) { return {AugmentKind::gaussian, {{"sigma", sigma}}}; }
AugmentSpec AugmentSpec::cutout(int n) { return {AugmentKind::cutout, {{"n", n}}}; }
AugmentSpec AugmentSpec::smooth(int n) { return {AugmentKind::smooth, {{"n", n}}}; }
AugmentSpec AugmentSpec::scale(double lo, double hi) { return {AugmentKind::scale, {{"lo", lo}, {"hi", hi}}}; }
AugmentSpec AugmentSpec::translate(double lo, double hi) {
  return {AugmentKind::translate, {{"lo", lo}, {"hi", hi}}};
}
AugmentSpec AugmentSpec::flip() { return {AugmentKind::flip, {}}; }
AugmentSpec AugmentSpec::double_entropy(int n) { return {AugmentKind::double_entropy, {{"n", n}}}; }

AugmentSpec AugmentSpec::defaults(AugmentKind kind, std::size_t state_dim, int partitions) {
  switch (kind) {
    case AugmentKind::gaussian: return gaussian();
    case AugmentKind::cutout: return cutout(static_cast<int>((state_dim + 7) / 8));
    case AugmentKind::smooth: return smooth();
    case AugmentKind::scale: return scale();
    case AugmentKind::translate: return translate();
    case AugmentKind::flip: return flip();
    case AugmentKind::double_entropy: return double_entropy(partitions);
  }
  throw ArgumentError("unknown augmentation kind");
}

double AugmentSpec::param(const std::string& name) const {
  auto it = params.find(name);
  if (it == params.end()) throw ArgumentError(to_string(kind) + " augmentation is missing parameter '" + name + "'");
  return it->second;
}

void validate(const AugmentSpec& spec) {
  auto positive_int = [&](const char* name) {
    const double v = spec.param(name);
    if (v < 1 || v != std::floor(v)) throw ArgumentError(std::string(name) + " must be a positive integer");
  };
  auto range = [&](double min, double max) {
    const double lo = spec.param("lo"), hi = spec.param("hi");
    if (!(lo >= min && hi <= max && lo <= hi))
      throw ArgumentError(to_string(spec.kind) + " factor range must lie within [" + std::to_string(min) + ", " +
                          std::to_string(max) + "]");
  };
  switch (spec.kind) {
    case AugmentKind::gaussian:
      if (!(spec.param("sigma") >= 0)) throw ArgumentError("sigma must be >= 0");
      break;
    case AugmentKind::cutout:
    case AugmentKind::smooth:
    case AugmentKind::double_entropy: positive_int("n"); break;
    case AugmentKind::scale: range(0.8, 1.2); break;
    case AugmentKind::translate: range(0.0, 0.1); break;
    case AugmentKind::flip: break;
  }
}

double shannon_entropy(const Matrix& m) {
  double total = 0.0;
  for (double v : m.data) {
    if (v < 0.0 || std::isnan(v)) throw DomainError("entropy requires nonnegative entries");
    total += v;
  }
  if (total == 0.0) return 0.0;
  double h = 0.0;
  for (double v : m.data) {
    if (v == 0.0) continue;
    const double p = v / total;
    h -= p * std::log(p);
  }
  return h;
}

std::vector<std::size_t> partition_widths(std::size_t state_dim, int n) {
  if (n <= 0 || static_cast<std::size_t>(n) > state_dim)
    throw ArgumentError("partition count must be in [1, state_dim]");
  const std::size_t base = state_dim / static_cast<std::size_t>(n);
  std::vector<std::size_t> widths(static_cast<std::size_t>(n), base);
  widths.back() += state_dim - base * static_cast<std::size_t>(n);
  return widths;
}

std::vector<double> partition_entropies(const Matrix& states, int n) {
  std::vector<double> h;
  std::size_t first = 0;
  for (std::size_t w : partition_widths(states.cols, n)) {
    h.push_back(shannon_entropy(states.column_block(first, w)));
    first += w;
  }
  return h;
}

TrajectoryMatrix double_entropy(const TrajectoryMatrix& traj, int n) {
  TrajectoryMatrix out = traj;
  const auto widths = partition_widths(traj.states.cols, n);
  const auto h = partition_entropies(traj.states, n);
  std::size_t first = 0;
  for (std::size_t p = 0; p < widths.size(); ++p) {
    for (std::size_t r = 0; r < out.states.rows; ++r)
      for (std::size_t c = first; c < first + widths[p]; ++c) out.states(r, c) *= h[p];
    first += widths[p];
  }
  return out;
}

namespace {

std::size_t int_param(const AugmentSpec& spec, const char* name) {
  return static_cast<std::size_t>(spec.param(name));
}

}  // namespace

TrajectoryMatrix apply_augment(const AugmentSpec& spec, const TrajectoryMatrix& traj, Engine& rng) {
  validate(spec);
  TrajectoryMatrix out = traj;
  Matrix& s = out.states;
  const std::size_t m1 = s.cols;

  switch (spec.kind) {
    case AugmentKind::gaussian: {
      const double sigma = spec.param("sigma");
      if (sigma == 0.0) break;
      std::normal_distribution<double> noise(0.0, sigma);
      for (double& v : s.data) v = std::max(0.0, v + noise(rng));
      break;
    }
    case AugmentKind::cutout: {
      const std::size_t n = int_param(spec, "n");
      if (n > m1) throw ArgumentError("cutout n exceeds state width");
      std::vector<std::size_t> cols(m1);
      std::iota(cols.begin(), cols.end(), 0);
      for (std::size_t i = 0; i < n; ++i) std::swap(cols[i], cols[i + uniform_index(rng, m1 - i)]);
      for (std::size_t r = 0; r < s.rows; ++r)
        for (std::size_t i = 0; i < n; ++i) s(r, cols[i]) = 0.0;
      break;
    }
    case AugmentKind::smooth: {
      const std::size_t n = int_param(spec, "n");
      for (std::size_t r = 0; r < s.rows; ++r) {
        const std::size_t first = r + 1 >= n ? r + 1 - n : 0;
        const double count = static_cast<double>(r - first + 1);
        for (std::size_t c = 0; c < m1; ++c) {
          double acc = 0.0;
          for (std::size_t k = first; k <= r; ++k) acc += traj.states(k, c);
          s(r, c) = acc / count;
        }
      }
      break;
    }
    case AugmentKind::scale: {
      const double lambda = std::uniform_real_distribution<double>(spec.param("lo"), spec.param("hi"))(rng);
      for (double& v : s.data) v *= lambda;
      break;
    }
    case AugmentKind::translate: {
      const double lambda = std::uniform_real_distribution<double>(spec.param("lo"), spec.param("hi"))(rng);
      const std::size_t shift = static_cast<std::size_t>(std::floor(lambda * static_cast<double>(m1))) % m1;
      for (std::size_t r = 0; r < s.rows; ++r) {
        auto row = s.row(r);
        std::rotate(row.begin(), row.end() - static_cast<std::ptrdiff_t>(shift), row.end());
      }
      break;
    }
    case AugmentKind::flip:
      for (std::size_t r = 0; r < s.rows; ++r) {
        auto row = s.row(r);
        std::reverse(row.begin(), row.end());
      }
      break;
    case AugmentKind::double_entropy: return double_entropy(traj, static_cast<int>(spec.param("n")));
  }
  return out;
}

AugmentPairing make_pairing(const AugmentConfig& cfg, int partitions, std::size_t state_dim) {
  const auto weak = AugmentSpec::gaussian(cfg.sigma);
  const int cutout_n = cfg.cutout_n > 0 ? cfg.cutout_n : static_cast<int>((state_dim + 7) / 8);
  if (cfg.pairing == "ssrs_s") return {"ssrs_s", weak, AugmentSpec::double_entropy(partitions)};
  if (cfg.pairing == "ssrs_m") return {"ssrs_m", weak, AugmentSpec::smooth(cfg.smooth_n)};
  if (cfg.pairing == "ssrs_c") return {"ssrs_c", weak, AugmentSpec::cutout(cutout_n)};
  if (cfg.pairing == "custom") {
    auto pick = [&](const std::string& kind) {
      auto spec = AugmentSpec::defaults(parse_augment_kind(kind), state_dim, partitions);
      if (spec.kind == AugmentKind::gaussian) spec.params["sigma"] = cfg.sigma;
      if (spec.kind == AugmentKind::cutout) spec.params["n"] = cutout_n;
      if (spec.kind == AugmentKind::smooth) spec.params["n"] = cfg.smooth_n;
      return spec;
    };
    return {"custom", pick(cfg.weak), pick(cfg.strong)};
  }
  throw ArgumentError("unknown augmentation pairing '" + cfg.pairing + "'");
}

std::pair<TrajectoryMatrix, TrajectoryMatrix> weak_strong_pair(const AugmentPairing& pairing,
                                                               const TrajectoryMatrix& traj, std::uint64_t seed) {
  Engine weak_rng(derive_seed(seed, 1));
  Engine strong_rng(derive_seed(seed, 2));
  return {apply_augment(pairing.weak, traj, weak_rng), apply_augment(pairing.strong, traj, strong_rng)};
}

}  // namespace ssrs
