#include "ssrs/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "ssrs/error.hpp"
#include "ssrs/rng.hpp"

namespace ssrs {
namespace {

double log_sum_exp(const std::vector<double>& v) {
  const double mx = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double x : v) s += std::exp(x - mx);
  return mx + std::log(s);
}

double squared_distance(const Point& a, const Point& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] - b[i]) * (a[i] - b[i]);
  return d;
}

std::vector<std::size_t> seed_centers(std::span<const Point> points, std::size_t k, Engine& rng) {
  std::vector<std::size_t> centers{uniform_index(rng, points.size())};
  std::vector<double> d2(points.size(), std::numeric_limits<double>::infinity());
  while (centers.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      d2[i] = std::min(d2[i], squared_distance(points[i], points[centers.back()]));
      total += d2[i];
    }
    if (total == 0.0) {
      centers.push_back(uniform_index(rng, points.size()));
      continue;
    }
    double u = uniform01(rng) * total;
    std::size_t pick = points.size() - 1;
    for (std::size_t i = 0; i < points.size(); ++i) {
      u -= d2[i];
      if (u < 0.0) {
        pick = i;
        break;
      }
    }
    centers.push_back(pick);
  }
  return centers;
}

}  // namespace

std::vector<double> GmmModel::joint_log_density(const Point& x) const {
  constexpr double log_2pi = 1.8378770664093454835606594728112;  // ln(2 pi)
  std::vector<double> out(components());
  for (std::size_t k = 0; k < components(); ++k) {
    double lp = weights[k] > 0.0 ? std::log(weights[k]) : -std::numeric_limits<double>::infinity();
    for (std::size_t d = 0; d < x.size(); ++d) {
      const double diff = x[d] - means[k][d];
      lp -= 0.5 * (log_2pi + std::log(variances[k][d]) + diff * diff / variances[k][d]);
    }
    out[k] = lp;
  }
  return out;
}

std::size_t GmmModel::assign(const Point& x) const { return argmax(joint_log_density(x)); }

double GmmModel::log_likelihood(std::span<const Point> points) const {
  double ll = 0.0;
  for (const auto& x : points) ll += log_sum_exp(joint_log_density(x));
  return ll;
}

GmmModel gmm_fit(std::span<const Point> points, const GmmOptions& opt) {
  const std::size_t n = points.size();
  const std::size_t k = opt.components;
  if (k == 0) throw ArgumentError("need at least one mixture component");
  if (n < k) throw ArgumentError("need at least as many points as components");
  const std::size_t dim = points.front().size();
  for (const auto& p : points)
    if (p.size() != dim) throw DimensionError("points differ in dimension");

  Engine rng(opt.seed);
  GmmModel m;
  Point mean(dim, 0.0), var(dim, 0.0);
  for (const auto& p : points)
    for (std::size_t d = 0; d < dim; ++d) mean[d] += p[d] / static_cast<double>(n);
  for (const auto& p : points)
    for (std::size_t d = 0; d < dim; ++d) var[d] += (p[d] - mean[d]) * (p[d] - mean[d]) / static_cast<double>(n);
  for (double& v : var) v = std::max(v, opt.variance_floor);
  for (std::size_t c : seed_centers(points, k, rng)) {
    m.means.push_back(points[c]);
    m.variances.push_back(var);
    m.weights.push_back(1.0 / static_cast<double>(k));
  }

  std::vector<std::vector<double>> resp(n, std::vector<double>(k));
  for (int iter = 0;; ++iter) {
    double ll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      auto lp = m.joint_log_density(points[i]);
      const double norm = log_sum_exp(lp);
      ll += norm;
      for (std::size_t c = 0; c < k; ++c) resp[i][c] = std::exp(lp[c] - norm);
    }
    const bool converged = !m.log_likelihood_trace.empty() && ll - m.log_likelihood_trace.back() < opt.tolerance;
    m.log_likelihood_trace.push_back(ll);
    m.iterations = iter;
    if (converged || iter >= opt.max_iter) break;

    for (std::size_t c = 0; c < k; ++c) {
      double nk = 0.0;
      for (std::size_t i = 0; i < n; ++i) nk += resp[i][c];
      m.weights[c] = nk / static_cast<double>(n);
      if (nk <= 0.0) continue;
      Point mu(dim, 0.0), s2(dim, 0.0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t d = 0; d < dim; ++d) mu[d] += resp[i][c] * points[i][d];
      for (double& v : mu) v /= nk;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t d = 0; d < dim; ++d) s2[d] += resp[i][c] * (points[i][d] - mu[d]) * (points[i][d] - mu[d]);
      for (double& v : s2) v = std::max(v / nk, opt.variance_floor);
      m.means[c] = std::move(mu);
      m.variances[c] = std::move(s2);
    }
  }
  return m;
}

namespace {

ConsensusMatrix co_assignment(const std::vector<std::vector<std::size_t>>& labels, std::size_t size) {
  ConsensusMatrix cm;
  cm.size = size;
  cm.runs = labels.size();
  std::vector<std::size_t> counts(size * size, 0);
  for (const auto& run : labels)
    for (std::size_t i = 0; i < size; ++i)
      for (std::size_t j = i + 1; j < size; ++j)
        if (run[i] == run[j]) ++counts[i * size + j];
  cm.entries.assign(size * size, 0.0);
  for (std::size_t i = 0; i < size; ++i) {
    cm.entries[i * size + i] = 1.0;
    for (std::size_t j = i + 1; j < size; ++j) {
      const double a = static_cast<double>(counts[i * size + j]) / static_cast<double>(cm.runs);
      cm.entries[i * size + j] = a;
      cm.entries[j * size + i] = a;
    }
  }
  return cm;
}

std::vector<std::vector<std::size_t>> cluster_runs(std::span<const Point> features, std::size_t components,
                                                   std::size_t runs, std::uint64_t seed, Exec exec) {
  if (runs == 0) throw ArgumentError("consensus needs at least one run");
  std::vector<std::vector<std::size_t>> labels(runs);
  for_each_index(
      runs,
      [&](std::size_t r) {
        const auto model = gmm_fit(features, {components, derive_seed(seed, 0xC0, r)});
        auto& out = labels[r];
        out.reserve(features.size());
        for (const auto& x : features) out.push_back(model.assign(x));
      },
      exec);
  return labels;
}

}  // namespace

ConsensusMatrix consensus(std::span<const Point> features, std::size_t components, std::size_t runs,
                          std::uint64_t seed, Exec exec) {
  return co_assignment(cluster_runs(features, components, runs, seed, exec), features.size());
}

ConsensusMatrix consensus_grouped(std::span<const Point> features, std::span<const std::size_t> group_of_point,
                                  std::size_t components, std::size_t runs, std::uint64_t seed, Exec exec) {
  if (group_of_point.size() != features.size()) throw DimensionError("one group id per point required");
  std::size_t groups = 0;
  for (std::size_t g : group_of_point) groups = std::max(groups, g + 1);
  const auto point_labels = cluster_runs(features, components, runs, seed, exec);
  std::vector<std::vector<std::size_t>> group_labels;
  for (const auto& run : point_labels) {
    std::vector<std::vector<std::size_t>> votes(groups, std::vector<std::size_t>(components, 0));
    for (std::size_t i = 0; i < run.size(); ++i) ++votes[group_of_point[i]][run[i]];
    std::vector<std::size_t> majority(groups);
    for (std::size_t g = 0; g < groups; ++g)
      majority[g] = static_cast<std::size_t>(std::max_element(votes[g].begin(), votes[g].end()) - votes[g].begin());
    group_labels.push_back(std::move(majority));
  }
  return co_assignment(group_labels, groups);
}

double signed_log(double r) { return r < 0.0 ? -std::log1p(-r) : std::log1p(r); }

std::vector<HistogramRow> reward_distribution(std::span<const double> rewards, int epoch, double bin_width) {
  if (!(bin_width > 0.0)) throw ArgumentError("bin width must be > 0");
  std::vector<HistogramRow> rows;
  if (rewards.empty()) return rows;
  std::map<long long, std::size_t> bins;
  for (double r : rewards) ++bins[static_cast<long long>(std::floor(signed_log(r) / bin_width))];
  for (const auto& [bin, count] : bins) {
    rows.push_back({epoch, static_cast<double>(bin) * bin_width, static_cast<double>(bin + 1) * bin_width,
                    static_cast<double>(count) / static_cast<double>(rewards.size())});
  }
  return rows;
}

std::vector<HistogramRow> reward_distribution(const ReplayBuffer& buffer, int epoch, double bin_width) {
  std::vector<double> rewards;
  rewards.reserve(buffer.size());
  for (std::size_t i = 0; i < buffer.size(); ++i) rewards.push_back(buffer.at(i).reward);
  return reward_distribution(rewards, epoch, bin_width);
}

std::vector<SeriesPoint> best_score_series(std::span<const std::vector<BestScorePoint>> per_seed) {
  if (per_seed.empty()) throw ArgumentError("need at least one run record");
  const auto& grid = per_seed.front();
  for (const auto& run : per_seed) {
    if (run.size() != grid.size()) throw ArgumentError("run records have mismatched episode grids");
    for (std::size_t i = 0; i < run.size(); ++i)
      if (run[i].episode != grid[i].episode) throw ArgumentError("run records have mismatched episode grids");
  }
  std::vector<SeriesPoint> out;
  const double n = static_cast<double>(per_seed.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double mean = 0.0;
    for (const auto& run : per_seed) mean += run[i].best;
    mean /= n;
    double var = 0.0;
    for (const auto& run : per_seed) var += (run[i].best - mean) * (run[i].best - mean);
    out.push_back({grid[i].episode, mean, std::sqrt(var / n), per_seed.size()});
  }
  return out;
}

}  // namespace ssrs
