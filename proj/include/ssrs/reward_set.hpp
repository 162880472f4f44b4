#pragma once

#include <cstddef>
#include <set>
#include <vector>

namespace ssrs {

/// The fixed candidate reward set Z. Values are rebuilt by linear interpolation
/// over the range of distinct true rewards observed so far.
class RewardSet {
 public:
  /// Before any observation the values are a placeholder grid on [0, 1].
  explicit RewardSet(std::size_t size);

  std::size_t size() const { return values_.size(); }
  const std::vector<double>& values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  const std::set<double>& observed() const { return observed_; }
  bool has_observed(double r) const { return observed_.contains(r); }
  bool contains(double z) const;

  /// Registers r and rebuilds the grid. Returns false (no-op) when r was already observed.
  bool update(double r);

  bool operator==(const RewardSet&) const = default;

 private:
  void rebuild();

  std::vector<double> values_;
  std::set<double> observed_;
};

/// n equally spaced points on [lo, hi], endpoints exact.
std::vector<double> linspace(double lo, double hi, std::size_t n);

}  // namespace ssrs
