#include "ssrs/reward_set.hpp"

#include <algorithm>

#include "ssrs/error.hpp"

namespace ssrs {

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  const double span = hi - lo;
  for (std::size_t i = 0; i < n; ++i) out[i] = lo + span * static_cast<double>(i) / static_cast<double>(n - 1);
  out.front() = lo;
  out.back() = hi;
  return out;
}

RewardSet::RewardSet(std::size_t size) {
  if (size < 2) throw ArgumentError("reward set needs at least 2 entries");
  values_ = linspace(0.0, 1.0, size);
}

bool RewardSet::contains(double z) const { return std::find(values_.begin(), values_.end(), z) != values_.end(); }

bool RewardSet::update(double r) {
  if (!observed_.insert(r).second) return false;
  rebuild();
  return true;
}

void RewardSet::rebuild() {
  double lo = *observed_.begin();
  double hi = *observed_.rbegin();
  if (observed_.size() == 1) {
    lo = std::min(lo, 0.0);
    hi = std::max(hi, 0.0);
  }
  if (lo == hi) return;  // only {0} observed: keep the previous grid
  values_ = linspace(lo, hi, values_.size());
}

}  // namespace ssrs
