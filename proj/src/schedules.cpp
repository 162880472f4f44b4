#include "ssrs/schedules.hpp"

#include <algorithm>
#include <cmath>

#include "ssrs/error.hpp"

namespace ssrs {

namespace {
void check(double t, double T) {
  if (!(T > 0.0)) throw ArgumentError("schedule horizon T must be > 0");
  if (!(t >= 0.0 && t <= T)) throw ArgumentError("schedule time t must be in [0, T]");
}
}  // namespace

double lambda_at(double t, double T, double lambda_final) {
  check(t, T);
  return 0.6 + (lambda_final - 0.6) * (1.0 - std::exp(-t / T));
}

double alpha_at(double t, double T, double alpha_final) {
  check(t, T);
  const double knee = 0.8 * T;
  if (t < knee) return 0.2 + (alpha_final - 0.2) * (t / knee);
  return alpha_final;
}

double p_u_at(const ScheduleState& s, double p_u_base) {
  if (s.n_r == 0) return 0.0;
  const double frac = s.T > 0.0 ? s.t / s.T : 0.0;
  double multiplier;
  if (frac >= s.early_end && frac < s.late_start) {
    multiplier = s.buffer_count ? static_cast<double>(s.n_r) / static_cast<double>(s.buffer_count) : 0.0;
  } else {
    multiplier = std::log(1.0 + static_cast<double>(s.n_r));
  }
  return std::clamp(p_u_base * multiplier, 0.0, 1.0);
}

}  // namespace ssrs
