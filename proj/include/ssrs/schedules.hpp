#pragma once

#include <cstddef>

namespace ssrs {

/// Confidence threshold: lambda(t) = 0.6 + (lambda_final - 0.6) * (1 - exp(-t / T)).
double lambda_at(double t, double T, double lambda_final = 0.9);

/// Consistency weight: 0.2 + (alpha_final - 0.2) * t / (0.8 T) before the knee at 0.8 T, alpha_final after.
double alpha_at(double t, double T, double alpha_final = 0.7);

struct ScheduleState {
  double t = 0;
  double T = 1;
  std::size_t n_r = 0;           // nonzero-reward transitions in the buffer
  std::size_t buffer_count = 0;  // live buffer entries
  double early_end = 0.2;        // phase boundaries as fractions of T
  double late_start = 0.8;
};

/// Shaping proportion: p_u_base * ln(1 + N_r) in the early and late phases,
/// p_u_base * N_r / buffer_count in the middle phase, clamped to [0, 1].
double p_u_at(const ScheduleState& state, double p_u_base);

}  // namespace ssrs
