#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "ssrs/augment.hpp"
#include "ssrs/estimator.hpp"
#include "ssrs/kernels.hpp"

namespace ssrs {

/// hard: indicator gates and argmax selection (reported values, no gradient).
/// smooth: sigmoid gates sigma(k (max q - lambda)) and temperature soft selection.
enum class LossMode { hard, smooth };

struct LossSettings {
  double beta = 0.5;
  double lambda = 0.9;
  double k = 1.0;       // sigmoid sharpness
  double t_sel = 0.1;   // soft-selection temperature
  LossMode mode = LossMode::smooth;
  NetMode net_mode = NetMode::eval;
  std::uint64_t dropout_seed = 0;
};

struct Gradient {
  std::vector<double> values;
  double norm() const;
};

struct LossValue {
  double value = 0.0;
  Gradient grad;  // empty in hard mode
  std::size_t gate_passes = 0;
  std::size_t count = 0;
};

/// Weak and strong views of an unlabeled transition. Both views come from one
/// two-row trajectory [s; s'] so transforms that act across rows see the step.
struct ConsistencyView {
  std::vector<double> action;
  std::vector<double> weak_state;
  std::vector<double> weak_next;
  std::vector<double> strong_state;
  std::vector<double> strong_next;
};

std::vector<ConsistencyView> make_consistency_views(std::span<const Transition> unlabeled,
                                                    const AugmentPairing& pairing, std::uint64_t seed);

/// Supervised term over transitions with a nonzero environment reward.
LossValue loss_r(const EstimatorParams& params, std::span<const Transition> labeled, std::span<const double> z_values,
                 const LossSettings& settings, Exec exec = Exec::parallel);

/// Sum over components of max(Q_i - V_i, 0)^2 for one sample.
double monotonicity_penalty(std::span<const double> advantage);

/// Monotonicity term: mean over the batch of the per-sample penalty on Q(s,a) - V(s).
LossValue loss_qv(const EstimatorParams& params, std::span<const Transition> labeled, Exec exec = Exec::parallel);

/// Consistency term over zero-reward transitions: pseudo-label from the weak view,
/// cross-entropy against the strong view, gated on both confidences.
LossValue loss_s(const EstimatorParams& params, std::span<const ConsistencyView> views, const LossSettings& settings,
                 Exec exec = Exec::parallel);

struct LossBreakdown {
  double l_r = 0.0;
  double l_qv = 0.0;
  double l_s = 0.0;
  double total = 0.0;
  double alpha = 0.0;
  double qv_weight = 1.0;
  std::size_t gate_r = 0;
  std::size_t gate_s = 0;
  std::size_t n_labeled = 0;
  std::size_t n_unlabeled = 0;
};

/// qv_weight * L_QV + alpha * L_s + (1 - alpha) * L_r.
double combine_losses(double l_qv, double l_s, double l_r, double alpha, double qv_weight = 1.0);

struct TotalLoss {
  LossBreakdown breakdown;
  Gradient grad;  // empty in hard mode
};

TotalLoss total_loss(const EstimatorParams& params, std::span<const Transition> labeled,
                     std::span<const ConsistencyView> unlabeled, std::span<const double> z_values,
                     const LossSettings& settings, double alpha, double qv_weight = 1.0,
                     Exec exec = Exec::parallel);

/// theta <- theta - eta * g. Rejects non-finite gradients with NumericError.
void sgd_step(EstimatorParams& params, const Gradient& grad, double eta);
void sgd_step(std::span<double> theta, std::span<const double> grad, double eta);

/// Central differences (L(theta + h e_i) - L(theta - h e_i)) / 2h.
Gradient finite_diff_gradient(const std::function<double(std::span<const double>)>& loss,
                              std::span<const double> theta, double h);

/// Largest |a - b| / (|b| + 1e-8) over coordinates (b is the reference).
double max_relative_error(std::span<const double> a, std::span<const double> b);

}  // namespace ssrs
