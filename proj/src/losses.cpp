#include "ssrs/losses.hpp"

#include <cmath>
#include <optional>

#include "ssrs/error.hpp"

namespace ssrs {
namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

/// Per-sample forward helper: applies the configured network mode with a dropout
/// stream derived from (seed, sample, pass) so shard layout never changes masks.
struct Forward {
  const EstimatorParams& params;
  const LossSettings& settings;

  MlpNet::Tape q(std::span<const double> s, std::span<const double> a, std::size_t sample, std::uint64_t pass) const {
    return run(params.q_net, params.q_input(s, a), sample, pass);
  }
  MlpNet::Tape v(std::span<const double> s, std::size_t sample, std::uint64_t pass) const {
    return run(params.v_net, params.v_input(s), sample, pass);
  }

 private:
  MlpNet::Tape run(const MlpNet& net, const std::vector<double>& x, std::size_t sample, std::uint64_t pass) const {
    if (settings.net_mode == NetMode::eval) return net.forward_tape(x);
    Engine rng(derive_seed(settings.dropout_seed, sample, pass));
    return net.forward_tape(x, NetMode::train, &rng);
  }
};

std::vector<double> mix(const std::vector<double>& q, const std::vector<double>& v, double beta) {
  std::vector<double> out(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) out[i] = beta * q[i] + (1.0 - beta) * v[i];
  return out;
}

/// Backpropagates dL/dq through q = beta Q + (1 - beta) V into the flat gradient.
void backprop_confidence(const EstimatorParams& params, const MlpNet::Tape& q_tape, const MlpNet::Tape& v_tape,
                         const std::vector<double>& dq, double beta, double scale, std::span<double> grad) {
  std::vector<double> dQ(dq.size()), dV(dq.size());
  for (std::size_t i = 0; i < dq.size(); ++i) {
    dQ[i] = beta * dq[i] * scale;
    dV[i] = (1.0 - beta) * dq[i] * scale;
  }
  const std::size_t split = params.q_net.param_count();
  params.q_net.backward(q_tape, dQ, grad.subspan(0, split));
  params.v_net.backward(v_tape, dV, grad.subspan(split));
}

LossValue finish(BatchSum&& sum, std::size_t n, bool with_grad) {
  LossValue out;
  out.count = n;
  out.gate_passes = sum.gate_passes;
  if (n == 0) {
    if (with_grad) out.grad.values = std::move(sum.grad);
    return out;
  }
  out.value = sum.value / static_cast<double>(n);
  if (with_grad) out.grad.values = std::move(sum.grad);
  return out;
}

}  // namespace

double Gradient::norm() const {
  double s = 0.0;
  for (double g : values) s += g * g;
  return std::sqrt(s);
}

std::vector<ConsistencyView> make_consistency_views(std::span<const Transition> unlabeled,
                                                    const AugmentPairing& pairing, std::uint64_t seed) {
  std::vector<ConsistencyView> views;
  views.reserve(unlabeled.size());
  for (std::size_t i = 0; i < unlabeled.size(); ++i) {
    const auto& t = unlabeled[i];
    validate(t);
    const std::size_t m1 = t.state.size();
    TrajectoryMatrix traj;
    traj.states = Matrix(2, m1);
    std::copy(t.state.begin(), t.state.end(), traj.states.row(0).begin());
    std::copy(t.next_state.begin(), t.next_state.end(), traj.states.row(1).begin());
    traj.actions = Matrix(2, t.action.size());
    std::copy(t.action.begin(), t.action.end(), traj.actions.row(0).begin());
    std::copy(t.action.begin(), t.action.end(), traj.actions.row(1).begin());
    traj.rewards = {t.reward, 0.0};
    auto [weak, strong] = weak_strong_pair(pairing, traj, derive_seed(seed, i));
    ConsistencyView v;
    v.action = t.action;
    v.weak_state.assign(weak.states.row(0).begin(), weak.states.row(0).end());
    v.weak_next.assign(weak.states.row(1).begin(), weak.states.row(1).end());
    v.strong_state.assign(strong.states.row(0).begin(), strong.states.row(0).end());
    v.strong_next.assign(strong.states.row(1).begin(), strong.states.row(1).end());
    views.push_back(std::move(v));
  }
  return views;
}

LossValue loss_r(const EstimatorParams& params, std::span<const Transition> labeled, std::span<const double> z_values,
                 const LossSettings& s, Exec exec) {
  if (z_values.size() != params.n_z()) throw DimensionError("reward set size differs from estimator output");
  const bool smooth = s.mode == LossMode::smooth;
  const std::size_t n = labeled.size();
  const double scale = n ? 1.0 / static_cast<double>(n) : 0.0;
  const Forward fwd{params, s};

  auto sample = [&](std::size_t i, std::span<double> grad) -> SampleResult {
    const auto& t = labeled[i];
    const auto qt = fwd.q(t.state, t.action, i, 0);
    const auto vt = fwd.v(t.next_state, i, 1);
    const auto q = mix(qt.output, vt.output, s.beta);
    const std::size_t j = argmax(q);
    const double m = q[j];
    const bool gate = m >= s.lambda;
    if (!smooth) {
      const double e = t.reward - select(q, z_values, s.lambda);
      return {gate ? e * e : 0.0, gate};
    }
    const double f = sigmoid(s.k * (m - s.lambda));
    const auto w = tempered_softmax(q, s.t_sel);
    double est = 0.0;
    for (std::size_t c = 0; c < w.size(); ++c) est += w[c] * z_values[c];
    const double e = t.reward - est;

    std::vector<double> dq(q.size(), 0.0);
    dq[j] += s.k * f * (1.0 - f) * e * e;
    for (std::size_t c = 0; c < q.size(); ++c) dq[c] -= f * 2.0 * e * w[c] * (z_values[c] - est) / s.t_sel;
    backprop_confidence(params, qt, vt, dq, s.beta, scale, grad);
    return {f * e * e, gate};
  };
  return finish(reduce_batch(n, smooth ? params.param_count() : 0, sample, exec), n, smooth);
}

double monotonicity_penalty(std::span<const double> advantage) {
  double p = 0.0;
  for (double d : advantage)
    if (d > 0.0) p += d * d;
  return p;
}

LossValue loss_qv(const EstimatorParams& params, std::span<const Transition> labeled, Exec exec) {
  const std::size_t n = labeled.size();
  const double scale = n ? 1.0 / static_cast<double>(n) : 0.0;
  const LossSettings eval_settings;
  const Forward fwd{params, eval_settings};
  const std::size_t split = params.q_net.param_count();

  auto sample = [&](std::size_t i, std::span<double> grad) -> SampleResult {
    const auto& t = labeled[i];
    const auto qt = fwd.q(t.state, t.action, i, 0);
    const auto vt = fwd.v(t.state, i, 2);
    const std::size_t nz = qt.output.size();
    std::vector<double> delta(nz), dQ(nz), dV(nz);
    bool active = false;
    for (std::size_t c = 0; c < nz; ++c) {
      delta[c] = qt.output[c] - vt.output[c];
      const double pos = delta[c] > 0.0 ? delta[c] : 0.0;
      dQ[c] = 2.0 * pos * scale;
      dV[c] = -2.0 * pos * scale;
      active = active || pos > 0.0;
    }
    if (active) {
      params.q_net.backward(qt, dQ, grad.subspan(0, split));
      params.v_net.backward(vt, dV, grad.subspan(split));
    }
    return {monotonicity_penalty(delta), active};
  };
  return finish(reduce_batch(n, params.param_count(), sample, exec), n, true);
}

LossValue loss_s(const EstimatorParams& params, std::span<const ConsistencyView> views, const LossSettings& s,
                 Exec exec) {
  const bool smooth = s.mode == LossMode::smooth;
  const std::size_t n = views.size();
  const double scale = n ? 1.0 / static_cast<double>(n) : 0.0;
  const Forward fwd{params, s};

  auto sample = [&](std::size_t i, std::span<double> grad) -> SampleResult {
    const auto& v = views[i];
    const auto qw_t = fwd.q(v.weak_state, v.action, i, 0);
    const auto vw_t = fwd.v(v.weak_next, i, 1);
    const auto qs_t = fwd.q(v.strong_state, v.action, i, 2);
    const auto vs_t = fwd.v(v.strong_next, i, 3);
    const auto qw = mix(qw_t.output, vw_t.output, s.beta);
    const auto qs = mix(qs_t.output, vs_t.output, s.beta);
    const std::size_t target = argmax(qw);
    const std::size_t top_s = argmax(qs);
    const bool gate = qs[top_s] >= s.lambda && qw[target] >= s.lambda;
    const double ce = -std::log(qs[target]);
    if (!smooth) {
      if (!gate) return {0.0, false};
      const auto label = pseudo_label(qw, s.lambda);
      double h = 0.0;
      for (std::size_t c = 0; c < qs.size(); ++c)
        if ((*label)[c] != 0.0) h -= (*label)[c] * std::log(qs[c]);
      return {h, true};
    }
    const double sig_s = sigmoid(s.k * (qs[top_s] - s.lambda));
    const double sig_w = sigmoid(s.k * (qw[target] - s.lambda));
    const double f = sig_s * sig_w;

    std::vector<double> dqs(qs.size(), 0.0), dqw(qw.size(), 0.0);
    dqs[top_s] += s.k * sig_s * (1.0 - sig_s) * sig_w * ce;
    dqw[target] += sig_s * s.k * sig_w * (1.0 - sig_w) * ce;
    dqs[target] -= f / qs[target];
    backprop_confidence(params, qw_t, vw_t, dqw, s.beta, scale, grad);
    backprop_confidence(params, qs_t, vs_t, dqs, s.beta, scale, grad);
    return {f * ce, gate};
  };
  return finish(reduce_batch(n, smooth ? params.param_count() : 0, sample, exec), n, smooth);
}

double combine_losses(double l_qv, double l_s, double l_r, double alpha, double qv_weight) {
  return qv_weight * l_qv + alpha * l_s + (1.0 - alpha) * l_r;
}

TotalLoss total_loss(const EstimatorParams& params, std::span<const Transition> labeled,
                     std::span<const ConsistencyView> unlabeled, std::span<const double> z_values,
                     const LossSettings& settings, double alpha, double qv_weight, Exec exec) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ArgumentError("alpha must be in [0,1]");
  const auto r = loss_r(params, labeled, z_values, settings, exec);
  const auto qv = loss_qv(params, labeled, exec);
  const auto s = loss_s(params, unlabeled, settings, exec);

  TotalLoss out;
  auto& b = out.breakdown;
  b.l_r = r.value;
  b.l_qv = qv.value;
  b.l_s = s.value;
  b.alpha = alpha;
  b.qv_weight = qv_weight;
  b.total = combine_losses(b.l_qv, b.l_s, b.l_r, alpha, qv_weight);
  b.gate_r = r.gate_passes;
  b.gate_s = s.gate_passes;
  b.n_labeled = labeled.size();
  b.n_unlabeled = unlabeled.size();

  if (settings.mode == LossMode::smooth) {
    out.grad.values.assign(params.param_count(), 0.0);
    for (std::size_t i = 0; i < out.grad.values.size(); ++i)
      out.grad.values[i] = qv_weight * qv.grad.values[i] + alpha * s.grad.values[i] + (1.0 - alpha) * r.grad.values[i];
  }
  return out;
}

void sgd_step(std::span<double> theta, std::span<const double> grad, double eta) {
  if (!(eta > 0.0)) throw ArgumentError("learning rate must be > 0");
  if (theta.size() != grad.size()) throw DimensionError("gradient length differs from parameter count");
  for (double g : grad)
    if (!std::isfinite(g)) throw NumericError("non-finite gradient component; step rejected");
  for (std::size_t i = 0; i < theta.size(); ++i) theta[i] -= eta * grad[i];
}

void sgd_step(EstimatorParams& params, const Gradient& grad, double eta) {
  auto theta = params.flatten();
  sgd_step(theta, grad.values, eta);
  params.unflatten(theta);
}

Gradient finite_diff_gradient(const std::function<double(std::span<const double>)>& loss,
                              std::span<const double> theta, double h) {
  if (!(h > 0.0)) throw ArgumentError("step h must be > 0");
  std::vector<double> x(theta.begin(), theta.end());
  Gradient g;
  g.values.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double orig = x[i];
    x[i] = orig + h;
    const double up = loss(x);
    x[i] = orig - h;
    const double down = loss(x);
    x[i] = orig;
    g.values[i] = (up - down) / (2.0 * h);
  }
  return g;
}

double max_relative_error(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("vectors differ in length");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]) / (std::abs(b[i]) + 1e-8));
  return worst;
}

}  // namespace ssrs
