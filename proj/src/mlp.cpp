#include "ssrs/mlp.hpp"

#include <algorithm>
#include <cmath>

#include "ssrs/error.hpp"

namespace ssrs {

void softmax_inplace(std::span<double> v) {
  const double mx = *std::max_element(v.begin(), v.end());
  double sum = 0.0;
  for (double& x : v) {
    x = std::exp(x - mx);
    sum += x;
  }
  for (double& x : v) x /= sum;
}

MlpNet::MlpNet(std::size_t input_dim, const std::vector<std::size_t>& hidden, std::size_t output_dim, double dropout)
    : dropout_(dropout) {
  if (input_dim == 0 || output_dim == 0) throw ArgumentError("network dimensions must be positive");
  if (dropout < 0.0 || dropout >= 1.0) throw ArgumentError("dropout must be in [0,1)");
  std::size_t in = input_dim;
  std::size_t offset = 0;
  auto add = [&](std::size_t out) {
    if (out == 0) throw ArgumentError("layer width must be positive");
    layers_.push_back({in, out, offset});
    offset += out * in + out;
    in = out;
  };
  for (std::size_t h : hidden) add(h);
  add(output_dim);
  params_.assign(offset, 0.0);
}

void MlpNet::initialize(Engine& rng) {
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& L = layers_[l];
    const double bound = std::sqrt(6.0 / static_cast<double>(L.in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    double* w = params_.data() + L.offset;
    for (std::size_t i = 0; i < L.out * L.in; ++i) w[i] = dist(rng);
    const double bias = l + 1 == layers_.size() ? 0.1 : 0.01;
    std::fill(w + L.out * L.in, w + L.out * L.in + L.out, bias);
  }
}

namespace {

void dense(const double* w, const std::vector<double>& x, std::vector<double>& z, std::size_t in, std::size_t out) {
  const double* b = w + out * in;
  z.resize(out);
  for (std::size_t o = 0; o < out; ++o) {
    const double* row = w + o * in;
    double acc = b[o];
    for (std::size_t i = 0; i < in; ++i) acc += row[i] * x[i];
    z[o] = acc;
  }
}

}  // namespace

MlpNet::Tape MlpNet::forward_tape(std::span<const double> x, NetMode mode, Engine* rng) const {
  if (x.size() != input_dim())
    throw DimensionError("network expects input of length " + std::to_string(input_dim()) + ", got " +
                         std::to_string(x.size()));
  if (mode == NetMode::train && dropout_ > 0.0 && rng == nullptr)
    throw ArgumentError("train-mode dropout needs an rng");
  Tape tape;
  const std::size_t n = layers_.size();
  tape.inputs.resize(n);
  tape.pre.resize(n);
  if (mode == NetMode::train) tape.masks.resize(n - 1);
  std::vector<double> a(x.begin(), x.end());
  const double keep = 1.0 - dropout_;
  for (std::size_t l = 0; l < n; ++l) {
    const auto& L = layers_[l];
    tape.inputs[l] = a;
    dense(params_.data() + L.offset, a, tape.pre[l], L.in, L.out);
    a = tape.pre[l];
    for (double& v : a) v = v > 0.0 ? v : 0.0;
    if (l + 1 < n && mode == NetMode::train) {
      auto& mask = tape.masks[l];
      mask.assign(L.out, 1.0);
      if (dropout_ > 0.0) {
        for (std::size_t i = 0; i < L.out; ++i) mask[i] = uniform01(*rng) < keep ? 1.0 / keep : 0.0;
      }
      for (std::size_t i = 0; i < L.out; ++i) a[i] *= mask[i];
    }
  }
  softmax_inplace(a);
  tape.output = std::move(a);
  return tape;
}

std::vector<double> MlpNet::forward(std::span<const double> x) const { return forward_tape(x).output; }

void MlpNet::backward(const Tape& tape, std::span<const double> d_output, std::span<double> grad) const {
  if (grad.size() != params_.size()) throw DimensionError("gradient buffer size mismatch");
  const std::size_t n = layers_.size();
  const auto& p = tape.output;
  double dot = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) dot += p[i] * d_output[i];
  std::vector<double> dz(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) dz[i] = tape.pre[n - 1][i] > 0.0 ? p[i] * (d_output[i] - dot) : 0.0;

  std::vector<double> da;
  for (std::size_t l = n; l-- > 0;) {
    const auto& L = layers_[l];
    const double* w = params_.data() + L.offset;
    double* gw = grad.data() + L.offset;
    double* gb = gw + L.out * L.in;
    const auto& in = tape.inputs[l];
    for (std::size_t o = 0; o < L.out; ++o) {
      const double d = dz[o];
      if (d == 0.0) continue;
      double* grow = gw + o * L.in;
      for (std::size_t i = 0; i < L.in; ++i) grow[i] += d * in[i];
      gb[o] += d;
    }
    if (l == 0) break;
    da.assign(L.in, 0.0);
    for (std::size_t o = 0; o < L.out; ++o) {
      const double d = dz[o];
      if (d == 0.0) continue;
      const double* row = w + o * L.in;
      for (std::size_t i = 0; i < L.in; ++i) da[i] += row[i] * d;
    }
    const auto& pre = tape.pre[l - 1];
    const bool masked = !tape.masks.empty();
    dz.assign(L.in, 0.0);
    for (std::size_t i = 0; i < L.in; ++i) {
      if (pre[i] <= 0.0) continue;
      dz[i] = masked ? da[i] * tape.masks[l - 1][i] : da[i];
    }
  }
}

}  // namespace ssrs
