#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ssrs/rng.hpp"

namespace ssrs {

enum class NetMode { eval, train };

/// Feed-forward reward head:
///   [dense -> ReLU -> dropout] x hidden, dense(N_z) -> ReLU -> softmax.
/// All weights and biases live in one contiguous vector so the network can be
/// flattened for optimizers and gradient checks without copying layer by layer.
class MlpNet {
 public:
  struct Layer {
    std::size_t in = 0;
    std::size_t out = 0;
    std::size_t offset = 0;  // weights (out x in, row-major) then out biases
    bool operator==(const Layer&) const = default;
  };

  /// Activations recorded by a forward pass, consumed by backward().
  struct Tape {
    std::vector<std::vector<double>> inputs;  // input seen by each dense layer
    std::vector<std::vector<double>> pre;     // pre-activation of each dense layer
    std::vector<std::vector<double>> masks;   // dropout multipliers (train mode only)
    std::vector<double> output;               // softmax probabilities
  };

  MlpNet() = default;
  MlpNet(std::size_t input_dim, const std::vector<std::size_t>& hidden, std::size_t output_dim, double dropout);

  /// He-uniform weights; small positive biases keep the ReLU before the softmax alive.
  void initialize(Engine& rng);

  std::size_t input_dim() const { return layers_.empty() ? 0 : layers_.front().in; }
  std::size_t output_dim() const { return layers_.empty() ? 0 : layers_.back().out; }
  std::size_t param_count() const { return params_.size(); }
  double dropout() const { return dropout_; }
  const std::vector<Layer>& layers() const { return layers_; }

  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }

  std::vector<double> forward(std::span<const double> x) const;
  Tape forward_tape(std::span<const double> x, NetMode mode = NetMode::eval, Engine* rng = nullptr) const;

  /// Accumulates dLoss/dparams into grad given dLoss/doutput (w.r.t. the softmax probabilities).
  void backward(const Tape& tape, std::span<const double> d_output, std::span<double> grad) const;

  bool operator==(const MlpNet&) const = default;

 private:
  std::vector<Layer> layers_;
  std::vector<double> params_;
  double dropout_ = 0.0;
};

void softmax_inplace(std::span<double> v);

}  // namespace ssrs
