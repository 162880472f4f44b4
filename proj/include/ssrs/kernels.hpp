#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

namespace ssrs {

/// Execution policy for the batch kernels. `serial` is the reference loop kept for
/// testing; `parallel` shards the batch across OpenMP threads.
enum class Exec { serial, parallel };

struct SampleResult {
  double value = 0.0;
  bool gate = false;
};

struct BatchSum {
  double value = 0.0;
  std::vector<double> grad;
  std::size_t gate_passes = 0;
};

/// Samples per shard in the parallel reduction. Fixed so the summation order, and
/// therefore the result, does not depend on the thread count.
inline constexpr std::size_t kShardSize = 8;

/// Sums fn(i, grad) over i in [0, n). fn adds its gradient contribution into grad
/// (which may be empty when no gradient is requested) and returns its loss term.
template <class Fn>
BatchSum reduce_batch(std::size_t n, std::size_t grad_size, Fn&& fn, Exec exec) {
  BatchSum out;
  out.grad.assign(grad_size, 0.0);
  if (exec == Exec::serial) {
    for (std::size_t i = 0; i < n; ++i) {
      const SampleResult r = fn(i, std::span<double>(out.grad));
      out.value += r.value;
      out.gate_passes += r.gate ? 1 : 0;
    }
    return out;
  }

  const std::size_t shards = (n + kShardSize - 1) / kShardSize;
  std::vector<BatchSum> partial(shards);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t s = 0; s < static_cast<std::ptrdiff_t>(shards); ++s) {
    auto& part = partial[static_cast<std::size_t>(s)];
    part.grad.assign(grad_size, 0.0);
    const std::size_t first = static_cast<std::size_t>(s) * kShardSize;
    const std::size_t last = std::min(n, first + kShardSize);
    for (std::size_t i = first; i < last; ++i) {
      const SampleResult r = fn(i, std::span<double>(part.grad));
      part.value += r.value;
      part.gate_passes += r.gate ? 1 : 0;
    }
  }
  for (const auto& part : partial) {
    out.value += part.value;
    out.gate_passes += part.gate_passes;
    for (std::size_t j = 0; j < grad_size; ++j) out.grad[j] += part.grad[j];
  }
  return out;
}

/// Runs fn(i) for i in [0, n); iterations must be independent.
template <class Fn>
void for_each_index(std::size_t n, Fn&& fn, Exec exec) {
  if (exec == Exec::serial) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) fn(static_cast<std::size_t>(i));
}

}  // namespace ssrs
