#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ssrs/rng.hpp"
#include "ssrs/run_config.hpp"
#include "ssrs/types.hpp"

namespace ssrs {

enum class AugmentKind { gaussian, cutout, smooth, scale, translate, flip, double_entropy };

AugmentKind parse_augment_kind(const std::string& name);
std::string to_string(AugmentKind kind);

/// A state transform plus its named parameters:
///   gaussian: sigma; cutout: n; smooth: n; scale/translate: lo, hi; double_entropy: n.
struct AugmentSpec {
  AugmentKind kind = AugmentKind::gaussian;
  std::map<std::string, double> params;

  static AugmentSpec gaussian(double sigma = 0.1);
  static AugmentSpec cutout(int n = 16);
  static AugmentSpec smooth(int n = 3);
  static AugmentSpec scale(double lo = 0.8, double hi = 1.2);
  static AugmentSpec translate(double lo = 0.0, double hi = 0.1);
  static AugmentSpec flip();
  static AugmentSpec double_entropy(int n = 8);

  /// Default parameters for a kind (cutout n derived from the state width).
  static AugmentSpec defaults(AugmentKind kind, std::size_t state_dim, int partitions);

  double param(const std::string& name) const;
  bool operator==(const AugmentSpec&) const = default;
};

/// Throws ArgumentError when parameters are missing or outside their allowed ranges.
void validate(const AugmentSpec& spec);

/// Shannon entropy (natural log) of a nonnegative matrix viewed as a distribution
/// over its cells. A zero-sum matrix has entropy 0.
double shannon_entropy(const Matrix& m);

/// Column widths of the n state partitions; the last one absorbs the remainder.
std::vector<std::size_t> partition_widths(std::size_t state_dim, int n);

/// Per-partition entropies h^1..h^n of the state block.
std::vector<double> partition_entropies(const Matrix& states, int n);

/// Scales each of the n column partitions of S by its own entropy; A and R untouched.
TrajectoryMatrix double_entropy(const TrajectoryMatrix& traj, int n);

TrajectoryMatrix apply_augment(const AugmentSpec& spec, const TrajectoryMatrix& traj, Engine& rng);

struct AugmentPairing {
  std::string name;
  AugmentSpec weak;
  AugmentSpec strong;
};

/// ssrs_s: gaussian / double entropy; ssrs_m: gaussian / smooth; ssrs_c: gaussian / cutout.
AugmentPairing make_pairing(const AugmentConfig& cfg, int partitions, std::size_t state_dim);

/// Weak and strong views of traj from two streams derived from seed.
std::pair<TrajectoryMatrix, TrajectoryMatrix> weak_strong_pair(const AugmentPairing& pairing,
                                                               const TrajectoryMatrix& traj, std::uint64_t seed);

}  // namespace ssrs
