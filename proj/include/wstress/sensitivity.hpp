#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "wstress/reweight.hpp"

namespace wstress {

/// Function s applied to an input before the expectation is compared.
struct SFunction {
  enum class Kind { Identity, Power, TailIndicator, JointTailIndicator, Custom };
  Kind kind = Kind::Identity;
  /// Exponent for Power, level for the tail indicators.
  double param = 0.0;
  std::function<double(double)> custom;
  std::string custom_name = "custom";

  static SFunction identity() { return {}; }
  static SFunction power(double k) { return {Kind::Power, k, {}, {}}; }
  static SFunction tail(double alpha) { return {Kind::TailIndicator, alpha, {}, {}}; }
  static SFunction joint_tail(double alpha) { return {Kind::JointTailIndicator, alpha, {}, {}}; }

  std::string tag() const;
  /// s(x_i) per sample. Tail indicators use the P-quantile of x (smallest
  /// sample value with empirical CDF >= alpha).
  std::vector<double> apply(std::span<const double> x) const;
  /// s(x_i, x_j) per sample: product of the two marginal indicators for the
  /// tail kinds, product of the marginal transforms otherwise.
  std::vector<double> apply(std::span<const double> xi, std::span<const double> xj) const;
};

struct SensitivityResult {
  double S = 0.0;
  /// E^Q[s] - E[s]
  double numerator = 0.0;
  /// Comonotone and counter-monotone rearrangement bounds, centred by E[s].
  double max_bound = 0.0;
  double min_bound = 0.0;
  double mean_s = 0.0;
};

/// Normalised change of E[s] from P to the reweighted measure, scaled by the
/// rearrangement bounds.
SensitivityResult reverse_sensitivity(std::span<const double> s, const WeightSet& w);

/// Same machinery on precomputed s(x_i, x_j).
SensitivityResult bivariate_reverse_sensitivity(std::span<const double> s_ij, const WeightSet& w);

struct DeltaOptions {
  std::size_t bins = 20;
  std::size_t grid_size = 512;
  std::size_t min_per_bin = 50;
  double lower_p = 0.001;
  double upper_p = 0.999;
};

/// Binned estimate of 1/2 E_x int |f_Y - f_{Y|x}| dy; w empty means P.
double delta_measure(std::span<const double> y, std::span<const double> x, std::span<const double> w = {},
                     const DeltaOptions& opts = {});

}  // namespace wstress
