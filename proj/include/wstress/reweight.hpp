#pragma once

#include <span>
#include <string>
#include <vector>

#include "wstress/distributions.hpp"

namespace wstress {

/// Input columns X (column-major) and the output Y.
struct SampleSet {
  std::vector<std::vector<double>> X;
  std::vector<double> Y;
  std::vector<std::string> names;

  static constexpr std::size_t kMinSamples = 100;

  std::size_t size() const { return Y.size(); }
  /// Throws InvalidArgument on shape mismatch, non-finite entries or too few rows.
  void validate() const;
  /// Column by name; throws if absent.
  const std::vector<double>& column(const std::string& name) const;
};

struct WeightSet {
  std::vector<double> w;
  std::size_t zero_count = 0;
  /// More than 5% of the weights are zero.
  bool warning = false;
  /// Width of the value cell used for the density ratio; stressed atoms are
  /// spread over one such cell.
  double bin_width = 0.0;

  std::size_t size() const { return w.size(); }
  static WeightSet uniform(std::size_t n);
};

struct RnOptions {
  std::size_t value_grid_size = kDefaultGridSize;
  double zero_warning_fraction = 0.05;
};

/// dQ*/dP at each y: stressed density over baseline density, normalised to
/// mean one. Parametric baselines: the stressed quantile is read as the exact
/// baseline quantile plus the grid displacement G - F (linear between
/// midpoints), so an identity stress gives weights of exactly one and a
/// shifted tail keeps its exact shape; past the grid ends the displacement is
/// held at its end value. Empirical baselines compare a Gaussian KDE
/// of `y` (Silverman bandwidth of the baseline sample) with the KDE of `y`
/// moved by G(u) - F(u) at each sample's mid-rank u.
WeightSet rn_weights(std::span<const double> y, const BaselineSpec& baseline, const QuantileGrid& stressed,
                     const RnOptions& opts = {});

struct StepCurve {
  std::vector<double> x;
  /// Value right of (and at) x[k].
  std::vector<double> f;

  double operator()(double at) const;
};

/// x -> (1/n) sum w_i 1{values_i <= x}; ties merged.
StepCurve stressed_cdf(std::span<const double> values, const WeightSet& w);

/// (1/n) sum w_i s_i.
double stressed_expectation(std::span<const double> s, const WeightSet& w);

/// Left-continuous weighted quantile: smallest value with weighted CDF >= p.
double weighted_quantile(std::span<const double> values, std::span<const double> w, double p);

}  // namespace wstress
