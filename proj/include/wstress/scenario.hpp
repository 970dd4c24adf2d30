#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "wstress/reweight.hpp"
#include "wstress/stress_solvers.hpp"

namespace wstress {

using Location = std::array<double, 2>;

struct SpatialConfig {
  static constexpr std::uint64_t kLocationSeed = 20210917;

  std::vector<Location> locations = default_locations();
  std::vector<double> theta_values{0.0, 0.4, 5.0};
  std::vector<double> theta_probs{0.05, 0.6, 0.35};
  /// Location m (1-based) is shift + Gamma(shape, rate_scale / m).
  double shape = 5.0;
  double rate_scale = 0.2;
  double shift = 25.0;
  std::size_t n_samples = 100000;
  std::uint64_t seed = 42;

  /// Ten points from Uniform([0,10]^2).
  static std::vector<Location> default_locations(std::uint64_t seed = kLocationSeed);
  void validate() const;
};

struct ScenarioOutput {
  /// Columns L1..L10 and Y = sum of the columns.
  SampleSet samples;
  /// Regime index into theta_values per sample.
  std::vector<int> regime;
  std::vector<double> theta;
};

/// rho_ij = exp(-theta |z_i - z_j|).
std::vector<std::vector<double>> correlation_matrix(const std::vector<Location>& z, double theta);

ScenarioOutput generate(const SpatialConfig& config);

/// Relative bumps on (E u(Y), ES_0.8, ES_0.95) with HARA(1, 5, 0.5).
struct Table1Stress {
  double utility_bump;
  double es80_bump;
  double es95_bump;
};
inline constexpr Table1Stress kTable1Stress1{0.0, 0.0, 0.01};
inline constexpr Table1Stress kTable1Stress2{0.01, 0.01, 0.03};

/// target = base + bump * |base|
UtilityRm table1_spec(const QuantileGrid& baseline, const Table1Stress& bump);

struct Table1Result {
  QuantileGrid baseline;
  UtilityRm spec1, spec2;
  StressedModel stress1, stress2;
};

Table1Result table1_stresses(const ScenarioOutput& output, std::size_t grid_n = kDefaultGridSize,
                             const SolverOptions& opts = {});

}  // namespace wstress
