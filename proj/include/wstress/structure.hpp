#pragma once

#include <span>
#include <string>
#include <vector>

#include "wstress/distributions.hpp"

namespace wstress {

struct StructureFlag {
  std::string kind;  // "flat" or "jump"
  double u0;
  /// Grid span of the flat run, or the cell with the largest increment.
  std::size_t first;
  std::size_t last;

  std::string str() const;
};

/// Tie run of at least `min_run` grid points whose u-range straddles u0
/// (or lies within `reach` of it).
bool find_flat(const QuantileGrid& g, double u0, StructureFlag* out = nullptr, std::size_t min_run = 3,
               double reach = 0.0);

/// Largest increment within +-`window` cells of u0 exceeds `factor` times the
/// baseline's largest increment in the same window.
bool find_jump(const QuantileGrid& baseline, const QuantileGrid& stressed, double u0, StructureFlag* out = nullptr,
               std::size_t window = 2, double factor = 10.0);

/// Run both detectors at every point of `where`; flats may sit within 0.02 of it.
std::vector<StructureFlag> detect_structure(const QuantileGrid& baseline, const QuantileGrid& stressed,
                                            std::span<const double> where);

/// Largest |q_{i+1} - q_i| over the grid.
double max_increment(const QuantileGrid& g);

/// Largest |(q_{i+2} - q_{i+1}) - (q_{i+1} - q_i)|.
double max_increment_change(const QuantileGrid& g);

}  // namespace wstress
