#pragma once

#include <span>
#include <vector>

namespace wstress {

/// A function sampled on strictly increasing abscissae in (0,1).
struct GridFunction {
  std::vector<double> u;
  std::vector<double> v;

  GridFunction() = default;
  GridFunction(std::vector<double> abscissae, std::vector<double> values);
};

/// Weighted isotonic regression by pool-adjacent-violators.
///
/// Returns the unique minimiser of sum_i w_i (x_i - values_i)^2 over
/// nondecreasing x. Zero weights are allowed as long as one weight is
/// positive; a block made entirely of zero-weight points takes the plain
/// mean of its values.
std::vector<double> pav(std::span<const double> values, std::span<const double> weights);

/// Smoothed PAV: minimises
///   sum_i w_i (x_i - values_i)^2 + sum_i penalty_i (x_{i+1} - x_i)^2
/// subject to x nondecreasing. `penalty` has length n-1.
///
/// Blocks are pooled left to right while the reduced tridiagonal system is
/// kept in forward-eliminated form, so each push/merge is O(1) and the value
/// of the last two blocks is available without back-substitution. A KKT
/// check on the final solution falls back to an active-set repair if the
/// single left-to-right pass did not land on the optimum.
std::vector<double> spav_penalised(std::span<const double> values, std::span<const double> weights,
                                   std::span<const double> penalty);

/// SPAV with penalty_i = zeta / (u_{i+1} - u_i)^2. zeta == 0 is exactly pav().
std::vector<double> spav(std::span<const double> values, std::span<const double> weights,
                         std::span<const double> u, double zeta);

/// SPAV on the uniform midpoint grid (i - 0.5)/n.
std::vector<double> spav(std::span<const double> values, std::span<const double> weights, double zeta);

/// Grid-sampled weighted isotonic projection; zeta > 0 switches to SPAV.
GridFunction project(const GridFunction& f, std::span<const double> w, double zeta = 0.0);

}  // namespace wstress
