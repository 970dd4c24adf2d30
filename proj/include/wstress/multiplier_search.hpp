#pragma once

#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace wstress {

using ResidualFn = std::function<std::vector<double>(std::span<const double>)>;

struct SearchOptions {
  int max_iter = 200;
  /// Iterate past the tolerance down to inner_factor * tol when progress allows.
  double inner_factor = 1e-3;
};

struct SearchResult {
  std::vector<double> lambda;
  std::vector<double> residual;
  bool converged = false;
  int iterations = 0;
  int evaluations = 0;
};

/// Find lambda within [lower, upper] with |residual_k(lambda)| <= tol_k.
///
/// One multiplier: bracket-and-bisect (Illinois false position). Several:
/// damped Newton with a forward-difference Jacobian, falling back to a
/// coordinate-wise bisection sweep when the Jacobian is singular or the line
/// search stalls. Never throws on non-convergence; check `converged`.
SearchResult multiplier_search(const ResidualFn& residual, std::vector<double> lambda0, std::vector<double> lower,
                               std::vector<double> upper, std::vector<double> tol, const SearchOptions& opts = {});

/// Convenience overload: unbounded, lambda0 = 0.
SearchResult multiplier_search(const ResidualFn& residual, std::size_t dim, std::vector<double> tol,
                               const SearchOptions& opts = {});

}  // namespace wstress
