#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace wstress {

inline constexpr std::size_t kDefaultGridSize = 4096;
inline constexpr double kDensityFloor = 1e-12;

/// u_i = (i + 0.5) / n for zero-based i.
inline double midpoint(std::size_t i, std::size_t n) {
  return (static_cast<double>(i) + 0.5) / static_cast<double>(n);
}

std::vector<double> midpoint_grid(std::size_t n);

/// A quantile function sampled on the uniform midpoint grid.
///
/// Cell i covers ((i)/n, (i+1)/n] and carries probability 1/n; q[i] is the
/// quantile at the cell midpoint. Values are nondecreasing and finite.
class QuantileGrid {
 public:
  static constexpr std::size_t kMinSize = 2;

  QuantileGrid() = default;
  explicit QuantileGrid(std::vector<double> q);

  std::size_t size() const { return q_.size(); }
  const std::vector<double>& q() const { return q_; }
  double operator[](std::size_t i) const { return q_[i]; }
  double u(std::size_t i) const { return midpoint(i, q_.size()); }
  std::vector<double> abscissae() const { return midpoint_grid(q_.size()); }

 private:
  std::vector<double> q_;
};

struct Lognormal {
  double mu;
  double sigma;
};
struct Gamma {
  double shape;
  double rate;
  double shift = 0.0;
};
struct Normal {
  double mu;
  double sigma;
};
/// Empirical distribution of a sample; samples are kept sorted.
struct Empirical {
  std::vector<double> samples;
  explicit Empirical(std::vector<double> s);
};

using BaselineSpec = std::variant<Lognormal, Gamma, Normal, Empirical>;

void validate(const BaselineSpec& spec);
std::string describe(const BaselineSpec& spec);

double quantile(const BaselineSpec& spec, double p);
double cdf(const BaselineSpec& spec, double y);
/// Parametric pdf, or a Gaussian KDE with Silverman bandwidth for empirical specs.
double pdf(const BaselineSpec& spec, double y);

/// Quantile of Gamma(shape, 1).
double gamma_quantile(double shape, double p);

/// Type-7 (linear interpolation of order statistics) quantile of a sorted sample.
double empirical_quantile(std::span<const double> sorted, double p);

QuantileGrid discretize(const BaselineSpec& spec, std::size_t n = kDefaultGridSize);

double wasserstein2(const QuantileGrid& a, const QuantileGrid& b);

/// CDF of the distribution whose quantile function interpolates the grid
/// linearly between midpoints. Ties produce atoms; the half cells at either
/// end sit as atoms on q[0] and q[n-1].
double grid_cdf(const QuantileGrid& g, double y);

struct DensityCurve {
  std::vector<double> y;
  std::vector<double> f;
  /// The grid is a single point mass; y/f are empty.
  bool single_atom = false;
  double atom_value = 0.0;
  double cell_width = 0.0;
};

/// Density on an equally spaced value grid over [q_0, q_{n-1}]. Each value
/// cell receives the probability mass of [y - dy/2, y + dy/2], so atoms show
/// up as one-cell spikes and gaps as zeros.
DensityCurve cdf_and_density(const QuantileGrid& g, std::size_t value_grid_size = kDefaultGridSize);

/// Cell-mass density of `g` on the equally spaced points `ys` (at least two).
std::vector<double> grid_density_on(const QuantileGrid& g, std::span<const double> ys);

double trapezoid(std::span<const double> y, std::span<const double> f);

// --- kernel density estimation ---------------------------------------------

/// 0.9 * min(sd, IQR/1.34) * n_eff^{-1/5}; weights may be empty.
double silverman_bandwidth(std::span<const double> x, std::span<const double> w = {});

/// Gaussian KDE evaluated on the uniform grid lo..hi (m points) by linear
/// binning and direct convolution. Mass outside [lo, hi] is dropped, not
/// renormalised. Weights may be empty (all ones).
std::vector<double> kde_on_grid(std::span<const double> x, std::span<const double> w, double bandwidth, double lo,
                                double hi, std::size_t m);

/// Linear interpolation of (xs, ys) at x with xs uniform; clamps outside.
double interp_uniform(double lo, double step, std::span<const double> ys, double x);

}  // namespace wstress
