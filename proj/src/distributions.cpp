#include "wstress/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include <boost/math/distributions/lognormal.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "wstress/error.hpp"

namespace wstress {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_probability(double p) {
  require(std::isfinite(p) && p > 0.0 && p < 1.0, "quantile: probability must lie in (0,1)");
}

double std_normal_quantile(double p) {
  static const boost::math::normal_distribution<double> z(0.0, 1.0);
  return boost::math::quantile(z, p);
}

double std_normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

}  // namespace

std::vector<double> midpoint_grid(std::size_t n) {
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = midpoint(i, n);
  return u;
}

QuantileGrid::QuantileGrid(std::vector<double> q) : q_(std::move(q)) {
  require(q_.size() >= kMinSize, "QuantileGrid: need at least " + std::to_string(kMinSize) + " points");
  for (std::size_t i = 0; i < q_.size(); ++i) {
    require(std::isfinite(q_[i]), "QuantileGrid: non-finite value");
    if (i > 0) require(q_[i] >= q_[i - 1], "QuantileGrid: values must be nondecreasing");
  }
}

Empirical::Empirical(std::vector<double> s) : samples(std::move(s)) { std::sort(samples.begin(), samples.end()); }

void validate(const BaselineSpec& spec) {
  std::visit(overloaded{
                 [](const Lognormal& d) {
                   require(std::isfinite(d.mu), "lognormal: mu must be finite");
                   require(std::isfinite(d.sigma) && d.sigma > 0.0, "lognormal: sigma must be positive");
                 },
                 [](const Normal& d) {
                   require(std::isfinite(d.mu), "normal: mu must be finite");
                   require(std::isfinite(d.sigma) && d.sigma > 0.0, "normal: sigma must be positive");
                 },
                 [](const Gamma& d) {
                   require(std::isfinite(d.shape) && d.shape > 0.0, "gamma: shape must be positive");
                   require(std::isfinite(d.rate) && d.rate > 0.0, "gamma: rate must be positive");
                   require(std::isfinite(d.shift), "gamma: shift must be finite");
                 },
                 [](const Empirical& d) {
                   require(d.samples.size() >= 100, "empirical: need at least 100 samples");
                   for (double x : d.samples) require(std::isfinite(x), "empirical: non-finite sample");
                 },
             },
             spec);
}

std::string describe(const BaselineSpec& spec) {
  std::ostringstream os;
  os.precision(17);
  std::visit(overloaded{
                 [&](const Lognormal& d) { os << "lognormal(mu=" << d.mu << ", sigma=" << d.sigma << ")"; },
                 [&](const Normal& d) { os << "normal(mu=" << d.mu << ", sigma=" << d.sigma << ")"; },
                 [&](const Gamma& d) {
                   os << "gamma(shape=" << d.shape << ", rate=" << d.rate << ", shift=" << d.shift << ")";
                 },
                 [&](const Empirical& d) { os << "empirical(n=" << d.samples.size() << ")"; },
             },
             spec);
  return os.str();
}

double gamma_quantile(double shape, double p) {
  require(shape > 0.0, "gamma_quantile: shape must be positive");
  check_probability(p);
  // invert on the smaller tail
  return p > 0.5 ? boost::math::gamma_q_inv(shape, 1.0 - p) : boost::math::gamma_p_inv(shape, p);
}

double empirical_quantile(std::span<const double> sorted, double p) {
  require(!sorted.empty(), "empirical_quantile: empty sample");
  require(p >= 0.0 && p <= 1.0, "empirical_quantile: probability must lie in [0,1]");
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double quantile(const BaselineSpec& spec, double p) {
  check_probability(p);
  return std::visit(overloaded{
                        [&](const Lognormal& d) { return std::exp(d.mu + d.sigma * std_normal_quantile(p)); },
                        [&](const Normal& d) { return d.mu + d.sigma * std_normal_quantile(p); },
                        [&](const Gamma& d) { return d.shift + gamma_quantile(d.shape, p) / d.rate; },
                        [&](const Empirical& d) { return empirical_quantile(d.samples, p); },
                    },
                    spec);
}

double cdf(const BaselineSpec& spec, double y) {
  return std::visit(overloaded{
                        [&](const Lognormal& d) {
                          if (y <= 0.0) return 0.0;
                          return boost::math::cdf(boost::math::lognormal_distribution<double>(d.mu, d.sigma), y);
                        },
                        [&](const Normal& d) {
                          return boost::math::cdf(boost::math::normal_distribution<double>(d.mu, d.sigma), y);
                        },
                        [&](const Gamma& d) {
                          const double z = (y - d.shift) * d.rate;
                          return z <= 0.0 ? 0.0 : boost::math::gamma_p(d.shape, z);
                        },
                        [&](const Empirical& d) {
                          const auto it = std::upper_bound(d.samples.begin(), d.samples.end(), y);
                          return static_cast<double>(it - d.samples.begin()) / static_cast<double>(d.samples.size());
                        },
                    },
                    spec);
}

double pdf(const BaselineSpec& spec, double y) {
  return std::visit(overloaded{
                        [&](const Lognormal& d) {
                          if (y <= 0.0) return 0.0;
                          const double z = (std::log(y) - d.mu) / d.sigma;
                          return std_normal_pdf(z) / (y * d.sigma);
                        },
                        [&](const Normal& d) { return std_normal_pdf((y - d.mu) / d.sigma) / d.sigma; },
                        [&](const Gamma& d) {
                          const double z = (y - d.shift) * d.rate;
                          return z <= 0.0 ? 0.0 : d.rate * boost::math::gamma_p_derivative(d.shape, z);
                        },
                        [&](const Empirical& d) {
                          const double h = silverman_bandwidth(d.samples);
                          double s = 0.0;
                          for (double x : d.samples) s += std_normal_pdf((y - x) / h);
                          return s / (h * static_cast<double>(d.samples.size()));
                        },
                    },
                    spec);
}

QuantileGrid discretize(const BaselineSpec& spec, std::size_t n) {
  validate(spec);
  require(n >= QuantileGrid::kMinSize, "discretize: grid too small");
  std::vector<double> q(n);
  for (std::size_t i = 0; i < n; ++i) q[i] = quantile(spec, midpoint(i, n));
  // Root-finding noise must not break monotonicity.
  for (std::size_t i = 1; i < n; ++i) q[i] = std::max(q[i], q[i - 1]);
  return QuantileGrid(std::move(q));
}

double wasserstein2(const QuantileGrid& a, const QuantileGrid& b) {
  require(a.size() == b.size(), "wasserstein2: grid sizes differ");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(a.size()));
}

double grid_cdf(const QuantileGrid& g, double y) {
  const auto& q = g.q();
  const std::size_t n = q.size();
  if (y < q.front()) return 0.0;
  if (y >= q.back()) return 1.0;
  const auto k = static_cast<std::size_t>(std::upper_bound(q.begin(), q.end(), y) - q.begin()) - 1;
  const double base = midpoint(k, n);
  // q[k] <= y < q[k+1] by construction
  return base + (y - q[k]) / (q[k + 1] - q[k]) / static_cast<double>(n);
}

std::vector<double> grid_density_on(const QuantileGrid& g, std::span<const double> ys) {
  require(ys.size() >= 2, "grid_density_on: need at least two value points");
  const double dy = (ys.back() - ys.front()) / static_cast<double>(ys.size() - 1);
  require(dy > 0.0, "grid_density_on: value grid must be increasing");
  std::vector<double> f(ys.size());
  double left = grid_cdf(g, ys[0] - 0.5 * dy);
  for (std::size_t j = 0; j < ys.size(); ++j) {
    const double right = grid_cdf(g, ys[j] + 0.5 * dy);
    f[j] = (right - left) / dy;
    left = right;
  }
  return f;
}

DensityCurve cdf_and_density(const QuantileGrid& g, std::size_t value_grid_size) {
  require(g.size() >= QuantileGrid::kMinSize, "cdf_and_density: empty grid");
  require(value_grid_size >= 2, "cdf_and_density: value grid needs at least two points");
  DensityCurve out;
  const double lo = g.q().front();
  const double hi = g.q().back();
  if (!(hi > lo)) {
    out.single_atom = true;
    out.atom_value = lo;
    return out;
  }
  out.y.resize(value_grid_size);
  const double dy = (hi - lo) / static_cast<double>(value_grid_size - 1);
  for (std::size_t j = 0; j < value_grid_size; ++j) out.y[j] = lo + dy * static_cast<double>(j);
  out.y.back() = hi;
  out.f = grid_density_on(g, out.y);
  out.cell_width = dy;
  return out;
}

double trapezoid(std::span<const double> y, std::span<const double> f) {
  require(y.size() == f.size(), "trapezoid: length mismatch");
  double s = 0.0;
  for (std::size_t j = 1; j < y.size(); ++j) s += 0.5 * (f[j] + f[j - 1]) * (y[j] - y[j - 1]);
  return s;
}

double silverman_bandwidth(std::span<const double> x, std::span<const double> w) {
  require(!x.empty(), "silverman_bandwidth: empty sample");
  require(w.empty() || w.size() == x.size(), "silverman_bandwidth: weight length mismatch");
  const std::size_t n = x.size();
  auto weight = [&](std::size_t i) { return w.empty() ? 1.0 : w[i]; };
  double sw = 0.0, sw2 = 0.0, mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sw += weight(i);
    sw2 += weight(i) * weight(i);
    mean += weight(i) * x[i];
  }
  require(sw > 0.0, "silverman_bandwidth: total weight is zero");
  mean /= sw;
  double var = 0.0;
  for (std::size_t i = 0; i < n; ++i) var += weight(i) * (x[i] - mean) * (x[i] - mean);
  const double sd = std::sqrt(var / sw);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  auto wq = [&](double p) {
    double acc = 0.0;
    for (std::size_t k : order) {
      acc += weight(k);
      if (acc >= p * sw) return x[k];
    }
    return x[order.back()];
  };
  const double iqr = wq(0.75) - wq(0.25);
  double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
  if (!(spread > 0.0)) spread = 1e-8 * std::max(1.0, std::abs(mean));
  const double n_eff = sw * sw / sw2;
  return 0.9 * spread * std::pow(n_eff, -0.2);
}

std::vector<double> kde_on_grid(std::span<const double> x, std::span<const double> w, double bandwidth, double lo,
                                double hi, std::size_t m) {
  require(m >= 2 && hi > lo, "kde_on_grid: invalid grid");
  require(bandwidth > 0.0, "kde_on_grid: bandwidth must be positive");
  require(w.empty() || w.size() == x.size(), "kde_on_grid: weight length mismatch");
  const double dy = (hi - lo) / static_cast<double>(m - 1);
  std::vector<double> counts(m, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double wi = w.empty() ? 1.0 : w[i];
    total += wi;
    const double pos = (x[i] - lo) / dy;
    if (pos < 0.0 || pos > static_cast<double>(m - 1)) continue;
    auto k = static_cast<std::size_t>(pos);
    if (k >= m - 1) k = m - 2;
    const double frac = pos - static_cast<double>(k);
    counts[k] += wi * (1.0 - frac);
    counts[k + 1] += wi * frac;
  }
  require(total > 0.0, "kde_on_grid: total weight is zero");
  const auto reach = static_cast<std::size_t>(
      std::min(static_cast<double>(m - 1), std::ceil(7.0 * bandwidth / dy)));
  std::vector<double> kern(reach + 1);
  for (std::size_t l = 0; l <= reach; ++l) kern[l] = std_normal_pdf(static_cast<double>(l) * dy / bandwidth) / bandwidth;

  std::vector<double> f(m, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    const double c = counts[k];
    if (c == 0.0) continue;
    const std::size_t a = k >= reach ? k - reach : 0;
    const std::size_t b = std::min(m - 1, k + reach);
    for (std::size_t j = a; j <= b; ++j) f[j] += c * kern[j > k ? j - k : k - j];
  }
  for (double& v : f) v /= total;
  return f;
}

double interp_uniform(double lo, double step, std::span<const double> ys, double x) {
  const double pos = (x - lo) / step;
  if (pos <= 0.0) return ys.front();
  const double last = static_cast<double>(ys.size() - 1);
  if (pos >= last) return ys.back();
  const auto k = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(k);
  return ys[k] + frac * (ys[k + 1] - ys[k]);
}

}  // namespace wstress
