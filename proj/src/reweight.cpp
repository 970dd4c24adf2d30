#include "wstress/reweight.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <variant>

#include "wstress/error.hpp"

namespace wstress {

void SampleSet::validate() const {
  require(names.size() == X.size(), "samples: column names and columns differ in number");
  require(Y.size() >= kMinSamples, "samples: need at least 100 rows");
  for (double v : Y) require(std::isfinite(v), "samples: non-finite output value");
  for (const auto& col : X) {
    require(col.size() == Y.size(), "samples: column length differs from Y");
    for (double v : col) require(std::isfinite(v), "samples: non-finite input value");
  }
}

const std::vector<double>& SampleSet::column(const std::string& name) const {
  for (std::size_t j = 0; j < names.size(); ++j)
    if (names[j] == name) return X[j];
  throw InvalidArgument("samples: no column named '" + name + "'");
}

WeightSet WeightSet::uniform(std::size_t n) {
  WeightSet w;
  w.w.assign(n, 1.0);
  return w;
}

namespace {

// Quantile grid read at u, linear between midpoints and flat past the ends.
double grid_value(const std::vector<double>& q, double u) {
  const double n = static_cast<double>(q.size());
  const double x = u * n - 0.5;
  if (x <= 0.0) return q.front();
  if (x >= n - 1.0) return q.back();
  const auto i = static_cast<std::size_t>(x);
  const double t = x - static_cast<double>(i);
  return q[i] + t * (q[i + 1] - q[i]);
}

std::vector<double> cell_density(const std::vector<double>& ys, double dy, const auto& cdf) {
  std::vector<double> f(ys.size());
  double left = cdf(ys[0] - 0.5 * dy);
  for (std::size_t j = 0; j < ys.size(); ++j) {
    const double right = cdf(ys[j] + 0.5 * dy);
    f[j] = std::max(0.0, right - left) / dy;
    left = right;
  }
  return f;
}

}  // namespace

WeightSet rn_weights(std::span<const double> y, const BaselineSpec& baseline, const QuantileGrid& stressed,
                     const RnOptions& opts) {
  require(!y.empty(), "rn_weights: no samples");
  require(opts.value_grid_size >= 2, "rn_weights: value grid too small");
  for (double v : y) require(std::isfinite(v), "rn_weights: non-finite sample");
  validate(baseline);
  const std::size_t n = stressed.size();
  const QuantileGrid base = discretize(baseline, n);
  const auto& g = stressed.q();
  const auto& f = base.q();

  const auto [ymin, ymax] = std::minmax_element(y.begin(), y.end());
  const double lo = std::min({*ymin, g.front(), f.front()});
  double hi = std::max({*ymax, g.back(), f.back()});
  if (!(hi > lo)) hi = lo + 1.0;
  const std::size_t m = opts.value_grid_size;
  const double dy = (hi - lo) / static_cast<double>(m - 1);
  std::vector<double> ys(m);
  for (std::size_t j = 0; j < m; ++j) ys[j] = lo + dy * static_cast<double>(j);

  std::vector<double> fd, gd;
  if (std::holds_alternative<Empirical>(baseline)) {
    // baseline: KDE of the sample itself; stressed: KDE of the same sample
    // moved by the quantile displacement at its mid-rank
    const auto& sorted = std::get<Empirical>(baseline).samples;
    const double h = silverman_bandwidth(sorted);
    const double N = static_cast<double>(y.size());
    std::vector<std::size_t> order(y.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return y[a] < y[b]; });
    std::vector<double> moved(y.size());
    for (std::size_t r = 0; r < order.size(); ++r) {
      const double u = (static_cast<double>(r) + 0.5) / N;
      moved[order[r]] = y[order[r]] + grid_value(g, u) - grid_value(f, u);
    }
    const auto [mmin, mmax] = std::minmax_element(moved.begin(), moved.end());
    const double pad = 4.0 * h;
    const double klo = std::min(lo, *mmin) - pad, khi = std::max(hi, *mmax) + pad;
    const double kdy = (khi - klo) / static_cast<double>(m - 1);
    const auto fk = kde_on_grid(y, {}, h, klo, khi, m);
    const auto gk = kde_on_grid(moved, {}, h, klo, khi, m);
    fd.resize(m);
    gd.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
      fd[j] = interp_uniform(klo, kdy, fk, ys[j]);
      gd[j] = interp_uniform(klo, kdy, gk, ys[j]);
    }
  } else {
    // Stressed quantile read as exact baseline quantile plus the grid
    // displacement G - F interpolated between midpoints, sampled kSub times
    // per cell; the baseline is the same construction with zero displacement.
    // Past the outer midpoints both continue as exact (shifted) tails.
    constexpr std::size_t kSub = 16;
    const std::size_t K = n * kSub;
    const double u0 = midpoint(0, n), u1 = midpoint(n - 1, n);
    std::vector<double> disp(n);
    for (std::size_t i = 0; i < n; ++i) disp[i] = g[i] - f[i];
    std::vector<double> fv(K), gv(K);
    for (std::size_t k = 0; k < K; ++k) {
      const double u = u0 + (u1 - u0) * static_cast<double>(k) / static_cast<double>(K - 1);
      fv[k] = quantile(baseline, u);
      gv[k] = fv[k] + grid_value(disp, u);
    }
    std::sort(fv.begin(), fv.end());
    std::sort(gv.begin(), gv.end());
    auto make_cdf = [&](const std::vector<double>& pts, double d_lo, double d_hi) {
      return [&, d_lo, d_hi](double v) {
        if (v < pts.front()) return cdf(baseline, v - d_lo);
        if (v >= pts.back()) return cdf(baseline, v - d_hi);
        const auto it = std::upper_bound(pts.begin(), pts.end(), v);
        const auto k = static_cast<std::size_t>(it - pts.begin()) - 1;
        const double span = pts[k + 1] - pts[k];
        const double t = span > 0.0 ? (v - pts[k]) / span : 1.0;
        return u0 + (u1 - u0) * (static_cast<double>(k) + t) / static_cast<double>(K - 1);
      };
    };
    fd = cell_density(ys, dy, make_cdf(fv, 0.0, 0.0));
    gd = cell_density(ys, dy, make_cdf(gv, disp.front(), disp.back()));
  }

  WeightSet out;
  out.bin_width = dy;
  out.w.resize(y.size());
  double total = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double at = y[i];
    const double gv = interp_uniform(lo, dy, gd, at);
    double fv = interp_uniform(lo, dy, fd, at);
    if (!(fv > kDensityFloor) && !std::holds_alternative<Empirical>(baseline)) fv = pdf(baseline, at);
    double w = gv > kDensityFloor ? gv / std::max(fv, kDensityFloor) : 0.0;
    if (w == 0.0) ++out.zero_count;
    out.w[i] = w;
    total += w;
  }
  require(total > 0.0, "rn_weights: stressed density vanishes at every sample");
  const double scale = static_cast<double>(y.size()) / total;
  for (double& w : out.w) w *= scale;
  out.warning = static_cast<double>(out.zero_count) > opts.zero_warning_fraction * static_cast<double>(y.size());
  return out;
}

double StepCurve::operator()(double at) const {
  const auto it = std::upper_bound(x.begin(), x.end(), at);
  if (it == x.begin()) return 0.0;
  return f[static_cast<std::size_t>(it - x.begin()) - 1];
}

StepCurve stressed_cdf(std::span<const double> values, const WeightSet& w) {
  require(values.size() == w.size(), "stressed_cdf: length mismatch");
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  StepCurve c;
  const double n = static_cast<double>(values.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    acc += w.w[order[k]] / n;
    const double v = values[order[k]];
    if (!c.x.empty() && c.x.back() == v) {
      c.f.back() = acc;
    } else {
      c.x.push_back(v);
      c.f.push_back(acc);
    }
  }
  return c;
}

double stressed_expectation(std::span<const double> s, const WeightSet& w) {
  require(s.size() == w.size(), "stressed_expectation: length mismatch");
  require(!s.empty(), "stressed_expectation: empty input");
  double acc = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) acc += w.w[i] * s[i];
  return acc / static_cast<double>(s.size());
}

double weighted_quantile(std::span<const double> values, std::span<const double> w, double p) {
  require(values.size() == w.size() && !values.empty(), "weighted_quantile: length mismatch");
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  require(total > 0.0, "weighted_quantile: total weight is zero");
  double acc = 0.0;
  for (std::size_t k : order) {
    acc += w[k];
    if (acc >= p * total) return values[k];
  }
  return values[order.back()];
}

}  // namespace wstress
