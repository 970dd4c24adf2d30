#include "wstress/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "wstress/error.hpp"

namespace wstress {

namespace {

double sample_quantile(std::span<const double> x, double alpha) {
  require(!x.empty(), "s-function: empty sample");
  std::vector<double> v(x.begin(), x.end());
  const auto n = static_cast<double>(v.size());
  auto k = static_cast<std::size_t>(std::max(0.0, std::ceil(alpha * n - 1e-9) - 1.0));
  k = std::min(k, v.size() - 1);
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
  return v[k];
}

std::vector<std::size_t> sorted_order(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  return order;
}

}  // namespace

std::string SFunction::tag() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Identity:
      return "x";
    case Kind::Power:
      os << "x^" << param;
      break;
    case Kind::TailIndicator:
      os << "tail" << param;
      break;
    case Kind::JointTailIndicator:
      os << "joint_tail" << param;
      break;
    case Kind::Custom:
      return custom_name;
  }
  return os.str();
}

std::vector<double> SFunction::apply(std::span<const double> x) const {
  std::vector<double> out(x.size());
  switch (kind) {
    case Kind::Identity:
      std::copy(x.begin(), x.end(), out.begin());
      break;
    case Kind::Power:
      for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::pow(x[i], param);
      break;
    case Kind::TailIndicator:
    case Kind::JointTailIndicator: {
      require(param > 0.0 && param < 1.0, "s-function: tail level must lie in (0,1)");
      const double v = sample_quantile(x, param);
      for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] > v ? 1.0 : 0.0;
      break;
    }
    case Kind::Custom:
      require(static_cast<bool>(custom), "s-function: custom function missing");
      for (std::size_t i = 0; i < x.size(); ++i) out[i] = custom(x[i]);
      break;
  }
  for (double v : out) require(std::isfinite(v), "s-function: non-finite value on the sample");
  return out;
}

std::vector<double> SFunction::apply(std::span<const double> xi, std::span<const double> xj) const {
  require(xi.size() == xj.size(), "s-function: length mismatch");
  auto a = apply(xi);
  const auto b = apply(xj);
  for (std::size_t k = 0; k < a.size(); ++k) a[k] *= b[k];
  return a;
}

SensitivityResult reverse_sensitivity(std::span<const double> s, const WeightSet& w) {
  require(s.size() == w.size(), "reverse_sensitivity: length mismatch");
  require(!s.empty(), "reverse_sensitivity: empty input");
  const std::size_t n = s.size();
  const auto nd = static_cast<double>(n);
  // Stable sort on s: tied s values can take their weights in any order
  // without changing the bound.
  const auto order = sorted_order(s);
  std::vector<double> ws = w.w;
  std::sort(ws.begin(), ws.end());

  double sum_s = 0.0, sum_ws = 0.0, hi = 0.0, lo = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double sv = s[order[k]];
    sum_s += sv;
    sum_ws += w.w[order[k]] * sv;
    hi += ws[k] * sv;
    lo += ws[n - 1 - k] * sv;
  }
  SensitivityResult r;
  r.mean_s = sum_s / nd;
  r.numerator = sum_ws / nd - r.mean_s;
  r.max_bound = hi / nd - r.mean_s;
  r.min_bound = lo / nd - r.mean_s;
  if (std::abs(r.numerator) <= 1e-12) {
    r.S = 0.0;
  } else if (r.numerator > 0.0) {
    r.S = r.max_bound > 0.0 ? r.numerator / r.max_bound : 0.0;
  } else {
    r.S = r.min_bound < 0.0 ? -(r.numerator / r.min_bound) : 0.0;
  }
  r.S = std::clamp(r.S, -1.0, 1.0);
  return r;
}

SensitivityResult bivariate_reverse_sensitivity(std::span<const double> s_ij, const WeightSet& w) {
  return reverse_sensitivity(s_ij, w);
}

double delta_measure(std::span<const double> y, std::span<const double> x, std::span<const double> w,
                     const DeltaOptions& opts) {
  require(y.size() == x.size(), "delta_measure: length mismatch");
  require(w.empty() || w.size() == y.size(), "delta_measure: weight length mismatch");
  require(opts.bins >= 1 && opts.grid_size >= 2, "delta_measure: invalid options");
  const std::size_t n = y.size();
  require(n >= opts.bins * opts.min_per_bin, "delta_measure: too few samples for the requested bins");
  std::vector<double> wt(n, 1.0);
  if (!w.empty()) std::copy(w.begin(), w.end(), wt.begin());
  const double total = std::accumulate(wt.begin(), wt.end(), 0.0);
  require(total > 0.0, "delta_measure: total weight is zero");

  const double lo = weighted_quantile(y, wt, opts.lower_p);
  double hi = weighted_quantile(y, wt, opts.upper_p);
  if (!(hi > lo)) hi = lo + 1.0;
  const std::size_t m = opts.grid_size;
  const double dy = (hi - lo) / static_cast<double>(m - 1);
  std::vector<double> grid(m);
  for (std::size_t j = 0; j < m; ++j) grid[j] = lo + dy * static_cast<double>(j);

  const auto f = kde_on_grid(y, wt, silverman_bandwidth(y, wt), lo, hi, m);

  // equal-probability bins in x-rank order
  const auto order = sorted_order(x);
  std::vector<std::vector<std::size_t>> members(opts.bins);
  double acc = 0.0;
  for (std::size_t k : order) {
    const double mid = (acc + 0.5 * wt[k]) / total;
    acc += wt[k];
    auto b = static_cast<std::size_t>(mid * static_cast<double>(opts.bins));
    members[std::min(b, opts.bins - 1)].push_back(k);
  }

  double xi = 0.0;
  std::vector<double> yb, wb, diff(m);
  for (const auto& idx : members) {
    if (idx.empty()) continue;
    require(idx.size() >= opts.min_per_bin, "delta_measure: fewer than the minimum samples in a bin");
    yb.clear();
    wb.clear();
    for (std::size_t k : idx) {
      yb.push_back(y[k]);
      wb.push_back(wt[k]);
    }
    const double pb = std::accumulate(wb.begin(), wb.end(), 0.0) / total;
    if (pb <= 0.0) continue;
    const auto fb = kde_on_grid(yb, wb, silverman_bandwidth(yb, wb), lo, hi, m);
    for (std::size_t j = 0; j < m; ++j) diff[j] = std::abs(f[j] - fb[j]);
    xi += pb * 0.5 * trapezoid(grid, diff);
  }
  return std::clamp(xi, 0.0, 1.0);
}

}  // namespace wstress
