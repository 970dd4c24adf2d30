#include "wstress/structure.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace wstress {

std::string StructureFlag::str() const {
  std::ostringstream os;
  os << kind << "@" << u0;
  return os.str();
}

bool find_flat(const QuantileGrid& g, double u0, StructureFlag* out, std::size_t min_run, double reach) {
  const auto& q = g.q();
  const std::size_t n = q.size();
  const double tol = 1e-12 * std::max(1.0, std::abs(q.back() - q.front()));
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && q[j + 1] - q[i] <= tol) ++j;
    if (j - i + 1 >= min_run) {
      // cells i..j cover (i/n, (j+1)/n]
      const double a = static_cast<double>(i) / static_cast<double>(n) - reach;
      const double b = static_cast<double>(j + 1) / static_cast<double>(n) + reach;
      if (a < u0 && u0 < b) {
        if (out) *out = {"flat", u0, i, j};
        return true;
      }
    }
    i = j + 1;
  }
  return false;
}

bool find_jump(const QuantileGrid& baseline, const QuantileGrid& stressed, double u0, StructureFlag* out,
               std::size_t window, double factor) {
  const auto& f = baseline.q();
  const auto& g = stressed.q();
  const std::size_t n = g.size();
  if (n < 2 || f.size() != n) return false;
  const auto c = static_cast<std::ptrdiff_t>(std::floor(u0 * static_cast<double>(n)));
  const auto w = static_cast<std::ptrdiff_t>(window);
  const auto lo = std::max<std::ptrdiff_t>(0, c - w - 1);
  const auto hi = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(n) - 2, c + w);
  double best = 0.0, ref = 0.0;
  std::size_t at = 0;
  for (auto i = lo; i <= hi; ++i) {
    const double dg = g[i + 1] - g[i];
    if (dg > best) {
      best = dg;
      at = static_cast<std::size_t>(i);
    }
    ref = std::max(ref, f[i + 1] - f[i]);
  }
  if (best > factor * ref && best > 0.0) {
    if (out) *out = {"jump", u0, at, at + 1};
    return true;
  }
  return false;
}

std::vector<StructureFlag> detect_structure(const QuantileGrid& baseline, const QuantileGrid& stressed,
                                            std::span<const double> where) {
  // a flat induced by lowering a tail measure sits just left of its level
  constexpr double reach = 0.02;
  std::vector<StructureFlag> flags;
  for (double u0 : where) {
    StructureFlag f;
    if (find_flat(stressed, u0, &f, 3, reach)) flags.push_back(f);
    if (find_jump(baseline, stressed, u0, &f)) flags.push_back(f);
  }
  return flags;
}

double max_increment(const QuantileGrid& g) {
  double m = 0.0;
  for (std::size_t i = 0; i + 1 < g.size(); ++i) m = std::max(m, std::abs(g[i + 1] - g[i]));
  return m;
}

double max_increment_change(const QuantileGrid& g) {
  double m = 0.0;
  for (std::size_t i = 0; i + 2 < g.size(); ++i) m = std::max(m, std::abs((g[i + 2] - g[i + 1]) - (g[i + 1] - g[i])));
  return m;
}

}  // namespace wstress
