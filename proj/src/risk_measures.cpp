#include "wstress/risk_measures.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wstress/error.hpp"

namespace wstress {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void normalise(std::vector<double>& gamma, const std::string& what) {
  double s = 0.0;
  for (double g : gamma) {
    require(std::isfinite(g) && g >= 0.0, what + ": weights must be finite and nonnegative");
    s += g;
  }
  require(s > 0.0, what + ": weight vanishes on this grid");
  const double scale = static_cast<double>(gamma.size()) / s;
  for (double& g : gamma) g *= scale;
}

}  // namespace

std::string DistortionWeight::label() const {
  std::ostringstream os;
  os.precision(10);
  std::visit(overloaded{
                 [&](const EsTag& t) { os << "ES(" << t.alpha << ")"; },
                 [&](const AlphaBetaTag& t) { os << "AlphaBeta(" << t.alpha << "," << t.beta << "," << t.p << ")"; },
                 [&](const RvarTag& t) { os << "RVaR(" << t.alpha << "," << t.beta << ")"; },
                 [&](const MeanTag&) { os << "Mean"; },
                 [&](const CustomTag&) { os << "Custom"; },
             },
             tag);
  return os.str();
}

std::vector<double> DistortionWeight::breakpoints() const {
  return std::visit(overloaded{
                        [](const EsTag& t) { return t.alpha > 0.0 ? std::vector<double>{t.alpha} : std::vector<double>{}; },
                        [](const AlphaBetaTag& t) {
                          return t.alpha == t.beta ? std::vector<double>{t.alpha} : std::vector<double>{t.beta, t.alpha};
                        },
                        [](const RvarTag& t) {
                          std::vector<double> b;
                          if (t.alpha > 0.0) b.push_back(t.alpha);
                          if (t.beta < 1.0) b.push_back(t.beta);
                          return b;
                        },
                        [](const MeanTag&) { return std::vector<double>{}; },
                        [](const CustomTag&) { return std::vector<double>{}; },
                    },
                    tag);
}

bool DistortionWeight::nondecreasing() const {
  double top = 0.0;
  for (double g : gamma) top = std::max(top, g);
  const double tol = 1e-12 * std::max(1.0, top);
  for (std::size_t i = 1; i < gamma.size(); ++i)
    if (gamma[i] < gamma[i - 1] - tol) return false;
  return true;
}

double DistortionWeight::squared_mean() const {
  double s = 0.0;
  for (double g : gamma) s += g * g;
  return s / static_cast<double>(gamma.size());
}

DistortionWeight make_gamma(const WeightTag& tag, std::size_t n) {
  require(n >= QuantileGrid::kMinSize, "make_gamma: grid too small");
  DistortionWeight w{tag, std::vector<double>(n, 0.0)};
  std::visit(overloaded{
                 [&](const EsTag& t) {
                   require(t.alpha >= 0.0 && t.alpha < 1.0, "ES: alpha must lie in [0,1)");
                   // indicator at the midpoints, no fractional cells
                   for (std::size_t i = 0; i < n; ++i) w.gamma[i] = midpoint(i, n) > t.alpha ? 1.0 / (1.0 - t.alpha) : 0.0;
                   normalise(w.gamma, "ES");
                 },
                 [&](const AlphaBetaTag& t) {
                   require(t.beta > 0.0 && t.beta <= t.alpha && t.alpha < 1.0,
                           "AlphaBeta: need 0 < beta <= alpha < 1");
                   require(t.p >= 0.0 && t.p <= 1.0, "AlphaBeta: p must lie in [0,1]");
                   const double eta = t.p * t.beta + (1.0 - t.p) * (1.0 - t.alpha);
                   require(eta > 0.0, "AlphaBeta: degenerate normaliser");
                   for (std::size_t i = 0; i < n; ++i) {
                     const double u = midpoint(i, n);
                     // u > alpha (not >=) so that p = 0 reproduces ES exactly on the grid
                     w.gamma[i] = (t.p * (u < t.beta ? 1.0 : 0.0) + (1.0 - t.p) * (u > t.alpha ? 1.0 : 0.0)) / eta;
                   }
                   normalise(w.gamma, "AlphaBeta");
                 },
                 [&](const RvarTag& t) {
                   require(t.alpha >= 0.0 && t.alpha < t.beta && t.beta <= 1.0, "RVaR: need 0 <= alpha < beta <= 1");
                   // exact overlap of (alpha, beta] with each cell so narrow windows still see one cell
                   const double dn = static_cast<double>(n);
                   for (std::size_t i = 0; i < n; ++i) {
                     const double lo = static_cast<double>(i) / dn;
                     const double hi = static_cast<double>(i + 1) / dn;
                     const double overlap = std::max(0.0, std::min(hi, t.beta) - std::max(lo, t.alpha));
                     w.gamma[i] = overlap * dn / (t.beta - t.alpha);
                   }
                   normalise(w.gamma, "RVaR");
                 },
                 [&](const MeanTag&) { std::fill(w.gamma.begin(), w.gamma.end(), 1.0); },
                 [&](const CustomTag& t) {
                   require(t.gamma.size() == n, "custom weight: length differs from grid size");
                   w.gamma = t.gamma;
                   normalise(w.gamma, "custom weight");
                 },
             },
             tag);
  return w;
}

double eval_rm(std::span<const double> q, std::span<const double> gamma) {
  require(q.size() == gamma.size(), "eval_rm: grid and weight sizes differ");
  double s = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) s += q[i] * gamma[i];
  return s / static_cast<double>(q.size());
}

double eval_rm(const QuantileGrid& g, const DistortionWeight& w) { return eval_rm(g.q(), w.gamma); }

std::size_t var_index(std::size_t n, double alpha) {
  require(alpha > 0.0 && alpha < 1.0, "VaR: alpha must lie in (0,1)");
  const double pos = std::ceil(alpha * static_cast<double>(n) - 1e-9);
  const auto k = static_cast<std::size_t>(std::max(pos, 1.0));
  return std::min(k, n) - 1;
}

std::size_t var_plus_index(std::size_t n, double alpha) {
  require(alpha > 0.0 && alpha < 1.0, "VaR+: alpha must lie in (0,1)");
  const auto k = static_cast<std::size_t>(std::floor(alpha * static_cast<double>(n) + 1e-9));
  return std::min(k, n - 1);
}

double var(const QuantileGrid& g, double alpha) { return g[var_index(g.size(), alpha)]; }
double var_plus(const QuantileGrid& g, double alpha) { return g[var_plus_index(g.size(), alpha)]; }

MeanSd mean_sd(std::span<const double> q) {
  require(!q.empty(), "mean_sd: empty grid");
  double m = 0.0;
  for (double x : q) m += x;
  m /= static_cast<double>(q.size());
  double v = 0.0;
  for (double x : q) v += (x - m) * (x - m);
  return {m, std::sqrt(v / static_cast<double>(q.size()))};
}

MeanSd mean_sd(const QuantileGrid& g) { return mean_sd(g.q()); }

Utility Utility::hara(double a, double b, double eta) {
  require(std::isfinite(a) && a > 0.0, "HARA: a must be positive");
  require(std::isfinite(b), "HARA: b must be finite");
  require(std::isfinite(eta) && eta <= 1.0 && eta != 0.0, "HARA: eta must satisfy eta <= 1, eta != 0");
  Utility out;
  std::ostringstream os;
  os.precision(10);
  os << "HARA(" << a << "," << b << "," << eta << ")";
  out.name_ = os.str();
  if (eta == 1.0) {
    out.u_ = [a](double x) { return a * x; };
    out.du_ = [a](double) { return a; };
    out.d2u_ = [](double) { return 0.0; };
    return out;
  }
  const double k = a / (1.0 - eta);
  out.lower_ = -b / k;
  out.u_ = [=](double x) { return (1.0 - eta) / eta * std::pow(k * x + b, eta); };
  out.du_ = [=](double x) { return a * std::pow(k * x + b, eta - 1.0); };
  out.d2u_ = [=](double x) { return -a * a * std::pow(k * x + b, eta - 2.0); };
  return out;
}

Utility Utility::linear() {
  Utility out;
  out.name_ = "linear";
  out.u_ = [](double x) { return x; };
  out.du_ = [](double) { return 1.0; };
  out.d2u_ = [](double) { return 0.0; };
  return out;
}

Utility Utility::custom(Fn u, Fn du, Fn d2u, std::string name) {
  require(static_cast<bool>(u) && static_cast<bool>(du), "custom utility: u and u' are required");
  Utility out;
  out.u_ = std::move(u);
  out.du_ = std::move(du);
  out.d2u_ = std::move(d2u);
  out.name_ = std::move(name);
  return out;
}

double Utility::second_derivative(double x) const {
  if (d2u_) return d2u_(x);
  const double h = 1e-5 * std::max(1.0, std::abs(x));
  return (du_(x + h) - du_(x - h)) / (2.0 * h);
}

void Utility::check_domain(std::span<const double> xs) const {
  for (double x : xs) {
    if (!in_domain(x)) {
      std::ostringstream os;
      os << name_ << ": value " << x << " outside the utility domain (x > " << lower_ << ")";
      throw InvalidArgument(os.str());
    }
  }
}

double expected_utility(std::span<const double> q, const Utility& u) {
  require(!q.empty(), "expected_utility: empty grid");
  u.check_domain(q);
  double s = 0.0;
  for (double x : q) s += u.value(x);
  return s / static_cast<double>(q.size());
}

double expected_utility(const QuantileGrid& g, const Utility& u) { return expected_utility(g.q(), u); }

}  // namespace wstress
