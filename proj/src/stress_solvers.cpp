#include "wstress/stress_solvers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "wstress/error.hpp"
#include "wstress/isotonic.hpp"
#include "wstress/multiplier_search.hpp"

namespace wstress {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kInf = std::numeric_limits<double>::infinity();

double abs_tol(const SolverOptions& opts, double target) { return opts.tol * std::max(1.0, std::abs(target)); }

void check_options(const SolverOptions& opts) {
  require(opts.tol > 0.0, "solver: tolerance must be positive");
  require(opts.zeta >= 0.0, "solver: zeta must be nonnegative");
  require(opts.max_iter > 0, "solver: max_iter must be positive");
}

void check_rm(const std::vector<RmConstraint>& cs, std::size_t n) {
  for (const auto& c : cs) {
    require(c.gamma.size() == n, "stress: distortion weight size differs from the baseline grid");
    require(std::isfinite(c.target), "stress: risk-measure target must be finite");
  }
}

ConstraintReport report(std::string label, std::string rel, double target, double achieved, double tol) {
  ConstraintReport r;
  r.label = std::move(label);
  r.relation = std::move(rel);
  r.target = target;
  r.achieved = achieved;
  r.residual = achieved - target;
  r.tolerance = tol;
  if (r.relation == "=") {
    r.satisfied = std::abs(r.residual) <= tol;
  } else if (r.relation == "<=") {
    r.satisfied = r.residual <= tol;
  } else {
    r.satisfied = r.residual >= -tol;
  }
  return r;
}

std::vector<double> monotone_projection(std::vector<double> ell, std::span<const double> weights,
                                        std::span<const double> u, double zeta) {
  return spav(ell, weights, u, zeta);
}

void finalize(StressedModel& m, bool search_converged, const std::string& what) {
  m.w2 = wasserstein2(m.stressed, m.baseline);
  bool ok = search_converged;
  for (const auto& c : m.constraints) ok = ok && c.satisfied;
  m.converged = ok;
  if (!ok) {
    std::ostringstream os;
    os << what << ": did not converge (max |residual| = " << m.max_abs_residual() << ")";
    throw NotConverged(os.str(), m);
  }
}

StressedModel start_model(const QuantileGrid& baseline, const SolverOptions& opts, std::string method) {
  StressedModel m;
  m.baseline = baseline;
  m.stressed = baseline;
  m.zeta = opts.zeta;
  m.method = std::move(method);
  return m;
}

}  // namespace

double StressedModel::max_abs_residual() const {
  double r = 0.0;
  for (const auto& c : constraints) {
    if (c.relation == "=") {
      r = std::max(r, std::abs(c.residual));
    } else if (c.relation == "<=") {
      r = std::max(r, std::max(0.0, c.residual));
    } else {
      r = std::max(r, std::max(0.0, -c.residual));
    }
  }
  return r;
}

// ---------------------------------------------------------------------------

StressedModel solve_rm(const QuantileGrid& baseline, const RmStress& spec, const SolverOptions& opts) {
  check_options(opts);
  const std::size_t n = baseline.size();
  check_rm(spec.constraints, n);
  const std::size_t d = spec.constraints.size();
  const auto& F = baseline.q();
  const auto u = baseline.abscissae();
  const std::vector<double> ones(n, 1.0);

  auto build = [&](std::span<const double> lambda) {
    std::vector<double> ell = F;
    for (std::size_t k = 0; k < d; ++k) {
      const auto& g = spec.constraints[k].gamma.gamma;
      for (std::size_t i = 0; i < n; ++i) ell[i] += lambda[k] * g[i];
    }
    return monotone_projection(std::move(ell), ones, u, opts.zeta);
  };
  auto residual = [&](std::span<const double> lambda) {
    const auto G = build(lambda);
    std::vector<double> r(d);
    for (std::size_t k = 0; k < d; ++k) r[k] = eval_rm(G, spec.constraints[k].gamma.gamma) - spec.constraints[k].target;
    return r;
  };

  std::vector<double> tol(d);
  for (std::size_t k = 0; k < d; ++k) tol[k] = abs_tol(opts, spec.constraints[k].target);
  const auto res = multiplier_search(residual, d, tol, {opts.max_iter});

  auto m = start_model(baseline, opts, "projection");
  m.stressed = QuantileGrid(build(res.lambda));
  m.multipliers = res.lambda;
  for (std::size_t k = 0; k < d; ++k) {
    const auto& c = spec.constraints[k];
    m.multiplier_names.push_back("lambda_" + c.gamma.label());
    m.constraints.push_back(report(c.gamma.label(), "=", c.target, eval_rm(m.stressed, c.gamma), tol[k]));
  }
  m.iterations = res.iterations;
  m.evaluations = res.evaluations;
  finalize(m, res.converged, "solve_rm");
  return m;
}

StressedModel solve_coherent(const QuantileGrid& baseline, const DistortionWeight& gamma, double target,
                             const SolverOptions& opts) {
  check_options(opts);
  require(gamma.size() == baseline.size(), "solve_coherent: weight size differs from the baseline grid");
  require(gamma.nondecreasing(), "solve_coherent: gamma is not nondecreasing; use solve_rm");
  const double base = eval_rm(baseline, gamma);
  const double tol = abs_tol(opts, target);
  require(target >= base - tol, "solve_coherent: target below the baseline value; use solve_rm");

  const double lambda = std::max(0.0, (target - base) / gamma.squared_mean());
  std::vector<double> q = baseline.q();
  for (std::size_t i = 0; i < q.size(); ++i) q[i] += lambda * gamma.gamma[i];

  auto m = start_model(baseline, opts, "closed_form");
  m.zeta = 0.0;
  m.stressed = QuantileGrid(std::move(q));
  m.multiplier_names = {"lambda_" + gamma.label()};
  m.multipliers = {lambda};
  m.constraints.push_back(report(gamma.label(), "=", target, eval_rm(m.stressed, gamma), tol));
  m.evaluations = 1;
  finalize(m, true, "solve_coherent");
  return m;
}

// ---------------------------------------------------------------------------

StressedModel solve_mean_var_rm(const QuantileGrid& baseline, const MeanVarRm& spec, const SolverOptions& opts) {
  check_options(opts);
  const std::size_t n = baseline.size();
  check_rm(spec.constraints, n);
  require(std::isfinite(spec.mean), "mean/sd stress: mean target must be finite");
  require(std::isfinite(spec.sd) && spec.sd > 0.0, "mean/sd stress: sd target must be positive");
  const std::size_t d = spec.constraints.size();
  const auto& F = baseline.q();
  const auto u = baseline.abscissae();
  const std::vector<double> ones(n, 1.0);

  // For fixed RM multipliers mu, H = (F + sum mu_k gamma_k)^up and the
  // solution is the positive affine image s H + c; projection commutes with
  // positive scaling and shifts, so s and c follow from the mean and sd
  // targets in closed form.
  struct Affine {
    std::vector<double> H;
    double scale;
    double shift;
  };
  auto build = [&](std::span<const double> mu) {
    std::vector<double> ell = F;
    for (std::size_t k = 0; k < d; ++k) {
      const auto& g = spec.constraints[k].gamma.gamma;
      for (std::size_t i = 0; i < n; ++i) ell[i] += mu[k] * g[i];
    }
    Affine a{monotone_projection(std::move(ell), ones, u, opts.zeta), 0.0, 0.0};
    const auto ms = mean_sd(a.H);
    a.scale = ms.sd > 0.0 ? spec.sd / ms.sd : kInf;
    a.shift = spec.mean - a.scale * ms.mean;
    return a;
  };
  auto residual = [&](std::span<const double> mu) {
    const auto a = build(mu);
    std::vector<double> r(d);
    for (std::size_t k = 0; k < d; ++k) {
      r[k] = a.scale * eval_rm(a.H, spec.constraints[k].gamma.gamma) + a.shift - spec.constraints[k].target;
      if (!std::isfinite(r[k])) r[k] = std::numeric_limits<double>::quiet_NaN();
    }
    return r;
  };

  std::vector<double> tol(d);
  for (std::size_t k = 0; k < d; ++k) tol[k] = abs_tol(opts, spec.constraints[k].target);
  const auto res = multiplier_search(residual, d, tol, {opts.max_iter});
  const auto a = build(res.lambda);

  auto m = start_model(baseline, opts, "projection");
  m.iterations = res.iterations;
  m.evaluations = res.evaluations;
  // |1 + lambda_2| = 1/scale must stay away from zero
  if (!(std::isfinite(a.scale) && a.scale <= 1e6)) {
    m.notes.push_back("degenerate: lambda_var trapped near -1");
    m.converged = false;
    throw NotConverged("solve_mean_var_rm: degenerate multiplier (|1 + lambda_var| < 1e-6)", m);
  }
  std::vector<double> G(n);
  for (std::size_t i = 0; i < n; ++i) G[i] = a.scale * a.H[i] + a.shift;
  for (std::size_t i = 1; i < n; ++i) G[i] = std::max(G[i], G[i - 1]);
  m.stressed = QuantileGrid(std::move(G));

  const double lambda_var = 1.0 / a.scale - 1.0;
  const double lambda_mean = a.shift / a.scale - lambda_var * spec.mean;
  m.multiplier_names = {"lambda_mean", "lambda_var"};
  m.multipliers = {lambda_mean, lambda_var};
  for (std::size_t k = 0; k < d; ++k) {
    m.multiplier_names.push_back("lambda_" + spec.constraints[k].gamma.label());
    m.multipliers.push_back(res.lambda[k]);
  }

  double second = 0.0;
  double mean = 0.0;
  for (double x : m.stressed.q()) mean += x;
  mean /= static_cast<double>(n);
  for (double x : m.stressed.q()) second += (x - spec.mean) * (x - spec.mean);
  const double sd = std::sqrt(second / static_cast<double>(n));
  m.constraints.push_back(report("mean", "=", spec.mean, mean, abs_tol(opts, spec.mean)));
  m.constraints.push_back(report("sd", "=", spec.sd, sd, abs_tol(opts, spec.sd)));
  for (std::size_t k = 0; k < d; ++k) {
    const auto& c = spec.constraints[k];
    m.constraints.push_back(report(c.gamma.label(), "=", c.target, eval_rm(m.stressed, c.gamma), tol[k]));
  }
  finalize(m, res.converged, "solve_mean_var_rm");
  return m;
}

// ---------------------------------------------------------------------------

StressedModel solve_integral(const QuantileGrid& baseline, const IntegralStress& spec, const SolverOptions& opts) {
  check_options(opts);
  const std::size_t n = baseline.size();
  const std::size_t dl = spec.linear.size();
  const std::size_t dq = spec.quadratic.size();
  const std::size_t d = dl + dq;
  auto check_h = [&](const std::vector<double>& h, double c) {
    require(h.size() == n, "integral stress: h must be sampled on the baseline grid");
    require(std::isfinite(c), "integral stress: bound must be finite");
    for (double v : h) require(std::isfinite(v) && v >= 0.0, "integral stress: h must be nonnegative");
  };
  for (const auto& c : spec.linear) check_h(c.h, c.c);
  for (const auto& c : spec.quadratic) check_h(c.h, c.c);

  const auto& F = baseline.q();
  const auto u = baseline.abscissae();
  auto bound = [&](std::size_t k) { return k < dl ? spec.linear[k].c : spec.quadratic[k - dl].c; };
  auto label = [&](std::size_t k) { return k < dl ? spec.linear[k].label : spec.quadratic[k - dl].label; };
  auto achieved = [&](const std::vector<double>& G, std::size_t k) {
    double s = 0.0;
    if (k < dl) {
      const auto& h = spec.linear[k].h;
      for (std::size_t i = 0; i < n; ++i) s += h[i] * G[i];
    } else {
      const auto& h = spec.quadratic[k - dl].h;
      for (std::size_t i = 0; i < n; ++i) s += h[i] * G[i] * G[i];
    }
    return s / static_cast<double>(n);
  };
  std::vector<double> tol(d);
  for (std::size_t k = 0; k < d; ++k) tol[k] = abs_tol(opts, bound(k));

  // full multiplier vector -> stressed grid; minus convention on the linear part
  auto build = [&](const std::vector<double>& lambda) {
    std::vector<double> weight(n, 1.0);
    std::vector<double> ell = F;
    for (std::size_t k = 0; k < dl; ++k)
      for (std::size_t i = 0; i < n; ++i) ell[i] -= lambda[k] * spec.linear[k].h[i];
    for (std::size_t l = 0; l < dq; ++l)
      for (std::size_t i = 0; i < n; ++i) weight[i] += lambda[dl + l] * spec.quadratic[l].h[i];
    for (std::size_t i = 0; i < n; ++i) ell[i] /= weight[i];
    return monotone_projection(std::move(ell), weight, u, opts.zeta);
  };

  std::vector<double> lambda(d, 0.0);
  std::vector<double> G = build(lambda);
  std::vector<bool> active(d, false);
  int iterations = 0, evaluations = 1;
  bool ok = true;
  auto most_violated = [&](const std::vector<double>& g) {
    std::size_t worst = d;
    double worst_excess = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      if (active[k]) continue;
      const double excess = (achieved(g, k) - bound(k)) / tol[k];
      if (excess > 1.0 && excess > worst_excess) {
        worst_excess = excess;
        worst = k;
      }
    }
    return worst;
  };

  for (std::size_t k = 0; k < d; ++k) active[k] = achieved(G, k) - bound(k) > tol[k];
  const int max_rounds = 4 * static_cast<int>(d) + 8;
  for (int round = 0; round < max_rounds; ++round) {
    std::vector<std::size_t> idx;
    for (std::size_t k = 0; k < d; ++k)
      if (active[k]) idx.push_back(k);
    if (idx.empty()) {
      std::fill(lambda.begin(), lambda.end(), 0.0);
      G = build(lambda);
      const auto add = most_violated(G);
      if (add == d) break;
      active[add] = true;
      continue;
    }
    auto residual = [&](std::span<const double> sub) {
      std::vector<double> full(d, 0.0);
      for (std::size_t j = 0; j < idx.size(); ++j) full[idx[j]] = sub[j];
      const auto g = build(full);
      std::vector<double> r(idx.size());
      for (std::size_t j = 0; j < idx.size(); ++j) r[j] = achieved(g, idx[j]) - bound(idx[j]);
      return r;
    };
    std::vector<double> start(idx.size()), lo(idx.size(), 0.0), hi(idx.size(), kInf), sub_tol(idx.size());
    for (std::size_t j = 0; j < idx.size(); ++j) {
      start[j] = lambda[idx[j]];
      sub_tol[j] = tol[idx[j]];
    }
    const auto res = multiplier_search(residual, start, lo, hi, sub_tol, {opts.max_iter});
    iterations += res.iterations;
    evaluations += res.evaluations;
    std::fill(lambda.begin(), lambda.end(), 0.0);
    for (std::size_t j = 0; j < idx.size(); ++j) lambda[idx[j]] = res.lambda[j];
    G = build(lambda);

    if (!res.converged) {
      // an active constraint that stays slack with its multiplier at zero leaves the set
      bool dropped = false;
      for (std::size_t j = 0; j < idx.size(); ++j) {
        if (res.lambda[j] <= 0.0 && res.residual[j] < 0.0) {
          active[idx[j]] = false;
          dropped = true;
        }
      }
      if (dropped) continue;
      ok = false;
      break;
    }
    const auto add = most_violated(G);
    if (add == d) break;
    active[add] = true;
  }

  auto m = start_model(baseline, opts, "projection");
  m.stressed = QuantileGrid(G);
  m.multipliers = lambda;
  m.iterations = iterations;
  m.evaluations = evaluations;
  double worst_cs = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    m.multiplier_names.push_back((k < dl ? "lambda_" : "lambda_tilde_") + label(k));
    m.constraints.push_back(report(label(k), "<=", bound(k), achieved(G, k), tol[k]));
    worst_cs = std::max(worst_cs, lambda[k] * std::abs(achieved(G, k) - bound(k)));
  }
  std::ostringstream os;
  os << "kkt: inequality multipliers clamped nonnegative; max multiplier*|slack| = " << worst_cs;
  m.notes.push_back(os.str());
  if (worst_cs > opts.complementarity_tol) ok = false;
  finalize(m, ok, "solve_integral");
  return m;
}

// ---------------------------------------------------------------------------

StressedModel solve_var(const QuantileGrid& baseline, const VarStress& spec, const SolverOptions& opts) {
  check_options(opts);
  require(spec.alpha > 0.0 && spec.alpha < 1.0, "VaR stress: alpha must lie in (0,1)");
  require(std::isfinite(spec.q), "VaR stress: q must be finite");
  const std::size_t n = baseline.size();
  const auto& F = baseline.q();
  std::vector<double> G = F;
  double alpha_f = 0.0;
  std::string label;
  std::ostringstream os;
  os.precision(17);

  if (spec.kind == VarKind::Left) {
    const std::size_t k = var_index(n, spec.alpha);
    if (spec.q > F[k]) {
      os << "VaR stress has no solution: requires q <= VaR_alpha(F) (q = " << spec.q << ", alpha = " << spec.alpha
         << ", VaR_alpha(F) = " << F[k] << "); stress RVaR instead";
      throw NoSolution(os.str());
    }
    for (std::size_t i = 0; i <= k; ++i) G[i] = std::min(F[i], spec.q);
    // alpha_F: left edge of the cells pulled down to q (left-continuous, smallest u)
    const auto below = static_cast<std::size_t>(std::lower_bound(F.begin(), F.end(), spec.q) - F.begin());
    alpha_f = static_cast<double>(below) / static_cast<double>(n);
    label = "VaR(" + std::to_string(spec.alpha) + ")";
  } else {
    const std::size_t k = var_plus_index(n, spec.alpha);
    if (spec.q < F[k]) {
      os << "VaR+ stress has no solution: requires q >= VaR+_alpha(F) (q = " << spec.q << ", alpha = " << spec.alpha
         << ", VaR+_alpha(F) = " << F[k] << "); stress RVaR instead";
      throw NoSolution(os.str());
    }
    for (std::size_t i = k; i < n; ++i) G[i] = std::max(F[i], spec.q);
    const auto upto = static_cast<std::size_t>(std::upper_bound(F.begin(), F.end(), spec.q) - F.begin());
    alpha_f = static_cast<double>(upto) / static_cast<double>(n);
    label = "VaR+(" + std::to_string(spec.alpha) + ")";
  }

  auto m = start_model(baseline, opts, "closed_form");
  m.zeta = 0.0;
  m.stressed = QuantileGrid(std::move(G));
  const double got = spec.kind == VarKind::Left ? var(m.stressed, spec.alpha) : var_plus(m.stressed, spec.alpha);
  m.constraints.push_back(report(label, "=", spec.q, got, abs_tol(opts, spec.q)));
  std::ostringstream note;
  note.precision(17);
  note << "alpha_F = " << alpha_f;
  m.notes.push_back(note.str());
  m.evaluations = 1;
  finalize(m, true, "solve_var");
  return m;
}

// ---------------------------------------------------------------------------

double invert_nu(const Utility& u, double lambda, double y, double tol) {
  require(lambda >= 0.0, "invert_nu: lambda must be nonnegative");
  if (lambda == 0.0) return y;
  const double L = u.domain_lower();
  auto phi = [&](double x) { return x - lambda * u.derivative(x) - y; };

  double lo = u.in_domain(y) ? y : (std::isfinite(L) ? L + 1e-6 * std::max(1.0, std::abs(L)) : y);
  double step = lambda * std::abs(u.derivative(lo)) + 1e-6 * (1.0 + std::abs(lo));
  for (int it = 0; it < 400 && phi(lo) > 0.0; ++it, step *= 2.0) {
    double cand = lo - step;
    if (std::isfinite(L) && cand <= L) cand = L + 0.5 * (lo - L);
    lo = cand;
  }
  double hi = lo;
  step = lambda * std::abs(u.derivative(lo)) + 1e-6 * (1.0 + std::abs(lo));
  for (int it = 0; it < 400 && phi(hi) < 0.0; ++it, step *= 2.0) hi += step;
  require(phi(lo) <= 0.0 && phi(hi) >= 0.0, "invert_nu: failed to bracket the inverse (utility domain violation)");

  const double ftol = tol * std::max(1.0, std::abs(y));
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double f = phi(x);
    if (std::abs(f) <= ftol) return x;
    if (f < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    if (hi - lo <= 1e-15 * std::max(1.0, std::abs(x))) return x;
    const double slope = 1.0 - lambda * u.second_derivative(x);
    double next = slope > 0.0 ? x - f / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    x = next;
  }
  return x;
}

StressedModel solve_utility_rm(const QuantileGrid& baseline, const UtilityRm& spec, const SolverOptions& opts) {
  check_options(opts);
  const std::size_t n = baseline.size();
  check_rm(spec.constraints, n);
  require(std::isfinite(spec.c), "utility stress: target must be finite");
  spec.utility.check_domain(baseline.q());
  const std::size_t d = spec.constraints.size();
  const auto& F = baseline.q();
  const auto u = baseline.abscissae();
  const std::vector<double> ones(n, 1.0);
  const Utility& U = spec.utility;

  // lambda = (lambda_utility, mu_1..mu_d)
  auto build = [&](std::span<const double> lambda) {
    std::vector<double> ell = F;
    for (std::size_t k = 0; k < d; ++k) {
      const auto& g = spec.constraints[k].gamma.gamma;
      for (std::size_t i = 0; i < n; ++i) ell[i] += lambda[k + 1] * g[i];
    }
    auto y = monotone_projection(std::move(ell), ones, u, opts.zeta);
    const double l1 = lambda[0];
    if (l1 == 0.0) return y;
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = (i > 0 && y[i] == y[i - 1]) ? x[i - 1] : invert_nu(U, l1, y[i]);
      if (i > 0) x[i] = std::max(x[i], x[i - 1]);
    }
    return x;
  };
  auto eu = [&](const std::vector<double>& G) {
    double s = 0.0;
    for (double x : G) {
      if (!U.in_domain(x)) return std::numeric_limits<double>::quiet_NaN();
      s += U.value(x);
    }
    return s / static_cast<double>(n);
  };
  std::vector<double> tol(d + 1);
  tol[0] = abs_tol(opts, spec.c);
  for (std::size_t k = 0; k < d; ++k) tol[k + 1] = abs_tol(opts, spec.constraints[k].target);

  // Phase 1: utility constraint inactive (lambda_utility = 0).
  auto rm_residual = [&](std::span<const double> mu) {
    std::vector<double> lam(d + 1, 0.0);
    std::copy(mu.begin(), mu.end(), lam.begin() + 1);
    const auto G = build(lam);
    std::vector<double> r(d);
    for (std::size_t k = 0; k < d; ++k) r[k] = eval_rm(G, spec.constraints[k].gamma.gamma) - spec.constraints[k].target;
    return r;
  };
  const auto phase1 = multiplier_search(rm_residual, d, std::vector<double>(tol.begin() + 1, tol.end()), {opts.max_iter});
  std::vector<double> lambda(d + 1, 0.0);
  std::copy(phase1.lambda.begin(), phase1.lambda.end(), lambda.begin() + 1);
  auto G = build(lambda);
  bool converged = phase1.converged;
  int iterations = phase1.iterations, evaluations = phase1.evaluations;

  if (!(eu(G) >= spec.c - tol[0])) {
    // Phase 2: utility binding, lambda_utility >= 0.
    auto residual = [&](std::span<const double> lam) {
      const auto g = build(lam);
      std::vector<double> r(d + 1);
      r[0] = eu(g) - spec.c;
      for (std::size_t k = 0; k < d; ++k) r[k + 1] = eval_rm(g, spec.constraints[k].gamma.gamma) - spec.constraints[k].target;
      return r;
    };
    std::vector<double> lo(d + 1, -kInf), hi(d + 1, kInf);
    lo[0] = 0.0;
    const auto res = multiplier_search(residual, lambda, lo, hi, tol, {opts.max_iter});
    lambda = res.lambda;
    G = build(lambda);
    converged = res.converged;
    iterations += res.iterations;
    evaluations += res.evaluations;
  }

  auto m = start_model(baseline, opts, "projection");
  U.check_domain(G);
  m.stressed = QuantileGrid(G);
  m.multipliers = lambda;
  m.multiplier_names.push_back("lambda_utility");
  for (const auto& c : spec.constraints) m.multiplier_names.push_back("lambda_" + c.gamma.label());
  m.constraints.push_back(report("E[" + U.name() + "]", ">=", spec.c, eu(G), tol[0]));
  for (std::size_t k = 0; k < d; ++k) {
    const auto& c = spec.constraints[k];
    m.constraints.push_back(report(c.gamma.label(), "=", c.target, eval_rm(m.stressed, c.gamma), tol[k + 1]));
  }
  m.iterations = iterations;
  m.evaluations = evaluations;
  finalize(m, converged, "solve_utility_rm");
  return m;
}

// ---------------------------------------------------------------------------

StressedModel solve(const QuantileGrid& baseline, const StressSpec& spec, const SolverOptions& opts) {
  return std::visit(overloaded{
                        [&](const RmStress& s) {
                          if (s.constraints.size() == 1 && opts.zeta == 0.0) {
                            const auto& c = s.constraints.front();
                            if (c.gamma.size() == baseline.size() && c.gamma.nondecreasing() &&
                                c.target >= eval_rm(baseline, c.gamma))
                              return solve_coherent(baseline, c.gamma, c.target, opts);
                          }
                          return solve_rm(baseline, s, opts);
                        },
                        [&](const MeanVarRm& s) { return solve_mean_var_rm(baseline, s, opts); },
                        [&](const IntegralStress& s) { return solve_integral(baseline, s, opts); },
                        [&](const VarStress& s) { return solve_var(baseline, s, opts); },
                        [&](const UtilityRm& s) { return solve_utility_rm(baseline, s, opts); },
                    },
                    spec);
}

std::string family_name(const StressSpec& spec) {
  return std::visit(overloaded{
                        [](const RmStress&) { return std::string("rm"); },
                        [](const MeanVarRm&) { return std::string("mean_var_rm"); },
                        [](const IntegralStress&) { return std::string("integral"); },
                        [](const VarStress&) { return std::string("var"); },
                        [](const UtilityRm&) { return std::string("utility_rm"); },
                    },
                    spec);
}

}  // namespace wstress
