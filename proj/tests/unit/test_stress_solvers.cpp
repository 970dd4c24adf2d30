#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "wstress/error.hpp"
#include "wstress/isotonic.hpp"
#include "wstress/stress_solvers.hpp"

using namespace wstress;
using Vec = std::vector<double>;

namespace {

QuantileGrid uniform_grid(std::size_t n) {
  Vec q(n);
  for (std::size_t i = 0; i < n; ++i) q[i] = midpoint(i, n);
  return QuantileGrid(q);
}

const QuantileGrid& lognormal() {
  static const auto g = discretize(Lognormal{7.0 / 8.0, 0.5}, 4096);
  return g;
}

void check_monotone(const QuantileGrid& g) {
  for (std::size_t i = 0; i + 1 < g.size(); ++i) REQUIRE(g[i] <= g[i + 1]);
}

}  // namespace

TEST_CASE("rm: baseline targets leave the baseline unchanged") {
  const auto& F = lognormal();
  const auto es = make_es(0.95, F.size());
  const auto ab = make_alpha_beta(0.9, 0.1, 0.5, F.size());
  const auto m = solve_rm(F, RmStress{{{es, eval_rm(F, es)}, {ab, eval_rm(F, ab)}}});
  CHECK(m.converged);
  CHECK(oracle::sup_diff(m.stressed.q(), F.q()) <= 1e-12);
  for (double l : m.multipliers) CHECK(std::abs(l) <= 1e-9);
  CHECK(m.w2 == doctest::Approx(0.0));
}

TEST_CASE("rm: uniform ES(0.9) closed form") {
  const std::size_t n = 4000;  // 0.9 n is an integer
  const auto U = uniform_grid(n);
  const auto es = make_es(0.9, n);
  const auto m = solve_rm(U, RmStress{{{es, 0.9975}}});
  const auto c = solve_coherent(U, es, 0.9975);
  CHECK(c.multipliers[0] == doctest::Approx(0.00475).epsilon(1e-9));
  for (std::size_t i = 0; i < n; ++i) {
    const double u = midpoint(i, n);
    CHECK(c.stressed[i] == doctest::Approx(u + (u > 0.9 ? 0.0475 : 0.0)).epsilon(1e-12));
  }
  CHECK(oracle::sup_diff(m.stressed.q(), c.stressed.q()) <= 1e-6);
  CHECK(pav(c.stressed.q(), Vec(n, 1.0)) == c.stressed.q());
}

TEST_CASE("coherent: preconditions") {
  const auto& F = lognormal();
  const auto es = make_es(0.95, F.size());
  const auto c = solve_coherent(F, es, eval_rm(F, es));
  CHECK(c.multipliers[0] == 0.0);
  CHECK(c.stressed.q() == F.q());
  CHECK_THROWS_AS(solve_coherent(F, es, 0.9 * eval_rm(F, es)), InvalidArgument);
  CHECK_THROWS_AS(solve_coherent(F, make_alpha_beta(0.9, 0.1, 0.5, F.size()), 10.0), InvalidArgument);
}

TEST_CASE("rm: downward and non-coherent stresses project") {
  const auto& F = lognormal();
  const auto es = make_es(0.95, F.size());
  const auto m = solve(F, RmStress{{{es, 0.9 * eval_rm(F, es)}}});
  CHECK(m.method == "projection");
  CHECK(m.max_abs_residual() <= 1e-6 * eval_rm(F, es));
  check_monotone(m.stressed);
  const auto up = solve(F, RmStress{{{es, 1.1 * eval_rm(F, es)}}});
  CHECK(up.method == "closed_form");
}

TEST_CASE("rm: infeasible targets throw NotConverged with the best iterate") {
  const auto& F = lognormal();
  const auto mean = make_gamma(MeanTag{}, F.size());
  const auto es = make_es(0.9, F.size());
  try {
    solve_rm(F, RmStress{{{mean, 5.0}, {es, 1.0}}});
    FAIL("expected NotConverged");
  } catch (const NotConverged& e) {
    CHECK(!e.model().converged);
    CHECK(e.model().max_abs_residual() > 1e-3);
  }
}

TEST_CASE("mean/sd: identity and affine solution") {
  const auto& F = lognormal();
  const auto ms = mean_sd(F);
  const auto id = solve_mean_var_rm(F, MeanVarRm{ms.mean, ms.sd, {}});
  CHECK(oracle::sup_diff(id.stressed.q(), F.q()) <= 1e-9);
  const auto m = solve_mean_var_rm(F, MeanVarRm{ms.mean, 1.2 * ms.sd, {}});
  Vec ref(F.size());
  for (std::size_t i = 0; i < F.size(); ++i) ref[i] = ms.mean + 1.2 * (F[i] - ms.mean);
  CHECK(oracle::sup_diff(m.stressed.q(), ref) <= 1e-6);
  CHECK(m.multipliers[1] == doctest::Approx(1.0 / 1.2 - 1.0).epsilon(1e-9));
  CHECK(std::abs(1.0 + m.multipliers[1]) >= 1e-6);
}

TEST_CASE("mean/sd with ES: constraint binds and the stressed density dips near 5.77") {
  const auto& F = lognormal();
  const auto ms = mean_sd(F);
  const auto es = make_es(0.95, F.size());
  const double r = eval_rm(F, es);
  const auto m = solve_mean_var_rm(F, MeanVarRm{ms.mean, 1.2 * ms.sd, {{es, r}}});
  CHECK(m.max_abs_residual() <= 1e-6 * r);
  // without the ES constraint ES would rise; with it ES stays put
  const auto free = solve_mean_var_rm(F, MeanVarRm{ms.mean, 1.2 * ms.sd, {}});
  CHECK(eval_rm(free.stressed, es) > r + 0.1);
  // stressed density: local minimum inside (5.5, 6.1)
  Vec ys;
  for (double y = 4.5; y <= 7.0; y += 0.05) ys.push_back(y);
  const auto g = grid_density_on(m.stressed, ys);
  bool dip = false;
  for (std::size_t j = 1; j + 1 < ys.size(); ++j) {
    if (ys[j] <= 5.5 || ys[j] >= 6.1) continue;
    double left = 0.0, right = 0.0;
    for (std::size_t k = 0; k < j; ++k) left = std::max(left, g[k]);
    for (std::size_t k = j + 1; k < ys.size(); ++k) right = std::max(right, g[k]);
    if (g[j] < 0.9 * left && g[j] < 0.9 * right) dip = true;
  }
  CHECK(dip);
}

TEST_CASE("mean/sd: invalid sd") {
  const auto& F = lognormal();
  CHECK_THROWS_AS(solve_mean_var_rm(F, MeanVarRm{1.0, 0.0, {}}), InvalidArgument);
}

TEST_CASE("integral: slack constraints leave the baseline") {
  const auto& F = lognormal();
  const std::size_t n = F.size();
  IntegralStress s;
  s.linear.push_back({Vec(n, 1.0), 100.0, "mean"});
  s.quadratic.push_back({Vec(n, 1.0), 1000.0, "second"});
  const auto m = solve_integral(F, s);
  CHECK(m.stressed.q() == F.q());
  for (double l : m.multipliers) CHECK(l == 0.0);
}

TEST_CASE("integral: constant linear h shifts the baseline") {
  const auto& F = lognormal();
  const std::size_t n = F.size();
  const double mean = mean_sd(F).mean;
  IntegralStress s;
  s.linear.push_back({Vec(n, 1.0), mean - 0.3, "mean"});
  const auto m = solve_integral(F, s);
  Vec ref = F.q();
  for (auto& x : ref) x -= 0.3;
  CHECK(oracle::sup_diff(m.stressed.q(), ref) <= 1e-6);
  CHECK(m.multipliers[0] == doctest::Approx(0.3).epsilon(1e-6));
}

TEST_CASE("integral: constant quadratic h scales the baseline") {
  const auto& F = lognormal();
  const std::size_t n = F.size();
  double second = 0.0;
  for (double x : F.q()) second += x * x;
  second /= static_cast<double>(n);
  const double c = 0.9 * second;
  IntegralStress s;
  s.quadratic.push_back({Vec(n, 1.0), c, "second"});
  const auto m = solve_integral(F, s);
  const double lam = std::sqrt(second / c);
  Vec ref = F.q();
  for (auto& x : ref) x /= lam;
  CHECK(oracle::sup_diff(m.stressed.q(), ref) <= 1e-6 * ref.back());
  CHECK(m.multipliers[0] == doctest::Approx(lam - 1.0).epsilon(1e-6));
}

TEST_CASE("integral: small grids against the QP oracle") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int t = 0; t < 40; ++t) {
    const std::size_t n = 8;
    Vec q(n);
    for (auto& x : q) x = 3.0 * unif(rng);
    std::sort(q.begin(), q.end());
    const QuantileGrid F(q);
    Vec h1(n), h2(n);
    for (std::size_t i = 0; i < n; ++i) {
      h1[i] = i >= n / 2 ? 1.0 : 0.0;
      h2[i] = unif(rng) < 0.5 ? 0.0 : 2.0 * unif(rng);
    }
    double b1 = 0, b2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      b1 += h1[i] * q[i] / n;
      b2 += h2[i] * q[i] / n;
    }
    IntegralStress s;
    s.linear.push_back({h1, b1 - 0.3 * unif(rng), "upper"});
    s.linear.push_back({h2, b2 - 0.2 * unif(rng), "random"});
    const auto m = solve_integral(F, s);
    std::vector<oracle::LinearIneq> ineq;
    for (const auto& c : s.linear) {
      Vec a(n);
      for (std::size_t i = 0; i < n; ++i) a[i] = c.h[i] / n;
      ineq.push_back({a, c.c});
    }
    const auto ref = oracle::qp(q, Vec(n, 1.0), {}, ineq);
    CHECK(oracle::sup_diff(m.stressed.q(), ref) <= 1e-5);
    for (double l : m.multipliers) CHECK(l >= -1e-10);
  }
}

TEST_CASE("integral: h must be nonnegative") {
  const auto F = uniform_grid(16);
  IntegralStress s;
  Vec h(16, 1.0);
  h[3] = -1.0;
  s.linear.push_back({h, 0.1, "bad"});
  CHECK_THROWS_AS(solve_integral(F, s), InvalidArgument);
}

TEST_CASE("VaR: uniform left example and the non-existence branch") {
  const std::size_t n = 1000;
  const auto U = uniform_grid(n);
  const auto m = solve_var(U, VarStress{0.9, 0.8, VarKind::Left});
  for (std::size_t i = 0; i < n; ++i) {
    const double u = midpoint(i, n);
    const double expect = (u > 0.8 && u <= 0.9) ? 0.8 : u;
    CHECK(std::abs(m.stressed[i] - expect) <= 1.0 / n);
  }
  CHECK(var(m.stressed, 0.9) == 0.8);
  CHECK_THROWS_AS(solve_var(U, VarStress{0.9, 0.95, VarKind::Left}), NoSolution);
  const auto same = solve_var(U, VarStress{0.9, var(U, 0.9), VarKind::Left});
  CHECK(same.stressed.q() == U.q());
}

TEST_CASE("VaR: direction condition decides existence exactly") {
  const auto& F = lognormal();
  for (double a : {0.1, 0.5, 0.95}) {
    const double v = var(F, a), vp = var_plus(F, a);
    CHECK_NOTHROW(solve_var(F, VarStress{a, v, VarKind::Left}));
    CHECK_THROWS_AS(solve_var(F, VarStress{a, std::nextafter(v, INFINITY), VarKind::Left}), NoSolution);
    CHECK_NOTHROW(solve_var(F, VarStress{a, vp, VarKind::Right}));
    CHECK_THROWS_AS(solve_var(F, VarStress{a, std::nextafter(vp, -INFINITY), VarKind::Right}), NoSolution);
    const auto up = solve_var(F, VarStress{a, vp + 1.0, VarKind::Right});
    CHECK(var_plus(up.stressed, a) == vp + 1.0);
    check_monotone(up.stressed);
  }
}

TEST_CASE("utility: slack constraint keeps the baseline") {
  const auto& F = lognormal();
  const auto u = Utility::hara(1, 5, 0.5);
  const auto m = solve_utility_rm(F, UtilityRm{u, expected_utility(F, u) - 0.1, {}});
  CHECK(m.stressed.q() == F.q());
  CHECK(m.multipliers[0] == 0.0);
}

TEST_CASE("utility: inactive utility path equals solve_rm") {
  const auto& F = lognormal();
  const auto u = Utility::hara(1, 5, 0.5);
  const auto es = make_es(0.95, F.size());
  const double r = 1.1 * eval_rm(F, es);
  const auto a = solve_utility_rm(F, UtilityRm{u, -1e9, {{es, r}}});
  const auto b = solve_rm(F, RmStress{{{es, r}}});
  CHECK(a.multipliers[0] == 0.0);
  CHECK(oracle::sup_diff(a.stressed.q(), b.stressed.q()) <= 1e-12);
}

TEST_CASE("utility: binding constraint") {
  const auto& F = lognormal();
  const auto u = Utility::hara(1, 5, 0.5);
  const double eu = expected_utility(F, u);
  const auto m = solve_utility_rm(F, UtilityRm{u, eu * 1.02, {}});
  CHECK(m.multipliers[0] > 0.0);
  CHECK(expected_utility(m.stressed, u) >= eu * 1.02 - 1e-6 * eu);
  check_monotone(m.stressed);
}

TEST_CASE("invert_nu") {
  const auto u = Utility::hara(1, 5, 0.5);
  for (double lam : {0.0, 0.1, 1.0, 10.0})
    for (double y : {-3.0, 0.0, 1.0, 7.0, 40.0}) {
      const double x = invert_nu(u, lam, y);
      if (lam == 0.0) {
        CHECK(x == y);
        continue;
      }
      CHECK(u.in_domain(x));
      CHECK(x - lam * u.derivative(x) == doctest::Approx(y).epsilon(1e-9));
    }
}

TEST_CASE("smoothing in the loop keeps constraints") {
  const auto& F = lognormal();
  const auto ab = make_alpha_beta(0.9, 0.1, 0.5, F.size());
  SolverOptions o;
  o.zeta = 1e-4;
  const double r = 1.1 * eval_rm(F, ab);
  const auto m = solve_rm(F, RmStress{{{ab, r}}}, o);
  CHECK(m.max_abs_residual() <= 1e-6 * r);
  CHECK(m.zeta == 1e-4);
  check_monotone(m.stressed);
}

TEST_CASE("family names") {
  CHECK(family_name(RmStress{}) == "rm");
  CHECK(family_name(VarStress{0.5, 1.0}) == "var");
  CHECK(family_name(IntegralStress{}) == "integral");
}
