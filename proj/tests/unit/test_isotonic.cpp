#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "wstress/distributions.hpp"
#include "wstress/error.hpp"
#include "wstress/isotonic.hpp"

using namespace wstress;
using Vec = std::vector<double>;

namespace {

Vec ones(std::size_t n) { return Vec(n, 1.0); }

void check_close(const Vec& a, const Vec& b, double tol) {
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= tol);
}

Vec uniform_penalty(std::size_t n, double zeta) {
  const auto u = midpoint_grid(n);
  Vec p(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) p[i] = zeta / ((u[i + 1] - u[i]) * (u[i + 1] - u[i]));
  return p;
}

}  // namespace

TEST_CASE("pav small examples") {
  check_close(pav(Vec{3, 1, 2}, ones(3)), Vec{2, 2, 2}, 1e-15);
  check_close(pav(Vec{1, 2, 3}, Vec{0.5, 2, 7}), Vec{1, 2, 3}, 0);
  check_close(pav(Vec{2, 0}, Vec{1, 3}), Vec{0.5, 0.5}, 1e-15);
}

TEST_CASE("pav input validation") {
  CHECK_THROWS_AS(pav(Vec{1, 2}, Vec{1}), InvalidArgument);
  CHECK_THROWS_AS(pav(Vec{1, NAN}, ones(2)), InvalidArgument);
  CHECK_THROWS_AS(pav(Vec{1, 2}, Vec{0, 0}), InvalidArgument);
  CHECK_THROWS_AS(pav(Vec{1, 2}, Vec{1, -1}), InvalidArgument);
  CHECK_THROWS_AS(spav(Vec{1, 2}, ones(2), -1.0), InvalidArgument);
}

TEST_CASE("pav zero weights") {
  // zero-weight points pool with their neighbours and never break monotonicity
  const auto x = pav(Vec{5, 1, 3}, Vec{0, 1, 1});
  CHECK(x[0] <= x[1]);
  CHECK(x[1] <= x[2]);
  CHECK(x[0] <= 1.0);
  CHECK(x[1] == doctest::Approx(1.0));
  CHECK(x[2] == doctest::Approx(3.0));
}

TEST_CASE("pav matches the exhaustive QP oracle, idempotent and mean preserving") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> val(-3, 3), wt(0.1, 3);
  std::uniform_int_distribution<int> len(1, 6);
  for (int t = 0; t < 300; ++t) {
    const int n = len(rng);
    Vec v(n), w(n);
    for (int i = 0; i < n; ++i) {
      v[i] = val(rng);
      w[i] = wt(rng);
    }
    const auto x = pav(v, w);
    const auto ref = oracle::qp(v, w);
    CHECK(oracle::sup_diff(x, ref) <= 1e-9);
    CHECK(pav(x, w) == x);
    double a = 0, b = 0;
    for (int i = 0; i < n; ++i) {
      a += w[i] * x[i];
      b += w[i] * v[i];
    }
    CHECK(std::abs(a - b) <= 1e-10);
    for (int i = 0; i + 1 < n; ++i) CHECK(x[i] <= x[i + 1] + 1e-12);
  }
}

TEST_CASE("spav with zeta 0 is pav") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> nd;
  Vec v(200);
  for (auto& x : v) x = nd(rng);
  CHECK(spav(v, ones(200), 0.0) == pav(v, ones(200)));
}

TEST_CASE("spav example against the QP oracle") {
  const Vec v{3, 1, 2};
  const auto x = spav(v, ones(3), 0.01);
  const auto ref = oracle::qp(v, ones(3), uniform_penalty(3, 0.01));
  CHECK(oracle::sup_diff(x, ref) <= 1e-9);
}

TEST_CASE("spav matches the QP oracle on random instances") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> val(-3, 3), wt(0.1, 3), lz(-8, 0);
  std::uniform_int_distribution<int> len(2, 7);
  for (int t = 0; t < 300; ++t) {
    const int n = len(rng);
    Vec v(n), w(n), p(n - 1);
    for (int i = 0; i < n; ++i) {
      v[i] = val(rng);
      w[i] = wt(rng);
    }
    for (auto& x : p) x = std::pow(10.0, lz(rng)) * 50.0;
    const auto x = spav_penalised(v, w, p);
    const auto ref = oracle::qp(v, w, p);
    CHECK(oracle::sup_diff(x, ref) <= 1e-9);
  }
}

TEST_CASE("spav large zeta flattens monotone input and keeps the mean") {
  const Vec v{1, 2, 3};
  const auto x = spav(v, ones(3), 1e6);
  CHECK(x[0] <= x[1]);
  CHECK(x[1] <= x[2]);
  CHECK(x[2] - x[0] < 1e-3);
  CHECK((x[0] + x[1] + x[2]) / 3 == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("spav tends to pav as zeta goes to 0") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> nd;
  Vec v(500);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 0.01 * static_cast<double>(i) + nd(rng);
  const auto a = spav(v, ones(v.size()), 1e-8 / (500.0 * 500.0));
  CHECK(oracle::sup_diff(a, pav(v, ones(v.size()))) <= 1e-6);
  const auto b = spav(v, ones(v.size()), 1e-8);
  for (std::size_t i = 0; i + 1 < b.size(); ++i) CHECK(b[i] <= b[i + 1] + 1e-12);
}

TEST_CASE("spav on a long noisy sequence is monotone and optimal against perturbations") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  const std::size_t n = 4096;
  Vec v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = std::sin(6.0 * static_cast<double>(i) / n) + 0.3 * nd(rng);
  const double zeta = 1e-4;
  const auto x = spav(v, ones(n), zeta);
  for (std::size_t i = 0; i + 1 < n; ++i) CHECK(x[i] <= x[i + 1] + 1e-12);
  const auto p = uniform_penalty(n, zeta);
  auto obj = [&](const Vec& y) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += (y[i] - v[i]) * (y[i] - v[i]);
    for (std::size_t i = 0; i + 1 < n; ++i) s += p[i] * (y[i + 1] - y[i]) * (y[i + 1] - y[i]);
    return s;
  };
  const double best = obj(x);
  // convex combinations with monotone candidates never improve
  for (double t : {1e-3, 1e-2, 0.1}) {
    Vec y(n);
    const auto plain = pav(v, ones(n));
    for (std::size_t i = 0; i < n; ++i) y[i] = (1 - t) * x[i] + t * plain[i];
    CHECK(obj(y) >= best - 1e-9);
  }
}

TEST_CASE("project") {
  GridFunction mono(midpoint_grid(5), Vec{0, 1, 2, 3, 4});
  CHECK(project(mono, ones(5)).v == mono.v);
  const auto u = midpoint_grid(8);
  Vec neg(8);
  for (int i = 0; i < 8; ++i) neg[i] = -u[i];
  const auto r = project(GridFunction(u, neg), ones(8));
  for (double x : r.v) CHECK(x == doctest::Approx(-0.5));
  Vec w(8, 1.0);
  CHECK(project(GridFunction(u, neg), w).v == pav(neg, ones(8)));
  CHECK_THROWS_AS(GridFunction(Vec{0.5, 0.5}, Vec{1, 2}), InvalidArgument);
  CHECK_THROWS_AS(GridFunction(Vec{0.5}, Vec{1}), InvalidArgument);
}
