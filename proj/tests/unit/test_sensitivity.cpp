#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "wstress/error.hpp"
#include "wstress/sensitivity.hpp"

using namespace wstress;
using Vec = std::vector<double>;

namespace {

WeightSet weights(Vec w) {
  WeightSet out;
  out.w = std::move(w);
  return out;
}

Vec normals(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  Vec x(n);
  for (auto& v : x) v = d(rng);
  return x;
}

}  // namespace

TEST_CASE("worked example") {
  const Vec s{1, 2, 3, 4};
  const auto r = reverse_sensitivity(s, weights({0.5, 1.5, 0.5, 1.5}));
  CHECK(r.numerator == doctest::Approx(0.25));
  CHECK(r.max_bound == doctest::Approx(0.5));
  CHECK(r.min_bound == doctest::Approx(-0.5));
  CHECK(r.S == doctest::Approx(0.5));
  CHECK(r.mean_s == doctest::Approx(2.5));
}

TEST_CASE("uniform weights give zero") {
  const auto x = normals(1000, 1);
  const auto r = reverse_sensitivity(x, WeightSet::uniform(x.size()));
  CHECK(r.S == 0.0);
}

TEST_CASE("rearrangements attain the bounds exactly") {
  const auto x = normals(2000, 2);
  Vec w(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) w[i] = std::exp(0.5 * x[i]);
  const double m = std::accumulate(w.begin(), w.end(), 0.0) / w.size();
  for (auto& v : w) v /= m;
  CHECK(reverse_sensitivity(x, weights(w)).S == 1.0);
  Vec neg = x;
  for (auto& v : neg) v = -v;
  CHECK(reverse_sensitivity(neg, weights(w)).S == -1.0);
}

TEST_CASE("S lies in [-1, 1] and shuffled weights give little") {
  const auto x = normals(20000, 3);
  Vec w(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) w[i] = std::exp(0.5 * x[i]);
  std::mt19937_64 rng(4);
  std::shuffle(w.begin(), w.end(), rng);
  const double m = std::accumulate(w.begin(), w.end(), 0.0) / w.size();
  for (auto& v : w) v /= m;
  const auto r = reverse_sensitivity(x, weights(w));
  CHECK(std::abs(r.S) <= 0.05);
  CHECK(r.S >= -1.0);
  CHECK(r.S <= 1.0);
}

TEST_CASE("s functions") {
  const Vec x{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  CHECK(SFunction::identity().apply(x) == x);
  CHECK(SFunction::power(2).apply(x)[2] == 9.0);
  const auto t = SFunction::tail(0.8).apply(x);
  // P-quantile at 0.8 is 8: indicator of x > 8
  CHECK(std::accumulate(t.begin(), t.end(), 0.0) == 2.0);
  const Vec y{10, 9, 8, 7, 6, 5, 4, 3, 2, 1};
  const auto j = SFunction::joint_tail(0.5).apply(x, y);
  CHECK(std::accumulate(j.begin(), j.end(), 0.0) == 0.0);
  const auto jj = SFunction::joint_tail(0.5).apply(x, x);
  CHECK(std::accumulate(jj.begin(), jj.end(), 0.0) == 5.0);
  CHECK(SFunction::tail(0.95).tag() == "tail0.95");
  CHECK(SFunction::identity().tag() == "x");
}

TEST_CASE("bivariate sensitivity uses the same normalisation") {
  const Vec s{0, 0, 1, 1};
  const auto r = bivariate_reverse_sensitivity(s, weights({0.5, 0.5, 1.5, 1.5}));
  CHECK(r.S == doctest::Approx(1.0));
}

TEST_CASE("delta measure") {
  const std::size_t n = 20000;
  const auto x = normals(n, 5);
  const auto noise = normals(n, 6);
  CHECK(delta_measure(noise, x) <= 0.05);
  CHECK(delta_measure(x, x) >= 0.9);
  Vec y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + noise[i];
  const double d = delta_measure(y, x);
  CHECK(d > 0.1);
  CHECK(d < 0.9);
  // invariant under strictly increasing transforms of x
  Vec ex(n);
  for (std::size_t i = 0; i < n; ++i) ex[i] = std::exp(x[i]);
  CHECK(delta_measure(y, ex) == doctest::Approx(d).epsilon(1e-9));
}

TEST_CASE("delta measure needs enough samples") {
  const auto x = normals(500, 7);
  CHECK_THROWS_AS(delta_measure(x, x), InvalidArgument);
}
