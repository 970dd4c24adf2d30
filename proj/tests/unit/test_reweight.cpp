#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "wstress/error.hpp"
#include "wstress/reweight.hpp"
#include "wstress/risk_measures.hpp"
#include "wstress/stress_solvers.hpp"

using namespace wstress;
using Vec = std::vector<double>;

namespace {

Vec lognormal_sample(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::lognormal_distribution<double> d(7.0 / 8.0, 0.5);
  Vec y(n);
  for (auto& v : y) v = d(rng);
  return y;
}

}  // namespace

TEST_CASE("identity stress gives weights near one") {
  const Lognormal spec{7.0 / 8.0, 0.5};
  const auto F = discretize(spec, 4096);
  const auto y = lognormal_sample(20000, 3);
  const auto w = rn_weights(y, spec, F);
  REQUIRE(w.size() == y.size());
  // interior of the support: the tails are thin and the ratio noisy
  std::vector<double> sorted = y;
  std::sort(sorted.begin(), sorted.end());
  const double lo = sorted[200], hi = sorted[sorted.size() - 200];
  double worst = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i)
    if (y[i] > lo && y[i] < hi) worst = std::max(worst, std::abs(w.w[i] - 1.0));
  CHECK(worst <= 0.02);
  CHECK(w.zero_count == 0);
  CHECK(!w.warning);
}

TEST_CASE("weights are mean one and nonnegative") {
  const Lognormal spec{7.0 / 8.0, 0.5};
  const auto F = discretize(spec, 4096);
  const auto es = make_es(0.9, F.size());
  const auto m = solve_rm(F, RmStress{{{es, 1.1 * eval_rm(F, es)}}});
  const auto y = lognormal_sample(20000, 4);
  const auto w = rn_weights(y, spec, m.stressed);
  double s = 0.0;
  for (double v : w.w) {
    CHECK(v >= 0.0);
    s += v;
  }
  CHECK(s / y.size() == doctest::Approx(1.0).epsilon(1e-12));
  // upward tail stress: large y weighs more than small y
  const auto top = std::max_element(y.begin(), y.end()) - y.begin();
  const auto bottom = std::min_element(y.begin(), y.end()) - y.begin();
  CHECK(w.w[top] > w.w[bottom]);
  // stressed mean under Q moves toward the stressed model mean
  const double eq = stressed_expectation(y, w);
  double ep = 0.0;
  for (double v : y) ep += v;
  ep /= y.size();
  const double target_shift = mean_sd(m.stressed).mean - mean_sd(F).mean;
  CHECK(eq - ep == doctest::Approx(target_shift).epsilon(0.15));
}

TEST_CASE("an atom in the stressed model attracts the largest weights") {
  const Lognormal spec{7.0 / 8.0, 0.5};
  const auto F = discretize(spec, 4096);
  const auto m = solve_var(F, VarStress{0.9, var(F, 0.8), VarKind::Left});
  const auto y = lognormal_sample(20000, 5);
  const auto w = rn_weights(y, spec, m.stressed);
  const double atom = var(F, 0.8);
  const auto best = std::max_element(w.w.begin(), w.w.end()) - w.w.begin();
  CHECK(std::abs(y[best] - atom) <= 2.0 * w.bin_width);
  // mass between VaR_0.8 and VaR_0.9 of F is swept into the atom; only the
  // one grid cell interpolated across the jump is left there
  std::size_t inside = 0;
  double largest = 0.0;
  const double up = var(F, 0.9);
  for (std::size_t i = 0; i < y.size(); ++i)
    if (y[i] > atom + 2.0 * w.bin_width && y[i] < up - 2.0 * w.bin_width) {
      ++inside;
      largest = std::max(largest, w.w[i]);
    }
  REQUIRE(inside > 0);
  CHECK(largest <= 0.01);
}

TEST_CASE("empirical baseline") {
  const auto y = lognormal_sample(5000, 6);
  const Empirical spec(y);
  const auto F = discretize(spec, 1024);
  const auto w = rn_weights(y, spec, F);
  for (double v : w.w) CHECK(std::abs(v - 1.0) <= 1e-6);
}

TEST_CASE("stressed cdf and expectation") {
  const Vec x{0.0, 1.0};
  WeightSet w;
  w.w = {0.5, 1.5};
  CHECK(stressed_expectation(x, w) == doctest::Approx(0.75));
  const auto cdf = stressed_cdf(x, w);
  CHECK(cdf(-1.0) == 0.0);
  CHECK(cdf(0.0) == doctest::Approx(0.25));
  CHECK(cdf(0.5) == doctest::Approx(0.25));
  CHECK(cdf(1.0) == doctest::Approx(1.0));
  const auto u = WeightSet::uniform(4);
  const Vec tied{2.0, 1.0, 2.0, 3.0};
  const auto c = stressed_cdf(tied, u);
  CHECK(c.x.size() == 3);
  CHECK(c(2.0) == doctest::Approx(0.75));
  CHECK(stressed_expectation(tied, u) == doctest::Approx(2.0));
}

TEST_CASE("weighted quantile") {
  const Vec x{3.0, 1.0, 2.0, 4.0};
  const Vec w{1.0, 1.0, 1.0, 1.0};
  CHECK(weighted_quantile(x, w, 0.25) == 1.0);
  CHECK(weighted_quantile(x, w, 0.26) == 2.0);
  CHECK(weighted_quantile(x, w, 1.0) == 4.0);
  const Vec w2{0.0, 0.0, 0.0, 4.0};
  CHECK(weighted_quantile(x, w2, 0.1) == 4.0);
}

TEST_CASE("sample set validation") {
  SampleSet s;
  s.Y = Vec(50, 1.0);
  CHECK_THROWS_AS(s.validate(), InvalidArgument);
  s.Y = Vec(200, 1.0);
  s.X = {Vec(200, 2.0)};
  s.names = {"a"};
  CHECK_NOTHROW(s.validate());
  CHECK(s.column("a")[0] == 2.0);
  CHECK_THROWS_AS(s.column("b"), InvalidArgument);
  s.X[0][3] = std::nan("");
  CHECK_THROWS_AS(s.validate(), InvalidArgument);
}
