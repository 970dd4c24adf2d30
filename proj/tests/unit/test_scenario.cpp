#include <cmath>

#include "doctest.h"
#include "wstress/error.hpp"
#include "wstress/scenario.hpp"

using namespace wstress;

namespace {

double corr(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

TEST_CASE("correlation matrix") {
  const std::vector<Location> z{{0, 0}, {3, 4}, {0, 0}};
  const auto r0 = correlation_matrix(z, 0.0);
  for (auto& row : r0)
    for (double v : row) CHECK(v == 1.0);
  const auto r = correlation_matrix(z, 0.4);
  CHECK(r[0][1] == doctest::Approx(std::exp(-2.0)));
  CHECK(r[0][2] == 1.0);
  CHECK(r[1][1] == 1.0);
}

TEST_CASE("default locations lie in the square and are fixed") {
  const auto a = SpatialConfig::default_locations();
  const auto b = SpatialConfig::default_locations();
  REQUIRE(a.size() == 10);
  CHECK(a == b);
  for (auto& p : a) {
    CHECK(p[0] >= 0.0);
    CHECK(p[0] <= 10.0);
    CHECK(p[1] >= 0.0);
    CHECK(p[1] <= 10.0);
  }
}

TEST_CASE("generated sample") {
  SpatialConfig cfg;
  cfg.n_samples = 100000;
  const auto out = generate(cfg);
  const auto& s = out.samples;
  REQUIRE(s.X.size() == 10);
  REQUIRE(s.size() == cfg.n_samples);
  for (std::size_t m = 0; m < 10; ++m) {
    double mean = 0;
    for (double v : s.X[m]) {
      REQUIRE(v >= 25.0);
      mean += v;
    }
    mean /= s.size();
    const double expect = 25.0 * (m + 1) + 25.0;
    CHECK(std::abs(mean - expect) <= 0.02 * expect);
  }
  for (std::size_t i = 0; i < s.size(); i += 997) {
    double sum = 0;
    for (std::size_t m = 0; m < 10; ++m) sum += s.X[m][i];
    CHECK(s.Y[i] == doctest::Approx(sum).epsilon(1e-12));
  }
  std::array<double, 3> freq{};
  for (int r : out.regime) freq[r] += 1.0;
  for (int k = 0; k < 3; ++k) CHECK(std::abs(freq[k] / s.size() - cfg.theta_probs[k]) <= 0.01);
  CHECK(s.names.front() == "L1");
}

TEST_CASE("theta = 0 is comonotone") {
  SpatialConfig cfg;
  cfg.theta_values = {0.0};
  cfg.theta_probs = {1.0};
  cfg.n_samples = 2000;
  const auto s = generate(cfg).samples;
  // same uniform drives every location: ranks agree
  for (std::size_t i = 1; i < s.size(); ++i) {
    const bool up1 = s.X[0][i] > s.X[0][i - 1];
    const bool up9 = s.X[9][i] > s.X[9][i - 1];
    CHECK(up1 == up9);
  }
  CHECK(corr(s.X[0], s.X[9]) > 0.95);
}

TEST_CASE("reproducible by seed") {
  SpatialConfig cfg;
  cfg.n_samples = 1000;
  const auto a = generate(cfg);
  const auto b = generate(cfg);
  CHECK(a.samples.Y == b.samples.Y);
  cfg.seed = 7;
  const auto c = generate(cfg);
  CHECK(a.samples.Y != c.samples.Y);
}

TEST_CASE("validation") {
  SpatialConfig cfg;
  cfg.theta_probs = {0.5, 0.5, 0.5};
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = SpatialConfig{};
  cfg.shape = -1.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
}

TEST_CASE("table 1 specification") {
  SpatialConfig cfg;
  cfg.n_samples = 20000;
  const auto out = generate(cfg);
  const auto res = table1_stresses(out, 2048);
  CHECK(res.stress1.converged);
  CHECK(res.stress2.converged);
  CHECK(res.stress2.multipliers[0] > 0.0);
  CHECK(res.stress2.w2 > res.stress1.w2);
}
