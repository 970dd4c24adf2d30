#include "wstress/scenario.hpp"

#include <Eigen/Dense>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "wstress/error.hpp"

namespace wstress {

std::vector<Location> SpatialConfig::default_locations(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 10.0);
  std::vector<Location> z(10);
  for (auto& p : z) {
    p[0] = unif(rng);
    p[1] = unif(rng);
  }
  return z;
}

void SpatialConfig::validate() const {
  require(locations.size() == 10, "scenario: exactly 10 locations are required");
  for (const auto& p : locations) require(std::isfinite(p[0]) && std::isfinite(p[1]), "scenario: non-finite location");
  require(!theta_values.empty() && theta_values.size() == theta_probs.size(),
          "scenario: theta values and probabilities differ in length");
  double s = 0.0;
  for (double p : theta_probs) {
    require(p >= 0.0, "scenario: negative theta probability");
    s += p;
  }
  require(std::abs(s - 1.0) <= 1e-12, "scenario: theta probabilities must sum to 1");
  for (double t : theta_values) require(std::isfinite(t) && t >= 0.0, "scenario: theta must be nonnegative");
  require(shape > 0.0 && rate_scale > 0.0 && std::isfinite(shift), "scenario: invalid marginal parameters");
  require(n_samples >= SampleSet::kMinSamples, "scenario: need at least 100 samples");
}

std::vector<std::vector<double>> correlation_matrix(const std::vector<Location>& z, double theta) {
  const std::size_t d = z.size();
  std::vector<std::vector<double>> rho(d, std::vector<double>(d, 1.0));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      if (i != j) rho[i][j] = std::exp(-theta * std::hypot(z[i][0] - z[j][0], z[i][1] - z[j][1]));
  return rho;
}

namespace {

// Factor A with A A^T = rho; empty for the comonotone regime.
Eigen::MatrixXd factor(const std::vector<Location>& z, double theta) {
  const auto d = static_cast<Eigen::Index>(z.size());
  if (theta == 0.0) return {};
  const auto rho = correlation_matrix(z, theta);
  Eigen::MatrixXd m(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) m(i, j) = rho[i][j];
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  require(es.info() == Eigen::Success, "scenario: correlation decomposition failed");
  require(es.eigenvalues().minCoeff() > -1e-8, "scenario: correlation matrix is not positive semi-definite");
  return es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

ScenarioOutput generate(const SpatialConfig& config) {
  config.validate();
  const std::size_t d = config.locations.size();
  const std::size_t n = config.n_samples;
  std::vector<Eigen::MatrixXd> factors;
  for (double t : config.theta_values) factors.push_back(factor(config.locations, t));
  std::vector<double> cum(config.theta_probs.size());
  std::partial_sum(config.theta_probs.begin(), config.theta_probs.end(), cum.begin());

  ScenarioOutput out;
  auto& s = out.samples;
  s.X.assign(d, std::vector<double>(n));
  s.Y.assign(n, 0.0);
  for (std::size_t m = 0; m < d; ++m) s.names.push_back("L" + std::to_string(m + 1));
  out.regime.resize(n);
  out.theta.resize(n);

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd eps(static_cast<Eigen::Index>(d)), zvec(static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < n; ++i) {
    const double r = unif(rng);
    std::size_t k = 0;
    while (k + 1 < cum.size() && r >= cum[k]) ++k;
    out.regime[i] = static_cast<int>(k);
    out.theta[i] = config.theta_values[k];
    if (factors[k].size() == 0) {
      zvec.setConstant(normal(rng));
    } else {
      for (auto& e : eps) e = normal(rng);
      zvec = factors[k] * eps;
    }
    for (std::size_t m = 0; m < d; ++m) {
      const double z = zvec(static_cast<Eigen::Index>(m));
      // invert on the smaller tail so large z keeps full precision
      const double g = z <= 0.0 ? boost::math::gamma_p_inv(config.shape, std_normal_cdf(z))
                                : boost::math::gamma_q_inv(config.shape, std_normal_cdf(-z));
      const double rate = config.rate_scale / static_cast<double>(m + 1);
      const double loss = config.shift + g / rate;
      s.X[m][i] = loss;
      s.Y[i] += loss;
    }
  }
  return out;
}

UtilityRm table1_spec(const QuantileGrid& baseline, const Table1Stress& bump) {
  const std::size_t n = baseline.size();
  auto bumped = [](double base, double r) { return base + r * std::abs(base); };
  UtilityRm spec{Utility::hara(1.0, 5.0, 0.5), 0.0, {}};
  spec.c = bumped(expected_utility(baseline, spec.utility), bump.utility_bump);
  const auto es80 = make_es(0.8, n);
  const auto es95 = make_es(0.95, n);
  spec.constraints.push_back({es80, bumped(eval_rm(baseline, es80), bump.es80_bump)});
  spec.constraints.push_back({es95, bumped(eval_rm(baseline, es95), bump.es95_bump)});
  return spec;
}

Table1Result table1_stresses(const ScenarioOutput& output, std::size_t grid_n, const SolverOptions& opts) {
  Table1Result r{discretize(Empirical(output.samples.Y), grid_n), {}, {}, {}, {}};
  r.spec1 = table1_spec(r.baseline, kTable1Stress1);
  r.spec2 = table1_spec(r.baseline, kTable1Stress2);
  r.stress1 = solve_utility_rm(r.baseline, r.spec1, opts);
  r.stress2 = solve_utility_rm(r.baseline, r.spec2, opts);
  return r;
}

}  // namespace wstress
