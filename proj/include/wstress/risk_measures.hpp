#pragma once

#include <functional>
#include <limits>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "wstress/distributions.hpp"

namespace wstress {

struct EsTag {
  double alpha;
};
/// gamma(u) = (p 1{u < beta} + (1-p) 1{u > alpha}) / eta.
struct AlphaBetaTag {
  double alpha;
  double beta;
  double p;
};
struct RvarTag {
  double alpha;
  double beta;
};
struct MeanTag {};
struct CustomTag {
  std::vector<double> gamma;
};

using WeightTag = std::variant<EsTag, AlphaBetaTag, RvarTag, MeanTag, CustomTag>;

/// Distortion weight sampled on the midpoint grid, normalised so that the
/// grid mean of gamma is one.
struct DistortionWeight {
  WeightTag tag;
  std::vector<double> gamma;

  std::size_t size() const { return gamma.size(); }
  std::string label() const;
  /// Points in (0,1) where the analytic weight is discontinuous.
  std::vector<double> breakpoints() const;
  /// Numeric check used to gate the closed-form coherent stress.
  bool nondecreasing() const;
  /// (1/n) sum gamma_i^2.
  double squared_mean() const;
};

DistortionWeight make_gamma(const WeightTag& tag, std::size_t n);
inline DistortionWeight make_es(double alpha, std::size_t n) { return make_gamma(EsTag{alpha}, n); }
inline DistortionWeight make_alpha_beta(double alpha, double beta, double p, std::size_t n) {
  return make_gamma(AlphaBetaTag{alpha, beta, p}, n);
}
inline DistortionWeight make_rvar(double alpha, double beta, std::size_t n) { return make_gamma(RvarTag{alpha, beta}, n); }

/// (1/n) sum q_i gamma_i.
double eval_rm(const QuantileGrid& g, const DistortionWeight& w);
double eval_rm(std::span<const double> q, std::span<const double> gamma);

/// Left-continuous quantile at alpha: q of the cell containing alpha.
double var(const QuantileGrid& g, double alpha);
/// Right-continuous quantile at alpha: q of the cell just right of alpha.
double var_plus(const QuantileGrid& g, double alpha);
std::size_t var_index(std::size_t n, double alpha);
std::size_t var_plus_index(std::size_t n, double alpha);

struct MeanSd {
  double mean;
  double sd;
};
MeanSd mean_sd(const QuantileGrid& g);
MeanSd mean_sd(std::span<const double> q);

/// Concave utility with first and second derivatives.
class Utility {
 public:
  using Fn = std::function<double(double)>;

  /// (1-eta)/eta * (a x/(1-eta) + b)^eta; eta == 1 is the linear a*x.
  static Utility hara(double a, double b, double eta);
  static Utility linear();
  /// Custom concave utility. Without `d2u` the second derivative is taken by
  /// central differences of `du`.
  static Utility custom(Fn u, Fn du, Fn d2u = {}, std::string name = "custom");

  double value(double x) const { return u_(x); }
  double derivative(double x) const { return du_(x); }
  double second_derivative(double x) const;
  /// Infimum of the domain (-inf when unbounded).
  double domain_lower() const { return lower_; }
  bool in_domain(double x) const { return x > lower_; }
  /// Throws InvalidArgument if any value lies outside the domain.
  void check_domain(std::span<const double> xs) const;
  const std::string& name() const { return name_; }

 private:
  Fn u_, du_, d2u_;
  double lower_ = -std::numeric_limits<double>::infinity();
  std::string name_;
};

/// (1/n) sum u(q_i).
double expected_utility(const QuantileGrid& g, const Utility& u);
double expected_utility(std::span<const double> q, const Utility& u);

}  // namespace wstress
