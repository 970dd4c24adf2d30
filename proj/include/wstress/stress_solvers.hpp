#pragma once

#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "wstress/distributions.hpp"
#include "wstress/risk_measures.hpp"

namespace wstress {

struct RmConstraint {
  DistortionWeight gamma;
  double target;
};

/// rho_{gamma_k}(G) = r_k for all k.
struct RmStress {
  std::vector<RmConstraint> constraints;
};

/// Mean m', standard deviation sd' and risk-measure equalities.
struct MeanVarRm {
  double mean;
  double sd;
  std::vector<RmConstraint> constraints;
};

/// int h G du <= c with h >= 0 on the grid.
struct LinearConstraint {
  std::vector<double> h;
  double c;
  std::string label = "linear";
};

/// int h G^2 du <= c with h >= 0 on the grid.
struct QuadraticConstraint {
  std::vector<double> h;
  double c;
  std::string label = "quadratic";
};

struct IntegralStress {
  std::vector<LinearConstraint> linear;
  std::vector<QuadraticConstraint> quadratic;
};

enum class VarKind { Left, Right };

/// VaR_alpha(G) = q (Left) or VaR+_alpha(G) = q (Right).
struct VarStress {
  double alpha;
  double q;
  VarKind kind = VarKind::Left;
};

/// E u(G) >= c together with risk-measure equalities.
struct UtilityRm {
  Utility utility;
  double c;
  std::vector<RmConstraint> constraints;
};

using StressSpec = std::variant<RmStress, MeanVarRm, IntegralStress, VarStress, UtilityRm>;

struct SolverOptions {
  /// Relative constraint tolerance; the absolute tolerance of a constraint
  /// with target t is tol * max(1, |t|).
  double tol = 1e-6;
  /// SPAV smoothing; 0 uses plain PAV.
  double zeta = 0.0;
  int max_iter = 200;
  /// Bound on multiplier * |slack| for inequality constraints.
  double complementarity_tol = 1e-6;
};

struct ConstraintReport {
  std::string label;
  std::string relation;  // "=", "<=", ">="
  double target = 0.0;
  double achieved = 0.0;
  /// achieved - target
  double residual = 0.0;
  double tolerance = 0.0;
  bool satisfied = false;
};

struct StressedModel {
  QuantileGrid baseline;
  QuantileGrid stressed;
  std::vector<std::string> multiplier_names;
  std::vector<double> multipliers;
  std::vector<ConstraintReport> constraints;
  double w2 = 0.0;
  double zeta = 0.0;
  bool converged = false;
  int iterations = 0;
  int evaluations = 0;
  std::string method;
  std::vector<std::string> notes;

  double max_abs_residual() const;
};

/// Solver could not meet its tolerances; carries the best iterate.
class NotConverged : public std::runtime_error {
 public:
  NotConverged(const std::string& what, StressedModel model)
      : std::runtime_error(what), model_(std::move(model)) {}
  const StressedModel& model() const { return model_; }

 private:
  StressedModel model_;
};

/// G* = (F + sum_k lambda_k gamma_k)^up with lambda chosen to meet the targets.
StressedModel solve_rm(const QuantileGrid& baseline, const RmStress& spec, const SolverOptions& opts = {});

/// Closed form G* = F + lambda* gamma for a nondecreasing gamma and r >= rho(F).
StressedModel solve_coherent(const QuantileGrid& baseline, const DistortionWeight& gamma, double target,
                             const SolverOptions& opts = {});

StressedModel solve_mean_var_rm(const QuantileGrid& baseline, const MeanVarRm& spec, const SolverOptions& opts = {});

/// Inequality constraints by an active-set loop over the constraints with
/// multipliers clamped nonnegative.
StressedModel solve_integral(const QuantileGrid& baseline, const IntegralStress& spec, const SolverOptions& opts = {});

/// Throws NoSolution when the stress points the wrong way (q above VaR for
/// the left-continuous constraint, below VaR+ for the right-continuous one).
StressedModel solve_var(const QuantileGrid& baseline, const VarStress& spec, const SolverOptions& opts = {});

StressedModel solve_utility_rm(const QuantileGrid& baseline, const UtilityRm& spec, const SolverOptions& opts = {});

/// Left-inverse of x -> x - lambda u'(x) at y.
double invert_nu(const Utility& u, double lambda, double y, double tol = 1e-10);

/// Dispatch on the stress family. Single coherent RM stresses with an
/// upward target and no smoothing take the closed form.
StressedModel solve(const QuantileGrid& baseline, const StressSpec& spec, const SolverOptions& opts = {});

std::string family_name(const StressSpec& spec);

}  // namespace wstress
