#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "wstress/distributions.hpp"
#include "wstress/risk_measures.hpp"
#include "wstress/scenario.hpp"
#include "wstress/sensitivity.hpp"
#include "wstress/stress_solvers.hpp"

namespace wstress::io {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Absolute value, or a bump relative to the baseline: base + bump * |base|.
struct TargetSpec {
  bool relative = false;
  double value = 0.0;

  double resolve(double base) const { return relative ? base + value * std::abs(base) : value; }
};

struct RmConstraintSpec {
  WeightTag measure;
  TargetSpec target;
};

/// h on the grid: constant, indicator of (lo, hi], or explicit values.
struct HSpec {
  enum class Kind { Constant, Indicator, Values };
  Kind kind = Kind::Constant;
  double value = 1.0;
  double lo = 0.0;
  double hi = 1.0;
  std::vector<double> values;

  std::vector<double> sample(std::size_t n) const;
};

struct IntegralConstraintSpec {
  HSpec h;
  TargetSpec c;
  std::string label;
};

struct UtilitySpec {
  std::string type = "hara";
  double a = 1.0;
  double b = 5.0;
  double eta = 0.5;

  Utility make() const;
};

struct StressConfig {
  std::string name;
  std::string family;  // rm, mean_var_rm, integral, var, utility_rm
  std::vector<RmConstraintSpec> constraints;
  TargetSpec mean, sd;
  std::vector<IntegralConstraintSpec> linear, quadratic;
  double alpha = 0.0;
  TargetSpec q;
  VarKind kind = VarKind::Left;
  UtilitySpec utility;
  TargetSpec c;

  /// Turn relative targets into absolute ones against `baseline`.
  StressSpec resolve(const QuantileGrid& baseline) const;
};

struct InputConfig {
  enum class Kind { None, Csv, Scenario };
  Kind kind = Kind::None;
  std::filesystem::path csv;
  std::string output_column = "Y";
  /// Empty means every column except the output and "theta".
  std::vector<std::string> inputs;
  SpatialConfig scenario;
  /// Samples drawn from a parametric baseline when no input is given.
  std::size_t n_samples = 100000;
};

struct SensitivityConfig {
  std::vector<SFunction> s_functions;
  std::vector<std::pair<std::string, std::string>> pairs;
  SFunction pair_s = SFunction::joint_tail(0.95);
  bool delta = false;
  DeltaOptions delta_options;
};

struct SmoothConfig {
  std::filesystem::path csv;
  std::string column;
  std::string weight_column;
};

struct RunConfig {
  InputConfig input;
  /// Unset means the empirical distribution of the output column.
  std::optional<BaselineSpec> baseline;
  std::vector<StressConfig> stresses;
  std::size_t grid_n = kDefaultGridSize;
  double zeta = 0.0;
  double tol = 1e-6;
  int max_iter = 200;
  std::uint64_t seed = 42;
  std::filesystem::path output_dir = "wstress_out";
  SensitivityConfig sensitivity;
  SmoothConfig smooth;
  /// Canonical JSON of the settings that affect results (no paths).
  std::string canonical;

  SolverOptions solver_options() const;
};

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out;
  std::optional<std::size_t> grid_n;
  std::optional<double> zeta;
};

inline constexpr std::size_t kMinCliGrid = 16;

/// Parse and validate; relative input paths resolve against the config's directory.
RunConfig load_config(const std::filesystem::path& path, const Overrides& overrides = {});
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = ".",
                       const Overrides& overrides = {});

/// Canonical JSON of the scenario settings (hashed by simulate).
std::string scenario_canonical(const SpatialConfig& c);

/// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(const std::string& bytes, std::uint64_t state = 0xcbf29ce484222325ULL);
std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t state = 0xcbf29ce484222325ULL);

}  // namespace wstress::io
