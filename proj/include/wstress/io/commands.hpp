#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "wstress/io/config.hpp"
#include "wstress/reweight.hpp"
#include "wstress/structure.hpp"

namespace wstress::io {

enum ExitCode : int { kExitOk = 0, kExitIo = 1, kExitNotConverged = 2, kExitNoSolution = 3 };

/// Samples from the configured input: a CSV, the built-in scenario, or
/// draws from a parametric baseline.
SampleSet load_samples(const RunConfig& cfg);

/// FNV-1a over the column names and the raw sample values.
std::uint64_t data_fingerprint(const SampleSet& s);

struct StressOutcome {
  std::string name;
  std::string family;
  int status = kExitOk;
  std::string error;
  std::optional<StressedModel> model;
  WeightSet weights;
  std::vector<StructureFlag> flags;
};

struct Prepared {
  SampleSet samples;
  BaselineSpec baseline_spec = Normal{0.0, 1.0};
  QuantileGrid baseline;
  std::string hash;
};

Prepared prepare(const RunConfig& cfg);
StressOutcome run_stress(const RunConfig& cfg, const Prepared& p, const StressConfig& stress);

/// key = value text; deterministic for identical inputs.
std::string format_summary(const std::string& command, const RunConfig& cfg, const Prepared& p,
                           const std::vector<StressOutcome>& outcomes, int exit_code);

int cmd_stress(const RunConfig& cfg, std::ostream& log);
int cmd_sensitivity(const RunConfig& cfg, std::ostream& log);
int cmd_simulate(const RunConfig& cfg, std::ostream& log);
int cmd_smooth(const RunConfig& cfg, std::ostream& log);

/// Load the config and run `command`; config and I/O failures map to exit 1.
int run_command(const std::string& command, const std::filesystem::path& config, const Overrides& overrides,
                std::ostream& log);

}  // namespace wstress::io
