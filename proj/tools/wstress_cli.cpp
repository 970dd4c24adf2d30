#include <CLI11.hpp>
#include <iostream>

#include "wstress/io/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Wasserstein reverse stress testing"};
  app.require_subcommand(1);

  std::string config;
  wstress::io::Overrides ov;
  std::uint64_t seed = 0;
  std::string out;
  std::size_t grid_n = 0;
  double zeta = 0.0;

  const std::vector<std::pair<std::string, std::string>> commands{
      {"stress", "Solve every configured stress and write grids, densities, weights and a summary"},
      {"sensitivity", "Reverse sensitivity (and optional delta measure) table for each stress"},
      {"simulate", "Generate the spatial insurance scenario as a sample CSV"},
      {"smooth", "Smoothed isotonic regression of one CSV column"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("config", config, "JSON config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "RNG seed");
    sub->add_option("--out", out, "Output directory");
    sub->add_option("--grid-n", grid_n, "Quantile grid size (>= 16)");
    sub->add_option("--zeta", zeta, "SPAV smoothing (0 = plain PAV)")->check(CLI::NonNegativeNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : wstress::io::kExitIo;
  }

  auto* sub = app.get_subcommands().front();
  if (sub->count("--seed")) ov.seed = seed;
  if (sub->count("--out")) ov.out = out;
  if (sub->count("--grid-n")) ov.grid_n = grid_n;
  if (sub->count("--zeta")) ov.zeta = zeta;
  return wstress::io::run_command(sub->get_name(), config, ov, std::cerr);
}
