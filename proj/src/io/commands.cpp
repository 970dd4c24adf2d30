#include "wstress/io/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "wstress/error.hpp"
#include "wstress/io/csv.hpp"
#include "wstress/isotonic.hpp"
#include "wstress/scenario.hpp"
#include "wstress/sensitivity.hpp"

namespace wstress::io {

namespace fs = std::filesystem;

namespace {

std::vector<double> draw_from(const BaselineSpec& spec, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> y(n);
  for (auto& v : y) {
    double u = 0.0;
    while (u <= 0.0) u = unif(rng);
    v = quantile(spec, u);
  }
  return y;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

std::vector<double> gamma_breakpoints(const StressSpec& spec) {
  std::vector<double> pts;
  auto add = [&](const std::vector<RmConstraint>& cs) {
    for (const auto& c : cs)
      for (double b : c.gamma.breakpoints()) pts.push_back(b);
  };
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, VarStress>) {
          pts.push_back(s.alpha);
        } else if constexpr (!std::is_same_v<T, IntegralStress>) {
          add(s.constraints);
        }
      },
      spec);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

std::string join_flags(const std::vector<StructureFlag>& flags) {
  if (flags.empty()) return "none";
  std::string s;
  for (const auto& f : flags) s += (s.empty() ? "" : ",") + f.str();
  return s;
}

std::string status_name(int status) {
  switch (status) {
    case kExitOk:
      return "converged";
    case kExitNotConverged:
      return "not_converged";
    case kExitNoSolution:
      return "no_solution";
    default:
      return "error";
  }
}

int worst(int a, int b) {
  auto rank = [](int c) { return c == kExitNoSolution ? 3 : c == kExitNotConverged ? 2 : c == kExitIo ? 1 : 0; };
  return rank(a) >= rank(b) ? a : b;
}

std::vector<std::size_t> input_columns(const SampleSet& s) {
  std::vector<std::size_t> idx(s.X.size());
  for (std::size_t j = 0; j < idx.size(); ++j) idx[j] = j;
  return idx;
}

void write_summary(const RunConfig& cfg, const std::string& text) {
  ensure_dir(cfg.output_dir);
  write_text(cfg.output_dir / "summary.txt", text);
}

}  // namespace

SampleSet load_samples(const RunConfig& cfg) {
  SampleSet s;
  switch (cfg.input.kind) {
    case InputConfig::Kind::Csv: {
      const auto t = read_csv(cfg.input.csv);
      if (!t.has(cfg.input.output_column))
        throw ConfigError("input: column '" + cfg.input.output_column + "' not found in " + cfg.input.csv.string());
      s.Y = t.column(cfg.input.output_column);
      std::vector<std::string> names = cfg.input.inputs;
      if (names.empty())
        for (const auto& h : t.header)
          if (h != cfg.input.output_column && h != "theta") names.push_back(h);
      for (const auto& n : names) {
        if (!t.has(n)) throw ConfigError("input: column '" + n + "' not found in " + cfg.input.csv.string());
        s.X.push_back(t.column(n));
        s.names.push_back(n);
      }
      break;
    }
    case InputConfig::Kind::Scenario: {
      auto out = generate(cfg.input.scenario);
      s = std::move(out.samples);
      if (!cfg.input.inputs.empty()) {
        SampleSet sub;
        sub.Y = s.Y;
        for (const auto& n : cfg.input.inputs) {
          sub.X.push_back(s.column(n));
          sub.names.push_back(n);
        }
        s = std::move(sub);
      }
      break;
    }
    case InputConfig::Kind::None:
      if (!cfg.baseline) throw ConfigError("config: no input given and the baseline is empirical");
      s.Y = draw_from(*cfg.baseline, cfg.input.n_samples, cfg.seed);
      break;
  }
  try {
    s.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  return s;
}

std::uint64_t data_fingerprint(const SampleSet& s) {
  std::uint64_t h = fnv1a(s.Y.data(), s.Y.size() * sizeof(double));
  for (std::size_t j = 0; j < s.X.size(); ++j) {
    h = fnv1a(s.names[j].data(), s.names[j].size(), h);
    h = fnv1a(s.X[j].data(), s.X[j].size() * sizeof(double), h);
  }
  return h;
}

Prepared prepare(const RunConfig& cfg) {
  Prepared p;
  p.samples = load_samples(cfg);
  p.baseline_spec = cfg.baseline ? *cfg.baseline : BaselineSpec{Empirical(p.samples.Y)};
  p.baseline = discretize(p.baseline_spec, cfg.grid_n);
  const std::uint64_t fp = data_fingerprint(p.samples);
  p.hash = fnv1a_hex(cfg.canonical, fnv1a(&fp, sizeof fp));
  return p;
}

StressOutcome run_stress(const RunConfig& cfg, const Prepared& p, const StressConfig& stress) {
  StressOutcome o;
  o.name = stress.name;
  o.family = stress.family;
  try {
    const auto spec = stress.resolve(p.baseline);
    o.model = solve(p.baseline, spec, cfg.solver_options());
    o.weights = rn_weights(p.samples.Y, p.baseline_spec, o.model->stressed);
    o.flags = detect_structure(p.baseline, o.model->stressed, gamma_breakpoints(spec));
  } catch (const NotConverged& e) {
    o.status = kExitNotConverged;
    o.error = e.what();
    o.model = e.model();
  } catch (const NoSolution& e) {
    o.status = kExitNoSolution;
    o.error = e.what();
  } catch (const InvalidArgument& e) {
    o.status = kExitIo;
    o.error = e.what();
  }
  return o;
}

std::string format_summary(const std::string& command, const RunConfig& cfg, const Prepared& p,
                           const std::vector<StressOutcome>& outcomes, int exit_code) {
  std::ostringstream os;
  auto kv = [&](const std::string& k, const std::string& v) { os << k << " = " << v << "\n"; };
  auto kd = [&](const std::string& k, double v) { kv(k, format_double(v)); };
  kv("config_hash", p.hash);
  kv("command", command);
  kv("baseline", describe(p.baseline_spec));
  kv("grid_n", std::to_string(cfg.grid_n));
  kd("zeta", cfg.zeta);
  kd("tol", cfg.tol);
  kv("samples", std::to_string(p.samples.size()));
  std::string names;
  for (const auto& o : outcomes) names += (names.empty() ? "" : ",") + o.name;
  kv("stresses", names);
  for (const auto& o : outcomes) {
    const std::string k = "stress." + o.name + ".";
    kv(k + "family", o.family);
    kv(k + "status", status_name(o.status));
    if (!o.error.empty()) kv(k + "error", o.error);
    if (!o.model) continue;
    const auto& m = *o.model;
    kv(k + "method", m.method);
    kv(k + "converged", m.converged ? "true" : "false");
    kd(k + "w2", m.w2);
    kd(k + "zeta", m.zeta);
    kv(k + "iterations", std::to_string(m.iterations));
    kv(k + "evaluations", std::to_string(m.evaluations));
    kd(k + "max_abs_residual", m.max_abs_residual());
    for (std::size_t j = 0; j < m.multipliers.size(); ++j) kd(k + "multiplier." + m.multiplier_names[j], m.multipliers[j]);
    for (const auto& c : m.constraints) {
      const std::string ck = k + "constraint." + c.label + ".";
      kv(ck + "relation", c.relation);
      kd(ck + "target", c.target);
      kd(ck + "achieved", c.achieved);
      kd(ck + "residual", c.residual);
      kd(ck + "tolerance", c.tolerance);
      kv(ck + "satisfied", c.satisfied ? "true" : "false");
    }
    for (std::size_t j = 0; j < m.notes.size(); ++j) kv(k + "note" + std::to_string(j + 1), m.notes[j]);
    if (o.status == kExitOk) {
      kv(k + "structure", join_flags(o.flags));
      kv(k + "weights.zero_count", std::to_string(o.weights.zero_count));
      kv(k + "weights.warning", o.weights.warning ? "true" : "false");
      kd(k + "weights.bin_width", o.weights.bin_width);
    }
  }
  kv("exit_code", std::to_string(exit_code));
  return os.str();
}

int cmd_stress(const RunConfig& cfg, std::ostream& log) {
  if (cfg.stresses.empty()) throw ConfigError("config: at least one stress is required");
  const auto p = prepare(cfg);
  ensure_dir(cfg.output_dir);
  std::vector<StressOutcome> outcomes;
  int code = kExitOk;
  const auto u = p.baseline.abscissae();
  for (const auto& s : cfg.stresses) {
    auto o = run_stress(cfg, p, s);
    log << s.name << ": " << status_name(o.status) << (o.error.empty() ? "" : " (" + o.error + ")") << "\n";
    code = worst(code, o.status);
    if (o.status == kExitOk) {
      const fs::path dir = cfg.output_dir / s.name;
      ensure_dir(dir);
      const auto& G = o.model->stressed;
      write_csv(dir / "quantile.csv", {"u", "baseline_q", "stressed_q"}, {u, p.baseline.q(), G.q()}, p.hash);
      const double lo = std::min(p.baseline.q().front(), G.q().front());
      double hi = std::max(p.baseline.q().back(), G.q().back());
      if (!(hi > lo)) hi = lo + 1.0;
      std::vector<double> ys(kDefaultGridSize);
      for (std::size_t j = 0; j < ys.size(); ++j)
        ys[j] = lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(ys.size() - 1);
      write_csv(dir / "density.csv", {"y", "f_baseline", "g_stressed"},
                {ys, grid_density_on(p.baseline, ys), grid_density_on(G, ys)}, p.hash);
      std::vector<double> rows(o.weights.size());
      for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = static_cast<double>(i);
      write_csv(dir / "weights.csv", {"row_id", "weight"}, {rows, o.weights.w}, p.hash);
    }
    outcomes.push_back(std::move(o));
  }
  write_summary(cfg, format_summary("stress", cfg, p, outcomes, code));
  return code;
}

int cmd_sensitivity(const RunConfig& cfg, std::ostream& log) {
  if (cfg.stresses.empty()) throw ConfigError("config: at least one stress is required");
  const auto p = prepare(cfg);
  const auto& S = p.samples;
  if (S.X.empty()) throw ConfigError("sensitivity: the input has no input columns");
  for (const auto& [a, b] : cfg.sensitivity.pairs) {
    S.column(a);
    S.column(b);
  }
  ensure_dir(cfg.output_dir);
  const bool delta = cfg.sensitivity.delta;

  std::vector<StressOutcome> outcomes;
  int code = kExitOk;
  std::ostringstream table;
  table << "# config_hash=" << p.hash << "\n";
  table << "stress,input,s_tag,S,numerator,max_bound,min_bound" << (delta ? ",delta" : "") << "\n";
  std::vector<std::vector<double>> delta_cols;
  std::vector<std::string> delta_header{"input_index", "P"};
  if (delta) {
    std::vector<double> idx, base;
    for (std::size_t j = 0; j < S.X.size(); ++j) {
      idx.push_back(static_cast<double>(j + 1));
      base.push_back(delta_measure(S.Y, S.X[j], {}, cfg.sensitivity.delta_options));
    }
    delta_cols = {idx, base};
  }

  for (const auto& s : cfg.stresses) {
    auto o = run_stress(cfg, p, s);
    log << s.name << ": " << status_name(o.status) << (o.error.empty() ? "" : " (" + o.error + ")") << "\n";
    code = worst(code, o.status);
    if (o.status == kExitOk) {
      std::vector<double> dcol;
      for (std::size_t j : input_columns(S)) {
        const double d = delta ? delta_measure(S.Y, S.X[j], o.weights.w, cfg.sensitivity.delta_options) : 0.0;
        dcol.push_back(d);
        for (const auto& sf : cfg.sensitivity.s_functions) {
          const auto r = reverse_sensitivity(sf.apply(S.X[j]), o.weights);
          table << s.name << "," << S.names[j] << "," << sf.tag() << "," << format_double(r.S) << ","
                << format_double(r.numerator) << "," << format_double(r.max_bound) << ","
                << format_double(r.min_bound);
          if (delta) table << "," << format_double(d);
          table << "\n";
        }
      }
      for (const auto& [a, b] : cfg.sensitivity.pairs) {
        const auto r = bivariate_reverse_sensitivity(cfg.sensitivity.pair_s.apply(S.column(a), S.column(b)), o.weights);
        table << s.name << "," << a << ":" << b << "," << cfg.sensitivity.pair_s.tag() << "," << format_double(r.S)
              << "," << format_double(r.numerator) << "," << format_double(r.max_bound) << ","
              << format_double(r.min_bound);
        if (delta) table << ",";
        table << "\n";
      }
      if (delta) {
        delta_cols.push_back(dcol);
        delta_header.push_back(s.name);
      }
    }
    outcomes.push_back(std::move(o));
  }
  write_text(cfg.output_dir / "sensitivity.csv", table.str());
  if (delta) write_csv(cfg.output_dir / "delta.csv", delta_header, delta_cols, p.hash);
  write_summary(cfg, format_summary("sensitivity", cfg, p, outcomes, code));
  return code;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& log) {
  if (cfg.input.kind != InputConfig::Kind::Scenario)
    throw ConfigError("simulate: the config needs an input.scenario section");
  const auto& sc = cfg.input.scenario;
  const auto out = generate(sc);
  const std::string hash = fnv1a_hex(scenario_canonical(sc));
  ensure_dir(cfg.output_dir);
  std::vector<std::string> header = out.samples.names;
  header.push_back("Y");
  header.push_back("theta");
  auto cols = out.samples.X;
  cols.push_back(out.samples.Y);
  cols.push_back(out.theta);
  write_csv(cfg.output_dir / "samples.csv", header, cols, hash);

  std::ostringstream meta;
  meta << "config_hash = " << hash << "\n";
  meta << "seed = " << sc.seed << "\n";
  meta << "n_samples = " << sc.n_samples << "\n";
  for (std::size_t m = 0; m < sc.locations.size(); ++m)
    meta << "location.L" << m + 1 << " = " << format_double(sc.locations[m][0]) << ","
         << format_double(sc.locations[m][1]) << "\n";
  for (std::size_t k = 0; k < sc.theta_values.size(); ++k) {
    const auto count = std::count(out.regime.begin(), out.regime.end(), static_cast<int>(k));
    meta << "theta." << format_double(sc.theta_values[k]) << ".count = " << count << "\n";
  }
  write_text(cfg.output_dir / "samples.meta.txt", meta.str());
  log << "wrote " << sc.n_samples << " samples to " << (cfg.output_dir / "samples.csv").string() << "\n";
  return kExitOk;
}

int cmd_smooth(const RunConfig& cfg, std::ostream& log) {
  if (cfg.smooth.csv.empty() || cfg.smooth.column.empty())
    throw ConfigError("smooth: the config needs smooth.csv and smooth.column");
  const auto t = read_csv(cfg.smooth.csv);
  if (!t.has(cfg.smooth.column)) throw ConfigError("smooth: no column '" + cfg.smooth.column + "'");
  const auto& v = t.column(cfg.smooth.column);
  if (v.size() < 2) throw ConfigError("smooth: need at least two values");
  std::vector<double> w(v.size(), 1.0);
  if (!cfg.smooth.weight_column.empty()) {
    if (!t.has(cfg.smooth.weight_column)) throw ConfigError("smooth: no column '" + cfg.smooth.weight_column + "'");
    w = t.column(cfg.smooth.weight_column);
  }
  const auto u = midpoint_grid(v.size());
  std::vector<double> x;
  try {
    x = spav(v, w, u, cfg.zeta);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("smooth: ") + e.what());
  }
  std::uint64_t fp = fnv1a(v.data(), v.size() * sizeof(double));
  fp = fnv1a(w.data(), w.size() * sizeof(double), fp);
  const std::string hash = fnv1a_hex(cfg.canonical, fp);
  ensure_dir(cfg.output_dir);
  write_csv(cfg.output_dir / "smoothed.csv", {"u", "value", "smoothed"}, {u, v, x}, hash);
  log << "smoothed " << v.size() << " values (zeta = " << cfg.zeta << ")\n";
  return kExitOk;
}

int run_command(const std::string& command, const fs::path& config, const Overrides& overrides, std::ostream& log) {
  try {
    const auto cfg = load_config(config, overrides);
    if (command == "stress") return cmd_stress(cfg, log);
    if (command == "sensitivity") return cmd_sensitivity(cfg, log);
    if (command == "simulate") return cmd_simulate(cfg, log);
    if (command == "smooth") return cmd_smooth(cfg, log);
    log << "error: unknown command '" << command << "'\n";
    return kExitIo;
  } catch (const ConfigError& e) {
    log << "error: " << e.what() << "\n";
  } catch (const IoError& e) {
    log << "error: " << e.what() << "\n";
  } catch (const InvalidArgument& e) {
    log << "error: " << e.what() << "\n";
  }
  return kExitIo;
}

}  // namespace wstress::io
