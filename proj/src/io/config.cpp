#include "wstress/io/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "wstress/error.hpp"

namespace wstress::io {

using nlohmann::json;

namespace {

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : obj.items())
    if (!ok.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
}

double num(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw ConfigError(where + ": missing '" + key + "'");
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(where + "." + key + ": expected a number");
  return v.get<double>();
}

double num_or(const json& obj, const char* key, double dflt, const std::string& where) {
  return obj.contains(key) ? num(obj, key, where) : dflt;
}

std::string str_or(const json& obj, const char* key, const std::string& dflt, const std::string& where) {
  if (!obj.contains(key)) return dflt;
  if (!obj.at(key).is_string()) throw ConfigError(where + "." + key + ": expected a string");
  return obj.at(key).get<std::string>();
}

std::size_t count_or(const json& obj, const char* key, std::size_t dflt, const std::string& where) {
  if (!obj.contains(key)) return dflt;
  const auto& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) throw ConfigError(where + "." + key + ": expected a count");
  return v.get<std::size_t>();
}

TargetSpec parse_target(const json& v, const std::string& where) {
  if (v.is_number()) return {false, v.get<double>()};
  if (v.is_object()) {
    check_keys(v, {"value", "bump"}, where);
    if (v.contains("value") == v.contains("bump")) throw ConfigError(where + ": give exactly one of 'value' or 'bump'");
    if (v.contains("bump")) return {true, num(v, "bump", where)};
    return {false, num(v, "value", where)};
  }
  throw ConfigError(where + ": expected a number or {\"value\"|\"bump\": x}");
}

TargetSpec target_at(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw ConfigError(where + ": missing '" + key + "'");
  return parse_target(obj.at(key), where + "." + key);
}

WeightTag parse_measure(const json& v, const std::string& where) {
  const auto type = str_or(v, "type", "", where);
  if (type == "es") {
    check_keys(v, {"type", "alpha"}, where);
    return EsTag{num(v, "alpha", where)};
  }
  if (type == "alpha_beta") {
    check_keys(v, {"type", "alpha", "beta", "p"}, where);
    return AlphaBetaTag{num(v, "alpha", where), num(v, "beta", where), num(v, "p", where)};
  }
  if (type == "rvar") {
    check_keys(v, {"type", "alpha", "beta"}, where);
    return RvarTag{num(v, "alpha", where), num(v, "beta", where)};
  }
  if (type == "mean") {
    check_keys(v, {"type"}, where);
    return MeanTag{};
  }
  throw ConfigError(where + ": unknown measure type '" + type + "' (es, alpha_beta, rvar, mean)");
}

std::vector<RmConstraintSpec> parse_constraints(const json& obj, const std::string& where, bool required) {
  std::vector<RmConstraintSpec> out;
  if (!obj.contains("constraints")) {
    if (required) throw ConfigError(where + ": missing 'constraints'");
    return out;
  }
  const auto& arr = obj.at("constraints");
  if (!arr.is_array()) throw ConfigError(where + ".constraints: expected a list");
  for (std::size_t k = 0; k < arr.size(); ++k) {
    const std::string w = where + ".constraints[" + std::to_string(k) + "]";
    check_keys(arr[k], {"measure", "target"}, w);
    if (!arr[k].contains("measure")) throw ConfigError(w + ": missing 'measure'");
    out.push_back({parse_measure(arr[k].at("measure"), w + ".measure"), target_at(arr[k], "target", w)});
  }
  if (required && out.empty()) throw ConfigError(where + ": at least one constraint is required");
  return out;
}

HSpec parse_h(const json& v, const std::string& where) {
  HSpec h;
  const auto type = str_or(v, "type", "constant", where);
  if (type == "constant") {
    check_keys(v, {"type", "value"}, where);
    h.kind = HSpec::Kind::Constant;
    h.value = num_or(v, "value", 1.0, where);
  } else if (type == "indicator") {
    check_keys(v, {"type", "lo", "hi", "value"}, where);
    h.kind = HSpec::Kind::Indicator;
    h.lo = num(v, "lo", where);
    h.hi = num(v, "hi", where);
    h.value = num_or(v, "value", 1.0, where);
  } else if (type == "values") {
    check_keys(v, {"type", "values"}, where);
    h.kind = HSpec::Kind::Values;
    h.values = v.at("values").get<std::vector<double>>();
  } else {
    throw ConfigError(where + ": unknown h type '" + type + "' (constant, indicator, values)");
  }
  return h;
}

std::vector<IntegralConstraintSpec> parse_integral(const json& obj, const char* key, const std::string& where) {
  std::vector<IntegralConstraintSpec> out;
  if (!obj.contains(key)) return out;
  const auto& arr = obj.at(key);
  if (!arr.is_array()) throw ConfigError(where + "." + key + ": expected a list");
  for (std::size_t k = 0; k < arr.size(); ++k) {
    const std::string w = where + "." + key + "[" + std::to_string(k) + "]";
    check_keys(arr[k], {"h", "c", "label"}, w);
    IntegralConstraintSpec c;
    c.h = arr[k].contains("h") ? parse_h(arr[k].at("h"), w + ".h") : HSpec{};
    c.c = target_at(arr[k], "c", w);
    c.label = str_or(arr[k], "label", std::string(key) + std::to_string(k + 1), w);
    out.push_back(std::move(c));
  }
  return out;
}

UtilitySpec parse_utility(const json& v, const std::string& where) {
  UtilitySpec u;
  u.type = str_or(v, "type", "hara", where);
  if (u.type == "hara") {
    check_keys(v, {"type", "a", "b", "eta"}, where);
    u.a = num(v, "a", where);
    u.b = num(v, "b", where);
    u.eta = num(v, "eta", where);
  } else if (u.type == "linear") {
    check_keys(v, {"type"}, where);
  } else {
    throw ConfigError(where + ": unknown utility type '" + u.type + "' (hara, linear)");
  }
  return u;
}

StressConfig parse_stress(const json& v, std::size_t index) {
  const std::string where = "stresses[" + std::to_string(index) + "]";
  StressConfig s;
  s.name = str_or(v, "name", "stress" + std::to_string(index + 1), where);
  for (char ch : s.name)
    if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' || ch == '.'))
      throw ConfigError(where + ".name: only letters, digits, '_', '-' and '.' are allowed");
  if (s.name.empty()) throw ConfigError(where + ".name: empty");
  s.family = str_or(v, "family", "", where);
  if (s.family == "rm") {
    check_keys(v, {"name", "family", "constraints"}, where);
    s.constraints = parse_constraints(v, where, true);
  } else if (s.family == "mean_var_rm") {
    check_keys(v, {"name", "family", "mean", "sd", "constraints"}, where);
    s.mean = target_at(v, "mean", where);
    s.sd = target_at(v, "sd", where);
    s.constraints = parse_constraints(v, where, false);
  } else if (s.family == "integral") {
    check_keys(v, {"name", "family", "linear", "quadratic"}, where);
    s.linear = parse_integral(v, "linear", where);
    s.quadratic = parse_integral(v, "quadratic", where);
    if (s.linear.empty() && s.quadratic.empty()) throw ConfigError(where + ": integral stress without constraints");
  } else if (s.family == "var") {
    check_keys(v, {"name", "family", "alpha", "q", "kind"}, where);
    s.alpha = num(v, "alpha", where);
    s.q = target_at(v, "q", where);
    const auto kind = str_or(v, "kind", "left", where);
    if (kind != "left" && kind != "right") throw ConfigError(where + ".kind: expected 'left' or 'right'");
    s.kind = kind == "left" ? VarKind::Left : VarKind::Right;
  } else if (s.family == "utility_rm") {
    check_keys(v, {"name", "family", "utility", "c", "constraints"}, where);
    if (!v.contains("utility")) throw ConfigError(where + ": missing 'utility'");
    s.utility = parse_utility(v.at("utility"), where + ".utility");
    s.c = target_at(v, "c", where);
    s.constraints = parse_constraints(v, where, false);
  } else {
    throw ConfigError(where + ": unknown family '" + s.family + "' (rm, mean_var_rm, integral, var, utility_rm)");
  }
  return s;
}

SFunction parse_s(const json& v, const std::string& where) {
  const auto type = str_or(v, "type", "", where);
  if (type == "identity") {
    check_keys(v, {"type"}, where);
    return SFunction::identity();
  }
  if (type == "power") {
    check_keys(v, {"type", "k"}, where);
    return SFunction::power(num(v, "k", where));
  }
  if (type == "tail") {
    check_keys(v, {"type", "alpha"}, where);
    return SFunction::tail(num(v, "alpha", where));
  }
  if (type == "joint_tail") {
    check_keys(v, {"type", "alpha"}, where);
    return SFunction::joint_tail(num(v, "alpha", where));
  }
  throw ConfigError(where + ": unknown s-function '" + type + "' (identity, power, tail, joint_tail)");
}

std::optional<BaselineSpec> parse_baseline(const json& v) {
  const std::string where = "baseline";
  const auto type = str_or(v, "type", "", where);
  if (type == "empirical") {
    check_keys(v, {"type"}, where);
    return std::nullopt;
  }
  BaselineSpec spec = Normal{0.0, 1.0};
  if (type == "lognormal") {
    check_keys(v, {"type", "mu", "sigma"}, where);
    spec = Lognormal{num(v, "mu", where), num(v, "sigma", where)};
  } else if (type == "normal") {
    check_keys(v, {"type", "mu", "sigma"}, where);
    spec = Normal{num(v, "mu", where), num(v, "sigma", where)};
  } else if (type == "gamma") {
    check_keys(v, {"type", "shape", "rate", "shift"}, where);
    spec = Gamma{num(v, "shape", where), num(v, "rate", where), num_or(v, "shift", 0.0, where)};
  } else {
    throw ConfigError("baseline: unknown type '" + type + "' (lognormal, normal, gamma, empirical)");
  }
  try {
    validate(spec);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("baseline: ") + e.what());
  }
  return spec;
}

SpatialConfig parse_scenario(const json& v) {
  const std::string where = "input.scenario";
  check_keys(v, {"n_samples", "seed", "locations", "theta_values", "theta_probs", "shape", "rate_scale", "shift"},
             where);
  SpatialConfig c;
  c.n_samples = count_or(v, "n_samples", c.n_samples, where);
  if (v.contains("seed")) c.seed = v.at("seed").get<std::uint64_t>();
  if (v.contains("locations")) {
    c.locations.clear();
    for (const auto& p : v.at("locations")) {
      if (!p.is_array() || p.size() != 2) throw ConfigError(where + ".locations: expected [x, y] pairs");
      c.locations.push_back({p[0].get<double>(), p[1].get<double>()});
    }
  }
  if (v.contains("theta_values")) c.theta_values = v.at("theta_values").get<std::vector<double>>();
  if (v.contains("theta_probs")) c.theta_probs = v.at("theta_probs").get<std::vector<double>>();
  c.shape = num_or(v, "shape", c.shape, where);
  c.rate_scale = num_or(v, "rate_scale", c.rate_scale, where);
  c.shift = num_or(v, "shift", c.shift, where);
  return c;
}

json scenario_json(const SpatialConfig& c) {
  json locs = json::array();
  for (const auto& p : c.locations) locs.push_back({p[0], p[1]});
  return {{"n_samples", c.n_samples}, {"seed", c.seed},          {"locations", locs},
          {"theta_values", c.theta_values}, {"theta_probs", c.theta_probs}, {"shape", c.shape},
          {"rate_scale", c.rate_scale},     {"shift", c.shift}};
}

}  // namespace

std::vector<double> HSpec::sample(std::size_t n) const {
  std::vector<double> h(n, value);
  if (kind == Kind::Indicator) {
    for (std::size_t i = 0; i < n; ++i) {
      const double u = midpoint(i, n);
      h[i] = (u > lo && u <= hi) ? value : 0.0;
    }
  } else if (kind == Kind::Values) {
    require(values.size() == n, "integral stress: explicit h must have grid_n values");
    h = values;
  }
  return h;
}

Utility UtilitySpec::make() const { return type == "linear" ? Utility::linear() : Utility::hara(a, b, eta); }

StressSpec StressConfig::resolve(const QuantileGrid& baseline) const {
  const std::size_t n = baseline.size();
  auto rm = [&]() {
    std::vector<RmConstraint> out;
    for (const auto& c : constraints) {
      auto gamma = make_gamma(c.measure, n);
      const double base = eval_rm(baseline, gamma);
      out.push_back({std::move(gamma), c.target.resolve(base)});
    }
    return out;
  };
  if (family == "rm") return RmStress{rm()};
  if (family == "mean_var_rm") {
    const auto ms = mean_sd(baseline);
    return MeanVarRm{mean.resolve(ms.mean), sd.resolve(ms.sd), rm()};
  }
  if (family == "integral") {
    IntegralStress s;
    for (const auto& c : linear) {
      auto h = c.h.sample(n);
      double base = 0.0;
      for (std::size_t i = 0; i < n; ++i) base += h[i] * baseline[i];
      base /= static_cast<double>(n);
      s.linear.push_back({std::move(h), c.c.resolve(base), c.label});
    }
    for (const auto& c : quadratic) {
      auto h = c.h.sample(n);
      double base = 0.0;
      for (std::size_t i = 0; i < n; ++i) base += h[i] * baseline[i] * baseline[i];
      base /= static_cast<double>(n);
      s.quadratic.push_back({std::move(h), c.c.resolve(base), c.label});
    }
    return s;
  }
  if (family == "var") {
    require(alpha > 0.0 && alpha < 1.0, "VaR stress: alpha must lie in (0,1)");
    const double base = kind == VarKind::Left ? var(baseline, alpha) : var_plus(baseline, alpha);
    return VarStress{alpha, q.resolve(base), kind};
  }
  UtilityRm s{utility.make(), 0.0, rm()};
  s.c = c.resolve(expected_utility(baseline, s.utility));
  return s;
}

SolverOptions RunConfig::solver_options() const {
  SolverOptions o;
  o.tol = tol;
  o.zeta = zeta;
  o.max_iter = max_iter;
  return o;
}

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir, const Overrides& overrides) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig cfg;
  try {
    check_keys(root, {"input", "baseline", "stresses", "grid_n", "zeta", "tol", "max_iter", "seed", "output_dir",
                      "sensitivity", "smooth"},
               "config");
    if (root.contains("input")) {
      const auto& in = root.at("input");
      check_keys(in, {"csv", "scenario", "output_column", "inputs", "n_samples"}, "input");
      if (in.contains("csv") && in.contains("scenario")) throw ConfigError("input: give either 'csv' or 'scenario'");
      if (in.contains("csv")) {
        cfg.input.kind = InputConfig::Kind::Csv;
        cfg.input.csv = base_dir / in.at("csv").get<std::string>();
      } else if (in.contains("scenario")) {
        cfg.input.kind = InputConfig::Kind::Scenario;
        cfg.input.scenario = parse_scenario(in.at("scenario"));
      }
      cfg.input.output_column = str_or(in, "output_column", "Y", "input");
      if (in.contains("inputs")) cfg.input.inputs = in.at("inputs").get<std::vector<std::string>>();
      cfg.input.n_samples = count_or(in, "n_samples", cfg.input.n_samples, "input");
    }
    if (root.contains("baseline")) cfg.baseline = parse_baseline(root.at("baseline"));
    if (root.contains("stresses")) {
      const auto& arr = root.at("stresses");
      if (!arr.is_array()) throw ConfigError("stresses: expected a list");
      std::set<std::string> names;
      for (std::size_t k = 0; k < arr.size(); ++k) {
        cfg.stresses.push_back(parse_stress(arr[k], k));
        if (!names.insert(cfg.stresses.back().name).second)
          throw ConfigError("stresses: duplicate name '" + cfg.stresses.back().name + "'");
      }
    }
    cfg.grid_n = count_or(root, "grid_n", cfg.grid_n, "config");
    cfg.zeta = num_or(root, "zeta", cfg.zeta, "config");
    cfg.tol = num_or(root, "tol", cfg.tol, "config");
    cfg.max_iter = static_cast<int>(count_or(root, "max_iter", static_cast<std::size_t>(cfg.max_iter), "config"));
    if (root.contains("seed")) cfg.seed = root.at("seed").get<std::uint64_t>();
    cfg.output_dir = str_or(root, "output_dir", cfg.output_dir.string(), "config");
    if (root.contains("sensitivity")) {
      const auto& s = root.at("sensitivity");
      check_keys(s, {"s_functions", "pairs", "pair_s", "delta", "delta_bins"}, "sensitivity");
      if (s.contains("s_functions"))
        for (std::size_t k = 0; k < s.at("s_functions").size(); ++k)
          cfg.sensitivity.s_functions.push_back(
              parse_s(s.at("s_functions")[k], "sensitivity.s_functions[" + std::to_string(k) + "]"));
      if (s.contains("pairs"))
        for (const auto& p : s.at("pairs")) {
          if (!p.is_array() || p.size() != 2) throw ConfigError("sensitivity.pairs: expected [\"Li\", \"Lj\"] pairs");
          cfg.sensitivity.pairs.emplace_back(p[0].get<std::string>(), p[1].get<std::string>());
        }
      if (s.contains("pair_s")) cfg.sensitivity.pair_s = parse_s(s.at("pair_s"), "sensitivity.pair_s");
      if (s.contains("delta")) cfg.sensitivity.delta = s.at("delta").get<bool>();
      cfg.sensitivity.delta_options.bins = count_or(s, "delta_bins", cfg.sensitivity.delta_options.bins, "sensitivity");
    }
    if (cfg.sensitivity.s_functions.empty())
      cfg.sensitivity.s_functions = {SFunction::identity(), SFunction::tail(0.8), SFunction::tail(0.95)};
    if (root.contains("smooth")) {
      const auto& s = root.at("smooth");
      check_keys(s, {"csv", "column", "weights"}, "smooth");
      if (s.contains("csv")) cfg.smooth.csv = base_dir / s.at("csv").get<std::string>();
      cfg.smooth.column = str_or(s, "column", "", "smooth");
      cfg.smooth.weight_column = str_or(s, "weights", "", "smooth");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  if (overrides.seed) {
    cfg.seed = *overrides.seed;
    cfg.input.scenario.seed = *overrides.seed;
  } else if (cfg.input.kind == InputConfig::Kind::Scenario && root.contains("seed") &&
             !(root.at("input").at("scenario").contains("seed"))) {
    cfg.input.scenario.seed = cfg.seed;
  }
  if (overrides.out) cfg.output_dir = *overrides.out;
  if (overrides.grid_n) cfg.grid_n = *overrides.grid_n;
  if (overrides.zeta) cfg.zeta = *overrides.zeta;

  if (cfg.grid_n < kMinCliGrid) throw ConfigError("grid_n must be at least 16");
  if (!(cfg.zeta >= 0.0)) throw ConfigError("zeta must be nonnegative");
  if (!(cfg.tol > 0.0)) throw ConfigError("tol must be positive");
  if (cfg.max_iter <= 0) throw ConfigError("max_iter must be positive");
  if (cfg.input.kind == InputConfig::Kind::Scenario) {
    try {
      cfg.input.scenario.validate();
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what());
    }
  }

  json canon;
  canon["baseline"] = root.contains("baseline") ? root.at("baseline") : json{{"type", "empirical"}};
  canon["stresses"] = root.contains("stresses") ? root.at("stresses") : json::array();
  canon["sensitivity"] = root.contains("sensitivity") ? root.at("sensitivity") : json::object();
  canon["grid_n"] = cfg.grid_n;
  canon["zeta"] = cfg.zeta;
  canon["tol"] = cfg.tol;
  canon["max_iter"] = cfg.max_iter;
  canon["output_column"] = cfg.input.output_column;
  canon["inputs"] = cfg.input.inputs;
  canon["smooth"] = {{"column", cfg.smooth.column}, {"weights", cfg.smooth.weight_column}};
  cfg.canonical = canon.dump();
  return cfg;
}

std::string scenario_canonical(const SpatialConfig& c) { return scenario_json(c).dump(); }

RunConfig load_config(const std::filesystem::path& path, const Overrides& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path(), overrides);
}

std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t state) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    state ^= p[i];
    state *= 0x100000001b3ULL;
  }
  return state;
}

std::string fnv1a_hex(const std::string& bytes, std::uint64_t state) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(bytes.data(), bytes.size(), state)));
  return buf;
}

}  // namespace wstress::io
