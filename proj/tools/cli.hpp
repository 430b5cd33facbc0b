#pragma once

// Command-line front end for the mosqdyn library.
//
//   mosqdyn <simulate|equilibria|verify|cycles|basin|sweep> [flags]
//
// Flags may also come from a JSON file (--config) using the flag names
// without dashes as keys; flags on the command line win.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "mosqdyn/mosqdyn.hpp"

namespace mosqdyn::cli {

using nlohmann::json;

enum class Subcommand { Simulate, Equilibria, Verify, Cycles, Basin, Sweep };
enum class Format { Csv, Json };

/// Bad command line or config. Maps to exit status 2.
class UsageError : public std::runtime_error {
 public:
  UsageError(std::string flag, const std::string& what)
      : std::runtime_error(flag.empty() ? what : "--" + flag + ": " + what), flag_(std::move(flag)) {}
  const std::string& flag() const noexcept { return flag_; }

 private:
  std::string flag_;
};

/// --help was given; carries the text to print. Maps to exit status 0.
class HelpRequested : public std::runtime_error {
 public:
  explicit HelpRequested(const std::string& text) : std::runtime_error(text) {}
};

struct RunConfig {
  Subcommand subcommand = Subcommand::Simulate;
  Params params = validate_params(1, 1, 1, 0, 0);  // overwritten by parse_args
  std::optional<State> z0;
  std::size_t max_iter = 0;
  double tol = 0.0;
  std::size_t grid_n = 0;
  std::size_t samples = 100'000;
  std::uint64_t seed = 0;
  std::size_t stride = 1;
  std::string out;  // empty: stdout
  Format format = Format::Csv;

  // sweep grid over beta
  double beta_min = 0.0;
  double beta_max = 0.0;
  std::size_t beta_count = 0;

  /// Test hook: scales the y bound of Omega handed to the invariance check.
  /// Below ~0.8 on the reference tuple the shrunken box is no longer invariant.
  double debug_ymax_scale = 1.0;
};

inline constexpr const char* kSubcommandNames[] = {"simulate", "equilibria", "verify", "cycles", "basin", "sweep"};

namespace detail {

inline const std::vector<std::string>& value_flags() {
  static const std::vector<std::string> flags = {
      "alpha", "beta",  "mu",   "d0",     "d1",  "x0",     "y0",       "max-iter",   "tol",   "grid-n",
      "samples", "seed", "stride", "out", "format", "beta-min", "beta-max", "beta-count", "debug-ymax-scale"};
  return flags;
}

inline double to_double(const std::string& flag, const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw UsageError(flag, "not a number: '" + s + "'");
  return v;
}

inline std::uint64_t to_count(const std::string& flag, const std::string& s) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
    throw UsageError(flag, "not a nonnegative integer: '" + s + "'");
  try {
    return std::stoull(s);
  } catch (const std::exception&) {
    throw UsageError(flag, "out of range: '" + s + "'");
  }
}

inline std::string json_scalar(const std::string& key, const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) return v.dump();
  throw UsageError(key, "config value must be a number or string");
}

}  // namespace detail

/// Parses argv (without the program name). Throws UsageError.
inline RunConfig parse_args(const std::vector<std::string>& args) {
  CLI::App app{"Mosquito population model: orbits, equilibria and checks", "mosqdyn"};
  app.require_subcommand(1, 1);
  std::map<std::string, std::string> raw;
  std::string config_path;
  app.add_option("--config", config_path, "JSON file with flag values");
  static const std::map<std::string, std::string> help = {
      {"alpha", "emergence rate"},
      {"beta", "egg-laying rate"},
      {"mu", "adult death rate, in (0, 1]"},
      {"d0", "aquatic death rate; alpha + d0 <= 1"},
      {"d1", "density-dependent aquatic death (must be 0)"},
      {"x0", "initial aquatic population (simulate)"},
      {"y0", "initial adult population (simulate)"},
      {"max-iter", "iteration budget per orbit"},
      {"tol", "step-size / Newton tolerance"},
      {"grid-n", "lattice size per axis (basin, cycles)"},
      {"samples", "samples per region (verify)"},
      {"seed", "RNG seed (verify)"},
      {"stride", "sample every n-th iterate (simulate)"},
      {"out", "output file (default stdout)"},
      {"format", "csv or json"},
      {"beta-min", "first beta of the sweep"},
      {"beta-max", "last beta of the sweep"},
      {"beta-count", "number of beta values in the sweep"},
  };
  for (const auto& f : detail::value_flags()) {
    auto* opt = app.add_option("--" + f, raw[f]);
    if (f == "debug-ymax-scale")
      opt->group("");
    else
      opt->description(help.at(f))->type_name("");
  }
  static const char* sub_help[] = {"trajectory CSV/JSON from (x0, y0)",
                                   "fixed points, Jacobians, eigenvalues",
                                   "invariance and Lyapunov monotonicity checks (exit 1 on violations)",
                                   "period-2 certificate and Newton search for periods 2-4",
                                   "omega-limit class of every lattice start in Omega",
                                   "origin class, fixed point and certificate over a beta grid"};
  for (std::size_t i = 0; i < std::size(kSubcommandNames); ++i)
    app.add_subcommand(kSubcommandNames[i], sub_help[i])->fallthrough();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested(app.help());
  } catch (const CLI::ParseError& e) {
    throw UsageError("", e.what());
  }

  std::map<std::string, std::string> values;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw UsageError("config", "cannot open '" + config_path + "'");
    json cfg;
    try {
      in >> cfg;
    } catch (const json::exception& e) {
      throw UsageError("config", e.what());
    }
    if (!cfg.is_object()) throw UsageError("config", "top level must be an object");
    for (const auto& [key, v] : cfg.items()) {
      const auto& known = detail::value_flags();
      if (std::find(known.begin(), known.end(), key) == known.end())
        throw UsageError("config", "unknown key '" + key + "'");
      values[key] = detail::json_scalar(key, v);
    }
  }
  for (const auto& f : detail::value_flags())
    if (app.count("--" + f) > 0) values[f] = raw[f];

  RunConfig cfg;
  for (std::size_t i = 0; i < std::size(kSubcommandNames); ++i)
    if (app.got_subcommand(kSubcommandNames[i])) cfg.subcommand = static_cast<Subcommand>(i);

  auto has = [&](const std::string& f) { return values.count(f) > 0; };
  auto real = [&](const std::string& f) { return detail::to_double(f, values.at(f)); };
  auto count = [&](const std::string& f) { return detail::to_count(f, values.at(f)); };

  const bool sweep = cfg.subcommand == Subcommand::Sweep;
  for (const char* f : {"alpha", "mu", "d0"})
    if (!has(f)) throw UsageError(f, "required");
  if (!sweep && !has("beta")) throw UsageError("beta", "required");
  if (sweep) {
    for (const char* f : {"beta-min", "beta-max", "beta-count"})
      if (!has(f)) throw UsageError(f, "required for sweep");
    cfg.beta_min = real("beta-min");
    cfg.beta_max = real("beta-max");
    cfg.beta_count = count("beta-count");
    if (cfg.beta_count == 0) throw UsageError("beta-count", "must be >= 1");
    if (!(cfg.beta_min > 0.0)) throw UsageError("beta-min", "must be > 0");
    if (!(cfg.beta_max >= cfg.beta_min)) throw UsageError("beta-max", "must be >= beta-min");
  }

  try {
    cfg.params = validate_params(real("alpha"), sweep ? cfg.beta_min : real("beta"), real("mu"), real("d0"),
                                 has("d1") ? real("d1") : 0.0);
  } catch (const Error& e) {
    throw UsageError(e.field() == "beta" && sweep ? "beta-min" : e.field(), e.what());
  }
  if (!cfg.params.w0_regime())
    throw UsageError("", "parameters must satisfy 0<mu<=1, d0>0, alpha+d0<=1, d1=0");

  if (has("x0") || has("y0")) {
    if (!has("x0")) throw UsageError("x0", "required together with --y0");
    if (!has("y0")) throw UsageError("y0", "required together with --x0");
    try {
      cfg.z0 = State(real("x0"), real("y0"));
    } catch (const Error& e) {
      throw UsageError(real("x0") < 0.0 ? "x0" : "y0", e.what());
    }
  }
  if (cfg.subcommand == Subcommand::Simulate && !cfg.z0) throw UsageError("x0", "simulate needs --x0 and --y0");

  const IterationBudget budget = default_budget(cfg.params);
  cfg.max_iter = has("max-iter") ? count("max-iter") : budget.max_iter;
  cfg.tol = has("tol") ? real("tol") : (cfg.subcommand == Subcommand::Cycles ? 1e-10 : budget.tol);
  if (!(cfg.tol > 0.0)) throw UsageError("tol", "must be > 0");
  cfg.grid_n = has("grid-n") ? count("grid-n") : (cfg.subcommand == Subcommand::Cycles ? 50 : 64);
  if (cfg.grid_n == 0) throw UsageError("grid-n", "must be >= 1");
  if (has("samples")) cfg.samples = count("samples");
  if (has("seed")) cfg.seed = count("seed");
  if (has("stride")) cfg.stride = count("stride");
  if (cfg.stride == 0) throw UsageError("stride", "must be >= 1");
  if (has("out")) cfg.out = values.at("out");
  if (has("debug-ymax-scale")) cfg.debug_ymax_scale = real("debug-ymax-scale");

  const bool csv_default = cfg.subcommand == Subcommand::Simulate || cfg.subcommand == Subcommand::Basin ||
                           cfg.subcommand == Subcommand::Sweep;
  cfg.format = csv_default ? Format::Csv : Format::Json;
  if (has("format")) {
    const std::string& f = values.at("format");
    if (f == "csv")
      cfg.format = Format::Csv;
    else if (f == "json")
      cfg.format = Format::Json;
    else
      throw UsageError("format", "expected csv or json");
    if (cfg.format == Format::Csv && !csv_default) throw UsageError("format", "this subcommand only writes json");
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// Serialization

/// Round-trip decimal: 17 significant digits.
inline std::string num(double v) { return fmt::format("{:.17g}", v); }

inline json to_json(const Params& p) {
  return {{"alpha", p.alpha()}, {"beta", p.beta()}, {"mu", p.mu()}, {"d0", p.d0()}, {"d1", p.d1()}};
}

inline json to_json(const State& z) { return {{"x", z.x()}, {"y", z.y()}}; }

inline json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

inline json to_json(const EquilibriumReport& r) {
  json fps = json::array();
  for (const auto& f : r.fixed_points) {
    json eig = json::array();
    for (auto l : {f.eigenvalues.first, f.eigenvalues.second}) eig.push_back({{"re", l.real()}, {"im", l.imag()}});
    fps.push_back({{"point", to_json(f.point)},
                   {"jacobian", f.jacobian},
                   {"eigenvalues", eig},
                   {"class", std::string(to_string(f.kind))}});
  }
  return {{"fixed_points", fps},
          {"regime",
           {{"threshold", r.regime.threshold},
            {"alpha_star", r.regime.alpha_star},
            {"x_star", optional_json(r.regime.x_star)},
            {"y_star", optional_json(r.regime.y_star)}}}};
}

inline constexpr std::size_t kMaxListedViolations = 100;

inline json to_json(const InvarianceReport& r) {
  json v = json::array();
  for (std::size_t i = 0; i < r.violations.size() && i < kMaxListedViolations; ++i) {
    const auto& x = r.violations[i];
    v.push_back({{"sample_index", x.sample_index},
                 {"point", to_json(x.point)},
                 {"image", {{"x", x.image.x}, {"y", x.image.y}}},
                 {"excursion", x.excursion}});
  }
  return {{"region", std::string(to_string(r.region))},
          {"n_samples", r.n_samples},
          {"violation_count", r.violations.size()},
          {"violations", v},
          {"max_excursion", r.max_excursion}};
}

inline json to_json(const LyapunovSample& s) {
  return {{"z", to_json(s.z)},
          {"phi", s.phi},
          {"delta_closed", s.delta_closed},
          {"delta_direct", s.delta_direct},
          {"region", std::string(to_string(s.region))}};
}

inline json to_json(const MonotonicityReport& r) {
  json regions = json::array();
  for (const auto& m : r.regions)
    regions.push_back({{"region", std::string(to_string(m.region))},
                       {"expected", m.expected == ExpectedSign::NonNegative ? "nonnegative" : "nonpositive"},
                       {"samples", m.samples},
                       {"violations", m.violations},
                       {"worst", m.worst ? to_json(*m.worst) : json(nullptr)}});
  return {{"regions", regions}, {"total_violations", r.total_violations()}};
}

inline json to_json(const Quadratic& q) { return json::array({q.c2, q.c1, q.c0}); }

inline json to_json(const CycleCertificate& c) {
  json implied = json::array();
  for (const auto& i : c.implied)
    implied.push_back({{"name", i.name}, {"lhs", i.lhs}, {"rhs", i.rhs}, {"holds", i.holds}});
  return {{"branch", std::string(to_string(c.branch))},
          {"b0", c.b0},
          {"coefficients", to_json(c.coefficients)},
          {"all_positive", c.all_positive},
          {"implied", implied},
          {"brute_force_residual", optional_json(c.brute_force_residual)}};
}

// ---------------------------------------------------------------------------
// Subcommands. Each returns the exit status and writes to `out`.

inline int run_simulate(const RunConfig& cfg, std::ostream& out) {
  const auto r = iterate(cfg.params, *cfg.z0, cfg.max_iter, cfg.tol, cfg.stride);
  if (cfg.format == Format::Csv) {
    out << "n,x,y,phi,region\n";
    for (const auto& s : r.samples)
      out << s.n << ',' << num(s.z.x()) << ',' << num(s.z.y()) << ',' << num(s.phi) << ',' << to_string(s.region)
          << '\n';
  } else {
    json samples = json::array();
    for (const auto& s : r.samples)
      samples.push_back(
          {{"n", s.n}, {"x", s.z.x()}, {"y", s.z.y()}, {"phi", s.phi}, {"region", std::string(to_string(s.region))}});
    out << json{{"params", to_json(cfg.params)},
                {"samples", samples},
                {"iterations_used", r.iterations_used},
                {"final", to_json(r.final)},
                {"limit", std::string(to_string(r.limit))},
                {"boundary_regime", r.boundary_regime}}
               .dump(2)
        << '\n';
  }
  return 0;
}

inline int run_equilibria(const RunConfig& cfg, std::ostream& out) {
  json j = to_json(equilibrium_report(cfg.params));
  j["params"] = to_json(cfg.params);
  j["origin_regime_class"] = std::string(to_string(classify_origin_regime(cfg.params)));
  out << j.dump(2) << '\n';
  return 0;
}

inline int run_verify(const RunConfig& cfg, std::ostream& out) {
  const Params& p = cfg.params;
  RegionBounds bounds = omega_bounds(p);
  bounds.y_max *= cfg.debug_ymax_scale;

  std::vector<RegionLabel> regions{RegionLabel::OmegaOnly};
  if (bounds.subdivided()) {
    regions.push_back(RegionLabel::Omega1);
    regions.push_back(RegionLabel::Omega2);
  }
  bool ok = true;
  json inv = json::array();
  for (std::size_t k = 0; k < regions.size(); ++k) {
    const auto r = check_invariance(p, bounds, regions[k], cfg.samples, cfg.seed + k);
    ok = ok && r.ok();
    inv.push_back(to_json(r));
  }
  json lyap = nullptr;
  if (at_threshold(p) || above_threshold(p)) {
    const auto m = monotonicity_report(p, cfg.samples, cfg.seed);
    ok = ok && m.ok();
    lyap = to_json(m);
  }
  out << json{{"params", to_json(p)}, {"invariance", inv}, {"lyapunov", lyap}, {"ok", ok}}.dump(2) << '\n';
  return ok ? 0 : 1;
}

inline int run_cycles(const RunConfig& cfg, std::ostream& out) {
  const Params& p = cfg.params;
  bool ok = true;
  json searches = json::array();
  std::optional<double> best;
  for (int period = 2; period <= 4; ++period) {
    const auto found = brute_force_cycle_search(p, period, cfg.grid_n, cfg.tol);
    json cycles = json::array();
    for (const auto& c : found) {
      json orbit = json::array();
      for (const auto& z : c.orbit) orbit.push_back(to_json(z));
      cycles.push_back({{"orbit", orbit}, {"residual", c.residual}});
      best = best ? std::min(*best, c.residual) : c.residual;
    }
    ok = ok && found.empty();
    searches.push_back({{"period", period}, {"cycles", cycles}});
  }
  json cert = nullptr;
  if (at_threshold(p) || above_threshold(p)) {
    CycleCertificate c = evaluate_cycle_certificate(p);
    c.brute_force_residual = best;
    ok = ok && c.ok();
    cert = to_json(c);
  }
  out << json{{"params", to_json(p)}, {"certificate", cert}, {"brute_force", searches}, {"ok", ok}}.dump(2) << '\n';
  return ok ? 0 : 1;
}

inline int run_basin(const RunConfig& cfg, std::ostream& out) {
  const auto raster = basin_raster(cfg.params, cfg.grid_n, cfg.max_iter, cfg.tol);
  if (cfg.format == Format::Csv) {
    for (std::size_t j = 0; j < raster.grid_n; ++j) {
      for (std::size_t i = 0; i < raster.grid_n; ++i) out << (i ? "," : "") << class_code(raster.at(i, j));
      out << '\n';
    }
  } else {
    const auto b = omega_bounds(cfg.params);
    json rows = json::array();
    for (std::size_t j = 0; j < raster.grid_n; ++j) {
      json row = json::array();
      for (std::size_t i = 0; i < raster.grid_n; ++i) row.push_back(class_code(raster.at(i, j)));
      rows.push_back(row);
    }
    out << json{{"params", to_json(cfg.params)}, {"grid_n", raster.grid_n}, {"x_max", b.x_max},
                {"y_max", b.y_max}, {"cells", rows}}
               .dump(2)
        << '\n';
  }
  return 0;
}

struct SweepRow {
  double beta;
  std::string regime;
  std::string origin_class;
  std::optional<double> x_star, y_star;
  std::optional<bool> certificate_ok;
};

inline int run_sweep(const RunConfig& cfg, std::ostream& out) {
  const Params& base = cfg.params;
  std::vector<SweepRow> rows;
  bool ok = true;
  for (std::size_t k = 0; k < cfg.beta_count; ++k) {
    const double beta = cfg.beta_count == 1
                            ? cfg.beta_min
                            : cfg.beta_min + (cfg.beta_max - cfg.beta_min) * static_cast<double>(k) /
                                                 static_cast<double>(cfg.beta_count - 1);
    const Params p = validate_params(base.alpha(), beta, base.mu(), base.d0(), base.d1());
    SweepRow row{beta, at_threshold(p) ? "threshold" : (above_threshold(p) ? "above" : "below"),
                 std::string(to_string(classify_origin_regime(p))), std::nullopt, std::nullopt, std::nullopt};
    const auto q = regime_quantities(p);
    row.x_star = q.x_star;
    row.y_star = q.y_star;
    if (at_threshold(p) || above_threshold(p)) {
      row.certificate_ok = evaluate_cycle_certificate(p).ok();
      ok = ok && *row.certificate_ok;
    }
    rows.push_back(row);
  }
  if (cfg.format == Format::Csv) {
    out << "beta,regime,origin_class,x_star,y_star,certificate_ok\n";
    for (const auto& r : rows)
      out << num(r.beta) << ',' << r.regime << ',' << r.origin_class << ',' << (r.x_star ? num(*r.x_star) : "")
          << ',' << (r.y_star ? num(*r.y_star) : "") << ','
          << (r.certificate_ok ? (*r.certificate_ok ? "true" : "false") : "na") << '\n';
  } else {
    json arr = json::array();
    for (const auto& r : rows)
      arr.push_back({{"beta", r.beta},
                     {"regime", r.regime},
                     {"origin_class", r.origin_class},
                     {"x_star", optional_json(r.x_star)},
                     {"y_star", optional_json(r.y_star)},
                     {"certificate_ok", r.certificate_ok ? json(*r.certificate_ok) : json(nullptr)}});
    out << arr.dump(2) << '\n';
  }
  return ok ? 0 : 1;
}

inline int run(const RunConfig& cfg, std::ostream& out) {
  switch (cfg.subcommand) {
    case Subcommand::Simulate: return run_simulate(cfg, out);
    case Subcommand::Equilibria: return run_equilibria(cfg, out);
    case Subcommand::Verify: return run_verify(cfg, out);
    case Subcommand::Cycles: return run_cycles(cfg, out);
    case Subcommand::Basin: return run_basin(cfg, out);
    case Subcommand::Sweep: return run_sweep(cfg, out);
  }
  return 2;
}

/// Full entry point: parse, run, route output. Exit 0 ok, 1 verification
/// failure, 2 usage error.
inline int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = parse_args(args);
  } catch (const HelpRequested& h) {
    out << h.what();
    return 0;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  }
  try {
    if (cfg.out.empty()) return run(cfg, out);
    std::ostringstream buf;
    const int status = run(cfg, buf);
    std::ofstream file(cfg.out, std::ios::binary);
    if (!file) {
      err << "cannot write '" << cfg.out << "'\n";
      return 2;
    }
    file << buf.str();
    return status;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace mosqdyn::cli
