// qet: command-line driver for teleportation runs, distance scans, bound
// certification, oracle comparison and squeeze-profile inspection.
//
// Exit status: 0 success, 1 invalid input, 2 numerical failure. Every
// failure writes one JSON line {"error": {...}} to stderr.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qet/bounds.hpp"
#include "qet/config.hpp"
#include "qet/errors.hpp"
#include "qet/oracle.hpp"
#include "qet/reports.hpp"
#include "qet/scaling.hpp"
#include "qet/squeeze_profile.hpp"
#include "qet/squeezed_qet.hpp"
#include "qet/vacuum_qet.hpp"

using nlohmann::json;
using namespace qet;

namespace {

struct Failure {
  std::string code;
  std::string message;
  int status;
};

void report_failure(const Failure& f) {
  json err{{"error", {{"code", f.code}, {"message", f.message}, {"exit_status", f.status}}}};
  std::cerr << err.dump() << '\n';
}

// Writes to `path`, or stdout when it is empty.
void emit(const std::string& path, const std::string& body) {
  if (path.empty()) {
    std::cout << body;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::ConfigError, "cannot write " + path);
  out << body;
  if (!out) throw Error(ErrorCode::ConfigError, "failed writing " + path);
}

std::string pretty(const json& j) { return j.dump(2) + "\n"; }

RunManifest manifest(const std::string& command, const std::string& input, json resolved,
                     std::vector<std::string> outputs, bool stamp) {
  RunManifest m{command, input, std::move(resolved), std::move(outputs), std::nullopt};
  if (stamp) m.timestamp = utc_timestamp();
  return m;
}

std::vector<std::string> non_empty(std::initializer_list<std::string> paths) {
  std::vector<std::string> out;
  for (const auto& p : paths) {
    if (!p.empty()) out.push_back(p);
  }
  return out;
}

struct Common {
  std::string config;
  std::string output;
  bool stamp = false;
};

void add_common(CLI::App* cmd, Common& c, const char* output_help) {
  cmd->add_option("config", c.config, "Configuration file (.toml or .json)")->required();
  cmd->add_option("-o,--output", c.output, output_help);
  cmd->add_flag("--stamp", c.stamp, "Record a UTC timestamp in the manifest");
}

int run_vacuum(const Common& c) {
  const RunConfig cfg = load_run_config(c.config, RunMode::vacuum);
  const auto& s = cfg.setup;
  const TeleportReport rep = teleported_energy(s.gA, s.gB, s.geometry, cfg.quadrature);
  json out = to_json(rep);
  out["certification"] = to_json(certify_bound(rep, s.geometry));
  out["manifest"] = to_json(manifest("vacuum", c.config, cfg.resolved, non_empty({c.output}), c.stamp));
  emit(c.output, pretty(out));
  return 0;
}

int run_squeezed(const Common& c) {
  const RunConfig cfg = load_run_config(c.config, RunMode::squeezed);
  const auto& s = cfg.setup;
  const TeleportReport rep =
      teleported_energy_squeezed(s.gA, s.gB, s.geometry, *cfg.profile, cfg.quadrature);
  json out = to_json(rep);
  out["profile"] = describe(*cfg.profile);
  out["certification"] = to_json(certify_bound(rep, s.geometry));
  out["manifest"] =
      to_json(manifest("squeezed", c.config, cfg.resolved, non_empty({c.output}), c.stamp));
  emit(c.output, pretty(out));
  return 0;
}

struct ScanArgs {
  Common common;
  std::string param = "L";
  std::optional<double> from, to, margin, fixed_l;
  std::optional<int> points;
  std::optional<std::string> mode;
  std::string summary;
};

int run_scan(const ScanArgs& a) {
  if (a.param != "L") {
    throw Error(ErrorCode::ConfigError, "only --param L is supported (got '" + a.param + "')");
  }
  const RunConfig cfg = load_run_config(a.common.config, RunMode::any);
  if (cfg.profile) {
    throw Error(ErrorCode::ConfigError,
                "scan builds its own squeeze profiles; drop f/l and use --mode/--fixed-l/--margin");
  }
  auto pick = [](const auto& flag, const auto& doc, const char* name) {
    if (flag) return *flag;
    if (doc) return *doc;
    throw Error(ErrorCode::ConfigError, std::string("scan needs --") + name);
  };
  const double from = pick(a.from, cfg.scan.from, "from");
  const double to = pick(a.to, cfg.scan.to, "to");
  const int points = pick(a.points, cfg.scan.points, "points");
  const std::string mode = a.mode ? *a.mode : cfg.scan.mode.value_or("vacuum");

  ScanPolicy policy;
  policy.mode = scan_mode_from_string(mode);
  policy.margin = a.margin ? a.margin : cfg.scan.margin;
  if (policy.mode == ScanMode::squeezed_fixed_l) {
    policy.fixed_l = pick(a.fixed_l, cfg.scan.fixed_l, "fixed-l");
  } else if (a.fixed_l || cfg.scan.fixed_l) {
    throw Error(ErrorCode::ConfigError, "fixed_l only applies to --mode fixed_l");
  }
  if (policy.mode != ScanMode::squeezed_tracking && policy.margin) {
    throw Error(ErrorCode::ConfigError, "margin only applies to --mode tracking");
  }

  const auto grid = log_grid(from, to, points);
  const ScanResult res = policy.mode == ScanMode::vacuum
                             ? scan_distance(cfg.setup, grid, cfg.quadrature)
                             : scan_distance_squeezed(cfg.setup, grid, policy, cfg.quadrature);

  std::ostringstream csv;
  write_scan_csv(csv, res);
  emit(a.common.output, csv.str());

  json resolved = cfg.resolved;
  resolved["scan"] = {{"param", a.param}, {"from", from}, {"to", to}, {"points", points},
                      {"mode", std::string(to_string(policy.mode))}};
  if (policy.mode == ScanMode::squeezed_tracking) resolved["scan"]["margin"] = res.margin;
  if (policy.mode == ScanMode::squeezed_fixed_l) resolved["scan"]["fixed_l"] = policy.fixed_l;
  json summary = scan_summary(res);
  summary["manifest"] = to_json(manifest("scan", a.common.config, resolved,
                                         non_empty({a.common.output, a.summary}), a.common.stamp));
  if (!a.summary.empty()) emit(a.summary, pretty(summary));
  std::cerr << json{{"slope", res.fit.slope}, {"half_width_95", res.fit.half_width},
                    {"window", {res.fit.window_lo, res.fit.window_hi}}}
                   .dump()
            << '\n';
  return 0;
}

struct BoundArgs {
  std::string config;
  std::optional<double> L;
  int grid = 10000;
  std::optional<double> tail;
  std::string output;
  std::string xi_csv;
  bool stamp = false;
};

int run_bound(const BoundArgs& a) {
  if (a.grid < 64) throw Error(ErrorCode::ParameterViolation, "--grid must be >= 64");
  if (a.config.empty() == !a.L) {
    throw Error(ErrorCode::ConfigError, "bound needs exactly one of --config or --L");
  }
  std::optional<RunConfig> cfg;
  ProtocolGeometry geo;
  json resolved;
  if (a.L) {
    if (!(*a.L > 0.0) || !std::isfinite(*a.L)) throw Error(ErrorCode::ParameterViolation, "--L must be > 0");
    geo = ProtocolGeometry{-1.0, 0.0, *a.L, *a.L + 1.0, 0.0};
    geo.validate();
    resolved["geometry"] = describe(geo);
  } else {
    cfg = load_run_config(a.config, RunMode::vacuum);
    geo = cfg->setup.geometry;
    resolved = cfg->resolved;
  }
  const double tail = a.tail.value_or(1000.0 * geo.L());
  resolved["bound"] = {{"grid", a.grid}, {"tail", tail}};

  const FlanaganMinimum min = minimize_flanagan(geo, tail, a.grid);
  json out;
  out["minimizer"] = to_json(min, geo.L(), tail);
  out["minimizer"]["functional_of_minimizer"] = flanagan_functional(min.xi);
  out["minimizer"]["conjugate_gradient_value"] = minimize_flanagan_iterative(geo, tail, a.grid).value;
  if (cfg) {
    const auto& s = cfg->setup;
    const TeleportReport rep = teleported_energy(s.gA, s.gB, s.geometry, cfg->quadrature);
    out["E_B"] = rep.E_B;
    out["certification"] = to_json(certify_bound(rep, geo));
    out["certification"]["E_B_below_minimizer"] = rep.E_B <= min.value;
  }
  if (!a.xi_csv.empty()) {
    std::ostringstream csv;
    write_minimizer_csv(csv, min.xi);
    emit(a.xi_csv, csv.str());
  }
  out["manifest"] = to_json(manifest("bound", a.config, resolved, non_empty({a.output, a.xi_csv}), a.stamp));
  emit(a.output, pretty(out));
  if (cfg && out["certification"]["pass"] == false) {
    report_failure({"BoundViolation", "12 pi L E_B exceeds 1", 2});
    return 2;
  }
  return 0;
}

struct OracleArgs {
  Common common;
  std::string rule = "uniform";
  std::string fault = "none";
};

int run_oracle(const OracleArgs& a) {
  const RunConfig cfg = load_run_config(a.common.config, RunMode::any);
  const auto& s = cfg.setup;
  NodeRule rule;
  if (a.rule == "uniform") rule = NodeRule::uniform;
  else if (a.rule == "log") rule = NodeRule::log;
  else throw Error(ErrorCode::ConfigError, "--rule must be uniform or log");
  const OracleFault fault = oracle_fault_from_string(a.fault);
  const SqueezeProfile profile = cfg.profile.value_or(SqueezeProfile::identity());
  const OracleComparison cmp =
      compare_with_oracle(s.gA, s.gB, s.geometry, profile, cfg.quadrature, fault, rule);
  json out = to_json(cmp);
  json resolved = cfg.resolved;
  resolved["oracle"] = {{"rule", a.rule}, {"inject_fault", a.fault}};
  out["manifest"] =
      to_json(manifest("oracle-compare", a.common.config, resolved, non_empty({a.common.output}),
                       a.common.stamp));
  emit(a.common.output, pretty(out));
  if (!cmp.all_pass) {
    std::string failed;
    for (const auto& e : cmp.entries) {
      if (!e.pass) failed += (failed.empty() ? "" : ", ") + e.quantity;
    }
    report_failure({"OracleMismatch", "oracle disagrees by more than 1% on " + failed, 2});
    return 2;
  }
  return 0;
}

struct InspectArgs {
  Common common;
  int points = 801;
  std::optional<double> from, to;
  std::string summary;
};

int run_inspect(const InspectArgs& a) {
  const json doc = load_document(a.common.config);
  SqueezeProfile f = SqueezeProfile::identity();
  json resolved;
  if (doc.contains("geometry")) {
    RunConfig cfg = parse_run_config(doc, RunMode::squeezed);
    f = *cfg.profile;
    resolved = cfg.resolved;
  } else {
    for (const auto& [k, v] : doc.items()) {
      if (k != "f") throw Error(ErrorCode::ConfigError, "unknown key '" + k + "' in profile document");
    }
    if (!doc.contains("f")) throw Error(ErrorCode::ConfigError, "profile document needs an f table");
    f = parse_squeeze(doc.at("f"));
    resolved["f"] = describe(f);
  }
  if (a.points < 2) throw Error(ErrorCode::ParameterViolation, "--points must be >= 2");

  const Interval region = f.squeezed_region();
  const bool flat = !(region.hi > region.lo);
  const double pad = flat ? 1.0 : 0.1 * region.width();
  const double lo = a.from.value_or(flat ? -1.0 : region.lo - pad);
  const double hi = a.to.value_or(flat ? 1.0 : region.hi + pad);
  if (!(hi > lo)) throw Error(ErrorCode::ParameterViolation, "--to must exceed --from");

  std::vector<std::pair<double, double>> rows;
  rows.reserve(a.points);
  for (int i = 0; i < a.points; ++i) {
    const double x = i == a.points - 1 ? hi : lo + (hi - lo) * i / (a.points - 1);
    rows.emplace_back(x, energy_density(f, x, Side::right));
  }

  json summary;
  summary["profile"] = describe(f);
  summary["range"] = {lo, hi};
  summary["squeezed_region"] = flat ? json(nullptr) : json{region.lo, region.hi};
  json impulses = json::array();
  for (const auto& [x, w] : knot_impulses(f)) impulses.push_back({x, w});
  summary["knot_impulses"] = impulses;
  const QuadratureConfig quad;
  const double cost = squeeze_cost(f, quad).value;
  const double integrated = flat ? 0.0 : integrated_density(f, region, quad);
  summary["E_C"] = cost;
  summary["integrated_density"] = integrated;
  summary["rel_diff"] = cost != 0.0 ? std::abs(integrated - cost) / std::abs(cost) : std::abs(integrated);

  std::ostringstream csv;
  write_density_csv(csv, rows);
  emit(a.common.output, csv.str());
  summary["manifest"] = to_json(manifest("profile-inspect", a.common.config, resolved,
                                         non_empty({a.common.output, a.summary}), a.common.stamp));
  if (!a.summary.empty()) emit(a.summary, pretty(summary));
  std::cerr << json{{"E_C", cost}, {"integrated_density", integrated}, {"l", f.shift()}}.dump()
            << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum energy teleportation: vacuum and squeezed-state protocol evaluation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(tool_version()));

  Common vac, sq;
  add_common(app.add_subcommand("vacuum", "Teleported energy in the vacuum state"), vac,
             "Report JSON (default stdout)");
  add_common(app.add_subcommand("squeezed", "Teleported energy in a squeezed state"), sq,
             "Report JSON (default stdout)");

  ScanArgs scan;
  auto* scan_cmd = app.add_subcommand("scan", "Scan the teleported energy over the distance L");
  add_common(scan_cmd, scan.common, "Scan CSV (default stdout)");
  scan_cmd->add_option("--param", scan.param, "Scanned parameter (L)")->check(CLI::IsMember({"L"}));
  scan_cmd->add_option("--from", scan.from, "First L");
  scan_cmd->add_option("--to", scan.to, "Last L");
  scan_cmd->add_option("--points", scan.points, "Number of log-spaced points (>= 20)");
  scan_cmd->add_option("--mode", scan.mode, "vacuum | tracking | fixed_l")
      ->check(CLI::IsMember({"vacuum", "tracking", "fixed_l"}));
  scan_cmd->add_option("--margin", scan.margin, "Tracking margin c0 (l = L + T - c0)");
  scan_cmd->add_option("--fixed-l", scan.fixed_l, "Shift for --mode fixed_l");
  scan_cmd->add_option("--summary", scan.summary, "Summary JSON with the fitted slope");

  BoundArgs bound;
  auto* bound_cmd = app.add_subcommand("bound", "Minimize the Flanagan functional");
  bound_cmd->add_option("--config", bound.config, "Configuration whose geometry (and E_B) to use");
  bound_cmd->add_option("--L", bound.L, "Distance L (regions [-1,0] and [L,L+1])");
  bound_cmd->add_option("--grid", bound.grid, "Grid points (>= 64)");
  bound_cmd->add_option("--tail", bound.tail, "Tail length (default 1000 L)");
  bound_cmd->add_option("-o,--output", bound.output, "Report JSON (default stdout)");
  bound_cmd->add_option("--xi-csv", bound.xi_csv, "Minimizer CSV (x, xi)");
  bound_cmd->add_flag("--stamp", bound.stamp, "Record a UTC timestamp in the manifest");

  OracleArgs oracle;
  auto* oracle_cmd = app.add_subcommand("oracle-compare", "Check moments against the mode-sum oracle");
  add_common(oracle_cmd, oracle.common, "Comparison JSON (default stdout)");
  oracle_cmd->add_option("--rule", oracle.rule, "Frequency nodes: uniform | log")
      ->check(CLI::IsMember({"uniform", "log"}));
  oracle_cmd->add_option("--inject-fault", oracle.fault, "Test hook: damping")
      ->check(CLI::IsMember({"none", "damping"}));

  InspectArgs inspect;
  auto* inspect_cmd = app.add_subcommand("profile-inspect", "Energy density of a squeeze profile");
  add_common(inspect_cmd, inspect.common, "Density CSV (default stdout)");
  inspect_cmd->add_option("--points", inspect.points, "Samples");
  inspect_cmd->add_option("--from", inspect.from, "Left end of the sampled range");
  inspect_cmd->add_option("--to", inspect.to, "Right end of the sampled range");
  inspect_cmd->add_option("--summary", inspect.summary, "Summary JSON (E_C, impulses)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_failure({"UsageError", e.what(), 1});
    return 1;
  }

  try {
    if (app.got_subcommand("vacuum")) return run_vacuum(vac);
    if (app.got_subcommand("squeezed")) return run_squeezed(sq);
    if (app.got_subcommand("scan")) return run_scan(scan);
    if (app.got_subcommand("bound")) return run_bound(bound);
    if (app.got_subcommand("oracle-compare")) return run_oracle(oracle);
    if (app.got_subcommand("profile-inspect")) return run_inspect(inspect);
  } catch (const Error& e) {
    const int status = is_numerical_failure(e.code()) ? 2 : 1;
    report_failure({std::string(to_string(e.code())), e.what(), status});
    return status;
  } catch (const std::exception& e) {
    report_failure({"InternalError", e.what(), 2});
    return 2;
  }
  return 1;
}
