#include "qet/reports.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <numbers>

#ifndef QET_VERSION
#define QET_VERSION "0.0.0"
#endif

namespace qet {

using nlohmann::json;

std::string_view tool_version() noexcept { return QET_VERSION; }

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json to_json(const RunManifest& m) {
  json out{{"tool", "qet"},
           {"version", std::string(tool_version())},
           {"command", m.command},
           {"input", m.input},
           {"config", m.resolved},
           {"outputs", m.outputs}};
  if (m.timestamp) out["timestamp"] = *m.timestamp;
  return out;
}

json to_json(const TeleportReport& r) {
  json out{{"L", r.L},
           {"T", r.T},
           {"E_A", r.E_A},
           {"E_A_error", r.E_A_error},
           {"A_variance", r.A_variance},
           {"A_variance_error", r.A_variance_error},
           {"AB_moment", r.AB_moment},
           {"AB_moment_error", r.AB_moment_error},
           {"C", {r.C[0], r.C[1]}},
           {"p", {r.p[0], r.p[1]}},
           {"theta", {r.theta[0], r.theta[1]}},
           {"G_B", r.G_B},
           {"route_rel_diff", r.route_rel_diff},
           {"bound_value", r.bound_value},
           {"bound_ratio", r.bound_ratio},
           {"gA_signed", r.gA_signed},
           {"gB_signed", r.gB_signed}};
  if (r.squeezed) {
    out["l"] = r.shift_l;
    out["E_Bf"] = r.E_B;
    out["E_Bf_closed_form"] = r.E_B_closed_form;
    out["E_B"] = r.E_B_vacuum;
    out["E_C"] = r.E_C;
    out["E_C_window"] = r.E_C_window;
  } else {
    out["E_B"] = r.E_B;
    out["E_B_closed_form"] = r.E_B_closed_form;
  }
  return out;
}

json to_json(const BoundCertification& c) {
  json out{{"bound_value", c.bound_value},
           {"bound_ratio", c.bound_ratio},
           {"applicable", c.applicable}};
  out["pass"] = c.pass ? json(*c.pass) : json(nullptr);
  return out;
}

json to_json(const FlanaganMinimum& m, double L, double tail_length) {
  const double exact = flanagan_minimum_exact(L, tail_length);
  return {{"L", L},
          {"tail_length", tail_length},
          {"value", m.value},
          {"gap_part", m.gap_part},
          {"tail_part", m.tail_part},
          {"gap_points", m.gap_points},
          {"tail_points", m.tail_points},
          {"infimum", 1.0 / (12.0 * std::numbers::pi * L)},
          {"exact_with_tail", exact},
          {"rel_diff_exact", std::abs(m.value - exact) / exact}};
}

json to_json(const OracleComparison& c) {
  json entries = json::array();
  for (const auto& e : c.entries) {
    entries.push_back({{"quantity", e.quantity},
                       {"oracle", e.oracle},
                       {"main", e.main},
                       {"rel_diff", e.rel_diff},
                       {"pass", e.pass}});
  }
  const auto& m = c.moments;
  return {{"entries", entries},
          {"tolerance", kOracleTolerance},
          {"all_pass", c.all_pass},
          {"grid",
           {{"cutoff", c.grid.cutoff},
            {"modes", c.grid.n_modes},
            {"eps", c.grid.eps},
            {"rule", c.grid.rule == NodeRule::uniform ? "uniform" : "log"}}},
          {"oracle",
           {{"A_variance_eps", {m.A_variance_eps, m.A_variance_2eps, m.A_variance_4eps}},
            {"AB_moment_eps", {m.AB_moment_eps, m.AB_moment_2eps, m.AB_moment_4eps}},
            {"A_variance_truncation", m.A_variance_truncation},
            {"AB_moment_truncation", m.AB_moment_truncation},
            {"A_mean", m.A_mean},
            {"p", {m.p[0], m.p[1]}},
            {"G_B", m.G_B},
            {"x_nodes", m.x_nodes}}}};
}

json to_json(const PowerLawFit& fit) {
  return {{"slope", fit.slope},
          {"intercept", fit.intercept},
          {"half_width_95", fit.half_width},
          {"window", {fit.window_lo, fit.window_hi}},
          {"points", fit.points}};
}

json scan_summary(const ScanResult& s) {
  json out{{"mode", std::string(to_string(s.policy.mode))},
           {"fit", to_json(s.fit)},
           {"points", s.points.size()},
           {"accounting_violations", s.accounting_violations}};
  if (s.policy.mode == ScanMode::squeezed_tracking) out["margin"] = s.margin;
  if (s.policy.mode == ScanMode::squeezed_fixed_l) out["fixed_l"] = s.policy.fixed_l;
  return out;
}

std::string format_number(double v) {
  char buf[64];
  if (v == 0.0) v = 0.0;  // no "-0" in tables
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_scan_csv(std::ostream& out, const ScanResult& s) {
  const auto f = format_number;
  if (s.policy.mode == ScanMode::vacuum) {
    out << "L,E_A,E_B,bound_ratio\n";
    for (const auto& p : s.points) {
      out << f(p.L) << ',' << f(p.E_A) << ',' << f(p.E_B) << ',' << f(p.bound_ratio) << '\n';
    }
    return;
  }
  out << "L,l,E_A,E_C,E_Bf,bound_ratio,slope_window\n";
  for (const auto& p : s.points) {
    out << f(p.L) << ',' << f(p.l) << ',' << f(p.E_A) << ',' << f(p.E_C) << ',' << f(p.E_B) << ','
        << f(p.bound_ratio) << ',' << (p.in_fit_window ? 1 : 0) << '\n';
  }
}

void write_density_csv(std::ostream& out, const std::vector<std::pair<double, double>>& rows) {
  out << "x,density\n";
  for (const auto& [x, d] : rows) out << format_number(x) << ',' << format_number(d) << '\n';
}

void write_minimizer_csv(std::ostream& out, const SamplingFunction& xi) {
  out << "x,xi\n";
  for (std::size_t i = 0; i < xi.grid.size(); ++i) {
    out << format_number(xi.grid[i]) << ',' << format_number(xi.values[i]) << '\n';
  }
}

}  // namespace qet
