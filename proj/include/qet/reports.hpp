#pragma once

// JSON reports and CSV curves. Key names and column orders are a compatibility
// contract; see README.md.

#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qet/bounds.hpp"
#include "qet/oracle.hpp"
#include "qet/scaling.hpp"
#include "qet/vacuum_qet.hpp"

namespace qet {

std::string_view tool_version() noexcept;

struct RunManifest {
  std::string command;
  std::string input;
  nlohmann::json resolved;
  std::vector<std::string> outputs;
  /// ISO-8601 UTC; omitted by default so reruns are byte-identical.
  std::optional<std::string> timestamp;
};

std::string utc_timestamp();

nlohmann::json to_json(const RunManifest& m);
/// Vacuum reports carry E_B; squeezed reports carry E_Bf, E_B (the l = 0
/// companion), l, E_C and E_C_window.
nlohmann::json to_json(const TeleportReport& r);
nlohmann::json to_json(const BoundCertification& c);
nlohmann::json to_json(const FlanaganMinimum& m, double L, double tail_length);
nlohmann::json to_json(const OracleComparison& c);
nlohmann::json to_json(const PowerLawFit& fit);
/// Fit, policy and accounting summary of a scan (rows go to CSV).
nlohmann::json scan_summary(const ScanResult& s);

/// Shortest round-trip decimal form.
std::string format_number(double v);

/// Vacuum: L,E_A,E_B,bound_ratio. Squeezed: L,l,E_A,E_C,E_Bf,bound_ratio,slope_window.
void write_scan_csv(std::ostream& out, const ScanResult& s);
/// x,density
void write_density_csv(std::ostream& out, const std::vector<std::pair<double, double>>& rows);
/// x,xi
void write_minimizer_csv(std::ostream& out, const SamplingFunction& xi);

}  // namespace qet
