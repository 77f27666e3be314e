#pragma once

// Run configuration documents (TOML or JSON, chosen by file extension).
//
//   [geometry]  x1A x2A x1B x2B T
//   [gA], [gB]  family center sigma amplitude | table = [[x, y], ...]
//   [f]         kind lambda xbar d | table | scale_table   (squeezed runs)
//   l           shift for a piecewise-quadratic profile spanning [-d, d]
//   [quadrature] rel_tol abs_tol max_subdivisions freq_cutoff
//                epsilon_regulator grid_points
//   [scan]      from to points mode margin fixed_l
//   mode        "vacuum" | "squeezed" (optional cross-check)

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "qet/profiles.hpp"
#include "qet/quadrature.hpp"
#include "qet/scaling.hpp"
#include "qet/squeeze_profile.hpp"

namespace qet {

enum class RunMode { vacuum, squeezed, any };

struct ScanSettings {
  std::optional<double> from;
  std::optional<double> to;
  std::optional<int> points;
  std::optional<std::string> mode;
  std::optional<double> margin;
  std::optional<double> fixed_l;
};

struct RunConfig {
  ProtocolSetup setup;
  /// Present when the document has an `f` table or an `l` key.
  std::optional<SqueezeProfile> profile;
  QuadratureConfig quadrature;
  ScanSettings scan;
  /// Every setting after defaults were applied, for embedding in reports.
  nlohmann::json resolved;
};

/// Parses a TOML (.toml) or JSON (.json) file into a JSON tree.
/// Throws ConfigError for unreadable files, unknown extensions or syntax errors.
nlohmann::json load_document(const std::filesystem::path& path);

/// Validates the document for the given mode. A vacuum run rejects `l` and
/// `f`; a squeezed run requires one of them (an `f` without `l` defines the
/// shift, both must agree). Unknown keys are ConfigError.
RunConfig parse_run_config(const nlohmann::json& doc, RunMode mode);

RunConfig load_run_config(const std::filesystem::path& path, RunMode mode);

SmearingProfile parse_smearing(const nlohmann::json& node, const std::string& name);
SqueezeProfile parse_squeeze(const nlohmann::json& node);
ProtocolGeometry parse_geometry(const nlohmann::json& node);

/// Resolved echo of a squeeze profile: kind, its parameters and the shift.
nlohmann::json describe(const SqueezeProfile& f);
nlohmann::json describe(const SmearingProfile& g);
nlohmann::json describe(const ProtocolGeometry& geo);
nlohmann::json describe(const QuadratureConfig& cfg);

}  // namespace qet
