#include "qet/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include "qet/errors.hpp"

namespace qet {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::ConfigError, what); }

json from_toml(const toml::node& node) {
  if (auto t = node.as_table()) {
    json out = json::object();
    for (const auto& [k, v] : *t) out[std::string(k.str())] = from_toml(v);
    return out;
  }
  if (auto a = node.as_array()) {
    json out = json::array();
    for (const auto& v : *a) out.push_back(from_toml(v));
    return out;
  }
  if (auto v = node.as_integer()) return v->get();
  if (auto v = node.as_floating_point()) return v->get();
  if (auto v = node.as_boolean()) return v->get();
  if (auto v = node.as_string()) return v->get();
  config_error("unsupported TOML value type (dates and times are not accepted)");
}

void reject_unknown(const json& node, const std::string& where, std::set<std::string> allowed) {
  if (!node.is_object()) config_error(where + " must be a table");
  for (const auto& [k, v] : node.items()) {
    if (!allowed.count(k)) config_error("unknown key '" + k + "' in " + where);
  }
}

double number(const json& node, const std::string& key, const std::string& where) {
  if (!node.contains(key)) config_error("missing " + where + "." + key);
  const json& v = node.at(key);
  if (!v.is_number()) config_error(where + "." + key + " must be a number");
  return v.get<double>();
}

double number_or(const json& node, const std::string& key, const std::string& where,
                 double fallback) {
  return node.contains(key) ? number(node, key, where) : fallback;
}

int integer(const json& node, const std::string& key, const std::string& where) {
  const double v = number(node, key, where);
  if (v != std::floor(v) || std::abs(v) > 1e9) config_error(where + "." + key + " must be an integer");
  return static_cast<int>(v);
}

std::string text(const json& node, const std::string& key, const std::string& where) {
  if (!node.contains(key)) config_error("missing " + where + "." + key);
  if (!node.at(key).is_string()) config_error(where + "." + key + " must be a string");
  return node.at(key).get<std::string>();
}

std::vector<std::pair<double, double>> pairs(const json& node, const std::string& where) {
  if (!node.is_array()) config_error(where + " must be an array of [x, y] pairs");
  std::vector<std::pair<double, double>> out;
  for (const auto& row : node) {
    if (!row.is_array() || row.size() != 2 || !row[0].is_number() || !row[1].is_number()) {
      config_error(where + " entries must be [x, y] number pairs");
    }
    out.emplace_back(row[0].get<double>(), row[1].get<double>());
  }
  return out;
}

json table_json(const std::vector<std::pair<double, double>>& t) {
  json out = json::array();
  for (const auto& [x, y] : t) out.push_back({x, y});
  return out;
}

}  // namespace

json load_document(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) config_error("cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string body = buf.str();
  const std::string ext = path.extension().string();
  if (ext == ".json") {
    try {
      return json::parse(body);
    } catch (const json::parse_error& e) {
      config_error(path.string() + ": " + e.what());
    }
  }
  if (ext == ".toml") {
    try {
      return from_toml(toml::parse(body, path.string()));
    } catch (const toml::parse_error& e) {
      std::ostringstream msg;
      msg << path.string() << ":" << e.source().begin.line << ": " << e.description();
      config_error(msg.str());
    }
  }
  config_error("unknown config extension '" + ext + "' (expected .toml or .json)");
}

ProtocolGeometry parse_geometry(const json& node) {
  reject_unknown(node, "geometry", {"x1A", "x2A", "x1B", "x2B", "T"});
  ProtocolGeometry geo;
  geo.x1A = number(node, "x1A", "geometry");
  geo.x2A = number(node, "x2A", "geometry");
  geo.x1B = number(node, "x1B", "geometry");
  geo.x2B = number(node, "x2B", "geometry");
  geo.T = number_or(node, "T", "geometry", 0.0);
  geo.validate();
  return geo;
}

SmearingProfile parse_smearing(const json& node, const std::string& name) {
  reject_unknown(node, name, {"family", "center", "sigma", "amplitude", "table"});
  const std::string family =
      node.contains("family") ? text(node, "family", name) : (node.contains("table") ? "tabulated" : "");
  if (family.empty()) config_error("missing " + name + ".family");
  const ProfileFamily fam = profile_family_from_string(family);
  if (fam == ProfileFamily::tabulated) {
    if (!node.contains("table")) config_error(name + ".table is required for a tabulated profile");
    for (const char* k : {"center", "sigma", "amplitude"}) {
      if (node.contains(k)) config_error(name + "." + k + " is derived for a tabulated profile");
    }
    return SmearingProfile::tabulated(pairs(node.at("table"), name + ".table"));
  }
  if (node.contains("table")) config_error(name + ".table requires family = \"tabulated\"");
  const double c = number(node, "center", name);
  const double s = number(node, "sigma", name);
  const double a = number_or(node, "amplitude", name, 1.0);
  return fam == ProfileFamily::gaussian ? SmearingProfile::gaussian(c, s, a)
                                        : SmearingProfile::compact_bump(c, s, a);
}

SqueezeProfile parse_squeeze(const json& node) {
  reject_unknown(node, "f", {"kind", "lambda", "xbar", "d", "table", "scale_table"});
  const SqueezeKind kind = squeeze_kind_from_string(text(node, "kind", "f"));
  auto only = [&](std::set<std::string> keys) {
    for (const auto& [k, v] : node.items()) {
      if (k != "kind" && !keys.count(k)) {
        config_error("f." + k + " does not apply to kind " + std::string(to_string(kind)));
      }
    }
  };
  switch (kind) {
    case SqueezeKind::identity:
      only({});
      return SqueezeProfile::identity();
    case SqueezeKind::piecewise_quadratic:
      only({"lambda", "xbar", "d"});
      return SqueezeProfile::piecewise_quadratic(number(node, "lambda", "f"),
                                                 number(node, "xbar", "f"), number(node, "d", "f"));
    case SqueezeKind::tabulated:
      only({"table"});
      if (!node.contains("table")) config_error("missing f.table");
      return SqueezeProfile::tabulated(pairs(node.at("table"), "f.table"));
    case SqueezeKind::scale_factor:
      only({"scale_table"});
      if (!node.contains("scale_table")) config_error("missing f.scale_table");
      return SqueezeProfile::from_scale_factor(pairs(node.at("scale_table"), "f.scale_table"));
  }
  config_error("unreachable squeeze kind");
}

json describe(const SqueezeProfile& f) {
  json out;
  out["kind"] = std::string(to_string(f.kind()));
  switch (f.kind()) {
    case SqueezeKind::identity: break;
    case SqueezeKind::piecewise_quadratic:
      out["lambda"] = f.lambda();
      out["xbar"] = f.xbar();
      out["d"] = f.half_width();
      break;
    case SqueezeKind::tabulated: out["table"] = table_json(f.table()); break;
    case SqueezeKind::scale_factor: out["scale_table"] = table_json(f.scale_table()); break;
  }
  out["l"] = f.shift();
  return out;
}

json describe(const SmearingProfile& g) {
  return {{"family", std::string(to_string(g.family()))},
          {"center", g.center()},
          {"sigma", g.width()},
          {"amplitude", g.amplitude()},
          {"support", {g.support().lo, g.support().hi}},
          {"signed", g.is_signed()}};
}

json describe(const ProtocolGeometry& geo) {
  return {{"x1A", geo.x1A}, {"x2A", geo.x2A}, {"x1B", geo.x1B},  {"x2B", geo.x2B},
          {"T", geo.T},     {"L", geo.L()},   {"d", geo.d()}};
}

json describe(const QuadratureConfig& cfg) {
  return {{"rel_tol", cfg.rel_tol},
          {"abs_tol", cfg.abs_tol},
          {"max_subdivisions", cfg.max_subdivisions},
          {"freq_cutoff", cfg.freq_cutoff},
          {"epsilon_regulator", cfg.epsilon_regulator},
          {"grid_points", cfg.grid_points}};
}

RunConfig parse_run_config(const json& doc, RunMode mode) {
  reject_unknown(doc, "config", {"mode", "geometry", "gA", "gB", "f", "l", "quadrature", "scan"});
  if (doc.contains("mode")) {
    const std::string m = text(doc, "mode", "config");
    if (m != "vacuum" && m != "squeezed") config_error("mode must be \"vacuum\" or \"squeezed\"");
    if ((mode == RunMode::vacuum && m != "vacuum") || (mode == RunMode::squeezed && m != "squeezed")) {
      config_error("mode/config mismatch: document declares mode = \"" + m + "\"");
    }
  }
  if (mode == RunMode::vacuum && (doc.contains("l") || doc.contains("f"))) {
    config_error(std::string("mode/config mismatch: ") + (doc.contains("l") ? "l" : "f") +
                 " specified in vacuum mode");
  }
  if (!doc.contains("geometry")) config_error("missing geometry table");
  if (!doc.contains("gA")) config_error("missing gA table");
  if (!doc.contains("gB")) config_error("missing gB table");

  const ProtocolGeometry geo = parse_geometry(doc.at("geometry"));
  SmearingProfile gA = parse_smearing(doc.at("gA"), "gA");
  SmearingProfile gB = parse_smearing(doc.at("gB"), "gB");

  QuadratureConfig quad;
  if (doc.contains("quadrature")) {
    const json& q = doc.at("quadrature");
    reject_unknown(q, "quadrature", {"rel_tol", "abs_tol", "max_subdivisions", "freq_cutoff",
                                     "epsilon_regulator", "grid_points"});
    quad.rel_tol = number_or(q, "rel_tol", "quadrature", quad.rel_tol);
    quad.abs_tol = number_or(q, "abs_tol", "quadrature", quad.abs_tol);
    if (q.contains("max_subdivisions")) quad.max_subdivisions = integer(q, "max_subdivisions", "quadrature");
    quad.freq_cutoff = number_or(q, "freq_cutoff", "quadrature", quad.freq_cutoff);
    quad.epsilon_regulator = number_or(q, "epsilon_regulator", "quadrature", quad.epsilon_regulator);
    if (q.contains("grid_points")) quad.grid_points = integer(q, "grid_points", "quadrature");
  }
  quad.validate();

  ScanSettings scan;
  if (doc.contains("scan")) {
    const json& s = doc.at("scan");
    reject_unknown(s, "scan", {"from", "to", "points", "mode", "margin", "fixed_l"});
    if (s.contains("from")) scan.from = number(s, "from", "scan");
    if (s.contains("to")) scan.to = number(s, "to", "scan");
    if (s.contains("points")) scan.points = integer(s, "points", "scan");
    if (s.contains("mode")) scan.mode = text(s, "mode", "scan");
    if (s.contains("margin")) scan.margin = number(s, "margin", "scan");
    if (s.contains("fixed_l")) scan.fixed_l = number(s, "fixed_l", "scan");
  }

  std::optional<SqueezeProfile> profile;
  if (doc.contains("f")) profile = parse_squeeze(doc.at("f"));
  if (doc.contains("l")) {
    const double l = number(doc, "l", "config");
    if (profile) {
      if (std::abs(profile->shift() - l) > 1e-12 * std::max(1.0, std::abs(l))) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "l = " << l << " disagrees with the shift " << profile->shift() << " of f";
        config_error(msg.str());
      }
    } else {
      profile = SqueezeProfile::piecewise_quadratic_for_shift(l, geo.d());
    }
  }
  if (mode == RunMode::squeezed && !profile) {
    config_error("a squeezed run needs an f table or an l value");
  }

  json resolved;
  resolved["geometry"] = describe(geo);
  for (const auto& [name, g] : {std::pair{"gA", &gA}, std::pair{"gB", &gB}}) {
    json d = describe(*g);
    if (g->family() == ProfileFamily::tabulated) d["table"] = doc.at(name).at("table");
    resolved[name] = d;
  }
  if (profile) resolved["f"] = describe(*profile);
  resolved["quadrature"] = describe(quad);
  if (doc.contains("scan")) resolved["scan"] = doc.at("scan");
  if (doc.contains("mode")) resolved["mode"] = doc.at("mode");

  return RunConfig{ProtocolSetup{std::move(gA), std::move(gB), geo}, std::move(profile), quad, scan,
                   std::move(resolved)};
}

RunConfig load_run_config(const std::filesystem::path& path, RunMode mode) {
  return parse_run_config(load_document(path), mode);
}

}  // namespace qet
