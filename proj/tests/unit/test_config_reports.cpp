#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qet/config.hpp"
#include "qet/errors.hpp"
#include "qet/reports.hpp"

using namespace qet;
using nlohmann::json;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& body) {
  const auto dir = std::filesystem::temp_directory_path() / "qet_unit";
  std::filesystem::create_directories(dir);
  const auto p = dir / name;
  std::ofstream(p) << body;
  return p;
}

const char* kVacuumToml = R"(
[geometry]
x1A = -16.0
x2A = 0.0
x1B = 10.0
x2B = 26.0
T = 0.0

[gA]
family = "gaussian"
center = -8.0
sigma = 1.0

[gB]
family = "gaussian"
center = 18.0
sigma = 1.0
)";

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::NonConvergence;
}

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("TOML and JSON give the same configuration") {
    const auto toml = load_run_config(write_temp("v.toml", kVacuumToml), RunMode::vacuum);
    const json doc = load_document(write_temp("v.toml", kVacuumToml));
    const auto js = load_run_config(write_temp("v.json", doc.dump()), RunMode::vacuum);
    CHECK(toml.resolved == js.resolved);
    CHECK(toml.setup.geometry.L() == 10.0);
    CHECK(toml.resolved["gA"]["amplitude"] == 1.0);
    CHECK(toml.resolved["quadrature"]["rel_tol"] == 1e-10);
  }

  TEST_CASE("vacuum mode rejects l and f") {
    json doc = load_document(write_temp("v.toml", kVacuumToml));
    doc["l"] = 2.0;
    CHECK(code_of([&] { (void)parse_run_config(doc, RunMode::vacuum); }) == ErrorCode::ConfigError);
    doc.erase("l");
    doc["f"] = {{"kind", "identity"}};
    CHECK(code_of([&] { (void)parse_run_config(doc, RunMode::vacuum); }) == ErrorCode::ConfigError);
  }

  TEST_CASE("squeezed documents: f, l, or both consistent") {
    json doc = load_document(write_temp("v.toml", kVacuumToml));
    CHECK(code_of([&] { (void)parse_run_config(doc, RunMode::squeezed); }) == ErrorCode::ConfigError);
    doc["l"] = 4.0;
    auto cfg = parse_run_config(doc, RunMode::squeezed);
    REQUIRE(cfg.profile);
    CHECK(cfg.profile->shift() == doctest::Approx(4.0));
    CHECK(cfg.profile->half_width() == doctest::Approx(5.0));
    doc["f"] = {{"kind", "piecewise_quadratic"}, {"lambda", 0.02}, {"xbar", 5.0}, {"d", 10.0}};
    CHECK(code_of([&] { (void)parse_run_config(doc, RunMode::squeezed); }) == ErrorCode::ConfigError);
    doc["l"] = 3.0;
    CHECK(parse_run_config(doc, RunMode::squeezed).resolved["f"]["l"] == doctest::Approx(3.0));
    doc["f"]["table"] = json::array();
    CHECK(code_of([&] { (void)parse_run_config(doc, RunMode::squeezed); }) == ErrorCode::ConfigError);
  }

  TEST_CASE("unknown keys, bad types and syntax errors") {
    json doc = load_document(write_temp("v.toml", kVacuumToml));
    doc["gA"]["sigmaa"] = 1.0;
    CHECK(code_of([&] { (void)parse_run_config(doc, RunMode::vacuum); }) == ErrorCode::ConfigError);
    doc = load_document(write_temp("v.toml", kVacuumToml));
    doc["geometry"]["T"] = "zero";
    CHECK(code_of([&] { (void)parse_run_config(doc, RunMode::vacuum); }) == ErrorCode::ConfigError);
    CHECK(code_of([&] { (void)load_document(write_temp("bad.toml", "[geometry\nx = 1")); }) ==
          ErrorCode::ConfigError);
    CHECK(code_of([&] { (void)load_document(write_temp("bad.json", "{")); }) == ErrorCode::ConfigError);
    CHECK(code_of([&] { (void)load_document(write_temp("x.yaml", "a: 1")); }) == ErrorCode::ConfigError);
  }

  TEST_CASE("tabulated smearing and squeeze tables") {
    json doc = load_document(write_temp("v.toml", kVacuumToml));
    doc["gA"] = {{"table", {{-12, 0}, {-10, 0.5}, {-8, 1.0}, {-6, 0.5}, {-4, 0}}}};
    const auto cfg = parse_run_config(doc, RunMode::vacuum);
    CHECK(cfg.setup.gA.family() == ProfileFamily::tabulated);
    CHECK(cfg.resolved["gA"]["table"].size() == 5);
    json f = {{"kind", "scale_factor"}, {"scale_table", {{-1, 1}, {-1, 2}, {1, 2}, {1, 1}}}};
    CHECK(parse_squeeze(f).shift() == doctest::Approx(2.0));
  }
}

TEST_SUITE("reports") {
  TEST_CASE("vacuum and squeezed report keys") {
    TeleportReport r;
    r.E_B = 1.0;
    json v = to_json(r);
    for (const char* k : {"E_A", "E_B", "bound_ratio", "C", "p", "theta", "G_B", "route_rel_diff"}) {
      CHECK(v.contains(k));
    }
    CHECK_FALSE(v.contains("E_Bf"));
    r.squeezed = true;
    r.E_B_vacuum = 0.5;
    json s = to_json(r);
    CHECK(s["E_Bf"] == 1.0);
    CHECK(s["E_B"] == 0.5);
    CHECK(s.contains("E_C"));
    CHECK(s.contains("l"));
  }

  TEST_CASE("CSV headers are frozen") {
    ScanResult res;
    res.points.push_back({100, 80, 0.2, 0.01, 1e-9, 1e-6, true, true});
    std::ostringstream vac;
    write_scan_csv(vac, res);
    CHECK(vac.str().rfind("L,E_A,E_B,bound_ratio\n100,0.2,1e-09,1e-06\n", 0) == 0);
    res.policy.mode = ScanMode::squeezed_tracking;
    std::ostringstream sq;
    write_scan_csv(sq, res);
    CHECK(sq.str() == "L,l,E_A,E_C,E_Bf,bound_ratio,slope_window\n100,80,0.2,0.01,1e-09,1e-06,1\n");
    std::ostringstream dens;
    write_density_csv(dens, {{0.5, -1.25}});
    CHECK(dens.str() == "x,density\n0.5,-1.25\n");
    std::ostringstream xi;
    write_minimizer_csv(xi, SamplingFunction{{0, 1}, {0, 1}});
    CHECK(xi.str() == "x,xi\n0,0\n1,1\n");
  }

  TEST_CASE("numbers round-trip") {
    for (double v : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300}) {
      CHECK(std::stod(format_number(v)) == v);
    }
  }

  TEST_CASE("manifest omits the timestamp unless asked") {
    RunManifest m{"vacuum", "in.toml", json::object(), {"out.json"}, std::nullopt};
    CHECK_FALSE(to_json(m).contains("timestamp"));
    m.timestamp = utc_timestamp();
    CHECK(to_json(m)["timestamp"].get<std::string>().size() == 20);
    CHECK(to_json(m)["version"] == std::string(tool_version()));
  }
}
