// Python bindings. Results come back as plain dicts with the same keys as the
// CLI's JSON reports.

#include <optional>

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qet/bounds.hpp"
#include "qet/config.hpp"
#include "qet/errors.hpp"
#include "qet/oracle.hpp"
#include "qet/reports.hpp"
#include "qet/scaling.hpp"
#include "qet/squeeze_profile.hpp"
#include "qet/squeezed_qet.hpp"
#include "qet/vacuum_qet.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

py::object to_python(const json& j) {
  switch (j.type()) {
    case json::value_t::null: return py::none();
    case json::value_t::boolean: return py::bool_(j.get<bool>());
    case json::value_t::number_integer: return py::int_(j.get<std::int64_t>());
    case json::value_t::number_unsigned: return py::int_(j.get<std::uint64_t>());
    case json::value_t::number_float: return py::float_(j.get<double>());
    case json::value_t::string: return py::str(j.get<std::string>());
    case json::value_t::array: {
      py::list out;
      for (const auto& v : j) out.append(to_python(v));
      return out;
    }
    case json::value_t::object: {
      py::dict out;
      for (const auto& [k, v] : j.items()) out[py::str(k)] = to_python(v);
      return out;
    }
    default: return py::none();
  }
}

qet::QuadratureConfig quad_or_default(const std::optional<qet::QuadratureConfig>& cfg) {
  return cfg.value_or(qet::QuadratureConfig{});
}

qet::NodeRule node_rule(const std::string& name) {
  if (name == "uniform") return qet::NodeRule::uniform;
  if (name == "log") return qet::NodeRule::log;
  throw qet::Error(qet::ErrorCode::ConfigError, "rule must be 'uniform' or 'log'");
}

}  // namespace

PYBIND11_MODULE(_qet, m) {
  m.doc() = "Quantum energy teleportation in vacuum and squeezed states";
  m.attr("__version__") = std::string(qet::tool_version());

  // Created once and intentionally never released, so no destructor runs
  // after the interpreter is gone. args = (code, message).
  static PyObject* const error_type =
      PyErr_NewException("qet._qet.QetError", PyExc_RuntimeError, nullptr);
  m.attr("QetError") = py::handle(error_type);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const qet::Error& e) {
      py::tuple args = py::make_tuple(std::string(qet::to_string(e.code())), std::string(e.what()));
      PyErr_SetObject(error_type, args.ptr());
    }
  });

  py::class_<qet::QuadratureConfig>(m, "QuadratureConfig")
      .def(py::init<>())
      .def_readwrite("rel_tol", &qet::QuadratureConfig::rel_tol)
      .def_readwrite("abs_tol", &qet::QuadratureConfig::abs_tol)
      .def_readwrite("max_subdivisions", &qet::QuadratureConfig::max_subdivisions)
      .def_readwrite("freq_cutoff", &qet::QuadratureConfig::freq_cutoff)
      .def_readwrite("epsilon_regulator", &qet::QuadratureConfig::epsilon_regulator)
      .def_readwrite("grid_points", &qet::QuadratureConfig::grid_points);

  py::class_<qet::SmearingProfile>(m, "SmearingProfile")
      .def_static("gaussian", &qet::SmearingProfile::gaussian, py::arg("center"), py::arg("sigma"),
                  py::arg("amplitude") = 1.0)
      .def_static("compact_bump", &qet::SmearingProfile::compact_bump, py::arg("center"),
                  py::arg("sigma"), py::arg("amplitude") = 1.0)
      .def_static("tabulated", &qet::SmearingProfile::tabulated, py::arg("table"))
      .def("__call__", &qet::SmearingProfile::operator())
      .def("derivative", &qet::SmearingProfile::derivative)
      .def_property_readonly("center", &qet::SmearingProfile::center)
      .def_property_readonly("width", &qet::SmearingProfile::width)
      .def_property_readonly("amplitude", &qet::SmearingProfile::amplitude)
      .def_property_readonly("support",
                             [](const qet::SmearingProfile& g) {
                               return std::pair{g.support().lo, g.support().hi};
                             })
      .def_property_readonly("signed", &qet::SmearingProfile::is_signed)
      .def("describe", [](const qet::SmearingProfile& g) { return to_python(qet::describe(g)); });

  py::class_<qet::ProtocolGeometry>(m, "Geometry")
      .def(py::init([](double x1A, double x2A, double x1B, double x2B, double T) {
             qet::ProtocolGeometry g{x1A, x2A, x1B, x2B, T};
             g.validate();
             return g;
           }),
           py::arg("x1A"), py::arg("x2A"), py::arg("x1B"), py::arg("x2B"), py::arg("T") = 0.0)
      .def_readonly("x1A", &qet::ProtocolGeometry::x1A)
      .def_readonly("x2A", &qet::ProtocolGeometry::x2A)
      .def_readonly("x1B", &qet::ProtocolGeometry::x1B)
      .def_readonly("x2B", &qet::ProtocolGeometry::x2B)
      .def_readonly("T", &qet::ProtocolGeometry::T)
      .def_property_readonly("L", &qet::ProtocolGeometry::L)
      .def_property_readonly("d", &qet::ProtocolGeometry::d);

  py::class_<qet::SqueezeProfile>(m, "SqueezeProfile")
      .def_static("identity", &qet::SqueezeProfile::identity)
      .def_static("piecewise_quadratic", &qet::SqueezeProfile::piecewise_quadratic,
                  py::arg("lam"), py::arg("xbar"), py::arg("d"))
      .def_static("for_shift", &qet::SqueezeProfile::piecewise_quadratic_for_shift, py::arg("l"),
                  py::arg("d"))
      .def_static("tabulated", &qet::SqueezeProfile::tabulated, py::arg("table"))
      .def_static("from_scale_factor",
                  py::overload_cast<std::vector<std::pair<double, double>>>(
                      &qet::SqueezeProfile::from_scale_factor),
                  py::arg("table"))
      .def("__call__", &qet::SqueezeProfile::operator())
      .def("derivative", &qet::SqueezeProfile::derivative)
      .def("inverse", &qet::SqueezeProfile::inverse)
      .def_property_readonly("shift", &qet::SqueezeProfile::shift)
      .def_property_readonly("kind",
                             [](const qet::SqueezeProfile& f) { return std::string(qet::to_string(f.kind())); })
      .def_property_readonly("squeezed_region",
                             [](const qet::SqueezeProfile& f) {
                               return std::pair{f.squeezed_region().lo, f.squeezed_region().hi};
                             })
      .def("describe", [](const qet::SqueezeProfile& f) { return to_python(qet::describe(f)); });

  m.def(
      "teleported_energy",
      [](const qet::SmearingProfile& gA, const qet::SmearingProfile& gB,
         const qet::ProtocolGeometry& geo, std::optional<qet::QuadratureConfig> cfg) {
        const auto rep = qet::teleported_energy(gA, gB, geo, quad_or_default(cfg));
        json out = qet::to_json(rep);
        out["certification"] = qet::to_json(qet::certify_bound(rep, geo));
        return to_python(out);
      },
      py::arg("gA"), py::arg("gB"), py::arg("geometry"), py::arg("config") = py::none());

  m.def(
      "teleported_energy_squeezed",
      [](const qet::SmearingProfile& gA, const qet::SmearingProfile& gB,
         const qet::ProtocolGeometry& geo, const qet::SqueezeProfile& f,
         std::optional<qet::QuadratureConfig> cfg) {
        const auto rep = qet::teleported_energy_squeezed(gA, gB, geo, f, quad_or_default(cfg));
        json out = qet::to_json(rep);
        out["profile"] = qet::describe(f);
        out["certification"] = qet::to_json(qet::certify_bound(rep, geo));
        return to_python(out);
      },
      py::arg("gA"), py::arg("gB"), py::arg("geometry"), py::arg("profile"),
      py::arg("config") = py::none());

  m.def(
      "scan_distance",
      [](const qet::SmearingProfile& gA, const qet::SmearingProfile& gB,
         const qet::ProtocolGeometry& geo, std::vector<double> L_grid, const std::string& mode,
         double fixed_l, std::optional<double> margin, std::optional<qet::QuadratureConfig> cfg) {
        const qet::ProtocolSetup setup{gA, gB, geo};
        qet::ScanPolicy policy{qet::scan_mode_from_string(mode), fixed_l, margin};
        const auto res = policy.mode == qet::ScanMode::vacuum
                             ? qet::scan_distance(setup, L_grid, quad_or_default(cfg))
                             : qet::scan_distance_squeezed(setup, L_grid, policy, quad_or_default(cfg));
        json out = qet::scan_summary(res);
        // Same names as the scan CSV columns.
        const char* energy_key = policy.mode == qet::ScanMode::vacuum ? "E_B" : "E_Bf";
        json rows = json::array();
        for (const auto& p : res.points) {
          rows.push_back({{"L", p.L},
                          {"l", p.l},
                          {"E_A", p.E_A},
                          {"E_C", p.E_C},
                          {energy_key, p.E_B},
                          {"bound_ratio", p.bound_ratio},
                          {"slope_window", p.in_fit_window}});
        }
        out["rows"] = rows;
        return to_python(out);
      },
      py::arg("gA"), py::arg("gB"), py::arg("geometry"), py::arg("L_grid"),
      py::arg("mode") = "vacuum", py::arg("fixed_l") = 0.0, py::arg("margin") = py::none(),
      py::arg("config") = py::none());

  m.def("log_grid", &qet::log_grid, py::arg("start"), py::arg("stop"), py::arg("points"));

  m.def(
      "minimize_flanagan",
      [](const qet::ProtocolGeometry& geo, double tail_length, int grid_points) {
        const auto min = qet::minimize_flanagan(geo, tail_length, grid_points);
        json out = qet::to_json(min, geo.L(), tail_length);
        out["grid"] = min.xi.grid;
        out["xi"] = min.xi.values;
        return to_python(out);
      },
      py::arg("geometry"), py::arg("tail_length"), py::arg("grid_points"));

  m.def(
      "flanagan_functional",
      [](std::vector<double> grid, std::vector<double> values) {
        return qet::flanagan_functional(qet::SamplingFunction{std::move(grid), std::move(values)});
      },
      py::arg("grid"), py::arg("xi"));

  m.def(
      "compare_with_oracle",
      [](const qet::SmearingProfile& gA, const qet::SmearingProfile& gB,
         const qet::ProtocolGeometry& geo, std::optional<qet::SqueezeProfile> f,
         const std::string& rule, const std::string& fault) {
        const auto cmp = qet::compare_with_oracle(gA, gB, geo, f.value_or(qet::SqueezeProfile::identity()),
                                                  {}, qet::oracle_fault_from_string(fault),
                                                  node_rule(rule));
        return to_python(qet::to_json(cmp));
      },
      py::arg("gA"), py::arg("gB"), py::arg("geometry"), py::arg("profile") = py::none(),
      py::arg("rule") = "uniform", py::arg("fault") = "none");

  m.def(
      "squeeze_cost", [](const qet::SqueezeProfile& f) { return qet::squeeze_cost(f).value; },
      py::arg("profile"));
  m.def("piecewise_quadratic_cost", &qet::piecewise_quadratic_cost, py::arg("lam"),
        py::arg("xbar"), py::arg("d"));
  m.def(
      "energy_density",
      [](const qet::SqueezeProfile& f, double x) { return qet::energy_density(f, x, qet::Side::right); },
      py::arg("profile"), py::arg("x"));
  m.def("squeezed_correlator", &qet::squeezed_correlator, py::arg("profile"), py::arg("x"),
        py::arg("xp"));
  m.def("vacuum_correlator", &qet::vacuum_correlator, py::arg("x"), py::arg("xp"));

  m.def(
      "load_config",
      [](const std::string& path, const std::string& mode) {
        const qet::RunMode rm = mode == "vacuum"     ? qet::RunMode::vacuum
                                : mode == "squeezed" ? qet::RunMode::squeezed
                                                     : qet::RunMode::any;
        return to_python(qet::load_run_config(path, rm).resolved);
      },
      py::arg("path"), py::arg("mode") = "any");
}
