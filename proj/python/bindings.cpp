#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sysmine/composition.hpp"
#include "sysmine/pipeline.hpp"

namespace py = pybind11;
using namespace sysmine;
using nlohmann::json;

namespace {

Module module_of(const std::string& text) { return module_from_json(json::parse(text)); }

py::dict result_dict(const PipelineResult& r) {
  py::dict out;
  out["artifacts"] = r.artifacts;
  out["summary"] = r.summary;
  out["warnings"] = r.warnings;
  return out;
}

PipelineConfig config_of(const std::string& log, const std::string& roles, const std::string& structure = {},
                         const std::string& place_roles = {}, std::vector<Symbol> priority = {},
                         bool dot = false) {
  PipelineConfig c;
  c.log = log;
  c.roles = roles;
  c.structure = structure;
  c.place_roles = place_roles;
  c.function_priority = std::move(priority);
  c.format = dot ? OutputFormat::dot : OutputFormat::json;
  return c;
}

}  // namespace

PYBIND11_MODULE(_sysmine, m) {
  static py::exception<Error> error(m, "Error");
  static py::exception<StepError> step_error(m, "StepError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::handle(error)(e.what());
      exc.attr("code") = std::string(to_string(e.code()));
      exc.attr("detail") = e.detail();
      PyErr_SetObject(error.ptr(), exc.ptr());
    } catch (const StepError& e) {
      py::object exc = py::handle(step_error)(e.what());
      exc.attr("step") = e.step();
      PyErr_SetObject(step_error.ptr(), exc.ptr());
    } catch (const json::exception& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  m.def(
      "mine_run",
      [](const std::string& log, const std::string& roles, bool dot) {
        return result_dict(mine_run_pipeline(config_of(log, roles, {}, {}, {}, dot)));
      },
      py::arg("log"), py::arg("roles"), py::arg("dot") = false);

  m.def(
      "mine_system",
      [](const std::string& log, const std::string& roles, const std::string& structure,
         const std::string& place_roles, std::vector<Symbol> priority, bool dot) {
        return result_dict(mine_system_pipeline(config_of(log, roles, structure, place_roles, std::move(priority), dot)));
      },
      py::arg("log"), py::arg("roles"), py::arg("structure"), py::arg("place_roles"),
      py::arg("priority") = std::vector<Symbol>{}, py::arg("dot") = false);

  m.def("check", [](const std::string& a, const std::string& b) { return check_modules(module_of(a), module_of(b)); });
  m.def("compose", [](const std::string& a, const std::string& b) {
    return dump(to_json(compose(module_of(a), module_of(b))));
  });
  m.def("commutes", [](const std::string& a, const std::string& b) { return commutes(module_of(a), module_of(b)); });
  m.def("isomorphic", [](const std::string& a, const std::string& b) { return isomorphic(module_of(a), module_of(b)); });
  m.def("harmonic_pairs", [](const std::string& a, const std::string& b) {
    std::vector<std::tuple<std::string, std::string, std::string>> out;
    for (const auto& p : harmonic_pairs(module_of(a), module_of(b))) out.emplace_back(p.label, p.left_node, p.right_node);
    return out;
  });
  m.def(
      "to_dot",
      [](const std::string& artifact, const std::string& structure) {
        if (structure.empty()) return export_dot(json::parse(artifact), nullptr);
        const auto s = load_structure(structure);
        return export_dot(json::parse(artifact), &s);
      },
      py::arg("artifact"), py::arg("structure") = std::string{});
}
