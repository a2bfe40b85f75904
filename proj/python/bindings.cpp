#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "giz/suites.hpp"

namespace py = pybind11;
using namespace giz;
using Json = nlohmann::ordered_json;

namespace {

Json point_json(const SurfacePoint& p) {
  Json a = Json::array();
  for (std::size_t i = 0; i < 4; ++i) a.push_back(p.is_exact() ? p.exact[i].str() : complex_str(p.coords[i]));
  return a;
}

std::string verify_json(const std::string& P, const std::string& Q, const std::vector<std::string>& suites,
                        int range, unsigned seed) {
  RunConfig cfg;
  cfg.P = P;
  cfg.Q = Q;
  cfg.suites = suites;
  cfg.range = range;
  cfg.seed = seed;
  py::gil_scoped_release release;
  return report_v1(cfg, run_suites(cfg)).dump();
}

std::string identity_json(const std::string& P, const std::string& Q, const std::string& name,
                          const std::map<std::string, long>& params) {
  Surface S = surface_from(P, Q);
  IdentityReport r = verify_identity(S, name, params);
  return report_json(r).dump();
}

std::string theta_json(const std::string& P, const std::string& Q, std::optional<std::string> lambda, unsigned seed) {
  Surface S = surface_from(P, Q);
  std::optional<GaussRat> l;
  if (lambda) {
    auto s = parse_scalar(*lambda);
    if (!s.exact) throw InvalidInput("lambda must be exact");
    l = s.exact;
  }
  auto r = verify_theta(S, l, seed);
  Json j{{"pullback_exact", r.pullback_exact},   {"inverse_exact", r.inverse_exact},
         {"v1_checked", r.v1_checked},           {"v1_formula", r.v1_formula},
         {"max_residual", r.max_numeric_residual}, {"max_scaled_residual", r.max_scaled_residual},
         {"findings", r.findings}};
  return j.dump();
}

std::string move_json(const std::string& P, const std::string& Q, const std::string& from, const std::string& to,
                      const std::string& mode) {
  if (mode != "flows" && mode != "algebraic") throw InvalidInput("mode must be flows or algebraic");
  Surface S = surface_from(P, Q);
  SurfacePoint p = parse_point(from), q = parse_point(to);
  AutoWord w = plan_transitivity(S, p, q, mode == "flows" ? PlanMode::flows : PlanMode::algebraic);
  auto res = execute_word(S, w, p);
  Json j;
  j["word"] = word_json(w);
  j["endpoint"] = point_json(res.flow.endpoint);
  j["max_residual"] = res.flow.max_residual;
  return j.dump();
}

std::string flow_json(const std::string& P, const std::string& Q, const std::string& field, const std::string& time,
                      const std::string& point) {
  Surface S = surface_from(P, Q);
  SurfacePoint p = parse_point(point);
  ParsedScalar t = parse_scalar(time);
  AutoWord w;
  w.steps.emplace_back(FlowStep{field, t.value, t.exact});
  auto res = execute_word(S, w, p);
  return Json{{"endpoint", point_json(res.flow.endpoint)}, {"max_residual", res.flow.max_residual}}.dump();
}

std::string cert_json_str(const std::string& P, const std::string& Q, int range) {
  CertRun r = run_cert(surface_from(P, Q), range);
  r.cert["pass"] = r.pass;
  r.cert["findings"] = r.findings;
  return r.cert.dump();
}

}  // namespace

PYBIND11_MODULE(_giz, m) {
  m.doc() = "Bindings for the giz core library; the giz package wraps these JSON-returning calls.";
  py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
  py::register_exception<NumericFailure>(m, "NumericFailure", PyExc_ArithmeticError);

  py::class_<Surface>(m, "Surface")
      .def(py::init(&surface_from), py::arg("P"), py::arg("Q"))
      .def_property_readonly("label", &Surface::label)
      .def_property_readonly("smooth", &Surface::smooth)
      .def_property_readonly("diagnostic", &Surface::smoothness_diagnostic)
      .def_property_readonly("generators",
                             [](const Surface& S) {
                               std::vector<std::string> g;
                               for (const auto& p : S.generators()) g.push_back(p.str());
                               return g;
                             })
      .def("reduce", [](const Surface& S, const std::string& f) { return S.reduce(parse_poly(f)).str(); })
      .def("contains", [](const Surface& S, const std::string& f) { return S.ideal().contains(parse_poly(f)); })
      .def("catalog_ids",
           [](const Surface& S) {
             std::vector<std::string> ids;
             for (const auto& e : catalog(S)) ids.push_back(e.id);
             return ids;
           })
      .def("__repr__", &Surface::label);

  m.def("suite_names", &suite_names);
  m.def("verify_json", &verify_json, py::arg("P"), py::arg("Q"), py::arg("suites"), py::arg("range") = 2,
        py::arg("seed") = 0);
  m.def("identity_json", &identity_json);
  m.def("theta_json", &theta_json, py::arg("P"), py::arg("Q"), py::arg("lam") = std::nullopt, py::arg("seed") = 0);
  m.def("move_json", &move_json);
  m.def("flow_json", &flow_json);
  m.def("cert_json", &cert_json_str);
}
