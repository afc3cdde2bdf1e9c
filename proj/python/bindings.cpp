#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include "refsob/errors.hpp"
#include "refsob/extension.hpp"
#include "refsob/parabolic.hpp"
#include "refsob/spaces.hpp"
#include "refsob/varfun.hpp"
#include "refsob/verify.hpp"

namespace py = pybind11;
using namespace refsob;

namespace {

// JSON crosses the boundary as text; the Python side decodes it.
std::string dump(const nlohmann::json& j) { return j.dump(); }

using CArray = py::array_t<cplx, py::array::c_style | py::array::forcecast>;

GridFunction grid_from_array(const CArray& a, const std::vector<double>& box) {
  if (a.ndim() == 1) {
    if (box.size() != 2) throw DomainError("1-D data needs box = [lo, hi]");
    const auto spec = GridSpec::periodic_1d(box[0], box[1], static_cast<std::size_t>(a.shape(0)));
    return GridFunction(spec, std::vector<cplx>(a.data(), a.data() + a.size()));
  }
  if (a.ndim() == 2) {
    if (box.size() != 4) throw DomainError("2-D data needs box = [x_lo, x_hi, t_lo, t_hi]");
    const auto spec = GridSpec::periodic_2d(box[0], box[1], static_cast<std::size_t>(a.shape(0)), box[2], box[3],
                                            static_cast<std::size_t>(a.shape(1)));
    return GridFunction(spec, std::vector<cplx>(a.data(), a.data() + a.size()));
  }
  throw DomainError("data must be 1-D or 2-D");
}

ParabolicProblem problem_by_name(const std::string& what) {
  if (what == "heat") return heat_dirichlet();
  if (what == "backward-heat") return backward_heat_dirichlet();
  if (what == "heat-neumann") return heat_neumann();
  return ParabolicProblem::load(what);
}

}  // namespace

PYBIND11_MODULE(_refsob, m) {
  m.doc() = "Refined Sobolev scales: native core";

  auto base = py::register_exception<Error>(m, "RefsobError", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<FailedPrecondition>(m, "FailedPrecondition", base.ptr());
  py::register_exception<CapExceeded>(m, "CapExceeded", base.ptr());

  m.def("phi_eval", [](const std::string& phi, const std::vector<double>& r) {
    const auto f = FunctionParameter::parse(phi);
    std::vector<double> out;
    out.reserve(r.size());
    for (double v : r) out.push_back(f(v));
    return out;
  }, py::arg("phi"), py::arg("r"));

  m.def("check_class_m", [](const std::string& phi) { return dump(check_class_M(FunctionParameter::parse(phi), default_limit_grid(), default_lambdas()).to_json()); },
        py::arg("phi"));

  m.def("psi_verdict", [](double s0, double s, double s1, const std::string& phi) {
    const InterpolationPsi psi(s0, s, s1, FunctionParameter::parse(phi));
    const auto grid = default_index_grid();
    return dump(is_interpolation_parameter([&](double r) { return psi(r); }, grid).to_json());
  }, py::arg("s0"), py::arg("s"), py::arg("s1"), py::arg("phi") = "one");

  m.def("power_verdict", [](double a) {
    const auto grid = default_index_grid();
    return dump(is_interpolation_parameter([a](double r) { return std::pow(r, a); }, grid).to_json());
  }, py::arg("a"));

  m.def("hestenes_coeffs", [](int k) { return dump(hestenes_coeffs(k).to_json()); }, py::arg("k"));

  m.def("norm_refined", [](const CArray& data, const std::vector<double>& box, double s, const std::string& phi, int b,
                           double guard) {
    const auto w = grid_from_array(data, box);
    if (w.dim() == 1) return norm_refined_iso_1d(w, SmoothnessIndex{s, FunctionParameter::parse(phi), std::nullopt}, guard);
    return norm_refined_aniso(w, SmoothnessIndex{s, FunctionParameter::parse(phi), AnisotropyParams(b)}, guard);
  }, py::arg("data"), py::arg("box"), py::arg("s"), py::arg("phi") = "one", py::arg("b") = 1,
     py::arg("guard") = kAliasingGuard);

  m.def("check_parabolicity", [](const std::string& what) { return dump(check_parabolicity(problem_by_name(what)).to_json()); },
        py::arg("problem"));

  m.def("probe", [](const std::string& what, double sigma, const std::string& phi, std::vector<std::size_t> sizes,
                    std::size_t trials, std::uint64_t seed) {
    ProbeOptions opt;
    opt.sigma = sigma;
    opt.phi = FunctionParameter::parse(phi);
    opt.refinements = std::move(sizes);
    opt.trials = trials;
    opt.seed = seed;
    py::gil_scoped_release release;
    return dump(probe_main_theorem(problem_by_name(what), opt).to_json());
  }, py::arg("problem"), py::arg("sigma") = 3.0, py::arg("phi") = "one",
     py::arg("sizes") = std::vector<std::size_t>{32, 64, 128}, py::arg("trials") = 6, py::arg("seed") = 7);

  m.def("suite_names", &suite_names);

  m.def("run_suite", [](const std::string& name, std::uint64_t seed, std::optional<std::string> case_name) {
    SuiteResult r;
    {
      py::gil_scoped_release release;
      r = run_suite(name, seed, case_name);
    }
    return py::make_tuple(r.pass, dump(r.report));
  }, py::arg("name"), py::arg("seed") = 7, py::arg("case") = std::nullopt);
}
