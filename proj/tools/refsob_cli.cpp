// refsob: command-line front end for norms, parameters, extensions,
// interpolation couples, parabolicity checks and the verification suites.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "refsob/errors.hpp"
#include "refsob/extension.hpp"
#include "refsob/grid.hpp"
#include "refsob/interpolation.hpp"
#include "refsob/parabolic.hpp"
#include "refsob/spaces.hpp"
#include "refsob/varfun.hpp"
#include "refsob/verify.hpp"

namespace {

using nlohmann::json;
using namespace refsob;

constexpr int kPass = 0, kFail = 1, kUsage = 2;

void emit(const json& j, const std::string& path = {}) {
  if (path.empty()) {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream os(path);
  if (!os) throw ParseError("cannot write " + path);
  os << j.dump(2) << '\n';
}

std::vector<double> parse_triple(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) v.push_back(std::stod(item));
  if (v.size() != 3) throw ParseError("expected s0,s,s1");
  return v;
}

std::vector<std::size_t> default_sizes() {
  const char* env = std::getenv("REFSOB_PROBE_SIZES");
  std::vector<std::size_t> out;
  if (!env || !*env) return {32, 64, 128};
  std::stringstream ss(env);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoul(item));
  return out;
}

ParabolicProblem problem_from(const std::string& what) {
  if (what == "heat" || what == "heat-dirichlet") return heat_dirichlet();
  if (what == "backward-heat") return backward_heat_dirichlet();
  if (what == "heat-neumann") return heat_neumann();
  return ParabolicProblem::load(what);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Refined Sobolev scales: norms, interpolation, extensions and parabolic problems"};
  app.require_subcommand(1);

  // norm
  std::string norm_file, phi_text = "one", factor;
  double s = 0.0;
  int b = 1;
  std::size_t margin = 0;
  auto* norm = app.add_subcommand("norm", "Refined norm of a grid function file (.csv or binary)");
  norm->add_option("file", norm_file, "grid file")->required();
  norm->add_option("--s", s, "smoothness order")->required();
  norm->add_option("--phi", phi_text, "function parameter, e.g. one, log[1], log[1,-1]");
  norm->add_option("--b", b, "anisotropy: gamma = 1/(2b) for 2-D grids");
  norm->add_option("--factor", factor, "factor norm of closed-grid data: omega or interval")
      ->check(CLI::IsMember({"omega", "interval"}));
  norm->add_option("--margin", margin, "extension margin in nodes (0: default budget)");

  // param
  auto* param = app.add_subcommand("param", "Function-parameter checks");
  param->require_subcommand(1);
  std::string param_phi, psi_triple, power_text;
  auto* pcheck = param->add_subcommand("check", "Sampled class-M test of a function parameter");
  pcheck->add_option("phi", param_phi, "descriptor or JSON")->required();
  auto* pindex = param->add_subcommand("index", "Variation index and interpolation-parameter verdict");
  pindex->add_option("--psi", psi_triple, "s0,s,s1 of psi(r) = r^theta phi(r^{1/(s1-s0)})");
  pindex->add_option("--phi", param_phi, "function parameter for --psi");
  pindex->add_option("--power", power_text, "test psi(r) = r^a instead");

  // extend
  auto* extend = app.add_subcommand("extend", "Hestenes extension and projectors");
  extend->require_subcommand(1);
  int k = 1;
  auto* ecoef = extend->add_subcommand("coeffs", "Exact Hestenes coefficients of order k");
  ecoef->add_option("k", k, "order")->required();
  std::string in_file, out_file, axis = "t", side = "greater", kind = "plus";
  double eps = 1.0, threshold = 0.0, l = 1.0, tau = 1.0;
  auto* egrid = extend->add_subcommand("grid", "Extend grid data across a node line");
  egrid->add_option("input", in_file)->required();
  egrid->add_option("output", out_file)->required();
  egrid->add_option("--k", k, "order");
  egrid->add_option("--eps", eps, "cutoff width");
  egrid->add_option("--axis", axis)->check(CLI::IsMember({"x", "t"}));
  egrid->add_option("--side", side, "side holding the data")->check(CLI::IsMember({"greater", "less"}));
  egrid->add_option("--threshold", threshold, "boundary coordinate");
  auto* eproj = extend->add_subcommand("project", "Apply the projector P, P0 or P_tau");
  eproj->add_option("input", in_file)->required();
  eproj->add_option("output", out_file)->required();
  eproj->add_option("--kind", kind)->check(CLI::IsMember({"plus", "Q", "tau"}));
  eproj->add_option("--k", k, "order");
  eproj->add_option("--l", l);
  eproj->add_option("--tau", tau);

  // interp
  auto* interp = app.add_subcommand("interp", "Hilbert couples and interpolation with a function parameter");
  interp->require_subcommand(1);
  std::string couple_file;
  std::size_t n = 64;
  double s0 = 2.0, s1 = 6.0;
  int dim = 2;
  auto* ifour = interp->add_subcommand("fourier", "Write the Fourier-diagonal couple of [0, 2pi)^dim");
  ifour->add_option("output", couple_file)->required();
  ifour->add_option("--n", n, "nodes per axis");
  ifour->add_option("--s0", s0);
  ifour->add_option("--s1", s1);
  ifour->add_option("--dim", dim)->check(CLI::IsMember({1, 2}));
  ifour->add_option("--b", b);
  auto* iinfo = interp->add_subcommand("info", "Spectrum of J and embedding constants");
  iinfo->add_option("couple", couple_file)->required();
  iinfo->add_option("--psi", psi_triple, "s0,s,s1")->required();
  iinfo->add_option("--phi", phi_text);
  std::uint64_t seed = 7;
  std::size_t vectors = 5;
  auto* inorm = interp->add_subcommand("norm", "Interpolation norms of seeded random vectors");
  inorm->add_option("couple", couple_file)->required();
  inorm->add_option("--psi", psi_triple, "s0,s,s1")->required();
  inorm->add_option("--phi", phi_text);
  inorm->add_option("--seed", seed);
  inorm->add_option("--vectors", vectors);

  // check-parabolic
  std::string problem_file;
  auto* chk = app.add_subcommand("check-parabolic", "Sampled parabolicity conditions and sigma0");
  chk->add_option("problem", problem_file, "problem file, or heat | backward-heat | heat-neumann")
      ->required();

  // verify
  std::string suite, case_name, output;
  auto* ver = app.add_subcommand("verify", "Run a verification suite");
  ver->add_option("suite", suite, "suite name")->required()->check(CLI::IsMember(suite_names()));
  ver->add_option("--seed", seed);
  ver->add_option("--case", case_name);
  ver->add_option("--output", output, "write the JSON report here");

  // report
  double sigma = 3.0;
  std::string sizes_text, format = "json";
  std::size_t trials = 6;
  auto* rep = app.add_subcommand("report", "Main Theorem bounds probe: JSON, CSV or plot data");
  rep->add_option("problem", problem_file, "problem file or builtin name")->required();
  rep->add_option("--sigma", sigma);
  rep->add_option("--phi", phi_text);
  rep->add_option("--sizes", sizes_text, "comma-separated refinements (env REFSOB_PROBE_SIZES)");
  rep->add_option("--trials", trials);
  rep->add_option("--seed", seed);
  rep->add_option("--format", format)->check(CLI::IsMember({"json", "csv", "plot"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  try {
    if (*norm) {
      const GridFunction g = load_grid(norm_file);
      SmoothnessIndex idx{s, FunctionParameter::parse(phi_text), std::nullopt};
      if (g.dim() == 2) idx.aniso = AnisotropyParams(b);
      double value = 0.0;
      std::string space;
      if (!factor.empty()) {
        ExtensionBudget budget = default_budget(g.spec());
        if (margin > 0) budget = ExtensionBudget{margin, margin, margin, margin};
        if (factor == "omega") {
          value = factor_norm_plus_omega(g, idx, budget);
          space = "H+(Omega) factor";
        } else {
          value = factor_norm_plus_interval(g, idx, budget);
          space = "H+(0,tau) factor";
        }
      } else {
        value = g.dim() == 2 ? norm_refined_aniso(g, idx) : norm_refined_iso_1d(g, idx);
        space = g.dim() == 2 ? "H^{s,s*gamma,phi}" : "H^{s,phi}";
      }
      emit(norm_record(space, idx, value));
      return kPass;
    }
    if (*param) {
      if (*pcheck) {
        const auto phi = FunctionParameter::parse(param_phi);
        const auto r = check_class_M(phi, default_limit_grid(), default_lambdas());
        json j = r.to_json();
        j["phi"] = phi.describe();
        emit(j);
        return r.verdict == Verdict::slowly_varying ? kPass : kFail;
      }
      RealFunction f;
      json what;
      if (!power_text.empty()) {
        const double a = std::stod(power_text);
        f = [a](double r) { return std::pow(r, a); };
        what = json{{"power", a}};
      } else if (!psi_triple.empty()) {
        const auto t = parse_triple(psi_triple);
        const auto phi = FunctionParameter::parse(param_phi.empty() ? "one" : param_phi);
        f = InterpolationPsi(t[0], t[1], t[2], phi).as_function();
        what = json{{"psi", t}, {"phi", phi.describe()}};
      } else {
        std::cerr << "param index needs --psi or --power\n";
        return kUsage;
      }
      const auto v = is_interpolation_parameter(f, default_index_grid());
      json j = v.to_json();
      j["function"] = what;
      emit(j);
      return v.decision == InterpolationVerdict::Decision::accepted ? kPass : kFail;
    }
    if (*extend) {
      if (*ecoef) {
        emit(hestenes_coeffs(k).to_json());
        return kPass;
      }
      const GridFunction g = load_grid(in_file);
      GridFunction out;
      if (*egrid) {
        const Side sd = side == "greater" ? Side::greater_than : Side::less_than;
        if (g.dim() == 1)
          out = extend_grid_1d(g, k, eps, HalfLineSpec{sd, threshold});
        else
          out = extend_grid(g, k, eps, HalfPlaneSpec{axis == "x" ? Axis::x : Axis::t, sd, threshold});
      } else if (kind == "plus") {
        out = g.dim() == 1 ? projector_tau(g, k, 0.0) : projector_plus(g, k);
      } else if (kind == "Q") {
        out = projector_Q(g, k, l, tau);
      } else {
        out = projector_tau(g, k, tau);
      }
      save_grid(out_file, out);
      emit(json{{"output", out_file}, {"max_abs", out.max_abs()}});
      return kPass;
    }
    if (*interp) {
      if (*ifour) {
        const double L = 2.0 * std::numbers::pi;
        const GridSpec spec = dim == 2 ? GridSpec::periodic_2d(0, L, n, 0, L, n) : GridSpec::periodic_1d(0, L, n);
        SmoothnessIndex half{0.5, FunctionParameter(), std::nullopt};
        if (dim == 2) half.aniso = AnisotropyParams(b);
        const std::vector<double> r = weight_table(spec, half);  // r itself
        save_couple(couple_file, fourier_couple(r, s0, s1));
        emit(json{{"output", couple_file}, {"n", r.size()}, {"s0", s0}, {"s1", s1}});
        return kPass;
      }
      const HilbertCouple c = load_couple(couple_file);
      const auto t = parse_triple(psi_triple);
      const InterpolationPsi psi(t[0], t[1], t[2], FunctionParameter::parse(phi_text));
      const InterpolatedSpace space(c, psi.as_function());
      if (*iinfo) {
        const auto& ev = space.J().eigenvalues;
        const auto [c0, c1] = space.embedding_constants();
        emit(json{{"couple", c.header()},
                  {"J_min", ev.minCoeff()},
                  {"J_max", ev.maxCoeff()},
                  {"residual", space.J().residual},
                  {"C0", c0},
                  {"C1", c1}});
        return kPass;
      }
      json rows = json::array();
      for (std::size_t v = 0; v < vectors; ++v) {
        const CVector u = random_vector(c.n(), seed + v);
        rows.push_back(json{{"seed", seed + v}, {"norm0", c.norm0(u)}, {"norm_psi", space.norm(u)}, {"norm1", c.norm1(u)}});
      }
      emit(json{{"psi", t}, {"phi", psi.phi().describe()}, {"vectors", rows}});
      return kPass;
    }
    if (*chk) {
      const ParabolicProblem p = problem_from(problem_file);
      const ParabolicityReport r = check_parabolicity(p);
      json j = r.to_json();
      j["problem"] = p.name;
      emit(j);
      return r.parabolic() ? kPass : kFail;
    }
    if (*ver) {
      std::optional<std::string> cn;
      if (!case_name.empty()) cn = case_name;
      const SuiteResult r = run_suite(suite, seed, cn);
      emit(r.report, output);
      return r.pass ? kPass : kFail;
    }
    if (*rep) {
      const ParabolicProblem p = problem_from(problem_file);
      ProbeOptions opt;
      opt.sigma = sigma;
      opt.phi = FunctionParameter::parse(phi_text);
      opt.trials = trials;
      opt.seed = seed;
      opt.refinements = default_sizes();
      if (!sizes_text.empty()) {
        opt.refinements.clear();
        std::stringstream ss(sizes_text);
        std::string item;
        while (std::getline(ss, item, ',')) opt.refinements.push_back(std::stoul(item));
      }
      BoundsProbe probe;
      try {
        probe = probe_main_theorem(p, opt);
      } catch (const FailedPrecondition& e) {
        emit(json{{"problem", p.name}, {"refused", true}, {"reason", e.what()}});
        return kFail;
      }
      if (format == "csv") {
        std::cout << probe_csv(probe);
      } else if (format == "plot") {
        json x = json::array(), y = json::array();
        for (const auto& r : probe.records) {
          x.push_back(r.n);
          y.push_back(r.condition);
        }
        emit(json{{"title", "condition number vs refinement"},
                  {"x_label", "cells per axis"},
                  {"y_label", "upper/lower ratio"},
                  {"x", x},
                  {"y", y}});
      } else {
        emit(probe.to_json());
      }
      return probe.pass ? kPass : kFail;
    }
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: bad number: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFail;
  }
  return kUsage;
}
