#pragma once

// Initial-boundary value problems for a parabolic equation of order 2m in
// the rectangle (0, l) x (0, tau): principal symbols, sampled parabolicity
// conditions, the base order sigma0, and the discretized map u -> (Au, Bu).

#include <complex>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "refsob/grid.hpp"

namespace refsob {

/// Coefficient a(x, t) (boundary coefficients ignore x).
using CoefficientFn = std::function<cplx(double x, double t)>;

/// c * x^i * t^j
struct Monomial {
  cplx c;
  int i = 0;
  int j = 0;
};

/// Sum of monomials, parsed from the mini-grammar
///   expr   := ['+'|'-'] term (('+'|'-') term)*
///   term   := factor ('*' factor)*
///   factor := number ['i'] | 'i' | ('x'|'t') ['^' integer]
/// e.g. "1", "-2.5*x^2*t + 3i", "0.5i*t".
struct Polynomial2 {
  std::vector<Monomial> terms;

  static Polynomial2 parse(const std::string& text);
  static Polynomial2 constant(cplx c);
  cplx operator()(double x, double t) const;
  double magnitude_bound(double l, double tau) const;  // sum |c| l^i tau^j
  std::string str() const;
  CoefficientFn as_function() const;
};

struct OperatorTerm {
  int alpha = 0;  // order in D_x
  int beta = 0;   // order in d/dt
  CoefficientFn coeff;
  std::string source;  // textual form when parsed from a file
};

class ParabolicProblem {
 public:
  ParabolicProblem(int b, int m, std::vector<int> m_j, double l, double tau);

  int b() const { return b_; }
  int m() const { return m_; }
  int kappa() const { return m_ / b_; }
  const std::vector<int>& m_j() const { return m_j_; }
  double l() const { return l_; }
  double tau() const { return tau_; }
  std::string name;

  /// Adds a^{alpha,beta}; requires alpha + 2b beta <= 2m.
  void add_A_term(int alpha, int beta, CoefficientFn a, std::string source = {});
  /// Adds b^{alpha,beta}_{j,k} (j = 1..m, k = 0 at x = 0, k = 1 at x = l);
  /// requires alpha + 2b beta <= m_j.
  void add_B_term(int j, int k, int alpha, int beta, CoefficientFn coeff, std::string source = {});

  const std::vector<OperatorTerm>& A_terms() const { return a_terms_; }
  const std::vector<OperatorTerm>& B_terms(int j, int k) const;

  /// Coefficients of A0(x, t, ., p) by power of xi (length 2m+1).
  std::vector<cplx> A0_in_xi(double x, double t, cplx p) const;
  /// Coefficients of B0_{j,k}(t, ., p) by power of xi (length m_j+1).
  std::vector<cplx> B0_in_xi(int j, int k, double t, cplx p) const;
  /// Sum of |principal coefficients| at (x, t).
  double A0_scale(double x, double t) const;

  static ParabolicProblem from_json(const nlohmann::json& j);
  static ParabolicProblem load(const std::string& path);
  nlohmann::json to_json() const;

 private:
  int b_, m_;
  std::vector<int> m_j_;
  double l_, tau_;
  std::vector<OperatorTerm> a_terms_;
  std::vector<std::vector<OperatorTerm>> b_terms_;  // index 2(j-1)+k
};

/// Heat operator d/dt + D_x^2 (b = m = 1) with Dirichlet conditions at both ends.
ParabolicProblem heat_dirichlet(double l = 1.0, double tau = 1.0);
/// Backward heat d/dt - D_x^2 with Dirichlet conditions.
ParabolicProblem backward_heat_dirichlet(double l = 1.0, double tau = 1.0);
/// Heat operator with B = D_x at both ends.
ParabolicProblem heat_neumann(double l = 1.0, double tau = 1.0);

cplx principal_symbol_A(const ParabolicProblem& prob, double x, double t, double xi, cplx p);
cplx principal_symbol_B(const ParabolicProblem& prob, int j, int k, double t, cplx xi, cplx p);

struct ParabolicSampling {
  std::size_t nx = 9, nt = 9;  // (x, t) tensor grid
  std::size_t n_rho = 17;      // radial samples of the quasi-sphere
  std::size_t n_arg = 33;      // arguments of p in [-pi/2, pi/2]
  double tol_i = 1e-8;
  double tol_iii = 1e-8;
};

/// Roots of A0(x, t, ., p) split by the sign of the imaginary part.
struct RootSplit {
  std::vector<cplx> upper, lower;
};

/// Companion-matrix roots.  DegenerateError when the leading coefficient
/// vanishes or a root has |Im| < 1e-10 (1 + |Re|).
RootSplit roots_in_xi(const ParabolicProblem& prob, double x, double t, cplx p);

struct SamplePoint {
  double x = 0, t = 0;
  cplx xi = 0, p = 0;
  nlohmann::json to_json() const;
};

struct ConditionReport {
  bool pass = false;
  double margin = 0.0;  // normalized minimum over the samples
  std::size_t samples = 0;
  bool has_witness = false;
  SamplePoint witness;
  std::string note;
  nlohmann::json extra = nlohmann::json::object();
  nlohmann::json to_json() const;
};

/// min |A0| / scale over (x, t) grid x quasi-sphere {xi^2 + |p|^{1/b} = 1, Re p >= 0}.
ConditionReport check_condition_i(const ParabolicProblem& prob, const ParabolicSampling& s = {});
/// m/m split at x in {0, l}, t on the grid, |p| = 1 with Re p >= 0; the
/// margin is min |Im xi| / (1 + |xi|) over all roots.
ConditionReport check_condition_ii(const ParabolicProblem& prob, const ParabolicSampling& s = {});
/// min |det| of the row-normalized matrix of remainders of B0_{j,k} modulo
/// prod (xi - xi_j^+).
ConditionReport check_condition_iii(const ParabolicProblem& prob, const ParabolicSampling& s = {});

/// Remainder of num modulo the monic polynomial den (coefficients by power).
std::vector<cplx> poly_remainder(std::vector<cplx> num, const std::vector<cplx>& monic_den);
/// Coefficients of prod (xi - r).
std::vector<cplx> poly_from_roots(const std::vector<cplx>& roots);

/// Smallest integer with sigma0 >= 2m, sigma0 >= m_j + 1 and 2b | sigma0.
int sigma0(const ParabolicProblem& prob);
/// The three defining conditions at s.
bool sigma0_admissible(const ParabolicProblem& prob, int s);

struct ParabolicityReport {
  ConditionReport cond_i, cond_ii, cond_iii;
  int sigma0 = 0;
  bool parabolic() const { return cond_i.pass && cond_ii.pass && cond_iii.pass; }
  nlohmann::json to_json() const;
};

ParabolicityReport check_parabolicity(const ParabolicProblem& prob, const ParabolicSampling& s = {});

/// Fornberg weights for the derivative of order d at x0 from the nodes.
std::vector<double> fornberg_weights(const std::vector<double>& nodes, double x0, int d);

struct Discretization {
  int accuracy = 6;     // order of the finite-difference stencils
  int max_order = 12;   // largest derivative order supported
};

/// d-th derivative along one axis of grid data with stencils of d + accuracy
/// nodes (centered where possible).  SchemeOrderError when d exceeds
/// max_order or the axis has too few nodes.
GridFunction differentiate(const GridFunction& u, int axis, int d, const Discretization& disc = {});

struct ABResult {
  GridFunction f;               // Au on the closed rectangle grid
  std::vector<GridFunction> g;  // B_{1,0}u, B_{1,1}u, ..., B_{m,0}u, B_{m,1}u on [0, tau]
};

/// u lives on a closed grid over [0, l] x [0, tau].
ABResult apply_AB(const ParabolicProblem& prob, const GridFunction& u, const Discretization& disc = {});

}  // namespace refsob
