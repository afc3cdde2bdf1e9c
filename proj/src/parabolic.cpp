#include "refsob/parabolic.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "refsob/errors.hpp"

namespace refsob {

// ---- coefficient polynomials ---------------------------------------------

namespace {

class PolyParser {
 public:
  explicit PolyParser(const std::string& s) : s_(s) {}

  Polynomial2 parse() {
    Polynomial2 out;
    skip();
    bool first = true;
    while (pos_ < s_.size()) {
      double sign = 1.0;
      if (peek() == '+' || peek() == '-') {
        sign = get() == '-' ? -1.0 : 1.0;
        skip();
      } else if (!first) {
        fail("expected '+' or '-'");
      }
      Monomial mono = term();
      mono.c *= sign;
      out.terms.push_back(mono);
      first = false;
      skip();
    }
    if (out.terms.empty()) fail("empty expression");
    return out;
  }

 private:
  Monomial term() {
    Monomial mono{1.0, 0, 0};
    factor(mono);
    skip();
    while (peek() == '*') {
      get();
      skip();
      factor(mono);
      skip();
    }
    return mono;
  }

  void factor(Monomial& mono) {
    const char c = peek();
    if (c == 'x' || c == 't') {
      get();
      int e = 1;
      skip();
      if (peek() == '^') {
        get();
        skip();
        e = integer();
      }
      (c == 'x' ? mono.i : mono.j) += e;
      return;
    }
    if (c == 'i') {
      get();
      mono.c *= cplx(0.0, 1.0);
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(s_.substr(pos_), &used);
      } catch (const std::logic_error&) {
        fail("bad number");
      }
      pos_ += used;
      if (peek() == 'i') {
        get();
        mono.c *= cplx(0.0, v);
      } else {
        mono.c *= v;
      }
      return;
    }
    fail("unexpected character");
  }

  int integer() {
    const std::size_t start = pos_;
    while (std::isdigit(static_cast<unsigned char>(peek()))) get();
    if (start == pos_) fail("expected an integer exponent");
    return std::stoi(s_.substr(start, pos_ - start));
  }

  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
  char get() { return s_[pos_++]; }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("coefficient '" + s_ + "': " + what + " at position " + std::to_string(pos_));
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

Polynomial2 Polynomial2::parse(const std::string& text) { return PolyParser(text).parse(); }

Polynomial2 Polynomial2::constant(cplx c) { return Polynomial2{{Monomial{c, 0, 0}}}; }

cplx Polynomial2::operator()(double x, double t) const {
  cplx acc = 0.0;
  for (const auto& m : terms) acc += m.c * std::pow(x, m.i) * std::pow(t, m.j);
  return acc;
}

double Polynomial2::magnitude_bound(double l, double tau) const {
  double acc = 0.0;
  for (const auto& m : terms) acc += std::abs(m.c) * std::pow(l, m.i) * std::pow(tau, m.j);
  return acc;
}

std::string Polynomial2::str() const {
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  auto emit = [&](double v, bool imag, const Monomial& m) {
    if (first) {
      if (v < 0) os << '-';
    } else {
      os << (v < 0 ? " - " : " + ");
    }
    first = false;
    os << std::abs(v) << (imag ? "i" : "");
    if (m.i) os << "*x^" << m.i;
    if (m.j) os << "*t^" << m.j;
  };
  for (const auto& m : terms) {
    if (m.c.real() != 0.0 || m.c.imag() == 0.0) emit(m.c.real(), false, m);
    if (m.c.imag() != 0.0) emit(m.c.imag(), true, m);
  }
  return os.str();
}

CoefficientFn Polynomial2::as_function() const {
  return [p = *this](double x, double t) { return p(x, t); };
}

// ---- problem -------------------------------------------------------------

ParabolicProblem::ParabolicProblem(int b, int m, std::vector<int> m_j, double l, double tau)
    : b_(b), m_(m), m_j_(std::move(m_j)), l_(l), tau_(tau), b_terms_(2 * std::max(m, 0)) {
  if (b < 1 || m < b) throw DomainError("need m >= b >= 1");
  if (m % b != 0) throw DomainError("m / b must be an integer");
  if (static_cast<int>(m_j_.size()) != m) throw DomainError("need exactly m boundary orders");
  for (int v : m_j_)
    if (v < 0) throw DomainError("boundary orders must be >= 0");
  if (!(l > 0.0) || !(tau > 0.0)) throw DomainError("l and tau must be positive");
}

void ParabolicProblem::add_A_term(int alpha, int beta, CoefficientFn a, std::string source) {
  if (alpha < 0 || beta < 0 || alpha + 2 * b_ * beta > 2 * m_)
    throw DomainError("A term violates alpha + 2b beta <= 2m");
  a_terms_.push_back({alpha, beta, std::move(a), std::move(source)});
}

void ParabolicProblem::add_B_term(int j, int k, int alpha, int beta, CoefficientFn coeff,
                                  std::string source) {
  if (j < 1 || j > m_ || (k != 0 && k != 1)) throw DomainError("boundary index out of range");
  if (alpha < 0 || beta < 0 || alpha + 2 * b_ * beta > m_j_[j - 1])
    throw DomainError("B term violates alpha + 2b beta <= m_j");
  b_terms_[2 * (j - 1) + k].push_back({alpha, beta, std::move(coeff), std::move(source)});
}

const std::vector<OperatorTerm>& ParabolicProblem::B_terms(int j, int k) const {
  if (j < 1 || j > m_ || (k != 0 && k != 1)) throw DomainError("boundary index out of range");
  return b_terms_[2 * (j - 1) + k];
}

std::vector<cplx> ParabolicProblem::A0_in_xi(double x, double t, cplx p) const {
  std::vector<cplx> c(2 * m_ + 1, 0.0);
  for (const auto& term : a_terms_)
    if (term.alpha + 2 * b_ * term.beta == 2 * m_)
      c[term.alpha] += term.coeff(x, t) * std::pow(p, term.beta);
  return c;
}

std::vector<cplx> ParabolicProblem::B0_in_xi(int j, int k, double t, cplx p) const {
  const int mj = m_j_[j - 1];
  std::vector<cplx> c(mj + 1, 0.0);
  const double x = k == 0 ? 0.0 : l_;
  for (const auto& term : B_terms(j, k))
    if (term.alpha + 2 * b_ * term.beta == mj) c[term.alpha] += term.coeff(x, t) * std::pow(p, term.beta);
  return c;
}

double ParabolicProblem::A0_scale(double x, double t) const {
  double s = 0.0;
  for (const auto& term : a_terms_)
    if (term.alpha + 2 * b_ * term.beta == 2 * m_) s += std::abs(term.coeff(x, t));
  return s;
}

namespace {

std::pair<CoefficientFn, std::string> coefficient_from_json(const nlohmann::json& j, bool boundary) {
  Polynomial2 poly;
  if (j.is_string()) {
    poly = Polynomial2::parse(j.get<std::string>());
  } else if (j.is_number()) {
    poly = Polynomial2::constant(j.get<double>());
  } else if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    poly = Polynomial2::constant({j[0].get<double>(), j[1].get<double>()});
  } else {
    throw ParseError("coefficient must be a string, a number or [re, im]");
  }
  if (boundary)
    for (const auto& m : poly.terms)
      if (m.i != 0) throw ParseError("boundary coefficients depend on t only");
  return {poly.as_function(), poly.str()};
}

}  // namespace

ParabolicProblem ParabolicProblem::from_json(const nlohmann::json& j) {
  try {
    ParabolicProblem prob(j.at("b").get<int>(), j.at("m").get<int>(),
                          j.at("m_j").get<std::vector<int>>(), j.value("l", 1.0),
                          j.value("tau", 1.0));
    prob.name = j.value("name", "");
    for (const auto& t : j.at("A")) {
      auto [fn, src] = coefficient_from_json(t.at("coeff"), false);
      prob.add_A_term(t.at("alpha").get<int>(), t.at("beta").get<int>(), std::move(fn), std::move(src));
    }
    for (const auto& t : j.at("B")) {
      auto [fn, src] = coefficient_from_json(t.at("coeff"), true);
      prob.add_B_term(t.at("j").get<int>(), t.at("k").get<int>(), t.at("alpha").get<int>(),
                      t.at("beta").get<int>(), std::move(fn), std::move(src));
    }
    return prob;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("problem file: ") + e.what());
  }
}

ParabolicProblem ParabolicProblem::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("problem file '" + path + "': " + e.what());
  }
  return from_json(j);
}

nlohmann::json ParabolicProblem::to_json() const {
  nlohmann::json a = nlohmann::json::array(), bj = nlohmann::json::array();
  for (const auto& t : a_terms_)
    a.push_back({{"alpha", t.alpha}, {"beta", t.beta}, {"coeff", t.source.empty() ? "<oracle>" : t.source}});
  for (int j = 1; j <= m_; ++j)
    for (int k = 0; k < 2; ++k)
      for (const auto& t : B_terms(j, k))
        bj.push_back({{"j", j}, {"k", k}, {"alpha", t.alpha}, {"beta", t.beta},
                      {"coeff", t.source.empty() ? "<oracle>" : t.source}});
  return {{"name", name}, {"b", b_}, {"m", m_}, {"m_j", m_j_}, {"l", l_}, {"tau", tau_},
          {"A", a}, {"B", bj}};
}

namespace {

CoefficientFn constant_fn(cplx c) {
  return [c](double, double) { return c; };
}

ParabolicProblem heat_like(double sign, double l, double tau, int boundary_alpha, const char* name) {
  ParabolicProblem p(1, 1, {boundary_alpha}, l, tau);
  p.name = name;
  p.add_A_term(2, 0, constant_fn(sign), sign > 0 ? "1" : "-1");
  p.add_A_term(0, 1, constant_fn(1.0), "1");
  for (int k = 0; k < 2; ++k) p.add_B_term(1, k, boundary_alpha, 0, constant_fn(1.0), "1");
  return p;
}

}  // namespace

ParabolicProblem heat_dirichlet(double l, double tau) {
  return heat_like(1.0, l, tau, 0, "heat-dirichlet");
}
ParabolicProblem backward_heat_dirichlet(double l, double tau) {
  return heat_like(-1.0, l, tau, 0, "backward-heat-dirichlet");
}
ParabolicProblem heat_neumann(double l, double tau) {
  return heat_like(1.0, l, tau, 1, "heat-neumann");
}

cplx principal_symbol_A(const ParabolicProblem& prob, double x, double t, double xi, cplx p) {
  const auto c = prob.A0_in_xi(x, t, p);
  cplx acc = 0.0;
  for (std::size_t a = c.size(); a-- > 0;) acc = acc * xi + c[a];
  return acc;
}

cplx principal_symbol_B(const ParabolicProblem& prob, int j, int k, double t, cplx xi, cplx p) {
  const auto c = prob.B0_in_xi(j, k, t, p);
  cplx acc = 0.0;
  for (std::size_t a = c.size(); a-- > 0;) acc = acc * xi + c[a];
  return acc;
}

// ---- conditions ----------------------------------------------------------

RootSplit roots_in_xi(const ParabolicProblem& prob, double x, double t, cplx p) {
  const auto c = prob.A0_in_xi(x, t, p);
  const int n = 2 * prob.m();
  double scale = 0.0;
  for (const auto& v : c) scale = std::max(scale, std::abs(v));
  if (std::abs(c[n]) <= 1e-14 * scale || scale == 0.0)
    throw DegenerateError("leading xi-coefficient of the principal symbol vanishes");
  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(n, n);
  for (int r = 1; r < n; ++r) comp(r, r - 1) = 1.0;
  for (int r = 0; r < n; ++r) comp(r, n - 1) = -c[r] / c[n];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
  if (es.info() != Eigen::Success) throw NumericalError("companion eigensolve failed");
  RootSplit out;
  for (int r = 0; r < n; ++r) {
    const cplx z = es.eigenvalues()[r];
    if (std::abs(z.imag()) < 1e-10 * (1.0 + std::abs(z.real())))
      throw DegenerateError("a root of the principal symbol lies on the real axis");
    (z.imag() > 0 ? out.upper : out.lower).push_back(z);
  }
  auto order = [](cplx a, cplx b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  };
  std::sort(out.upper.begin(), out.upper.end(), order);
  std::sort(out.lower.begin(), out.lower.end(), order);
  return out;
}

nlohmann::json SamplePoint::to_json() const {
  return {{"x", x}, {"t", t}, {"xi", {xi.real(), xi.imag()}}, {"p", {p.real(), p.imag()}}};
}

nlohmann::json ConditionReport::to_json() const {
  nlohmann::json j{{"pass", pass}, {"margin", margin}, {"samples", samples}};
  j["witness"] = has_witness ? witness.to_json() : nlohmann::json(nullptr);
  if (!note.empty()) j["note"] = note;
  for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
  return j;
}

namespace {

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

std::vector<cplx> half_circle(std::size_t n, double radius) {
  std::vector<cplx> out;
  for (double a : linspace(-std::numbers::pi / 2, std::numbers::pi / 2, n))
    out.push_back(std::polar(radius, a));
  return out;
}

}  // namespace

ConditionReport check_condition_i(const ParabolicProblem& prob, const ParabolicSampling& s) {
  ConditionReport rep;
  rep.margin = INFINITY;
  const double bb = prob.b();
  for (double x : linspace(0.0, prob.l(), s.nx)) {
    for (double t : linspace(0.0, prob.tau(), s.nt)) {
      const double scale = prob.A0_scale(x, t);
      for (double rho : linspace(0.0, 1.0, s.n_rho)) {
        const double xi_abs = std::sqrt(std::max(0.0, 1.0 - rho));
        const double p_abs = std::pow(rho, bb);
        for (cplx p : half_circle(s.n_arg, p_abs)) {
          const std::vector<double> xis =
              xi_abs > 0.0 ? std::vector<double>{xi_abs, -xi_abs} : std::vector<double>{0.0};
          for (double xi : xis) {
            ++rep.samples;
            const double v = std::abs(principal_symbol_A(prob, x, t, xi, p));
            const double margin = scale > 0.0 ? v / scale : 0.0;
            if (margin < rep.margin) {
              rep.margin = margin;
              rep.witness = {x, t, xi, p};
              rep.has_witness = true;
            }
          }
        }
      }
    }
  }
  rep.pass = rep.margin > s.tol_i;
  if (rep.pass) rep.has_witness = false;
  return rep;
}

ConditionReport check_condition_ii(const ParabolicProblem& prob, const ParabolicSampling& s) {
  ConditionReport rep;
  rep.margin = INFINITY;
  rep.pass = true;
  std::map<std::string, std::size_t> counts;
  for (double x : {0.0, prob.l()}) {
    for (double t : linspace(0.0, prob.tau(), s.nt)) {
      for (cplx p : half_circle(s.n_arg, 1.0)) {
        ++rep.samples;
        try {
          const auto split = roots_in_xi(prob, x, t, p);
          ++counts[std::to_string(split.upper.size()) + "/" + std::to_string(split.lower.size())];
          double margin = INFINITY;
          cplx worst = 0.0;
          for (const auto* set : {&split.upper, &split.lower})
            for (cplx z : *set) {
              const double mz = std::abs(z.imag()) / (1.0 + std::abs(z));
              if (mz < margin) {
                margin = mz;
                worst = z;
              }
            }
          const bool ok = static_cast<int>(split.upper.size()) == prob.m();
          if (!ok) margin = 0.0;
          if (margin < rep.margin) {
            rep.margin = margin;
            rep.witness = {x, t, worst, p};
            rep.has_witness = true;
          }
          if (!ok && rep.pass) {
            rep.pass = false;
            rep.note = "root split is not m/m";
          }
        } catch (const DegenerateError& e) {
          ++counts["degenerate"];
          if (rep.pass || rep.margin > 0.0) rep.note = e.what();
          rep.pass = false;
          rep.margin = 0.0;
          rep.witness = {x, t, 0.0, p};
          rep.has_witness = true;
        }
      }
    }
  }
  rep.extra["root_counts"] = counts;
  if (rep.pass) rep.has_witness = false;
  return rep;
}

std::vector<cplx> poly_from_roots(const std::vector<cplx>& roots) {
  std::vector<cplx> c{1.0};
  for (cplx r : roots) {
    std::vector<cplx> next(c.size() + 1, 0.0);
    for (std::size_t a = 0; a < c.size(); ++a) {
      next[a + 1] += c[a];
      next[a] -= r * c[a];
    }
    c = std::move(next);
  }
  return c;
}

std::vector<cplx> poly_remainder(std::vector<cplx> num, const std::vector<cplx>& monic_den) {
  const std::size_t d = monic_den.size() - 1;
  for (std::size_t deg = num.size(); deg-- > d;) {
    const cplx lead = num[deg];
    if (lead == 0.0) continue;
    for (std::size_t a = 0; a <= d; ++a) num[deg - d + a] -= lead * monic_den[a];
  }
  num.resize(d, 0.0);
  return num;
}

ConditionReport check_condition_iii(const ParabolicProblem& prob, const ParabolicSampling& s) {
  ConditionReport rep;
  rep.margin = INFINITY;
  const int m = prob.m();
  for (int k = 0; k < 2; ++k) {
    const double x = k == 0 ? 0.0 : prob.l();
    for (double t : linspace(0.0, prob.tau(), s.nt)) {
      for (cplx p : half_circle(s.n_arg, 1.0)) {
        ++rep.samples;
        RootSplit split;
        try {
          split = roots_in_xi(prob, x, t, p);
        } catch (const DegenerateError& e) {
          rep.margin = 0.0;
          rep.witness = {x, t, 0.0, p};
          rep.has_witness = true;
          rep.note = std::string("condition (ii) fails here: ") + e.what();
          continue;
        }
        if (static_cast<int>(split.upper.size()) != m) {
          rep.margin = 0.0;
          rep.witness = {x, t, 0.0, p};
          rep.has_witness = true;
          rep.note = "condition (ii) fails here: root split is not m/m";
          continue;
        }
        const auto pi_plus = poly_from_roots(split.upper);
        Eigen::MatrixXcd mat(m, m);
        bool zero_row = false;
        for (int j = 1; j <= m; ++j) {
          auto rem = poly_remainder(prob.B0_in_xi(j, k, t, p), pi_plus);
          double norm = 0.0;
          for (cplx v : rem) norm += std::norm(v);
          norm = std::sqrt(norm);
          if (norm == 0.0) zero_row = true;
          for (int a = 0; a < m; ++a) mat(j - 1, a) = norm > 0.0 ? rem[a] / norm : 0.0;
        }
        const double det = zero_row ? 0.0 : std::abs(mat.determinant());
        if (det < rep.margin) {
          rep.margin = det;
          rep.witness = {x, t, 0.0, p};
          rep.has_witness = true;
        }
      }
    }
  }
  rep.pass = rep.margin > s.tol_iii;
  if (rep.pass) rep.has_witness = false;
  return rep;
}

bool sigma0_admissible(const ParabolicProblem& prob, int s) {
  if (s < 2 * prob.m() || s % (2 * prob.b()) != 0) return false;
  for (int mj : prob.m_j())
    if (s < mj + 1) return false;
  return true;
}

int sigma0(const ParabolicProblem& prob) {
  int s = 2 * prob.m();
  for (int mj : prob.m_j()) s = std::max(s, mj + 1);
  while (!sigma0_admissible(prob, s)) ++s;
  return s;
}

nlohmann::json ParabolicityReport::to_json() const {
  return {{"cond_i", cond_i.to_json()},
          {"cond_ii", cond_ii.to_json()},
          {"cond_iii", cond_iii.to_json()},
          {"sigma0", sigma0},
          {"parabolic", parabolic()}};
}

ParabolicityReport check_parabolicity(const ParabolicProblem& prob, const ParabolicSampling& s) {
  ParabolicityReport r;
  r.cond_i = check_condition_i(prob, s);
  r.cond_ii = check_condition_ii(prob, s);
  r.cond_iii = check_condition_iii(prob, s);
  r.sigma0 = sigma0(prob);
  return r;
}

// ---- discretized (A, B) --------------------------------------------------

std::vector<double> fornberg_weights(const std::vector<double>& z, double x0, int d) {
  const std::size_t n = z.size();
  std::vector<std::vector<double>> c(n, std::vector<double>(d + 1, 0.0));
  double c1 = 1.0, c4 = z[0] - x0;
  c[0][0] = 1.0;
  for (std::size_t i = 1; i < n; ++i) {
    const int mn = std::min<int>(static_cast<int>(i), d);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = z[i] - x0;
    for (std::size_t j = 0; j < i; ++j) {
      const double c3 = z[i] - z[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = c[i][d];
  return w;
}

GridFunction differentiate(const GridFunction& u, int axis, int d, const Discretization& disc) {
  if (d == 0) return u;
  if (d < 0 || d > disc.max_order) throw SchemeOrderError("derivative order exceeds the scheme");
  const GridSpec& g = u.spec();
  if (axis >= g.dim) throw DomainError("differentiation axis out of range");
  const std::size_t n = g.count[axis];
  const std::size_t width = static_cast<std::size_t>(d + disc.accuracy);
  if (width > n) throw SchemeOrderError("too few nodes for the requested derivative stencil");
  // Stencil weights per target node (depend only on the position).
  std::vector<std::size_t> start(n);
  std::vector<std::vector<double>> weights(n);
  for (std::size_t i = 0; i < n; ++i) {
    long s0 = static_cast<long>(i) - static_cast<long>(width / 2);
    s0 = std::clamp(s0, 0L, static_cast<long>(n - width));
    start[i] = static_cast<std::size_t>(s0);
    std::vector<double> z(width);
    for (std::size_t a = 0; a < width; ++a) z[a] = static_cast<double>(start[i] + a) - static_cast<double>(i);
    weights[i] = fornberg_weights(z, 0.0, d);
    const double scale = std::pow(g.spacing(axis), -d);
    for (auto& w : weights[i]) w *= scale;
  }
  GridFunction out(g);
  const std::size_t nx = u.nx(), nt = u.nt();
  if (g.dim == 1 || axis == 0) {
    for (std::size_t i = 0; i < nx; ++i)
      for (std::size_t j = 0; j < nt; ++j) {
        cplx acc = 0.0;
        for (std::size_t a = 0; a < width; ++a) acc += weights[i][a] * u.at(start[i] + a, j);
        out.at(i, j) = acc;
      }
  } else {
    for (std::size_t i = 0; i < nx; ++i)
      for (std::size_t j = 0; j < nt; ++j) {
        cplx acc = 0.0;
        for (std::size_t a = 0; a < width; ++a) acc += weights[j][a] * u.at(i, start[j] + a);
        out.at(i, j) = acc;
      }
  }
  out.set_plus(u.plus());
  return out;
}

ABResult apply_AB(const ParabolicProblem& prob, const GridFunction& u, const Discretization& disc) {
  if (u.dim() != 2) throw DomainError("apply_AB needs 2-D data");
  const GridSpec& g = u.spec();
  if (g.periodic) throw DomainError("apply_AB needs a closed grid over the rectangle");
  const double tol = 1e-9 * std::max(prob.l(), prob.tau());
  if (std::abs(g.lo[0]) > tol || std::abs(g.hi[0] - prob.l()) > tol || std::abs(g.lo[1]) > tol ||
      std::abs(g.hi[1] - prob.tau()) > tol)
    throw DomainError("apply_AB grid must cover [0, l] x [0, tau]");

  std::map<std::pair<int, int>, GridFunction> cache;
  auto deriv = [&](int alpha, int beta) -> const GridFunction& {
    auto key = std::make_pair(alpha, beta);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    GridFunction d = differentiate(differentiate(u, 1, beta, disc), 0, alpha, disc);
    return cache.emplace(key, std::move(d)).first->second;
  };
  const cplx iu(0.0, 1.0);

  ABResult res;
  res.f = GridFunction(g);
  for (const auto& term : prob.A_terms()) {
    const GridFunction& d = deriv(term.alpha, term.beta);
    const cplx ia = std::pow(iu, term.alpha);
    for (std::size_t i = 0; i < g.count[0]; ++i)
      for (std::size_t j = 0; j < g.count[1]; ++j) {
        const double x = g.coord(0, i), t = g.coord(1, j);
        res.f.at(i, j) += term.coeff(x, t) * ia * d.at(i, j);
      }
  }
  res.f.set_plus(u.plus());

  const GridSpec line = GridSpec::closed_1d(g.lo[1], g.hi[1], g.count[1]);
  for (int j = 1; j <= prob.m(); ++j) {
    for (int k = 0; k < 2; ++k) {
      GridFunction gk(line);
      const std::size_t ix = k == 0 ? 0 : g.count[0] - 1;
      const double x = k == 0 ? 0.0 : prob.l();
      for (const auto& term : prob.B_terms(j, k)) {
        const GridFunction& d = deriv(term.alpha, term.beta);
        const cplx ia = std::pow(iu, term.alpha);
        for (std::size_t it = 0; it < g.count[1]; ++it)
          gk[it] += term.coeff(x, g.coord(1, it)) * ia * d.at(ix, it);
      }
      gk.set_plus(u.plus());
      res.g.push_back(std::move(gk));
    }
  }
  return res;
}

}  // namespace refsob
