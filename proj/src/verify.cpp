#include "refsob/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

#include "refsob/errors.hpp"
#include "refsob/extension.hpp"
#include "refsob/interpolation.hpp"

namespace refsob {

namespace {

using nlohmann::json;

constexpr double kPi = std::numbers::pi;

double rel_diff(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

// Integer frequency index in FFT storage order.
double fft_index(std::size_t k, std::size_t n) {
  return k < n / 2 ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(n);
}

// Smooth bump equal to 1 on [a + d, b - d] and 0 outside (a, b).
double plateau(double x, double a, double b, double d) {
  return smooth_step((x - a) / d) * smooth_step((b - x) / d);
}

FunctionParameter log1() { return FunctionParameter::log_multiscale({1.0}); }
FunctionParameter inv_log1() { return FunctionParameter::log_multiscale({-1.0}); }

CVector to_vector(const GridFunction& w, const std::vector<std::size_t>& nodes) {
  CVector v(static_cast<Eigen::Index>(nodes.size()));
  for (std::size_t i = 0; i < nodes.size(); ++i) v[static_cast<Eigen::Index>(i)] = w[nodes[i]];
  return v;
}

// Matrix of a linear grid operator restricted to the given nodes.  The
// operator must map functions supported on the nodes into the same set.
CMatrix operator_matrix(const GridSpec& spec, const std::vector<std::size_t>& nodes,
                        const std::function<GridFunction(const GridFunction&)>& op) {
  const std::size_t m = nodes.size();
  std::vector<char> inside(spec.size(), 0);
  for (auto p : nodes) inside[p] = 1;
  CMatrix P(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  for (std::size_t c = 0; c < m; ++c) {
    GridFunction e(spec);
    e[nodes[c]] = 1.0;
    const GridFunction r = op(e);
    for (std::size_t q = 0; q < spec.size(); ++q)
      if (!inside[q] && std::abs(r[q]) > 1e-12)
        throw ProjectorError("projector leaves the coordinate subspace");
    for (std::size_t a = 0; a < m; ++a)
      P(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(c)) = r[nodes[a]];
  }
  return P;
}

CMatrix gram_of(const GridSpec& spec, const SmoothnessIndex& idx,
                const std::vector<std::size_t>& nodes) {
  const Eigen::MatrixXd g = gram_submatrix(spec, gram_kernel(spec, idx), nodes);
  return (0.5 * (g + g.transpose())).cast<cplx>();
}

double family_K(const std::vector<double>& ratios) {
  double k = 1.0;
  for (double r : ratios) k = std::max({k, r, 1.0 / r});
  return k;
}

}  // namespace

// ---- cases -----------------------------------------------------------------

void VerificationCase::validate() const {
  if (!(s0 < s && s < s1)) throw DomainError("case " + name + ": need s0 < s < s1");
  if (b < 1) throw DomainError("case " + name + ": b must be >= 1");
  if (vectors == 0) throw DomainError("case " + name + ": at least one vector");
  if (!(tol > 0.0)) throw DomainError("case " + name + ": tolerance must be positive");
}

json VerificationCase::to_json() const {
  return json{{"name", name},   {"s0", s0},         {"s", s},
              {"s1", s1},       {"sigma", sigma},   {"sigma1", sigma1_for(sigma, b)},
              {"b", b},         {"phi", phi.describe()}, {"grid", grid},
              {"seed", seed},   {"vectors", vectors}, {"tol", tol}};
}

// ---- Lemma 5.1 -------------------------------------------------------------

std::vector<VerificationCase> lemma51_cases() {
  std::vector<VerificationCase> out(3);
  out[0].name = "one";
  out[1].name = "default";
  out[1].phi = log1();
  out[2].name = "inverse_log";
  out[2].phi = inv_log1();
  for (auto& c : out) c.grid = {64};
  return out;
}

SuiteResult verify_lemma51(const VerificationCase& c) {
  c.validate();
  const std::size_t n = c.grid.empty() ? 64 : c.grid.front();
  const AnisotropyParams aniso(c.b);
  const InterpolationPsi psi(c.s0, c.s, c.s1, c.phi);
  const RealFunction psif = psi.as_function();
  const double L = 2.0 * kPi;

  auto run = [&](int dim) {
    const GridSpec spec =
        dim == 2 ? GridSpec::periodic_2d(0.0, L, n, 0.0, L, n) : GridSpec::periodic_1d(0.0, L, n);
    const double dxi = 2.0 * kPi / L;
    const double cell = dim == 2 ? dxi * dxi : dxi;
    std::vector<double> r(spec.size());
    for (std::size_t i = 0; i < spec.count[0]; ++i) {
      const double xi = fft_index(i, n) * dxi;
      if (dim == 1) {
        r[i] = std::sqrt(1.0 + xi * xi);
        continue;
      }
      for (std::size_t j = 0; j < n; ++j) {
        const double eta = fft_index(j, n) * dxi;
        r[i * n + j] = weight_rgamma(xi, eta, aniso.gamma());
      }
    }
    const InterpolatedSpace space(fourier_couple(r, c.s0, c.s1), psif);
    SmoothnessIndex idx{c.s, c.phi, std::nullopt};
    if (dim == 2) idx.aniso = aniso;
    double worst = 0.0;
    for (std::size_t v = 0; v < c.vectors; ++v) {
      const CVector u = random_vector(static_cast<Eigen::Index>(spec.size()), c.seed * 1000 + v);
      Spectrum sp{spec, std::vector<cplx>(u.data(), u.data() + u.size()), cell};
      const double refined = refined_norm_from_spectrum(sp, idx);
      const double interp = space.norm(u * std::sqrt(cell));
      worst = std::max(worst, std::abs(interp - refined) / refined);
    }
    return worst;
  };

  const double e2 = run(2), e1 = run(1);
  SuiteResult res;
  res.suite = "lemma51";
  res.pass = e2 <= c.tol && e1 <= c.tol;
  res.report = json{{"case", c.to_json()},
                    {"frequency_grid", {n, n}},
                    {"max_rel_error_2d", e2},
                    {"max_rel_error_1d", e1},
                    {"pass", res.pass}};
  return res;
}

// ---- Propositions 4.3 / 4.4 ---------------------------------------------

namespace {

CMatrix random_hpd(Eigen::Index n, std::uint64_t seed, double shift) {
  CMatrix a(n, n);
  for (Eigen::Index j = 0; j < n; ++j) a.col(j) = random_vector(n, seed + static_cast<std::uint64_t>(j));
  CMatrix g = a * a.adjoint() + shift * CMatrix::Identity(n, n);
  return 0.5 * (g + g.adjoint());
}

std::vector<std::pair<std::string, RealFunction>> psi_family() {
  std::vector<std::pair<std::string, RealFunction>> out;
  out.emplace_back("psi(0,1,2,one)", InterpolationPsi(0, 1, 2, FunctionParameter()).as_function());
  out.emplace_back("psi(0,1,2,log[1])", InterpolationPsi(0, 1, 2, log1()).as_function());
  out.emplace_back("psi(0,1,2,log[-1])", InterpolationPsi(0, 1, 2, inv_log1()).as_function());
  return out;
}

// Dense couple whose J has a log-uniform spectrum in [1, jmax].
HilbertCouple moderate_dense_couple(Eigen::Index n, std::uint64_t seed, double jmax = 2.0) {
  const CMatrix g0 = random_hpd(n, seed, 1.0);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 2.0 * std::log(jmax));
  Eigen::VectorXd d(n);
  for (Eigen::Index i = 0; i < n; ++i) d[i] = std::exp(unif(rng));
  const Eigen::LLT<CMatrix> llt(g0);
  const CMatrix l = llt.matrixL();
  CMatrix q = random_hpd(n, seed + 101, 0.5);
  const Eigen::HouseholderQR<CMatrix> qr(q);
  const CMatrix u = qr.householderQ();
  CMatrix g1 = l * u * d.cast<cplx>().asDiagonal() * u.adjoint() * l.adjoint();
  g1 = 0.5 * (g1 + g1.adjoint());
  return HilbertCouple::dense(g0, g1);
}

}  // namespace

SuiteResult verify_prop44(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(1.0, 3.0);
  Eigen::VectorXd d0(5), d1(5);
  for (Eigen::Index i = 0; i < 5; ++i) {
    d0[i] = unif(rng);
    d1[i] = d0[i] * std::pow(unif(rng), 4);
  }
  std::vector<double> r;
  for (int k = 0; k < 16; ++k) r.push_back(std::sqrt(1.0 + k * k));
  CMatrix a0 = random_hpd(4, seed + 11, 1.0);
  CMatrix a1 = a0 + random_hpd(4, seed + 23, 0.5);
  const std::vector<HilbertCouple> couples{HilbertCouple::diagonal(d0, d1),
                                           HilbertCouple::dense(a0, 0.5 * (a1 + a1.adjoint())),
                                           fourier_couple(r, 1.0, 3.0),
                                           moderate_dense_couple(3, seed + 37)};
  json cases = json::array();
  bool pass = true;
  std::uint64_t k = 0;
  for (const auto& [name, psi] : psi_family()) {
    const Prop44Report rep = check_prop44(couples, psi, 100, seed + k++);
    pass = pass && rep.passed;
    json j = rep.to_json();
    j["psi"] = name;
    cases.push_back(j);
  }
  SuiteResult res;
  res.suite = "prop44";
  res.pass = pass;
  res.report = json{{"summands", {"diagonal[5]", "dense[4]", "fourier[16]", "dense[3]"}},
                    {"tol", kProp44Tol},
                    {"cases", cases},
                    {"pass", pass}};
  return res;
}

SuiteResult verify_prop43(std::uint64_t seed) {
  const Eigen::Index n = 6;
  const HilbertCouple dense = moderate_dense_couple(n, seed, 1e4);
  Eigen::VectorXd d0(n), d1(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    d0[i] = 1.0 + 0.1 * static_cast<double>(i);
    d1[i] = d0[i] * (1.0 + 0.5 * static_cast<double>(i));
  }
  const HilbertCouple diag = HilbertCouple::diagonal(d0, d1);

  // P = S diag(1,1,1,0,0,0) S^{-1} with a random well-conditioned S.
  CMatrix S = CMatrix::Identity(n, n);
  for (Eigen::Index j = 0; j < n; ++j) S.col(j) += 0.3 * random_vector(n, seed + 500 + static_cast<std::uint64_t>(j));
  Eigen::VectorXcd e = Eigen::VectorXcd::Zero(n);
  e.head(3).setOnes();
  const CMatrix oblique = S * e.asDiagonal() * S.inverse();
  CMatrix coord = CMatrix::Zero(n, n);
  coord.diagonal().head(3).setOnes();

  json rows = json::array();
  bool pass = true;
  std::vector<double> oblique_K;
  std::uint64_t k = 0;
  for (const auto& [name, psi] : psi_family()) {
    const auto r_id = check_prop43(dense, CMatrix::Identity(n, n), psi, 100, seed + k);
    const auto r_coord = check_prop43(diag, coord, psi, 100, seed + k);
    const auto r_obl = check_prop43(dense, oblique, psi, 100, seed + k);
    ++k;
    const bool ok = std::abs(r_id.K - 1.0) <= 1e-8 && std::abs(r_coord.K - 1.0) <= 1e-8 &&
                    std::isfinite(r_obl.K);
    pass = pass && ok;
    oblique_K.push_back(r_obl.K);
    rows.push_back(json{{"psi", name},
                        {"identity", r_id.to_json()},
                        {"coordinate", r_coord.to_json()},
                        {"oblique", r_obl.to_json()},
                        {"pass", ok}});
  }
  const double kmax = *std::max_element(oblique_K.begin(), oblique_K.end());
  const double kmin = *std::min_element(oblique_K.begin(), oblique_K.end());
  const bool stable = kmax <= 1.2 * kmin;
  pass = pass && stable;
  SuiteResult res;
  res.suite = "prop43";
  res.pass = pass;
  res.report = json{{"cases", rows},
                    {"oblique_K_spread", kmax / kmin},
                    {"oblique_K_stable", stable},
                    {"pass", pass}};
  return res;
}

// ---- Lemmas 5.3 / 5.4 ------------------------------------------------------

VerificationCase lemma53_54_default_case() {
  VerificationCase c;
  c.s0 = 2.0;
  c.s = 3.0;
  c.s1 = 4.0;
  c.phi = log1();
  c.grid = {5, 7};
  c.vectors = 40;
  return c;
}

namespace {

struct Lemma53Level {
  json report;
  double K_plus = 0, K_omega = 0, K_line = 0, K_interval = 0;
  bool trivial_ok = true;
};

Lemma53Level lemma53_level(const VerificationCase& c, std::size_t cpu) {
  if (cpu % 2 == 0) throw DomainError("lemma53_54 needs an odd number of cells per unit");
  const double l = 1.0, tau = 1.0;
  const int k = static_cast<int>(std::ceil(c.s1));
  const AnisotropyParams aniso(c.b);
  const RealFunction psi = InterpolationPsi(c.s0, c.s, c.s1, c.phi).as_function();
  const SmoothnessIndex i0{c.s0, FunctionParameter(), aniso}, i1{c.s1, FunctionParameter(), aniso},
      is{c.s, c.phi, aniso};
  Lemma53Level out;
  json rep{{"cells_per_unit", cpu}};

  // 2-D: box [-1, 2] per axis, plus-support boundary and Omega on nodes.
  const double h = 1.0 / static_cast<double>(cpu);
  const std::size_t n = 3 * cpu + 1;
  const GridSpec spec = GridSpec::periodic_2d(-1.0, 2.0 + h, n, -1.0, 2.0 + h, n);
  std::vector<std::size_t> all(spec.size()), plus;
  for (std::size_t p = 0; p < spec.size(); ++p) {
    all[p] = p;
    if (p % n > cpu) plus.push_back(p);  // t > 0
  }
  auto bumpt = [](double t) { return plateau(t, 0.0, 1.8, 0.2); };
  auto bumpx = [](double x) { return plateau(x, -0.8, 1.8, 0.3); };
  const std::vector<std::pair<std::string, std::function<cplx(double, double)>>> family{
      {"gauss_t*sin_x",
       [&](double x, double t) {
         return cplx(std::exp(-std::pow((t - 0.5) / 0.3, 2)) * bumpt(t) * std::sin(kPi * x) * bumpx(x));
       }},
      {"cos_t*sin_2x",
       [&](double x, double t) {
         return cplx(std::cos(kPi * t), 0.5) * bumpt(t) * std::sin(2.0 * kPi * x) * bumpx(x);
       }},
      {"smooth_mix",
       [&](double x, double t) {
         return cplx(1.0 + x * t, -x) * bumpt(t) * bumpx(x);
       }}};
  const auto outside = [](double x, double t) {
    return cplx(plateau(x, 1.1, 1.8, 0.2) * plateau(t, 0.2, 0.8, 0.2));
  };

  // (5.4): P = I - T(restriction to t < 0) on the full grid.
  {
    const CMatrix P = operator_matrix(spec, all, [&](const GridFunction& w) { return projector_plus(w, k, 1.0); });
    const CMatrix g0 = gram_of(spec, i0, all), g1 = gram_of(spec, i1, all);
    const auto couple = HilbertCouple::dense(g0, g1);
    const Prop43Report pr = check_prop43(couple, P, psi, c.vectors, c.seed);
    const CMatrix by = orthonormal_column_space(P);
    CMatrix y0 = by.adjoint() * g0 * by, y1 = by.adjoint() * g1 * by;
    const InterpolatedSpace range(HilbertCouple::dense(0.5 * (y0 + y0.adjoint()), 0.5 * (y1 + y1.adjoint())), psi);
    json fam = json::array();
    std::vector<double> ratios;
    for (const auto& [name, f] : family) {
      const GridFunction w = GridFunction::sample(spec, f);
      const double a = range.norm(by.adjoint() * to_vector(w, all));
      const double d = norm_refined_aniso(w, is);
      ratios.push_back(a / d);
      fam.push_back(json{{"name", name}, {"interpolated", a}, {"direct", d}, {"ratio", a / d}});
    }
    const double z = range.norm(CVector::Zero(by.cols()));
    out.trivial_ok = out.trivial_ok && z == 0.0;
    out.K_plus = family_K(ratios);
    rep["plus"] = json{{"prop43", pr.to_json()}, {"family", fam}, {"zero_norm", z}, {"K", out.K_plus}};
  }

  // (5.5): P0 = I - T3 R3 T2 R2 T1 R1 on the plus nodes; factor by its range.
  {
    const CMatrix P0 = operator_matrix(spec, plus, [&](const GridFunction& w) {
      return projector_Q(w, k, l, tau);
    });
    const CMatrix g0 = gram_of(spec, i0, plus), g1 = gram_of(spec, i1, plus);
    const auto couple = HilbertCouple::dense(g0, g1);
    const Prop43Report pr = check_prop43(couple, P0, psi, c.vectors, c.seed + 1);
    const Eigen::Index m = P0.rows();
    const CMatrix lambda = CMatrix::Identity(m, m) - P0;
    const CMatrix by = orthonormal_column_space(P0), bz = orthonormal_column_space(lambda);
    const InterpolatedSpace quot(
        HilbertCouple::dense(schur_complement(g0, bz, by), schur_complement(g1, bz, by)), psi);
    const GridSpec data = GridSpec::closed_2d(0.0, l, cpu + 1, 0.0, tau, cpu + 1);
    const ExtensionBudget budget{cpu, cpu, cpu, cpu};
    auto direct = [&](const GridFunction& w) {
      GridFunction u(data);
      for (std::size_t i = 0; i <= cpu; ++i)
        for (std::size_t j = 0; j <= cpu; ++j) u.at(i, j) = w.at(cpu + i, cpu + j);
      return factor_norm_plus_omega(u, is, budget);
    };
    auto interp = [&](const GridFunction& w) {
      return quot.norm(bz.adjoint() * (lambda * to_vector(w, plus)));
    };
    json fam = json::array();
    std::vector<double> ratios;
    for (const auto& [name, f] : family) {
      const GridFunction w = GridFunction::sample(spec, f);
      const double a = interp(w), d = direct(w);
      ratios.push_back(a / d);
      fam.push_back(json{{"name", name}, {"interpolated", a}, {"direct", d}, {"ratio", a / d}});
    }
    const GridFunction wo = GridFunction::sample(spec, outside);
    const double oa = interp(wo), od = direct(wo);
    const double za = interp(GridFunction(spec)), zd = direct(GridFunction(spec));
    out.trivial_ok = out.trivial_ok && oa <= 1e-12 && od <= 1e-12 && za == 0.0 && zd == 0.0;
    out.K_omega = family_K(ratios);
    rep["omega"] = json{{"prop43", pr.to_json()},
                        {"family", fam},
                        {"outside_support", {{"interpolated", oa}, {"direct", od}}},
                        {"zero", {{"interpolated", za}, {"direct", zd}}},
                        {"K", out.K_omega}};
  }

  // 1-D: P_0 on the line, P_tau for the factor on (0, tau).
  {
    const std::size_t c1 = 4 * cpu + 1;
    const double h1 = 1.0 / static_cast<double>(c1);
    const std::size_t n1 = 3 * c1 + 1;
    const GridSpec line = GridSpec::periodic_1d(-1.0, 2.0 + h1, n1);
    // Time-direction orders s*gamma keep the 1-D forms well conditioned.
    const double g = aniso.gamma();
    const int k1 = static_cast<int>(std::ceil(c.s1 * g));
    const RealFunction psi1 = InterpolationPsi(c.s0 * g, c.s * g, c.s1 * g, c.phi).as_function();
    const SmoothnessIndex j0{c.s0 * g, FunctionParameter(), std::nullopt},
        j1{c.s1 * g, FunctionParameter(), std::nullopt}, js{c.s * g, c.phi, std::nullopt};
    std::vector<std::size_t> lall(n1), lplus;
    for (std::size_t p = 0; p < n1; ++p) {
      lall[p] = p;
      if (p > c1) lplus.push_back(p);
    }
    const std::vector<std::pair<std::string, std::function<cplx(double)>>> fam1{
        {"gauss", [](double t) { return cplx(std::exp(-std::pow((t - 0.5) / 0.3, 2)) * plateau(t, 0.0, 1.8, 0.2)); }},
        {"sin_3pi", [](double t) { return cplx(std::sin(3.0 * kPi * t), 0.3) * plateau(t, 0.0, 1.7, 0.3); }}};

    const CMatrix P = operator_matrix(line, lall, [&](const GridFunction& w) { return projector_tau(w, k1, 0.0); });
    const CMatrix g0 = gram_of(line, j0, lall), g1 = gram_of(line, j1, lall);
    const Prop43Report pr = check_prop43(HilbertCouple::dense(g0, g1), P, psi1, c.vectors, c.seed + 2);
    const CMatrix by = orthonormal_column_space(P);
    CMatrix y0 = by.adjoint() * g0 * by, y1 = by.adjoint() * g1 * by;
    const InterpolatedSpace range(HilbertCouple::dense(0.5 * (y0 + y0.adjoint()), 0.5 * (y1 + y1.adjoint())), psi1);

    const CMatrix Pt = operator_matrix(line, lplus, [&](const GridFunction& w) { return projector_tau(w, k1, tau); });
    const CMatrix q0 = gram_of(line, j0, lplus), q1 = gram_of(line, j1, lplus);
    const Prop43Report prt = check_prop43(HilbertCouple::dense(q0, q1), Pt, psi1, c.vectors, c.seed + 3);
    const Eigen::Index m = Pt.rows();
    const CMatrix lam = CMatrix::Identity(m, m) - Pt;
    const CMatrix ty = orthonormal_column_space(Pt), tz = orthonormal_column_space(lam);
    const InterpolatedSpace quot(
        HilbertCouple::dense(schur_complement(q0, tz, ty), schur_complement(q1, tz, ty)), psi1);
    const GridSpec data = GridSpec::closed_1d(0.0, tau, c1 + 1);
    ExtensionBudget budget;
    budget.below = c1;
    budget.above = c1;

    json fl = json::array(), fi = json::array();
    std::vector<double> rl, ri;
    for (const auto& [name, f] : fam1) {
      const GridFunction w = GridFunction::sample(line, f);
      const double a = range.norm(by.adjoint() * to_vector(w, lall));
      const double d = norm_refined_iso_1d(w, js);
      rl.push_back(a / d);
      fl.push_back(json{{"name", name}, {"interpolated", a}, {"direct", d}, {"ratio", a / d}});
      GridFunction v(data);
      for (std::size_t j = 0; j <= c1; ++j) v[j] = w[c1 + j];
      const double qa = quot.norm(tz.adjoint() * (lam * to_vector(w, lplus)));
      const double qd = factor_norm_plus_interval(v, js, budget);
      ri.push_back(qa / qd);
      fi.push_back(json{{"name", name}, {"interpolated", qa}, {"direct", qd}, {"ratio", qa / qd}});
    }
    out.K_line = family_K(rl);
    out.K_interval = family_K(ri);
    rep["line"] = json{{"orders", {c.s0 * g, c.s * g, c.s1 * g}}, {"prop43", pr.to_json()}, {"family", fl}, {"K", out.K_line}};
    rep["interval"] = json{{"prop43", prt.to_json()}, {"family", fi}, {"K", out.K_interval}};
  }
  rep["trivial_cases_ok"] = out.trivial_ok;
  out.report = rep;
  return out;
}

}  // namespace

SuiteResult verify_lemma53_54(const VerificationCase& c) {
  c.validate();
  if (c.grid.size() != 2) throw DomainError("lemma53_54 needs two refinements");
  const AnisotropyParams aniso(c.b);
  for (double s : {c.s0, c.s1}) {
    const double st = s * aniso.gamma();
    if (s <= 0 || s != std::floor(s) || st != std::floor(st) || st <= 0)
      throw DomainError("lemma53_54 needs s0, s1, s0*gamma, s1*gamma positive integers");
  }
  const Lemma53Level a = lemma53_level(c, c.grid[0]);
  const Lemma53Level b = lemma53_level(c, c.grid[1]);
  auto stable = [](double k1, double k2) {
    return std::isfinite(k1) && std::isfinite(k2) && std::abs(k2 / k1 - 1.0) <= 0.25;
  };
  const json stability{{"plus", stable(a.K_plus, b.K_plus)},
                       {"omega", stable(a.K_omega, b.K_omega)},
                       {"line", stable(a.K_line, b.K_line)},
                       {"interval", stable(a.K_interval, b.K_interval)}};
  bool pass = a.trivial_ok && b.trivial_ok;
  for (const auto& [key, v] : stability.items()) pass = pass && v.get<bool>();
  SuiteResult res;
  res.suite = "lemma53_54";
  res.pass = pass;
  res.report = json{{"case", c.to_json()},
                    {"levels", {a.report, b.report}},
                    {"stable_within_25_percent", stability},
                    {"pass", pass}};
  return res;
}

// ---- embeddings ----------------------------------------------------------

double sup_power_phi(double a, const FunctionParameter& phi, double e) {
  auto f = [&](double lr) {
    const double r = std::exp(lr);
    return a * lr + e * std::log(phi(r));
  };
  const double top = std::log(1e12);
  const std::size_t n = 24001;
  const double step = top / static_cast<double>(n - 1);
  double best = f(0.0), best_lr = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double lr = step * static_cast<double>(i);
    const double v = f(lr);
    if (v > best) {
      best = v;
      best_lr = lr;
    }
  }
  if (phi.domain_floor() > 1.0) {
    const double lf = std::log(phi.domain_floor());
    if (f(lf) > best) {
      best = f(lf);
      best_lr = lf;
    }
  }
  // Golden-section refinement around the sampled maximum.
  double lo = std::max(0.0, best_lr - step), hi = std::min(top, best_lr + step);
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 80; ++it) {
    const double m1 = hi - g * (hi - lo), m2 = lo + g * (hi - lo);
    if (f(m1) < f(m2))
      lo = m1;
    else
      hi = m2;
    best = std::max({best, f(m1), f(m2)});
  }
  return std::exp(best);
}

std::vector<GridSpec> shipped_grids() {
  return {GridSpec::periodic_2d(-1.0, 2.0, 48, -1.0, 2.0, 48),
          GridSpec::periodic_2d(0.0, 2.0 * kPi, 64, 0.0, 2.0 * kPi, 64),
          GridSpec::periodic_2d(-2.0, 2.0, 32, -1.0, 3.0, 64),
          GridSpec::periodic_1d(-1.0, 2.0, 128),
          GridSpec::periodic_1d(0.0, 2.0 * kPi, 256)};
}

SuiteResult verify_embeddings(const VerificationCase& c) {
  c.validate();
  const std::vector<FunctionParameter> phis{FunctionParameter(), log1(), inv_log1()};
  const double slack = 1.0 + 1e-12;
  json rows = json::array();
  bool pass = true;
  for (const auto& phi : phis) {
    const double C0 = sup_power_phi(c.s0 - c.s, phi, -1.0) * (1.0 + 1e-9);
    const double C1 = sup_power_phi(c.s - c.s1, phi, 1.0) * (1.0 + 1e-9);
    std::uint64_t gi = 0;
    for (const GridSpec& spec : shipped_grids()) {
      ++gi;
      std::optional<AnisotropyParams> an;
      if (spec.dim == 2) an = AnisotropyParams(c.b);
      const SmoothnessIndex i0{c.s0, FunctionParameter(), an}, is{c.s, phi, an},
          i1{c.s1, FunctionParameter(), an};
      const auto w0 = weight_table(spec, i0), ws = weight_table(spec, is), w1 = weight_table(spec, i1);
      std::size_t pointwise_violations = 0;
      for (std::size_t q = 0; q < w0.size(); ++q) {
        if (w0[q] > C0 * C0 * ws[q] * slack) ++pointwise_violations;
        if (ws[q] > C1 * C1 * w1[q] * slack) ++pointwise_violations;
      }
      std::mt19937_64 rng(c.seed * 7919 + gi);
      std::normal_distribution<double> nd(0.0, 1.0);
      const double xa = spec.lo[0], xb = spec.hi[0];
      const double lx = xb - xa, dx = 0.15 * lx;
      const double ta = spec.dim == 2 ? std::max(0.0, spec.lo[1]) : std::max(0.0, spec.lo[0]);
      const double tb = spec.dim == 2 ? spec.hi[1] - 0.1 * spec.length(1) : spec.hi[0] - 0.1 * lx;
      const double dt = 0.15 * (tb - ta);
      std::size_t norm_violations = 0, not_plus = 0;
      double worst0 = 0.0, worst1 = 0.0;
      for (std::size_t v = 0; v < c.vectors; ++v) {
        cplx coef[4][4];
        for (auto& row : coef)
          for (auto& z : row) z = cplx(nd(rng), nd(rng));
        GridFunction w;
        if (spec.dim == 2) {
          const double wx = 2.0 * kPi / lx, wt = 2.0 * kPi / spec.length(1);
          w = GridFunction::sample(spec, [&](double x, double t) {
            cplx s = 0.0;
            for (int p = 0; p < 4; ++p)
              for (int q = 0; q < 4; ++q) s += coef[p][q] * std::exp(cplx(0.0, p * wx * x + q * wt * t));
            return s * plateau(x, xa + 0.05 * lx, xb - 0.05 * lx, dx) * plateau(t, ta, tb, dt);
          });
        } else {
          const double wt = 2.0 * kPi / lx;
          w = GridFunction::sample(spec, [&](double t) {
            cplx s = 0.0;
            for (int q = 0; q < 4; ++q) s += coef[0][q] * std::exp(cplx(0.0, q * wt * t));
            return s * plateau(t, ta, tb, dt);
          });
        }
        if (!is_plus_supported(w, 0.0)) ++not_plus;
        auto nrm = [&](const SmoothnessIndex& idx) {
          return spec.dim == 2 ? norm_refined_aniso(w, idx) : norm_refined_iso_1d(w, idx);
        };
        const double n0 = nrm(i0), ns = nrm(is), n1 = nrm(i1);
        worst0 = std::max(worst0, n0 / (C0 * ns));
        worst1 = std::max(worst1, ns / (C1 * n1));
        if (n0 > C0 * ns * slack) ++norm_violations;
        if (ns > C1 * n1 * slack) ++norm_violations;
      }
      const bool ok = pointwise_violations == 0 && norm_violations == 0 && not_plus == 0;
      pass = pass && ok;
      rows.push_back(json{{"phi", phi.describe()},
                          {"grid", {{"dim", spec.dim},
                                    {"count", spec.dim == 2 ? json{spec.count[0], spec.count[1]} : json{spec.count[0]}},
                                    {"lo", spec.dim == 2 ? json{spec.lo[0], spec.lo[1]} : json{spec.lo[0]}},
                                    {"hi", spec.dim == 2 ? json{spec.hi[0], spec.hi[1]} : json{spec.hi[0]}}}},
                          {"C0", C0},
                          {"C1", C1},
                          {"pointwise_violations", pointwise_violations},
                          {"norm_violations", norm_violations},
                          {"max_ratio_lower", worst0},
                          {"max_ratio_upper", worst1},
                          {"pass", ok}});
    }
  }
  SuiteResult res;
  res.suite = "embeddings";
  res.pass = pass;
  res.report = json{{"case", c.to_json()}, {"checks", rows}, {"pass", pass}};
  return res;
}

// ---- Main Theorem probe ----------------------------------------------------

int sigma1_for(double sigma, int b) {
  if (b < 1) throw DomainError("b must be >= 1");
  int s = static_cast<int>(std::floor(sigma)) + 1;
  while (s % (2 * b) != 0) ++s;
  return s;
}

json RefinementRecord::to_json() const {
  return json{{"n", n},
              {"upper_ratio", upper_ratio},
              {"lower_ratio", lower_ratio},
              {"condition", condition},
              {"ratios", ratios}};
}

json BoundsProbe::to_json() const {
  json recs = json::array();
  for (const auto& r : records) recs.push_back(r.to_json());
  return json{{"problem", problem}, {"trial_basis", trial_basis}, {"sigma", sigma},
              {"sigma0", sigma0},   {"sigma1", sigma1},           {"phi", phi},
              {"records", recs},    {"growth", growth},           {"domain_norms", domain_norms},
              {"cauchy", cauchy},   {"pass", pass}};
}

namespace {

// u = t^M sum_{a,c <= modes} coef[a][c] cos(a pi x / l) cos(c pi t / tau).
struct TrialField {
  int M = 4, modes = 2;
  double l = 1.0, tau = 1.0;
  std::vector<cplx> coef;  // (modes+1)^2, row a

  cplx operator()(double x, double t) const {
    if (t < 0.0) return 0.0;
    const std::size_t m = static_cast<std::size_t>(modes) + 1;
    double cx[8], ct[8];
    const double c1x = std::cos(kPi * x / l), c1t = std::cos(kPi * t / tau);
    cx[0] = ct[0] = 1.0;
    if (m > 1) {
      cx[1] = c1x;
      ct[1] = c1t;
    }
    for (std::size_t a = 2; a < m; ++a) {
      cx[a] = 2.0 * c1x * cx[a - 1] - cx[a - 2];
      ct[a] = 2.0 * c1t * ct[a - 1] - ct[a - 2];
    }
    cplx s = 0.0;
    for (std::size_t a = 0; a < m; ++a) {
      cplx row = 0.0;
      for (std::size_t c = 0; c < m; ++c) row += coef[a * m + c] * ct[c];
      s += row * cx[a];
    }
    return s * std::pow(t, M);
  }
};

// Composition of Hestenes extensions across t = tau, x = l and x = 0 of
// the field restricted to the closed rectangle, zero for t < 0.
class ComposedExtension {
 public:
  ComposedExtension(const TrialField& u, int k, double l, double tau)
      : u_(u), lam_(hestenes_coeffs(k).as_double()), l_(l), tau_(tau), chix_(l), chit_(tau) {}

  cplx operator()(double x, double t) const { return across_x0(x, t); }

 private:
  cplx across_tau(double x, double t) const {
    if (t <= tau_) return u_(x, t);
    const double d = t - tau_, c = chit_(-d);
    if (c == 0.0) return 0.0;
    cplx s = 0.0;
    for (std::size_t j = 0; j < lam_.size(); ++j) s += lam_[j] * u_(x, tau_ - d / static_cast<double>(j + 1));
    return c * s;
  }
  cplx across_l(double x, double t) const {
    if (x <= l_) return across_tau(x, t);
    const double d = x - l_, c = chix_(-d);
    if (c == 0.0) return 0.0;
    cplx s = 0.0;
    for (std::size_t j = 0; j < lam_.size(); ++j) s += lam_[j] * across_tau(l_ - d / static_cast<double>(j + 1), t);
    return c * s;
  }
  cplx across_x0(double x, double t) const {
    if (x >= 0.0) return across_l(x, t);
    const double d = -x, c = chix_(-d);
    if (c == 0.0) return 0.0;
    cplx s = 0.0;
    for (std::size_t j = 0; j < lam_.size(); ++j) s += lam_[j] * across_l(d / static_cast<double>(j + 1), t);
    return c * s;
  }

  const TrialField& u_;
  std::vector<double> lam_;
  double l_, tau_;
  CutoffChi chix_, chit_;
};

}  // namespace

BoundsProbe probe_main_theorem(const ParabolicProblem& prob, const ProbeOptions& opt) {
  const ParabolicityReport par = check_parabolicity(prob);
  if (!par.parabolic()) {
    std::string which = !par.cond_i.pass ? "(i)" : !par.cond_ii.pass ? "(ii)" : "(iii)";
    throw FailedPrecondition("problem '" + prob.name + "' fails parabolicity condition " + which);
  }
  if (!(opt.sigma > par.sigma0))
    throw FailedPrecondition("sigma must exceed sigma0 = " + std::to_string(par.sigma0));
  if (opt.refinements.size() < 2) throw DomainError("the probe needs at least two refinements");
  if (opt.trials < 2) throw DomainError("the probe needs at least two trial functions");
  if (opt.modes < 0 || opt.modes > 7) throw DomainError("modes must lie in 0..7");

  const int b = prob.b(), m = prob.m();
  const AnisotropyParams aniso(b);
  const double l = prob.l(), tau = prob.tau();
  BoundsProbe out;
  out.problem = prob.name;
  out.sigma = opt.sigma;
  out.sigma0 = par.sigma0;
  out.sigma1 = sigma1_for(opt.sigma, b);
  out.phi = opt.phi.describe();
  const int M = opt.vanishing_order > 0 ? opt.vanishing_order : static_cast<int>(std::ceil(opt.sigma)) + 1;
  {
    std::ostringstream os;
    os << "t^" << M << " * sum_{a,c<=" << opt.modes << "} c_ac cos(a pi x/l) cos(c pi t/tau), "
       << opt.trials << " trials, seed " << opt.seed;
    out.trial_basis = os.str();
  }

  std::vector<TrialField> trials(opt.trials);
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  const std::size_t nm = static_cast<std::size_t>(opt.modes + 1) * static_cast<std::size_t>(opt.modes + 1);
  for (auto& tf : trials) {
    tf.M = M;
    tf.modes = opt.modes;
    tf.l = l;
    tf.tau = tau;
    for (std::size_t i = 0; i < nm; ++i) tf.coef.emplace_back(nd(rng), nd(rng));
  }

  const SmoothnessIndex dom{opt.sigma, opt.phi, aniso};
  const SmoothnessIndex fidx{opt.sigma - 2.0 * m, opt.phi, aniso};
  std::vector<SmoothnessIndex> gidx;
  for (int j = 0; j < m; ++j) {
    const double s = (opt.sigma - prob.m_j()[static_cast<std::size_t>(j)] - 0.5) / (2.0 * b);
    gidx.push_back(SmoothnessIndex{s, opt.phi, std::nullopt});
  }

  std::vector<double> first_norms;
  for (std::size_t N : opt.refinements) {
    if (N < 8 || N % 2) throw DomainError("refinements must be even and >= 8");
    RefinementRecord rec;
    rec.n = N;
    const GridSpec box = GridSpec::periodic_2d(-l, 2.0 * l, 3 * N, -tau, 2.0 * tau, 3 * N);
    const GridSpec closed = GridSpec::closed_2d(0.0, l, N + 1, 0.0, tau, N + 1);
    const std::size_t half = N / 2;
    const ExtensionBudget fb{half, half, half, half};
    ExtensionBudget gb;
    gb.below = half;
    gb.above = half;
    for (std::size_t i = 0; i < trials.size(); ++i) {
      const ComposedExtension ext(trials[i], out.sigma1, l, tau);
      const GridFunction big = GridFunction::sample(box, [&](double x, double t) { return ext(x, t); });
      const double dnorm = norm_refined_aniso(big, dom);
      if (i == 0) first_norms.push_back(dnorm);
      const GridFunction u = GridFunction::sample(closed, [&](double x, double t) { return trials[i](x, t); });
      const ABResult ab = apply_AB(prob, u);
      double r2 = std::pow(factor_norm_plus_omega(ab.f, fidx, fb), 2);
      for (std::size_t g = 0; g < ab.g.size(); ++g)
        r2 += std::pow(factor_norm_plus_interval(ab.g[g], gidx[g / 2], gb), 2);
      rec.ratios.push_back(std::sqrt(r2) / dnorm);
    }
    rec.upper_ratio = *std::max_element(rec.ratios.begin(), rec.ratios.end());
    rec.lower_ratio = *std::min_element(rec.ratios.begin(), rec.ratios.end());
    rec.condition = rec.lower_ratio > 0.0 ? rec.upper_ratio / rec.lower_ratio : INFINITY;
    out.records.push_back(rec);
  }
  bool pass = true;
  for (const auto& r : out.records) pass = pass && r.lower_ratio > 0.0 && std::isfinite(r.upper_ratio);
  for (std::size_t i = 1; i < out.records.size(); ++i) {
    const double g = out.records[i].condition / out.records[i - 1].condition;
    out.growth.push_back(g);
    pass = pass && g < opt.growth_limit;
  }
  const std::size_t nn = first_norms.size();
  const double cauchy = rel_diff(first_norms[nn - 1], first_norms[nn - 2]);
  pass = pass && cauchy <= 0.01;
  out.pass = pass;
  out.cauchy = cauchy;
  out.domain_norms = first_norms;
  return out;
}

std::string probe_csv(const BoundsProbe& p) {
  std::ostringstream os;
  os.precision(17);
  os << "refinement,upper,lower,condition\n";
  for (const auto& r : p.records)
    os << r.n << ',' << r.upper_ratio << ',' << r.lower_ratio << ',' << r.condition << '\n';
  return os.str();
}

// ---- remaining suites -----------------------------------------------------

namespace {

SuiteResult suite_hestenes() {
  json rows = json::array();
  bool pass = true;
  for (int k = 0; k <= 6; ++k) {
    const HestenesCoeffs hc = hestenes_coeffs(k);
    bool exact = true;
    for (int a = 0; a <= k; ++a) exact = exact && hc.moment(a) == Rational(1);
    double worst = 0.0;
    for (int a = 0; a <= k; ++a) {
      const auto v = FunctionOracle::of([a](double t) { return cplx(std::pow(t, a)); }, 1000);
      const double eps = 1.0;
      const GridSpec zone = GridSpec::closed_1d(-eps / 3.0, 0.0, 41);
      const GridFunction e = extend_halfline(v, k, eps, HalfLineSpec{Side::greater_than, 0.0}, zone);
      const double scale = std::pow(eps / 3.0, a);
      for (std::size_t i = 0; i < zone.count[0]; ++i) {
        const double t = zone.coord(0, i);
        worst = std::max(worst, std::abs(e[i] - std::pow(t, a)) / scale);
      }
    }
    const bool ok = exact && worst <= 1e-10;
    pass = pass && ok;
    rows.push_back(json{{"coefficients", hc.to_json()},
                        {"moments_exact", exact},
                        {"monomial_max_rel_error", worst},
                        {"pass", ok}});
  }
  const HestenesCoeffs h1 = hestenes_coeffs(1);
  const bool k1 = h1.lambda.size() == 2 && h1.lambda[0] == Rational(-3) && h1.lambda[1] == Rational(4);
  pass = pass && k1;

  // One-sided third derivatives of the k = 3 extension of sin at t = 0.
  const auto v = FunctionOracle::of([](double t) { return cplx(std::sin(t)); }, 1000);
  json mism = json::array();
  std::vector<double> mm;
  for (double h : {0.1, 0.05, 0.025}) {
    const std::size_t n = static_cast<std::size_t>(std::lround(2.0 / h)) + 1;
    const GridSpec g = GridSpec::closed_1d(-1.0, 1.0, n);
    const GridFunction e = extend_halfline(v, 3, 3.0, HalfLineSpec{Side::greater_than, 0.0}, g);
    const std::size_t z = g.node_index(0, 0.0);
    std::vector<double> right, left;
    for (int i = 0; i < 6; ++i) {
      right.push_back(i * h);
      left.push_back(-i * h);
    }
    const auto wr = fornberg_weights(right, 0.0, 3), wl = fornberg_weights(left, 0.0, 3);
    cplx dr = 0.0, dl = 0.0;
    for (std::size_t i = 0; i < 6; ++i) {
      dr += wr[i] * e[z + i];
      dl += wl[i] * e[z - i];
    }
    mm.push_back(std::abs(dr - dl));
    mism.push_back(json{{"h", h}, {"mismatch", mm.back()}});
  }
  std::vector<double> ratios;
  bool decay = true;
  for (std::size_t i = 1; i < mm.size(); ++i) {
    ratios.push_back(mm[i - 1] / mm[i]);
    decay = decay && ratios.back() >= 4.0;
  }
  pass = pass && decay;
  SuiteResult res;
  res.suite = "hestenes";
  res.pass = pass;
  res.report = json{{"orders", rows},
                    {"k1_is_minus3_4", k1},
                    {"interface_mismatch_k3", mism},
                    {"mismatch_reduction", ratios},
                    {"pass", pass}};
  return res;
}

// Heat operator with B = D_x^2 at both ends (m1 = 2).
ParabolicProblem heat_second_order_boundary() {
  ParabolicProblem p(1, 1, {2}, 1.0, 1.0);
  p.name = "heat_dxx_boundary";
  const auto one = [](double, double) { return cplx(1.0); };
  p.add_A_term(0, 1, one, "1");
  p.add_A_term(2, 0, one, "1");
  p.add_B_term(1, 0, 2, 0, one, "1");
  p.add_B_term(1, 1, 2, 0, one, "1");
  return p;
}

json minimality(const ParabolicProblem& p, int s0) {
  bool minimal = sigma0_admissible(p, s0);
  for (int s = 0; s < s0; ++s) minimal = minimal && !sigma0_admissible(p, s);
  return json{{"sigma0", s0}, {"exhaustively_minimal", minimal}};
}

SuiteResult suite_parabolic() {
  const ParabolicityReport heat = check_parabolicity(heat_dirichlet());
  const ParabolicityReport back = check_parabolicity(backward_heat_dirichlet());
  const ParabolicityReport neu = check_parabolicity(heat_neumann());
  const ParabolicProblem p2 = heat_second_order_boundary();
  const ParabolicityReport second = check_parabolicity(p2);
  const bool heat_ok = heat.parabolic() && heat.cond_i.margin >= 0.1 && heat.cond_ii.margin >= 0.1 &&
                       heat.cond_iii.margin >= 0.1;
  const bool back_ok = !back.cond_i.pass && back.cond_i.has_witness;
  const bool neu_ok = neu.cond_iii.pass;
  const json m_heat = minimality(heat_dirichlet(), sigma0(heat_dirichlet()));
  const json m_two = minimality(p2, sigma0(p2));
  const bool s_ok = m_heat["sigma0"] == 2 && m_heat["exhaustively_minimal"] == true &&
                    m_two["sigma0"] == 4 && m_two["exhaustively_minimal"] == true;
  const bool pass = heat_ok && back_ok && neu_ok && s_ok;
  SuiteResult res;
  res.suite = "parabolic";
  res.pass = pass;
  res.report = json{{"heat_dirichlet", heat.to_json()},
                    {"backward_heat", back.to_json()},
                    {"heat_neumann", neu.to_json()},
                    {"heat_dxx_boundary", second.to_json()},
                    {"sigma0_heat", m_heat},
                    {"sigma0_m1_2", m_two},
                    {"checks", {{"heat_margins", heat_ok},
                                {"backward_witness", back_ok},
                                {"neumann_iii", neu_ok},
                                {"sigma0", s_ok}}},
                    {"pass", pass}};
  return res;
}

SuiteResult suite_varfun() {
  const auto grid = default_index_grid();
  const InterpolationVerdict good =
      is_interpolation_parameter(InterpolationPsi(0, 1, 2, log1()).as_function(), grid);
  const InterpolationVerdict bad =
      is_interpolation_parameter([](double r) { return std::pow(r, 1.5); }, grid);
  const VariationReport m = check_class_M(log1(), default_limit_grid(), default_lambdas());
  const bool good_ok = good.decision == InterpolationVerdict::Decision::accepted &&
                       std::abs(good.index - 0.5) <= 0.01;
  const bool bad_ok = bad.decision == InterpolationVerdict::Decision::rejected;
  const bool m_ok = m.verdict == Verdict::slowly_varying;
  const bool pass = good_ok && bad_ok && m_ok;
  SuiteResult res;
  res.suite = "varfun";
  res.pass = pass;
  res.report = json{{"psi_0_1_2_log", good.to_json()},
                    {"power_1_5", bad.to_json()},
                    {"log_class_M", m.to_json()},
                    {"checks", {{"index_0_5", good_ok}, {"power_rejected", bad_ok}, {"log_in_M", m_ok}}},
                    {"pass", pass}};
  return res;
}

std::vector<std::size_t> env_refinements() {
  const char* env = std::getenv("REFSOB_PROBE_SIZES");
  if (!env || !*env) return {32, 64, 128};
  std::vector<std::size_t> out;
  std::stringstream ss(env);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(static_cast<std::size_t>(std::stoul(item)));
    } catch (const std::exception&) {
      throw DomainError("REFSOB_PROBE_SIZES must be a comma-separated list of sizes");
    }
  }
  return out;
}

SuiteResult suite_main(std::uint64_t seed) {
  json probes = json::array();
  bool pass = true;
  for (const auto& phi : {FunctionParameter(), log1()}) {
    ProbeOptions opt;
    opt.phi = phi;
    opt.seed = seed;
    opt.refinements = env_refinements();
    const BoundsProbe p = probe_main_theorem(heat_dirichlet(), opt);
    pass = pass && p.pass;
    probes.push_back(p.to_json());
  }
  json refused{{"problem", "backward_heat_dirichlet"}, {"refused", false}};
  try {
    ProbeOptions opt;
    opt.seed = seed;
    opt.refinements = {8, 16};
    (void)probe_main_theorem(backward_heat_dirichlet(), opt);
  } catch (const FailedPrecondition& e) {
    refused["refused"] = true;
    refused["reason"] = e.what();
  }
  pass = pass && refused["refused"].get<bool>();
  SuiteResult res;
  res.suite = "main";
  res.pass = pass;
  res.report = json{{"probes", probes}, {"backward_heat", refused}, {"pass", pass}};
  return res;
}

}  // namespace

std::vector<std::string> suite_names() {
  return {"lemma51",   "prop44",   "prop43", "lemma53_54", "embeddings",
          "hestenes", "parabolic", "varfun", "main",       "all"};
}

SuiteResult run_suite(const std::string& name, std::uint64_t seed,
                      const std::optional<std::string>& case_name) {
  auto single_case = [&](VerificationCase c) {
    if (case_name && *case_name != c.name) throw DomainError("unknown case '" + *case_name + "' for suite " + name);
    c.seed = seed;
    return c;
  };
  auto no_case = [&] {
    if (case_name && *case_name != "default")
      throw DomainError("suite " + name + " has only the default case");
  };
  if (name == "lemma51") {
    json cases = json::array();
    bool pass = true, any = false;
    for (auto c : lemma51_cases()) {
      if (case_name && *case_name != c.name) continue;
      any = true;
      c.seed = seed;
      const SuiteResult r = verify_lemma51(c);
      pass = pass && r.pass;
      cases.push_back(r.report);
    }
    if (!any) throw DomainError("unknown case '" + *case_name + "' for suite lemma51");
    return SuiteResult{name, pass, json{{"suite", name}, {"seed", seed}, {"cases", cases}, {"pass", pass}}};
  }
  SuiteResult r;
  if (name == "prop44") {
    no_case();
    r = verify_prop44(seed);
  } else if (name == "prop43") {
    no_case();
    r = verify_prop43(seed);
  } else if (name == "lemma53_54") {
    r = verify_lemma53_54(single_case(lemma53_54_default_case()));
  } else if (name == "embeddings") {
    VerificationCase c;
    c.phi = log1();
    r = verify_embeddings(single_case(c));
  } else if (name == "hestenes") {
    no_case();
    r = suite_hestenes();
  } else if (name == "parabolic") {
    no_case();
    r = suite_parabolic();
  } else if (name == "varfun") {
    no_case();
    r = suite_varfun();
  } else if (name == "main") {
    no_case();
    r = suite_main(seed);
  } else if (name == "all") {
    if (case_name) throw DomainError("suite all takes no case");
    json parts = json::object();
    bool pass = true;
    for (const auto& s : suite_names()) {
      if (s == "all") continue;
      const SuiteResult part = run_suite(s, seed);
      pass = pass && part.pass;
      parts[s] = part.report;
    }
    return SuiteResult{name, pass, json{{"suite", name}, {"seed", seed}, {"suites", parts}, {"pass", pass}}};
  } else {
    throw DomainError("unknown suite '" + name + "'");
  }
  r.report["suite"] = name;
  r.report["seed"] = seed;
  return r;
}

}  // namespace refsob
