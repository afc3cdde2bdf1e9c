#include "refsob/interpolation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "detail/binary_io.hpp"
#include "refsob/errors.hpp"

namespace refsob {

namespace {

constexpr double kEigenResidualTol = 1e-8;

void require_positive_hermitian(const CMatrix& g, const char* name) {
  if (g.rows() != g.cols() || g.rows() == 0) throw DomainError(std::string(name) + " must be square");
  const double scale = std::max(g.norm(), 1e-300);
  if ((g - g.adjoint()).norm() > 1e-12 * scale)
    throw DomainError(std::string(name) + " is not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(g, Eigen::EigenvaluesOnly);
  if (!(es.eigenvalues().minCoeff() > 0.0))
    throw DomainError(std::string(name) + " is not positive definite");
}

}  // namespace

HilbertCouple HilbertCouple::diagonal(Eigen::VectorXd g0, Eigen::VectorXd g1) {
  if (g0.size() != g1.size() || g0.size() == 0) throw DomainError("couple diagonals differ in size");
  for (Eigen::Index i = 0; i < g0.size(); ++i)
    if (!(g0[i] > 0.0) || !(g1[i] > 0.0) || !std::isfinite(g0[i]) || !std::isfinite(g1[i]))
      throw DomainError("couple diagonals must be finite and positive");
  HilbertCouple c;
  c.diagonal_ = true;
  c.d0_ = std::move(g0);
  c.d1_ = std::move(g1);
  return c;
}

HilbertCouple HilbertCouple::dense(CMatrix g0, CMatrix g1) {
  if (g0.rows() != g1.rows() || g0.cols() != g1.cols()) throw DomainError("couple forms differ in size");
  require_positive_hermitian(g0, "G0");
  require_positive_hermitian(g1, "G1");
  HilbertCouple c;
  c.diagonal_ = false;
  c.m0_ = std::move(g0);
  c.m1_ = std::move(g1);
  return c;
}

CMatrix HilbertCouple::G0() const {
  return diagonal_ ? CMatrix(d0_.cast<cplx>().asDiagonal()) : m0_;
}

CMatrix HilbertCouple::G1() const {
  return diagonal_ ? CMatrix(d1_.cast<cplx>().asDiagonal()) : m1_;
}

double HilbertCouple::norm0(const CVector& u) const {
  if (diagonal_) return std::sqrt((d0_.array() * u.array().abs2()).sum());
  return std::sqrt(std::max(0.0, u.dot(m0_ * u).real()));
}

double HilbertCouple::norm1(const CVector& u) const {
  if (diagonal_) return std::sqrt((d1_.array() * u.array().abs2()).sum());
  return std::sqrt(std::max(0.0, u.dot(m1_ * u).real()));
}

nlohmann::json HilbertCouple::header() const {
  return {{"format", "refsob-couple"}, {"kind", diagonal_ ? "diagonal" : "dense"}, {"n", n()}};
}

HilbertCouple direct_sum(const std::vector<HilbertCouple>& couples) {
  if (couples.empty()) throw DomainError("direct sum of no couples");
  Eigen::Index n = 0;
  bool all_diag = true;
  for (const auto& c : couples) {
    n += c.n();
    all_diag = all_diag && c.is_diagonal();
  }
  if (all_diag) {
    Eigen::VectorXd g0(n), g1(n);
    Eigen::Index off = 0;
    for (const auto& c : couples) {
      g0.segment(off, c.n()) = c.diag0();
      g1.segment(off, c.n()) = c.diag1();
      off += c.n();
    }
    return HilbertCouple::diagonal(std::move(g0), std::move(g1));
  }
  CMatrix g0 = CMatrix::Zero(n, n), g1 = CMatrix::Zero(n, n);
  Eigen::Index off = 0;
  for (const auto& c : couples) {
    g0.block(off, off, c.n(), c.n()) = c.G0();
    g1.block(off, off, c.n(), c.n()) = c.G1();
    off += c.n();
  }
  return HilbertCouple::dense(std::move(g0), std::move(g1));
}

// ---- I/O -----------------------------------------------------------------

void write_couple(std::ostream& os, const HilbertCouple& c) {
  os << c.header().dump() << '\n';
  if (c.is_diagonal()) {
    for (Eigen::Index i = 0; i < c.n(); ++i) detail::put_f64(os, c.diag0()[i]);
    for (Eigen::Index i = 0; i < c.n(); ++i) detail::put_f64(os, c.diag1()[i]);
    return;
  }
  for (const CMatrix& g : {c.G0(), c.G1()})
    for (Eigen::Index i = 0; i < g.rows(); ++i)
      for (Eigen::Index j = 0; j < g.cols(); ++j) {
        detail::put_f64(os, g(i, j).real());
        detail::put_f64(os, g(i, j).imag());
      }
}

HilbertCouple read_couple(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ParseError("couple file: missing header");
  nlohmann::json h;
  try {
    h = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("couple file header: ") + e.what());
  }
  if (h.value("format", "") != "refsob-couple") throw ParseError("couple file: wrong format tag");
  const auto n = h.at("n").get<Eigen::Index>();
  if (n <= 0) throw ParseError("couple file: bad dimension");
  const std::string kind = h.at("kind").get<std::string>();
  if (kind == "diagonal") {
    Eigen::VectorXd g0(n), g1(n);
    for (Eigen::Index i = 0; i < n; ++i) g0[i] = detail::get_f64(is);
    for (Eigen::Index i = 0; i < n; ++i) g1[i] = detail::get_f64(is);
    return HilbertCouple::diagonal(std::move(g0), std::move(g1));
  }
  if (kind != "dense") throw ParseError("couple file: unknown kind '" + kind + "'");
  CMatrix g[2] = {CMatrix(n, n), CMatrix(n, n)};
  for (auto& m : g)
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) {
        const double re = detail::get_f64(is);
        const double im = detail::get_f64(is);
        m(i, j) = {re, im};
      }
  return HilbertCouple::dense(std::move(g[0]), std::move(g[1]));
}

void save_couple(const std::string& path, const HilbertCouple& c) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open '" + path + "' for writing");
  write_couple(os, c);
}

HilbertCouple load_couple(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open '" + path + "'");
  return read_couple(is);
}

// ---- generating operator -------------------------------------------------

CVector GeneratingOperator::apply(const HilbertCouple& c, const CVector& u) const {
  if (diagonal) return (eigenvalues.cast<cplx>().array() * u.array()).matrix();
  const CVector coef = basis.adjoint() * (c.G0() * u);
  return basis * (eigenvalues.cast<cplx>().array() * coef.array()).matrix();
}

GeneratingOperator generating_operator(const HilbertCouple& couple) {
  GeneratingOperator J;
  if (couple.is_diagonal()) {
    J.diagonal = true;
    J.eigenvalues = (couple.diag1().array() / couple.diag0().array()).sqrt().matrix();
    return J;
  }
  const CMatrix g0 = couple.G0(), g1 = couple.G1();
  Eigen::LLT<CMatrix> llt(g0);
  if (llt.info() != Eigen::Success) throw NumericalError("Cholesky factorization of G0 failed");
  const CMatrix linv = llt.matrixL().solve(CMatrix::Identity(g0.rows(), g0.cols()));
  CMatrix a = linv * g1 * linv.adjoint();
  a = 0.5 * (a + a.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(a);
  if (es.info() != Eigen::Success) throw NumericalError("Hermitian eigensolve failed");
  const Eigen::VectorXd mu = es.eigenvalues();
  if (!(mu.minCoeff() > 0.0)) throw NumericalError("generalized eigenvalue is not positive");
  J.basis = linv.adjoint() * es.eigenvectors();
  J.eigenvalues = mu.cwiseSqrt();
  const CMatrix lhs = g1 * J.basis;
  const CMatrix rhs = g0 * J.basis * mu.cast<cplx>().asDiagonal();
  J.residual = (lhs - rhs).norm() / std::max(lhs.norm(), 1e-300);
  if (!(J.residual <= kEigenResidualTol))
    throw NumericalError("generalized eigen-residual above 1e-8");
  return J;
}

namespace {

Eigen::VectorXd evaluate_on_spectrum(const RealFunction& f, const Eigen::VectorXd& lambda) {
  Eigen::VectorXd out(lambda.size());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    const double v = f(lambda[i]);
    if (!(v > 0.0) || !std::isfinite(v))
      throw DomainError("function is not finite and positive at a spectral point");
    out[i] = v;
  }
  return out;
}

}  // namespace

CVector apply_function_of_J(const HilbertCouple& couple, const GeneratingOperator& J,
                            const RealFunction& f, const CVector& u) {
  const Eigen::VectorXd fv = evaluate_on_spectrum(f, J.eigenvalues);
  if (J.diagonal) return (fv.cast<cplx>().array() * u.array()).matrix();
  const CVector coef = J.basis.adjoint() * (couple.G0() * u);
  return J.basis * (fv.cast<cplx>().array() * coef.array()).matrix();
}

InterpolatedSpace::InterpolatedSpace(HilbertCouple couple, RealFunction psi)
    : couple_(std::move(couple)), psi_(std::move(psi)), J_(generating_operator(couple_)) {
  psi_values_ = evaluate_on_spectrum(psi_, J_.eigenvalues);
}

CVector InterpolatedSpace::apply_psi(const CVector& u) const {
  if (u.size() != couple_.n()) throw DomainError("vector size does not match the couple");
  if (J_.diagonal) return (psi_values_.cast<cplx>().array() * u.array()).matrix();
  const CVector coef = J_.basis.adjoint() * (couple_.G0() * u);
  return J_.basis * (psi_values_.cast<cplx>().array() * coef.array()).matrix();
}

double InterpolatedSpace::norm(const CVector& u) const {
  if (u.size() != couple_.n()) throw DomainError("vector size does not match the couple");
  if (J_.diagonal)
    return std::sqrt((couple_.diag0().array() * psi_values_.array().square() * u.array().abs2()).sum());
  const CVector coef = J_.basis.adjoint() * (couple_.G0() * u);
  return (psi_values_.cast<cplx>().array() * coef.array()).matrix().norm();
}

CMatrix InterpolatedSpace::gram() const {
  if (J_.diagonal)
    return CMatrix((couple_.diag0().array() * psi_values_.array().square()).matrix().cast<cplx>().asDiagonal());
  const CMatrix b = couple_.G0() * J_.basis;
  return b * psi_values_.array().square().matrix().cast<cplx>().asDiagonal() * b.adjoint();
}

std::pair<double, double> InterpolatedSpace::embedding_constants() const {
  const double c0 = 1.0 / psi_values_.minCoeff();
  const double c1 = (psi_values_.array() / J_.eigenvalues.array()).maxCoeff();
  return {c0, c1};
}

CVector apply_psi_J(const InterpolatedSpace& space, const CVector& u) { return space.apply_psi(u); }
double interp_norm(const InterpolatedSpace& space, const CVector& u) { return space.norm(u); }

CVector random_vector(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
  CVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double re = nd(rng);
    const double im = nd(rng);
    v[i] = {re, im};
  }
  return v;
}

// ---- Proposition checks --------------------------------------------------

nlohmann::json Prop44Report::to_json() const {
  return {{"vectors", vectors}, {"max_rel_error", max_rel_error}, {"passed", passed}};
}

Prop44Report check_prop44(const std::vector<HilbertCouple>& couples, const RealFunction& psi,
                          std::size_t vectors, std::uint64_t seed) {
  const InterpolatedSpace sum(direct_sum(couples), psi);
  std::vector<InterpolatedSpace> parts;
  parts.reserve(couples.size());
  for (const auto& c : couples) parts.emplace_back(c, psi);
  Prop44Report rep;
  rep.vectors = vectors;
  for (std::size_t v = 0; v < vectors; ++v) {
    const CVector u = random_vector(sum.couple().n(), seed + v);
    double acc = 0.0;
    Eigen::Index off = 0;
    for (const auto& p : parts) {
      const double nv = p.norm(u.segment(off, p.couple().n()));
      acc += nv * nv;
      off += p.couple().n();
    }
    const double lhs = sum.norm(u), rhs = std::sqrt(acc);
    rep.max_rel_error = std::max(rep.max_rel_error, std::abs(lhs - rhs) / rhs);
  }
  rep.passed = rep.max_rel_error <= kProp44Tol;
  return rep;
}

nlohmann::json Prop43Report::to_json() const {
  return {{"range_dim", range_dim},
          {"idempotence_error", idempotence_error},
          {"range_min_ratio", range_min_ratio},
          {"range_max_ratio", range_max_ratio},
          {"factor_min_ratio", factor_min_ratio},
          {"factor_max_ratio", factor_max_ratio},
          {"K", K},
          {"vectors", vectors}};
}

// Orthonormal basis of the column space of m.
CMatrix orthonormal_column_space(const CMatrix& m) {
  Eigen::ColPivHouseholderQR<CMatrix> qr(m);
  qr.setThreshold(1e-10);
  const auto r = qr.rank();
  const CMatrix q = qr.householderQ() * CMatrix::Identity(m.rows(), r);
  return q;
}

CMatrix schur_complement(const CMatrix& g, const CMatrix& bz, const CMatrix& by) {
  const CMatrix gzz = bz.adjoint() * g * bz;
  if (by.cols() == 0) return gzz;
  const CMatrix gzy = bz.adjoint() * g * by;
  const CMatrix gyy = by.adjoint() * g * by;
  CMatrix s = gzz - gzy * gyy.ldlt().solve(gzy.adjoint());
  return 0.5 * (s + s.adjoint());
}

namespace {

void ratio_bounds(const HilbertCouple& sub, const CMatrix& target_gram, const RealFunction& psi,
                  std::size_t vectors, std::uint64_t seed, double& lo, double& hi) {
  const InterpolatedSpace space(sub, psi);
  lo = INFINITY;
  hi = 0.0;
  for (std::size_t v = 0; v < vectors; ++v) {
    const CVector c = random_vector(sub.n(), seed + v);
    const double a = space.norm(c);
    const double b = std::sqrt(std::max(0.0, c.dot(target_gram * c).real()));
    const double r = a / b;
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
}

}  // namespace

Prop43Report check_prop43(const HilbertCouple& couple, const CMatrix& P, const RealFunction& psi,
                          std::size_t vectors, std::uint64_t seed) {
  const Eigen::Index n = couple.n();
  if (P.rows() != n || P.cols() != n) throw ProjectorError("projector size does not match the couple");
  if (!P.allFinite()) throw ProjectorError("projector has non-finite entries");
  Prop43Report rep;
  rep.vectors = vectors;
  rep.idempotence_error = (P * P - P).norm() / std::max(P.norm(), 1.0);
  if (rep.idempotence_error > 1e-10) throw ProjectorError("P is not idempotent");

  const CMatrix by = orthonormal_column_space(P);
  const CMatrix bz = orthonormal_column_space(CMatrix::Identity(n, n) - P);
  if (by.cols() + bz.cols() != n) throw ProjectorError("range and kernel of P do not span the space");
  rep.range_dim = by.cols();

  const InterpolatedSpace full(couple, psi);
  const CMatrix gpsi = full.gram();
  const CMatrix g0 = couple.G0(), g1 = couple.G1();

  if (by.cols() > 0) {
    const CMatrix y0 = by.adjoint() * g0 * by, y1 = by.adjoint() * g1 * by;
    const auto sub = HilbertCouple::dense(0.5 * (y0 + y0.adjoint()), 0.5 * (y1 + y1.adjoint()));
    ratio_bounds(sub, by.adjoint() * gpsi * by, psi, vectors, seed, rep.range_min_ratio,
                 rep.range_max_ratio);
  }
  if (bz.cols() > 0) {
    const auto quot = HilbertCouple::dense(schur_complement(g0, bz, by), schur_complement(g1, bz, by));
    ratio_bounds(quot, schur_complement(gpsi, bz, by), psi, vectors, seed + 7919,
                 rep.factor_min_ratio, rep.factor_max_ratio);
  }
  rep.K = std::max({rep.range_max_ratio, 1.0 / rep.range_min_ratio, rep.factor_max_ratio,
                    1.0 / rep.factor_min_ratio});
  return rep;
}

HilbertCouple fourier_couple(const std::vector<double>& r, double s0, double s1) {
  Eigen::VectorXd g0(static_cast<Eigen::Index>(r.size())), g1(g0.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    g0[static_cast<Eigen::Index>(i)] = std::pow(r[i], 2.0 * s0);
    g1[static_cast<Eigen::Index>(i)] = std::pow(r[i], 2.0 * s1);
  }
  return HilbertCouple::diagonal(std::move(g0), std::move(g1));
}

}  // namespace refsob
