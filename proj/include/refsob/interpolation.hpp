#pragma once

// Finite-dimensional Hilbert couples, their generating operator J and the
// spectral calculus psi(J) defining interpolation with a function parameter.

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "refsob/varfun.hpp"

namespace refsob {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Two positive-definite Hermitian forms G0, G1 on C^n.  Diagonal couples
/// keep only the diagonals.
class HilbertCouple {
 public:
  static HilbertCouple diagonal(Eigen::VectorXd g0, Eigen::VectorXd g1);
  static HilbertCouple dense(CMatrix g0, CMatrix g1);

  Eigen::Index n() const { return is_diagonal() ? d0_.size() : m0_.rows(); }
  bool is_diagonal() const { return diagonal_; }
  const Eigen::VectorXd& diag0() const { return d0_; }
  const Eigen::VectorXd& diag1() const { return d1_; }
  /// Dense forms (materialized for diagonal couples).
  CMatrix G0() const;
  CMatrix G1() const;

  double norm0(const CVector& u) const;
  double norm1(const CVector& u) const;

  nlohmann::json header() const;

 private:
  bool diagonal_ = true;
  Eigen::VectorXd d0_, d1_;
  CMatrix m0_, m1_;
};

/// Block-diagonal couple; diagonal when every summand is.
HilbertCouple direct_sum(const std::vector<HilbertCouple>& couples);

/// File format: one JSON header line {"format":"refsob-couple","kind":
/// "diagonal"|"dense","n":n}, then little-endian 8-byte floats: g0, g1
/// (diagonal) or G0, G1 as row-major interleaved re/im (dense).
void write_couple(std::ostream& os, const HilbertCouple& c);
HilbertCouple read_couple(std::istream& is);
void save_couple(const std::string& path, const HilbertCouple& c);
HilbertCouple load_couple(const std::string& path);

/// J with (u, v)_1 = (Ju, Jv)_0: eigenvalues sqrt(mu) of G1 v = mu G0 v and
/// a G0-orthonormal eigenbasis (columns).  Diagonal couples skip the basis.
struct GeneratingOperator {
  Eigen::VectorXd eigenvalues;
  CMatrix basis;
  bool diagonal = false;
  double residual = 0.0;  // relative eigen-residual

  CVector apply(const HilbertCouple& c, const CVector& u) const;
};

/// NumericalError when the eigen-residual exceeds 1e-8.
GeneratingOperator generating_operator(const HilbertCouple& couple);

/// f(J) u for a function f positive on the spectrum.  DomainError when f is
/// not finite and positive at an eigenvalue.
CVector apply_function_of_J(const HilbertCouple& couple, const GeneratingOperator& J,
                            const RealFunction& f, const CVector& u);

class InterpolatedSpace {
 public:
  InterpolatedSpace(HilbertCouple couple, RealFunction psi);

  const HilbertCouple& couple() const { return couple_; }
  const GeneratingOperator& J() const { return J_; }

  CVector apply_psi(const CVector& u) const;
  double norm(const CVector& u) const;
  /// G_psi with ||u||^2 = u* G_psi u.
  CMatrix gram() const;

  /// C0 = 1 / min psi(lambda) and C1 = max psi(lambda) / lambda: the
  /// embedding constants ||u||_0 <= C0 ||u||_psi and ||u||_psi <= C1 ||u||_1.
  std::pair<double, double> embedding_constants() const;

 private:
  HilbertCouple couple_;
  RealFunction psi_;
  GeneratingOperator J_;
  Eigen::VectorXd psi_values_;
};

CVector apply_psi_J(const InterpolatedSpace& space, const CVector& u);
double interp_norm(const InterpolatedSpace& space, const CVector& u);

/// Standard complex normal vector (real and imaginary parts N(0, 1/2)).
CVector random_vector(Eigen::Index n, std::uint64_t seed);

struct Prop44Report {
  std::size_t vectors = 0;
  double max_rel_error = 0.0;
  bool passed = false;
  nlohmann::json to_json() const;
};

inline constexpr double kProp44Tol = 1e-10;

/// Compares the direct-sum interpolation norm with the l2 combination of
/// summand norms on random vectors.
Prop44Report check_prop44(const std::vector<HilbertCouple>& couples, const RealFunction& psi,
                          std::size_t vectors = 100, std::uint64_t seed = 1);

struct Prop43Report {
  Eigen::Index range_dim = 0;
  double idempotence_error = 0.0;
  /// ratio bounds ||.||_{[Y0,Y1]_psi} / ||.||_{X_psi} on the range
  double range_min_ratio = 1.0, range_max_ratio = 1.0;
  /// same for the factor couple against the factor of X_psi
  double factor_min_ratio = 1.0, factor_max_ratio = 1.0;
  double K = 1.0;
  std::size_t vectors = 0;
  nlohmann::json to_json() const;
};

/// P must satisfy P^2 = P to 1e-10 (relative); otherwise ProjectorError.
Prop43Report check_prop43(const HilbertCouple& couple, const CMatrix& P, const RealFunction& psi,
                          std::size_t vectors = 100, std::uint64_t seed = 1);

/// Orthonormal basis (columns) of the column space; rank threshold 1e-10.
CMatrix orthonormal_column_space(const CMatrix& m);
/// Gram form of the factor space: with the basis [bz, by], the Schur
/// complement of the by-block of g.
CMatrix schur_complement(const CMatrix& g, const CMatrix& bz, const CMatrix& by);

/// Diagonal couple r^{2 s0}, r^{2 s1} over the given weights r >= 1.
HilbertCouple fourier_couple(const std::vector<double>& r, double s0, double s1);

}  // namespace refsob
