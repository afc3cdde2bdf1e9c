#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "refsob/errors.hpp"
#include "refsob/interpolation.hpp"

using namespace refsob;

namespace {

CMatrix random_matrix(Eigen::Index n, std::uint64_t seed) {
  CMatrix a(n, n);
  for (Eigen::Index j = 0; j < n; ++j) a.col(j) = random_vector(n, seed + static_cast<std::uint64_t>(j));
  return a;
}

}  // namespace

TEST_SUITE("interpolation") {
  TEST_CASE("diagonal couple: closed-form psi norm") {
    Eigen::VectorXd g0(4), g1(4);
    g0 << 1.0, 2.0, 0.5, 3.0;
    g1 << 1.0, 8.0, 50.0, 3000.0;
    const InterpolationPsi psi(0.0, 1.0, 2.0, FunctionParameter::log_multiscale({1.0}));
    const InterpolatedSpace space(HilbertCouple::diagonal(g0, g1), psi.as_function());
    const CVector u = random_vector(4, 3);
    double acc = 0.0;
    for (int i = 0; i < 4; ++i) {
      const double lam = std::sqrt(g1[i] / g0[i]);
      acc += g0[i] * std::pow(psi(lam), 2) * std::norm(u[i]);
    }
    CHECK(space.norm(u) == doctest::Approx(std::sqrt(acc)).epsilon(1e-13));
  }

  TEST_CASE("dense couple congruent to a diagonal one has the same norms") {
    const Eigen::Index n = 5;
    Eigen::VectorXd d0(n), d1(n);
    d0 << 1, 2, 3, 4, 5;
    d1 << 2, 20, 300, 4000, 50000;
    const CMatrix A = random_matrix(n, 21) + 3.0 * CMatrix::Identity(n, n);
    const CMatrix g0 = A.adjoint() * d0.cast<cplx>().asDiagonal() * A;
    const CMatrix g1 = A.adjoint() * d1.cast<cplx>().asDiagonal() * A;
    const auto dense = HilbertCouple::dense(0.5 * (g0 + g0.adjoint()), 0.5 * (g1 + g1.adjoint()));
    const auto psi = InterpolationPsi(0, 1, 2, FunctionParameter::log_multiscale({-1.0})).as_function();
    const InterpolatedSpace a(dense, psi), b(HilbertCouple::diagonal(d0, d1), psi);
    for (std::uint64_t s = 0; s < 10; ++s) {
      const CVector u = random_vector(n, 100 + s);
      CHECK(a.norm(u) == doctest::Approx(b.norm(A * u)).epsilon(1e-9));
    }
  }

  TEST_CASE("generating operator realizes the second form") {
    const Eigen::Index n = 6;
    const CMatrix a = random_matrix(n, 5), c = random_matrix(n, 55);
    CMatrix g0 = a * a.adjoint() + CMatrix::Identity(n, n);
    CMatrix g1 = g0 + c * c.adjoint();
    const auto couple = HilbertCouple::dense(0.5 * (g0 + g0.adjoint()), 0.5 * (g1 + g1.adjoint()));
    const auto J = generating_operator(couple);
    CHECK(J.residual < 1e-10);
    for (std::uint64_t s = 0; s < 5; ++s) {
      const CVector u = random_vector(n, 7 + s);
      CHECK(couple.norm0(J.apply(couple, u)) == doctest::Approx(couple.norm1(u)).epsilon(1e-10));
    }
  }

  TEST_CASE("psi = 1 and psi = identity give the endpoint norms") {
    const Eigen::Index n = 4;
    const CMatrix a = random_matrix(n, 9);
    CMatrix g0 = a * a.adjoint() + CMatrix::Identity(n, n);
    CMatrix g1 = 4.0 * g0 + CMatrix::Identity(n, n);
    const auto couple = HilbertCouple::dense(0.5 * (g0 + g0.adjoint()), 0.5 * (g1 + g1.adjoint()));
    const InterpolatedSpace lo(couple, [](double) { return 1.0; });
    const InterpolatedSpace hi(couple, [](double r) { return r; });
    const CVector u = random_vector(n, 77);
    CHECK(lo.norm(u) == doctest::Approx(couple.norm0(u)).epsilon(1e-12));
    CHECK(hi.norm(u) == doctest::Approx(couple.norm1(u)).epsilon(1e-10));
  }

  TEST_CASE("embedding constants bound the norms") {
    std::vector<double> r;
    for (int k = 0; k < 40; ++k) r.push_back(std::sqrt(1.0 + k * k));
    const auto couple = fourier_couple(r, 1.0, 3.0);
    const InterpolatedSpace sp(couple, InterpolationPsi(1, 2, 3, FunctionParameter::log_multiscale({1.0})).as_function());
    const auto [c0, c1] = sp.embedding_constants();
    for (std::uint64_t s = 0; s < 20; ++s) {
      const CVector u = random_vector(couple.n(), s);
      CHECK(couple.norm0(u) <= c0 * sp.norm(u) * (1 + 1e-12));
      CHECK(sp.norm(u) <= c1 * couple.norm1(u) * (1 + 1e-12));
    }
  }

  TEST_CASE("couple validation") {
    CMatrix g = CMatrix::Identity(2, 2);
    g(0, 1) = 0.5;
    CHECK_THROWS_AS(HilbertCouple::dense(g, CMatrix::Identity(2, 2)), DomainError);
    CMatrix neg = -CMatrix::Identity(2, 2);
    CHECK_THROWS_AS(HilbertCouple::dense(CMatrix::Identity(2, 2), neg), DomainError);
    Eigen::VectorXd z(2);
    z << 1.0, 0.0;
    CHECK_THROWS_AS(HilbertCouple::diagonal(z, z), DomainError);
  }

  TEST_CASE("couple I/O round trip") {
    const CMatrix a = random_matrix(3, 4);
    CMatrix g0 = a * a.adjoint() + CMatrix::Identity(3, 3);
    g0 = 0.5 * (g0 + g0.adjoint());
    const auto c = HilbertCouple::dense(g0, 2.0 * g0);
    std::stringstream ss;
    write_couple(ss, c);
    const auto back = read_couple(ss);
    CHECK((back.G0() - c.G0()).norm() == 0.0);
    CHECK((back.G1() - c.G1()).norm() == 0.0);
    Eigen::VectorXd d(2);
    d << 1.0, 2.0;
    std::stringstream s2;
    write_couple(s2, HilbertCouple::diagonal(d, d));
    CHECK(read_couple(s2).is_diagonal());
  }

  TEST_CASE("direct sums: the norm splits as an l2 combination") {
    Eigen::VectorXd d0(3), d1(3);
    d0 << 1, 2, 3;
    d1 << 5, 60, 700;
    CMatrix g0 = CMatrix::Identity(2, 2) * 2.0, g1 = CMatrix::Identity(2, 2) * 9.0;
    g1(0, 1) = 1.0;
    g1(1, 0) = 1.0;
    const std::vector<HilbertCouple> parts{HilbertCouple::diagonal(d0, d1), HilbertCouple::dense(g0, g1)};
    const auto psi = InterpolationPsi(0, 1, 2, FunctionParameter::log_multiscale({1.0})).as_function();
    const auto rep = check_prop44(parts, psi, 100, 5);
    CHECK(rep.passed);
    CHECK(rep.max_rel_error < 1e-12);
    CHECK_FALSE(direct_sum(parts).is_diagonal());
  }

  TEST_CASE("complemented subspaces: identity has K = 1, non-projectors are refused") {
    const Eigen::Index n = 4;
    const CMatrix a = random_matrix(n, 31);
    CMatrix g0 = a * a.adjoint() + CMatrix::Identity(n, n);
    g0 = 0.5 * (g0 + g0.adjoint());
    const auto couple = HilbertCouple::dense(g0, 3.0 * g0 + CMatrix::Identity(n, n));
    const auto psi = InterpolationPsi(0, 1, 2, FunctionParameter()).as_function();
    CHECK(check_prop43(couple, CMatrix::Identity(n, n), psi, 20, 1).K == doctest::Approx(1.0));
    CHECK_THROWS_AS(check_prop43(couple, 0.5 * CMatrix::Identity(n, n), psi, 20, 1), ProjectorError);
  }

  TEST_CASE("Schur complement gives the quotient norm") {
    // Quotient of C^2 with G = I by span(e2): the class of e1 has norm 1.
    CMatrix g = CMatrix::Identity(2, 2);
    CMatrix bz(2, 1), by(2, 1);
    bz << 1.0, 0.0;
    by << 1.0, 1.0;
    by /= std::sqrt(2.0);
    // inf_c |e1 + c (1,1)/sqrt2|^2 = 1/2
    CHECK(schur_complement(g, bz, by)(0, 0).real() == doctest::Approx(0.5));
  }

  TEST_CASE("random vectors are reproducible") {
    CHECK((random_vector(5, 9) - random_vector(5, 9)).norm() == 0.0);
    CHECK((random_vector(5, 9) - random_vector(5, 10)).norm() > 0.0);
  }
}
