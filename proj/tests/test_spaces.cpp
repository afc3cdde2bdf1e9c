#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "refsob/errors.hpp"
#include "refsob/spaces.hpp"

using namespace refsob;

namespace {

constexpr double kPi = std::numbers::pi;

double bump(double u) { return (u > 0 && u < 1) ? std::exp(-1.0 / (u * (1.0 - u))) : 0.0; }

// Independent route: squared norm from the dense Gram matrix.
double gram_norm(const GridFunction& w, const SmoothnessIndex& idx) {
  std::vector<std::size_t> all(w.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const Eigen::MatrixXd g = gram_submatrix(w.spec(), gram_kernel(w.spec(), idx), all);
  Eigen::VectorXcd v(static_cast<Eigen::Index>(w.size()));
  for (std::size_t i = 0; i < w.size(); ++i) v[static_cast<Eigen::Index>(i)] = w[i];
  return std::sqrt(v.dot(g.cast<std::complex<double>>() * v).real());
}

}  // namespace

TEST_SUITE("spaces") {
  TEST_CASE("unit weight reproduces the discrete L2 norm") {
    const auto spec = GridSpec::periodic_2d(-1.0, 2.0, 24, -1.0, 2.0, 16);
    const auto w = GridFunction::sample(spec, [](double x, double t) { return cplx(1.0, x) * bump((x + 0.5) / 2) * bump(t / 1.5); });
    const SmoothnessIndex zero{0.0, FunctionParameter(), AnisotropyParams(1)};
    CHECK(norm_refined_aniso(w, zero) == doctest::Approx(w.l2_norm()).epsilon(1e-12));
  }

  TEST_CASE("single Fourier mode: closed-form 1-D norm") {
    const auto spec = GridSpec::periodic_1d(0.0, 2.0 * kPi, 32);
    const auto phi = FunctionParameter::log_multiscale({1.0});
    for (int k : {0, 3, 7}) {
      const auto w = GridFunction::sample(spec, [k](double x) { return std::exp(cplx(0.0, k * x)); });
      const SmoothnessIndex idx{1.5, phi, std::nullopt};
      const double r = std::sqrt(1.0 + k * k);
      const double expect = std::sqrt(2.0 * kPi) * std::pow(r, 1.5) * phi(r);
      CHECK(norm_refined_iso_1d(w, idx, 1.0) == doctest::Approx(expect).epsilon(1e-12));
    }
  }

  TEST_CASE("single Fourier mode: closed-form anisotropic norm") {
    const auto spec = GridSpec::periodic_2d(0.0, 2.0 * kPi, 16, 0.0, 2.0 * kPi, 16);
    for (int b : {1, 2}) {
      const int k = 3, j = 5;
      const auto w = GridFunction::sample(spec, [&](double x, double t) { return std::exp(cplx(0.0, k * x + j * t)); });
      const SmoothnessIndex idx{2.0, FunctionParameter(), AnisotropyParams(b)};
      const double gamma = 1.0 / (2.0 * b);
      const double r = std::sqrt(1.0 + k * k + std::pow(j, 2.0 * gamma));
      CHECK(norm_refined_aniso(w, idx, 1.0) == doctest::Approx(2.0 * kPi * r * r).epsilon(1e-12));
      // Derivative form: (int |w|^2 + |D_x^2 w|^2 + |d_t^{2 gamma} w|^2)^{1/2}.
      const double df = 2.0 * kPi * std::sqrt(1.0 + std::pow(k, 4) + std::pow(j, 4.0 * gamma));
      if (b == 1) CHECK(norm_sobolev_derivative_form(w, 2, AnisotropyParams(b), 1.0) == doctest::Approx(df).epsilon(1e-12));
    }
  }

  TEST_CASE("derivative-form equivalence bounds bracket the norm ratio") {
    const auto spec = GridSpec::periodic_2d(-1.0, 2.0, 32, -1.0, 2.0, 32);
    const auto [lo, hi] = derivative_form_equivalence(spec, 2, AnisotropyParams(1));
    CHECK(lo > 0.0);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> nd;
    for (int trial = 0; trial < 5; ++trial) {
      const double a = nd(rng), c = nd(rng);
      const auto w = GridFunction::sample(spec, [&](double x, double t) {
        return cplx(a, c * x) * bump((x + 0.8) / 2.5) * bump((t + 0.5) / 2.0);
      });
      const double q = std::pow(norm_refined_aniso(w, SmoothnessIndex{2.0, FunctionParameter(), AnisotropyParams(1)}) /
                                    norm_sobolev_derivative_form(w, 2, AnisotropyParams(1)), 2);
      CHECK(q >= lo * (1 - 1e-12));
      CHECK(q <= hi * (1 + 1e-12));
    }
  }

  TEST_CASE("Gram kernel route agrees with the FFT norm") {
    const auto spec = GridSpec::periodic_2d(-1.0, 2.0, 12, -1.0, 2.0, 12);
    const auto w = GridFunction::sample(spec, [](double x, double t) { return cplx(bump((x + 0.9) / 2.7) * t, bump((t + 0.9) / 2.7)); });
    const SmoothnessIndex idx{2.5, FunctionParameter::log_multiscale({-1.0}), AnisotropyParams(1)};
    CHECK(gram_norm(w, idx) == doctest::Approx(norm_refined_aniso(w, idx, 1.0)).epsilon(1e-10));
  }

  TEST_CASE("aliasing guard rejects data that reaches the box edge") {
    const auto spec = GridSpec::periodic_1d(0.0, 1.0, 16);
    const auto w = GridFunction::sample(spec, [](double) { return cplx(1.0); });
    CHECK_THROWS_AS(norm_refined_iso_1d(w, SmoothnessIndex{1.0, FunctionParameter(), std::nullopt}), DomainError);
  }

  TEST_CASE("norms are monotone in s for phi = 1") {
    const auto spec = GridSpec::periodic_1d(-1.0, 2.0, 64);
    const auto w = GridFunction::sample(spec, [](double t) { return cplx(bump((t + 0.5) / 2)); });
    double prev = 0.0;
    for (double s : {0.0, 0.5, 1.0, 2.0, 3.0}) {
      const double v = norm_refined_iso_1d(w, SmoothnessIndex{s, FunctionParameter(), std::nullopt});
      CHECK(v >= prev);
      prev = v;
    }
  }

  TEST_CASE("plus-support detection") {
    const auto spec = GridSpec::periodic_1d(-1.0, 1.0, 16);
    const auto plus = GridFunction::sample(spec, [](double t) { return cplx(bump(t)); });
    const auto not_plus = GridFunction::sample(spec, [](double t) { return cplx(bump(t + 0.5)); });
    CHECK(is_plus_supported(plus, 0.0));
    CHECK_FALSE(is_plus_supported(not_plus, 1e-3));
  }

  TEST_CASE("enlarged grid places the data at the budget offset") {
    const auto data = GridSpec::closed_2d(0.0, 1.0, 9, 0.0, 1.0, 9);
    ExtensionBudget b{4, 4, 4, 4};
    const GridSpec big = enlarged_grid(data, b);
    CHECK(big.count[0] % 2 == 0);
    CHECK(big.node_index(0, 0.0) == 4);
    CHECK(big.node_index(1, 0.0) == 4);
    CHECK(big.spacing(0) == doctest::Approx(data.spacing(0)));
  }

  TEST_CASE("1-D factor norm equals the dense Schur-complement oracle") {
    const auto data = GridSpec::closed_1d(0.0, 1.0, 9);
    const auto v = GridFunction::sample(data, [](double t) { return cplx(t * t, std::sin(t)); });
    const SmoothnessIndex idx{1.25, FunctionParameter::log_multiscale({1.0}), std::nullopt};
    ExtensionBudget budget;
    budget.below = 6;
    budget.above = 7;
    const double got = factor_norm_plus_interval(v, idx, budget);
    ExtensionBudget b2 = budget;
    const GridSpec big = enlarged_grid(data, b2);
    std::vector<std::size_t> fixed, freev;
    for (std::size_t j = 0; j < big.count[0]; ++j) {
      if (j < b2.below) continue;
      if (j < b2.below + 9) fixed.push_back(j);
      else freev.push_back(j);
    }
    const auto kern = gram_kernel(big, idx);
    const Eigen::MatrixXd gff = gram_submatrix(big, kern, fixed);
    std::vector<std::size_t> all = fixed;
    all.insert(all.end(), freev.begin(), freev.end());
    const Eigen::MatrixXd g = gram_submatrix(big, kern, all);
    const Eigen::Index nf = static_cast<Eigen::Index>(fixed.size());
    const Eigen::Index nr = static_cast<Eigen::Index>(freev.size());
    const Eigen::MatrixXd s = g.topLeftCorner(nf, nf) -
                              g.topRightCorner(nf, nr) * g.bottomRightCorner(nr, nr).ldlt().solve(g.bottomLeftCorner(nr, nf));
    Eigen::VectorXcd z(nf);
    for (Eigen::Index i = 0; i < nf; ++i) z[i] = v[static_cast<std::size_t>(i)];
    const double oracle = std::sqrt(z.dot(s.cast<std::complex<double>>() * z).real());
    CHECK(got == doctest::Approx(oracle).epsilon(1e-8));
    CHECK(gff.rows() == nf);
  }

  TEST_CASE("2-D factor norm: dense and CG agree, and minimality") {
    const auto data = GridSpec::closed_2d(0.0, 1.0, 9, 0.0, 1.0, 9);
    const auto u = GridFunction::sample(data, [](double x, double t) { return cplx(t * t * std::cos(x), t * x); });
    const SmoothnessIndex idx{1.0, FunctionParameter(), AnisotropyParams(1)};
    const ExtensionBudget budget{4, 4, 4, 4};
    const auto dense = factor_norm_plus_omega_detail(u, idx, budget);
    FactorSolverOptions cg;
    cg.dense_limit = 0;
    const auto iter = factor_norm_plus_omega_detail(u, idx, budget, cg);
    CHECK(dense.method == "dense");
    CHECK(iter.method == "cg");
    CHECK(iter.value == doctest::Approx(dense.value).epsilon(1e-7));
    // The minimizer is an admissible extension with that norm.
    CHECK(norm_refined_aniso(dense.minimizer, idx, 1.0) == doctest::Approx(dense.value).epsilon(1e-8));
    const GridFunction back = restrict_to_data(dense.minimizer, data, ExtensionBudget{4, 4, 4, 4});
    for (std::size_t i = 0; i < u.size(); ++i) CHECK(std::abs(back[i] - u[i]) < 1e-12);
    // Homogeneity.
    const double twice = factor_norm_plus_omega(cplx(2.0) * u, idx, budget);
    CHECK(twice == doctest::Approx(2.0 * dense.value).epsilon(1e-10));
  }

  TEST_CASE("factor norm is below the norm of any plus extension") {
    const auto spec = GridSpec::periodic_2d(-0.5, 1.625, 18, -0.5, 1.625, 18);
    const auto w = GridFunction::sample(spec, [](double x, double t) {
      return cplx(bump((x + 0.4) / 1.9) * bump(t / 1.5));
    });
    const auto data = GridSpec::closed_2d(0.0, 1.0, 9, 0.0, 1.0, 9);
    GridFunction u(data);
    for (std::size_t i = 0; i < 9; ++i)
      for (std::size_t j = 0; j < 9; ++j) u.at(i, j) = w.at(4 + i, 4 + j);
    const SmoothnessIndex idx{1.5, FunctionParameter::log_multiscale({1.0}), AnisotropyParams(1)};
    const double f = factor_norm_plus_omega(u, idx, ExtensionBudget{4, 5, 4, 5});
    CHECK(f <= norm_refined_aniso(w, idx) * (1 + 1e-9));
    CHECK(f > 0.0);
  }

  TEST_CASE("factor norm rejects periodic data") {
    const auto spec = GridSpec::periodic_1d(0.0, 1.0, 8);
    CHECK_THROWS_AS(factor_norm_plus_interval(GridFunction(spec), SmoothnessIndex{1.0, FunctionParameter(), std::nullopt},
                                              ExtensionBudget{0, 0, 4, 4}),
                    DomainError);
  }
}
