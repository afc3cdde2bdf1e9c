#include <cmath>
#include <random>

#include "doctest.h"
#include "refsob/errors.hpp"
#include "refsob/extension.hpp"

using namespace refsob;

namespace {

// Independent long-double Vandermonde solve for sum_j l_j (-1/j)^a = 1.
std::vector<long double> vandermonde_oracle(int k) {
  const int n = k + 1;
  std::vector<std::vector<long double>> a(n, std::vector<long double>(n + 1));
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) a[r][c] = std::pow(-1.0L / (c + 1), r);
    a[r][n] = 1.0L;
  }
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    for (int r = 0; r < n; ++r) {
      if (r == c) continue;
      const long double f = a[r][c] / a[c][c];
      for (int q = c; q <= n; ++q) a[r][q] -= f * a[c][q];
    }
  }
  std::vector<long double> x(n);
  for (int r = 0; r < n; ++r) x[r] = a[r][n] / a[r][r];
  return x;
}

GridFunction random_grid(const GridSpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  GridFunction g(spec);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = cplx(nd(rng), nd(rng));
  return g;
}

}  // namespace

TEST_SUITE("extension") {
  TEST_CASE("small orders have the known exact coefficients") {
    const auto h1 = hestenes_coeffs(1);
    REQUIRE(h1.lambda.size() == 2);
    CHECK(h1.lambda[0] == Rational(-3));
    CHECK(h1.lambda[1] == Rational(4));
    const auto h2 = hestenes_coeffs(2);
    CHECK(h2.lambda[0] == Rational(6));
    CHECK(h2.lambda[1] == Rational(-32));
    CHECK(h2.lambda[2] == Rational(27));
    CHECK(hestenes_coeffs(0).lambda[0] == Rational(1));
  }

  TEST_CASE("moments are exactly one and match a floating oracle") {
    for (int k = 0; k <= 10; ++k) {
      const auto h = hestenes_coeffs(k);
      for (int a = 0; a <= k; ++a) CHECK(h.moment(a) == Rational(1));
      const auto oracle = vandermonde_oracle(k);
      const auto d = h.as_double();
      for (int j = 0; j <= k; ++j)
        CHECK(d[j] == doctest::Approx(static_cast<double>(oracle[j])).epsilon(k <= 6 ? 1e-10 : 1e-5));
    }
    CHECK_THROWS_AS(hestenes_coeffs(13), CapExceeded);
    CHECK_THROWS_AS(hestenes_coeffs(-1), DomainError);
  }

  TEST_CASE("coefficients serialize as exact fractions") {
    const auto j = hestenes_coeffs(2).to_json();
    CHECK(j["lambda"][1] == "-32");
  }

  TEST_CASE("smooth step and cutoff") {
    CHECK(smooth_step(-0.1) == 0.0);
    CHECK(smooth_step(1.1) == 1.0);
    for (double u : {0.1, 0.3, 0.5, 0.77})
      CHECK(smooth_step(u) + smooth_step(1.0 - u) == doctest::Approx(1.0));
    const CutoffChi chi(0.9);
    CHECK(chi(-0.29) == 1.0);
    CHECK(chi(0.0) == 1.0);
    CHECK(chi(-0.61) == 0.0);
    CHECK(chi(-0.45) > 0.0);
    CHECK(chi(-0.45) < 1.0);
  }

  TEST_CASE("oracle extension equals v inside and reproduces polynomials near the boundary") {
    const int k = 3;
    const auto v = FunctionOracle::of([](double x, double t) { return cplx(1 + x * t - 2 * t * t * t, x); }, k);
    const auto spec = GridSpec::closed_2d(-1.0, 1.0, 9, -0.3, 1.0, 14);
    const auto e = extend_halfplane(v, k, 1.0, HalfPlaneSpec{Axis::t, Side::greater_than, 0.0}, spec);
    for (std::size_t i = 0; i < 9; ++i)
      for (std::size_t j = 0; j < 14; ++j) {
        const double x = spec.coord(0, i), t = spec.coord(1, j);
        CHECK(std::abs(e.at(i, j) - v(x, t)) < 1e-12);
      }
  }

  TEST_CASE("cutoff zeroes the extension far from the boundary") {
    const auto v = FunctionOracle::of([](double t) { return cplx(std::cos(t)); }, 4);
    const auto g = GridSpec::closed_1d(-2.0, 0.0, 21);
    const auto e = extend_halfline(v, 4, 1.5, HalfLineSpec{Side::greater_than, 0.0}, g);
    CHECK(std::abs(e[0]) == 0.0);   // t = -2 beyond 2 eps/3
    CHECK(std::abs(e[20] - 1.0) < 1e-15);
  }

  TEST_CASE("oracle failures surface as evaluation errors") {
    const auto v = FunctionOracle::of([](double) -> cplx { return cplx(NAN); }, 1);
    CHECK_THROWS_AS(extend_halfline(v, 1, 1.0, HalfLineSpec{}, GridSpec::closed_1d(-1, 1, 5)), EvaluationError);
  }

  TEST_CASE("grid extension matches the oracle on low-degree polynomials") {
    const int k = 2;
    const auto f = [](double x, double t) { return cplx(1.0 + 2 * t - t * t * t + x, 0.5 * t * t); };
    const auto spec = GridSpec::periodic_2d(-1.0, 1.0, 16, -1.0, 1.0, 16);
    const auto w = GridFunction::sample(spec, f);
    const auto grid_ext = extend_grid(w, k, 1.0, HalfPlaneSpec{Axis::t, Side::greater_than, 0.0});
    const auto oracle = extend_halfplane(FunctionOracle::of(f, k), k, 1.0,
                                         HalfPlaneSpec{Axis::t, Side::greater_than, 0.0}, spec);
    for (std::size_t i = 0; i < w.size(); ++i) CHECK(std::abs(grid_ext[i] - oracle[i]) < 1e-11);
  }

  TEST_CASE("Lagrange weights reproduce polynomials") {
    const std::vector<double> nodes{0.0, 0.3, 0.7, 1.0, 1.6};
    const auto w = lagrange_weights(nodes, 0.45);
    double acc = 0.0, one = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      acc += w[i] * std::pow(nodes[i], 4);
      one += w[i];
    }
    CHECK(one == doctest::Approx(1.0));
    CHECK(acc == doctest::Approx(std::pow(0.45, 4)));
  }

  TEST_CASE("projectors are idempotent and fix their range") {
    const auto spec = GridSpec::periodic_2d(-1.0, 2.25, 26, -1.0, 2.25, 26);
    const auto w = random_grid(spec, 11);
    const auto p = projector_plus(w, 3);
    const auto pp = projector_plus(p, 3);
    for (std::size_t i = 0; i < w.size(); ++i) CHECK(std::abs(pp[i] - p[i]) < 1e-9 * (1 + std::abs(p[i])));
    // P w vanishes for t <= 0.
    for (std::size_t i = 0; i < 26; ++i)
      for (std::size_t j = 0; j <= 8; ++j) CHECK(std::abs(p.at(i, j)) < 1e-12);

    const auto q = projector_Q(p, 3, 1.0, 1.0);
    const auto qq = projector_Q(q, 3, 1.0, 1.0);
    double scale = q.max_abs();
    for (std::size_t i = 0; i < w.size(); ++i) CHECK(std::abs(qq[i] - q[i]) <= 1e-10 * scale);
    // P0 w vanishes on the closed rectangle.
    for (std::size_t i = 8; i <= 16; ++i)
      for (std::size_t j = 8; j <= 16; ++j) CHECK(std::abs(q.at(i, j)) < 1e-9 * scale);

    const auto line = GridSpec::periodic_1d(-1.0, 2.0, 48);
    const auto h = random_grid(line, 12);
    const auto ph = projector_tau(h, 2, 1.0);
    const auto pph = projector_tau(ph, 2, 1.0);
    for (std::size_t i = 0; i < h.size(); ++i) CHECK(std::abs(pph[i] - ph[i]) < 1e-9 * (1 + std::abs(ph[i])));
  }

  TEST_CASE("projector_Q needs a large enough box") {
    const auto spec = GridSpec::periodic_2d(0.0, 2.0, 16, 0.0, 2.0, 16);
    CHECK_THROWS_AS(projector_Q(GridFunction(spec), 2, 1.0, 1.0), DomainError);
  }
}
