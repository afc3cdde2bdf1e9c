#include <cmath>
#include <complex>

#include "doctest.h"
#include "refsob/errors.hpp"
#include "refsob/parabolic.hpp"

using namespace refsob;

namespace {
const std::string kDir = REFSOB_PROBLEMS_DIR;
}

TEST_SUITE("parabolic") {
  TEST_CASE("polynomial grammar evaluates and round-trips") {
    const auto p = Polynomial2::parse("-2.5*x^2*t + 3i - t");
    const double x = 0.7, t = 0.4;
    const cplx expect = -2.5 * x * x * t + cplx(0, 3) - t;
    CHECK(std::abs(p(x, t) - expect) < 1e-14);
    const auto back = Polynomial2::parse(p.str());
    CHECK(std::abs(back(x, t) - expect) < 1e-14);
    const auto q = Polynomial2::parse("x + 2i*x");
    CHECK(std::abs(q(2.0, 0.0) - cplx(2, 4)) < 1e-14);
    CHECK_THROWS_AS(Polynomial2::parse("x^^2"), ParseError);
    CHECK(Polynomial2::parse("1 - 2*x*t").magnitude_bound(2.0, 3.0) == doctest::Approx(13.0));
  }

  TEST_CASE("heat symbol and its roots") {
    const auto heat = heat_dirichlet();
    const cplx p(0.3, 0.8);
    CHECK(std::abs(principal_symbol_A(heat, 0.5, 0.5, 1.7, p) - (p + 1.7 * 1.7)) < 1e-14);
    const RootSplit r = roots_in_xi(heat, 0.5, 0.5, p);
    REQUIRE(r.upper.size() == 1);
    REQUIRE(r.lower.size() == 1);
    // xi^2 + p = 0: xi = +-i sqrt(p)
    const cplx root = cplx(0, 1) * std::sqrt(p);
    const cplx up = root.imag() > 0 ? root : -root;
    CHECK(std::abs(r.upper[0] - up) < 1e-12);
    CHECK(std::abs(r.lower[0] + up) < 1e-12);
  }

  TEST_CASE("polynomial remainder and root products") {
    // (xi^3 + 2 xi + 5) mod (xi - 1)(xi - 2)
    const auto den = poly_from_roots({1.0, 2.0});
    CHECK(std::abs(den[0] - 2.0) < 1e-15);
    CHECK(std::abs(den[1] + 3.0) < 1e-15);
    const auto rem = poly_remainder({5.0, 2.0, 0.0, 1.0}, den);
    // remainder r(xi) = a xi + b with r(1) = 8, r(2) = 17
    CHECK(std::abs(rem[1] - 9.0) < 1e-12);
    CHECK(std::abs(rem[0] + 1.0) < 1e-12);
  }

  TEST_CASE("parabolicity of the shipped problems") {
    const auto heat = check_parabolicity(ParabolicProblem::load(kDir + "/heat.prob"));
    CHECK(heat.parabolic());
    CHECK(heat.cond_i.margin >= 0.1);
    CHECK(heat.cond_ii.margin >= 0.1);
    CHECK(heat.cond_iii.margin >= 0.1);
    CHECK(heat.sigma0 == 2);
    const auto back = check_parabolicity(ParabolicProblem::load(kDir + "/backward_heat.prob"));
    CHECK_FALSE(back.cond_i.pass);
    CHECK(back.cond_i.has_witness);
    // The witness really is a zero of the symbol.
    const auto bh = backward_heat_dirichlet();
    const auto& w = back.cond_i.witness;
    CHECK(std::abs(principal_symbol_A(bh, w.x, w.t, w.xi.real(), w.p)) < 1e-6);
    CHECK(check_parabolicity(ParabolicProblem::load(kDir + "/heat_neumann.prob")).cond_iii.pass);
    CHECK(check_parabolicity(ParabolicProblem::load(kDir + "/variable_heat.prob")).parabolic());
    const auto dxx = ParabolicProblem::load(kDir + "/heat_dxx_boundary.prob");
    CHECK(check_parabolicity(dxx).parabolic());
    CHECK(sigma0(dxx) == 4);
  }

  TEST_CASE("boundary operator with a null principal part fails the covering condition") {
    ParabolicProblem p(1, 1, {1}, 1.0, 1.0);
    const auto one = [](double, double) { return cplx(1.0); };
    p.add_A_term(0, 1, one);
    p.add_A_term(2, 0, one);
    // B = D_x + 0 at x = 0 but a zero-order term only at x = l: principal part of order 1 vanishes.
    p.add_B_term(1, 0, 1, 0, one);
    p.add_B_term(1, 1, 0, 0, one);
    CHECK_FALSE(check_condition_iii(p).pass);
  }

  TEST_CASE("sigma0 is the exhaustive minimum") {
    for (const auto& prob : {heat_dirichlet(), heat_neumann()}) {
      const int s0 = sigma0(prob);
      CHECK(sigma0_admissible(prob, s0));
      for (int s = 0; s < s0; ++s) CHECK_FALSE(sigma0_admissible(prob, s));
    }
  }

  TEST_CASE("order constraints are enforced") {
    ParabolicProblem p(1, 1, {0}, 1.0, 1.0);
    CHECK_THROWS_AS(p.add_A_term(3, 0, [](double, double) { return cplx(1); }), DomainError);
    CHECK_THROWS_AS(p.add_B_term(1, 0, 1, 0, [](double, double) { return cplx(1); }), DomainError);
  }

  TEST_CASE("Fornberg weights") {
    const auto w = fornberg_weights({-1.0, 0.0, 1.0}, 0.0, 2);
    CHECK(w[0] == doctest::Approx(1.0));
    CHECK(w[1] == doctest::Approx(-2.0));
    CHECK(w[2] == doctest::Approx(1.0));
    const std::vector<double> nodes{0.0, 0.1, 0.25, 0.4, 0.6};
    const auto d3 = fornberg_weights(nodes, 0.2, 3);
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) acc += d3[i] * std::pow(nodes[i], 4);
    CHECK(acc == doctest::Approx(24.0 * 0.2).epsilon(1e-9));
  }

  TEST_CASE("differentiation is exact on polynomials and checks its order") {
    const auto spec = GridSpec::closed_2d(0.0, 1.0, 21, 0.0, 1.0, 21);
    const auto u = GridFunction::sample(spec, [](double x, double t) { return cplx(x * x * x * t, t * t); });
    const auto ux2 = differentiate(u, 0, 2);
    const auto ut = differentiate(u, 1, 1);
    for (std::size_t i = 0; i < 21; ++i)
      for (std::size_t j = 0; j < 21; ++j) {
        const double x = spec.coord(0, i), t = spec.coord(1, j);
        CHECK(std::abs(ux2.at(i, j) - cplx(6 * x * t, 0)) < 1e-8);
        CHECK(std::abs(ut.at(i, j) - cplx(x * x * x, 2 * t)) < 1e-8);
      }
    CHECK_THROWS_AS(differentiate(u, 0, 13), SchemeOrderError);
  }

  TEST_CASE("apply_AB on a polynomial: heat with Dirichlet and Neumann data") {
    const auto spec = GridSpec::closed_2d(0.0, 1.0, 17, 0.0, 1.0, 17);
    const auto u = GridFunction::sample(spec, [](double x, double t) { return cplx(t * t * (x * x * x + 2.0), t * x); });
    const auto ab = apply_AB(heat_dirichlet(), u);
    for (std::size_t i = 0; i < 17; ++i)
      for (std::size_t j = 0; j < 17; ++j) {
        const double x = spec.coord(0, i), t = spec.coord(1, j);
        // u_t + D_x^2 u = u_t - u_xx
        const cplx f = cplx(2 * t * (x * x * x + 2.0), x) - cplx(6 * x * t * t, 0.0);
        CHECK(std::abs(ab.f.at(i, j) - f) < 1e-8);
      }
    REQUIRE(ab.g.size() == 2);
    for (std::size_t j = 0; j < 17; ++j) {
      const double t = spec.coord(1, j);
      CHECK(std::abs(ab.g[0][j] - cplx(2 * t * t, 0.0)) < 1e-12);
      CHECK(std::abs(ab.g[1][j] - cplx(3 * t * t, t)) < 1e-12);
    }
    const auto nb = apply_AB(heat_neumann(), u);
    for (std::size_t j = 0; j < 17; ++j) {
      const double t = spec.coord(1, j);
      // D_x u = i u_x
      CHECK(std::abs(nb.g[0][j] - cplx(0, 1) * cplx(0.0, t)) < 1e-8);
      CHECK(std::abs(nb.g[1][j] - cplx(0, 1) * cplx(3 * t * t, t)) < 1e-8);
    }
  }

  TEST_CASE("problem JSON round trip keeps the coefficients") {
    const auto p = ParabolicProblem::load(kDir + "/variable_heat.prob");
    const auto q = ParabolicProblem::from_json(p.to_json());
    const cplx pp(0.2, 0.9);
    CHECK(std::abs(principal_symbol_A(p, 0.3, 0.6, 1.1, pp) - principal_symbol_A(q, 0.3, 0.6, 1.1, pp)) < 1e-14);
    CHECK_THROWS_AS(ParabolicProblem::from_json(nlohmann::json{{"b", 1}}), ParseError);
  }
}
