#include <cmath>
#include <random>

#include "doctest.h"
#include "refsob/errors.hpp"
#include "refsob/varfun.hpp"

using namespace refsob;

TEST_SUITE("varfun") {
  TEST_CASE("log multiscale matches direct iterated logarithms") {
    const auto phi = FunctionParameter::log_multiscale({1.0, -1.0});
    for (double r : {1e7, 1e30, 1e200}) {
      const double expect = std::log(r) / std::log(std::log(r));
      CHECK(phi(r) == doctest::Approx(expect).epsilon(1e-14));
    }
    // held at the threshold value below it
    const double floor = log_multiscale_rmin(2);
    CHECK(phi(1e2) == doctest::Approx(phi(floor)).epsilon(1e-14));
    const auto one = FunctionParameter::log_multiscale({2.0});
    CHECK(one(1e10) == doctest::Approx(std::pow(std::log(1e10), 2.0)).epsilon(1e-14));
  }

  TEST_CASE("log multiscale is held constant below its threshold") {
    const auto phi = FunctionParameter::log_multiscale({1.0});
    CHECK(phi(1.0) == doctest::Approx(std::exp(1.0)));
    CHECK(phi(5.0) == doctest::Approx(std::exp(1.0)));
    CHECK(phi.domain_floor() == doctest::Approx(std::exp(std::exp(1.0))));
  }

  TEST_CASE("threshold is not representable for three iterated logs") {
    CHECK_THROWS_AS(log_multiscale_rmin(3), DomainError);
    CHECK(log_multiscale_rmin(1) == doctest::Approx(std::exp(std::exp(1.0))));
  }

  TEST_CASE("evaluation below 1 is a domain error") {
    CHECK_THROWS_AS(FunctionParameter::constant_one()(0.5), DomainError);
  }

  TEST_CASE("descriptor and JSON round trips") {
    for (const char* text : {"one", "log[1]", "log[1,-1]", "log[-1]"}) {
      const auto phi = FunctionParameter::parse(text);
      CHECK(phi.describe() == text);
      const auto back = FunctionParameter::from_json(phi.to_json());
      CHECK(back.describe() == text);
      CHECK(back(1e7) == doctest::Approx(phi(1e7)));
    }
    CHECK_THROWS_AS(FunctionParameter::parse("log[1"), ParseError);
  }

  TEST_CASE("tabulated parameter interpolates log-log and clamps") {
    const auto phi = FunctionParameter::tabulated({{1.0, 1.0}, {100.0, 10.0}});
    CHECK(phi(10.0) == doctest::Approx(std::sqrt(10.0)));
    CHECK(phi(1e6) == doctest::Approx(10.0));
  }

  TEST_CASE("psi equals r^theta phi(r^{1/(s1-s0)})") {
    const auto phi = FunctionParameter::log_multiscale({1.0});
    const InterpolationPsi psi(2.0, 3.0, 6.0, phi);
    CHECK(psi.theta() == doctest::Approx(0.25));
    for (double r : {1e8, 1e40}) {
      const double expect = std::pow(r, 0.25) * std::log(std::pow(r, 0.25));
      CHECK(psi(r) == doctest::Approx(expect).epsilon(1e-12));
    }
    CHECK(psi(0.5) == doctest::Approx(phi(1.0)));
  }

  TEST_CASE("class M accepts logarithms and rejects powers") {
    const auto grid = default_limit_grid();
    const auto lam = default_lambdas();
    CHECK(check_class_M(FunctionParameter::log_multiscale({1.0}), grid, lam).verdict ==
          Verdict::slowly_varying);
    CHECK(check_class_M(FunctionParameter::log_multiscale({1.0, -1.0}), grid, lam).verdict ==
          Verdict::slowly_varying);
    const auto pw = FunctionParameter::power_times_slow(0.3, FunctionParameter());
    CHECK(check_class_M(pw, grid, lam).verdict == Verdict::rejected);
  }

  TEST_CASE("regular variation of a power has the power as index") {
    const auto grid = default_limit_grid();
    const auto rep = check_regular_variation([](double r) { return std::pow(r, 0.7); }, grid,
                                             default_lambdas());
    CHECK(rep.verdict == Verdict::regularly_varying);
    CHECK(rep.estimated_index == doctest::Approx(0.7).epsilon(1e-6));
  }

  TEST_CASE("index estimate of pure powers is exact") {
    std::vector<double> grid;
    for (int i = 0; i <= 40; ++i) grid.push_back(std::pow(10.0, 2.0 + 2.0 * i));
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 10; ++i) {
      const double a = u(rng);
      CHECK(estimate_variation_index([a](double r) { return std::pow(r, a); }, grid) ==
            doctest::Approx(a).epsilon(1e-9));
    }
    const std::vector<double> tiny{10.0, 20.0, 30.0};
    CHECK_THROWS_AS(estimate_variation_index([](double r) { return r; }, tiny), InconclusiveError);
  }

  TEST_CASE("power bound constant of phi = 1 is 1") {
    CHECK(min_power_bound_constant(FunctionParameter(), 0.1, default_limit_grid()) == doctest::Approx(1.0));
    const auto lg = FunctionParameter::log_multiscale({1.0});
    const auto grid = default_limit_grid();
    const double c = min_power_bound_constant(lg, 0.1, grid);
    for (double r : grid) {
      CHECK(lg(r) <= c * std::pow(r, 0.1) * (1 + 1e-12));
      CHECK(lg(r) >= std::pow(r, -0.1) / c * (1 - 1e-12));
    }
  }

  TEST_CASE("concave samples have majorant ratio 1; convex ones do not") {
    std::vector<double> r, f, g;
    for (int i = 1; i <= 20; ++i) {
      r.push_back(i);
      f.push_back(std::sqrt(static_cast<double>(i)));
      g.push_back(static_cast<double>(i * i));
    }
    CHECK(concave_majorant_ratio(r, f).max_ratio == doctest::Approx(1.0));
    const auto conv = concave_majorant_ratio(r, g);
    CHECK(conv.max_ratio > 2.0);
    CHECK(conv.witness[0] < conv.witness[1]);
    CHECK(conv.witness[1] < conv.witness[2]);
  }

  TEST_CASE("interpolation parameter verdicts") {
    const auto grid = default_index_grid();
    const auto good = is_interpolation_parameter(
        InterpolationPsi(0, 1, 2, FunctionParameter::log_multiscale({1.0})).as_function(), grid);
    CHECK(good.decision == InterpolationVerdict::Decision::accepted);
    CHECK(good.index == doctest::Approx(0.5).epsilon(0.02));
    const auto bad = is_interpolation_parameter([](double r) { return std::pow(r, 1.5); }, grid);
    CHECK(bad.decision == InterpolationVerdict::Decision::rejected);
    CHECK(bad.has_witness);
    const auto neg = is_interpolation_parameter([](double r) { return std::pow(r, -0.5); }, grid);
    CHECK(neg.decision != InterpolationVerdict::Decision::accepted);
  }
}
