#include <cmath>
#include <numbers>

#include "doctest.h"
#include "refsob/errors.hpp"
#include "refsob/verify.hpp"

using namespace refsob;

TEST_SUITE("verify") {
  TEST_CASE("sigma1 is the next multiple of 2b above sigma") {
    CHECK(sigma1_for(3.0, 1) == 4);
    CHECK(sigma1_for(4.0, 1) == 6);
    CHECK(sigma1_for(2.5, 2) == 4);
    CHECK(sigma1_for(0.0, 1) == 2);
  }

  TEST_CASE("sup of powers times the parameter") {
    CHECK(sup_power_phi(-1.0, FunctionParameter::constant_one(), 1.0) == doctest::Approx(1.0));
    const auto lg = FunctionParameter::parse("log[1]");
    const double oracle = [&] {
      double best = 0.0;
      for (double u = 0.0; u < 40.0; u += 1e-4) best = std::max(best, std::exp(-u) * lg(std::exp(u)));
      return best;
    }();
    CHECK(sup_power_phi(-1.0, lg, 1.0) == doctest::Approx(oracle).epsilon(1e-6));
  }

  TEST_CASE("case validation") {
    VerificationCase c;
    CHECK_NOTHROW(c.validate());
    c.s = 7.0;
    CHECK_THROWS_AS(c.validate(), DomainError);
    c = VerificationCase{};
    c.b = 0;
    CHECK_THROWS_AS(c.validate(), DomainError);
  }

  TEST_CASE("suite registry") {
    const auto names = suite_names();
    CHECK(names.size() >= 9);
    CHECK_THROWS_AS(run_suite("nope", 7), DomainError);
    CHECK_THROWS_AS(run_suite("prop44", 7, std::string("other")), DomainError);
  }

  TEST_CASE("cheap suites pass and are deterministic") {
    for (const char* name : {"prop44", "prop43", "hestenes", "varfun", "parabolic"}) {
      CAPTURE(name);
      const auto a = run_suite(name, 7);
      CHECK(a.pass);
      CHECK(a.report.dump() == run_suite(name, 7).report.dump());
    }
    CHECK(run_suite("lemma51", 7, std::string("default")).pass);
  }

  TEST_CASE("probe refuses a non-parabolic problem") {
    ProbeOptions opt;
    opt.refinements = {8, 16};
    CHECK_THROWS_AS(probe_main_theorem(backward_heat_dirichlet(), opt), FailedPrecondition);
    opt.sigma = 2.0;  // not above sigma0
    CHECK_THROWS_AS(probe_main_theorem(heat_dirichlet(), opt), FailedPrecondition);
  }

  TEST_CASE("small probe on the heat problem") {
    ProbeOptions opt;
    opt.refinements = {16, 24};
    opt.trials = 3;
    const auto p = probe_main_theorem(heat_dirichlet(), opt);
    REQUIRE(p.records.size() == 2);
    for (const auto& r : p.records) {
      CHECK(r.lower_ratio > 0.0);
      CHECK(r.upper_ratio >= r.lower_ratio);
      CHECK(r.condition == doctest::Approx(r.upper_ratio / r.lower_ratio));
    }
    CHECK(p.sigma0 == 2);
    CHECK(p.sigma1 == 4);
    CHECK(probe_csv(p).find("refinement,upper,lower,condition") != std::string::npos);
  }
}
