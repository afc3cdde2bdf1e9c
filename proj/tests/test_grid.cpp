#include <cmath>
#include <sstream>

#include "doctest.h"
#include "refsob/errors.hpp"
#include "refsob/grid.hpp"

using namespace refsob;

TEST_SUITE("grid") {
  TEST_CASE("spacing and node lookup") {
    const auto p = GridSpec::periodic_2d(-1.0, 2.0, 12, 0.0, 1.0, 8);
    CHECK(p.spacing(0) == doctest::Approx(0.25));
    CHECK(p.spacing(1) == doctest::Approx(0.125));
    CHECK(p.node_index(0, 0.0) == 4);
    CHECK(p.node_index(0, 0.1) == GridSpec::npos);
    const auto c = GridSpec::closed_1d(0.0, 1.0, 11);
    CHECK(c.spacing(0) == doctest::Approx(0.1));
    CHECK(c.coord(0, 10) == doctest::Approx(1.0));
  }

  TEST_CASE("validation") {
    CHECK_THROWS_AS(GridSpec::periodic_1d(0.0, 1.0, 7).validate(), DomainError);
    CHECK_THROWS_AS(GridSpec::periodic_1d(1.0, 0.0, 8).validate(), DomainError);
    CHECK_NOTHROW(GridSpec::closed_1d(0.0, 1.0, 7).validate());
  }

  TEST_CASE("discrete L2 norm is the Riemann sum") {
    const auto spec = GridSpec::periodic_2d(0.0, 2.0, 10, 0.0, 1.0, 6);
    const auto g = GridFunction::sample(spec, [](double x, double t) { return cplx(x, t); });
    double acc = 0.0;
    for (std::size_t i = 0; i < 10; ++i)
      for (std::size_t j = 0; j < 6; ++j) {
        const double x = 0.2 * static_cast<double>(i), t = static_cast<double>(j) / 6.0;
        acc += (x * x + t * t) * 0.2 / 6.0;
      }
    CHECK(g.l2_norm() == doctest::Approx(std::sqrt(acc)));
    CHECK(std::abs(g.at(3, 2) - cplx(0.6, 2.0 / 6.0)) < 1e-15);
  }

  TEST_CASE("CSV and binary round trips are exact") {
    const auto spec = GridSpec::closed_2d(0.0, 1.0, 5, -1.0, 1.0, 7);
    auto g = GridFunction::sample(spec, [](double x, double t) { return cplx(std::sin(x * 3.1), std::exp(t) / 3.0); });
    g.set_plus(true);
    std::stringstream csv, bin;
    write_csv(csv, g);
    write_binary(bin, g);
    for (auto* h : {&csv, &bin}) {
      const GridFunction back = h == &csv ? read_csv(*h) : read_binary(*h);
      CHECK(back.spec() == g.spec());
      CHECK(back.plus());
      for (std::size_t i = 0; i < g.size(); ++i) CHECK(back[i] == g[i]);
    }
  }

  TEST_CASE("malformed input is a parse error") {
    std::stringstream bad("not a grid\n1,2\n");
    CHECK_THROWS_AS(read_csv(bad), ParseError);
  }

  TEST_CASE("arithmetic") {
    const auto spec = GridSpec::periodic_1d(0.0, 1.0, 4);
    GridFunction a(spec, {1, 2, 3, 4}), b(spec, {1, 1, 1, 1});
    const GridFunction c = cplx(2.0) * (a - b);
    CHECK(c[3] == cplx(6.0));
    CHECK(c.max_abs() == doctest::Approx(6.0));
  }
}
