// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <exception>
#include <functional>
#include <string>

#include "refsob/verify.hpp"

using namespace refsob;

namespace {

int failures = 0;

void criterion(int id, const char* what, double limit_s, const std::function<bool(std::string&)>& body) {
  std::string detail;
  bool ok = false;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs > limit_s) {
    ok = false;
    detail += " (over time budget)";
  }
  if (!ok) ++failures;
  std::printf("%s criterion %d %s [%.2fs / %.0fs]%s%s\n", ok ? "PASS" : "FAIL", id, what, secs, limit_s,
              detail.empty() ? "" : " ", detail.c_str());
  std::fflush(stdout);
}

}  // namespace

int main() {
  criterion(1, "refined norm equals interpolation norm on 64x64 grids", 10, [](std::string&) {
    return run_suite("lemma51", 7).pass;
  });
  criterion(2, "interpolation commutes with finite sums", 5, [](std::string&) {
    return run_suite("prop44", 7).pass;
  });
  SuiteResult hest;
  criterion(3, "reflection coefficients exact, monomials reproduced, k=1 gives (-3,4)", 5, [&](std::string&) {
    hest = run_suite("hestenes", 7);
    bool ok = hest.report.at("k1_is_minus3_4").get<bool>();
    for (const auto& row : hest.report.at("orders")) ok = ok && row.at("pass").get<bool>();
    return ok;
  });
  criterion(4, "C^k matching across the reflection line", 5, [&](std::string& d) {
    if (hest.report.is_null()) hest = run_suite("hestenes", 7);
    bool ok = true;
    for (const auto& r : hest.report.at("mismatch_reduction")) {
      d += std::to_string(r.get<double>()) + " ";
      ok = ok && r.get<double>() >= 4.0;
    }
    return ok;
  });
  criterion(5, "parabolicity checks and sigma0 minimality", 10, [](std::string&) {
    return run_suite("parabolic", 7).pass;
  });
  criterion(6, "parameter index and class M verdicts", 5, [](std::string&) {
    return run_suite("varfun", 7).pass;
  });
  criterion(7, "embedding inequalities on shipped grids", 10, [](std::string&) {
    return run_suite("embeddings", 7).pass;
  });
  criterion(8, "two-sided bounds for the heat problem under refinement", 180, [](std::string& d) {
    const auto r = run_suite("main", 7);
    double max_growth = 0.0, min_lower = 1e300;
    for (const auto& p : r.report.at("probes")) {
      for (const auto& g : p.at("growth")) max_growth = std::max(max_growth, g.get<double>());
      for (const auto& rec : p.at("records")) min_lower = std::min(min_lower, rec.at("lower_ratio").get<double>());
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "min lower %.3g, max growth %.3f, backward heat refused %s", min_lower,
                  max_growth, r.report.at("backward_heat").at("refused").get<bool>() ? "yes" : "no");
    d = buf;
    return r.pass;
  });
  criterion(9, "verify all is deterministic for a fixed seed", 600, [](std::string& d) {
    const auto a = run_suite("all", 7);
    const auto b = run_suite("all", 7);
    if (!a.pass) d = "suite 'all' reported failure";
    return a.pass && a.report.dump() == b.report.dump();
  });
  return failures == 0 ? 0 : 1;
}
