#pragma once

// Verification suites: discrete checks of the interpolation identities, the
// extension/projector lemmas, and a two-sided bounds probe for the
// isomorphism realized by a parabolic problem.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "refsob/parabolic.hpp"
#include "refsob/spaces.hpp"
#include "refsob/varfun.hpp"

namespace refsob {

struct VerificationCase {
  std::string name = "default";
  double s0 = 2.0, s = 3.0, s1 = 6.0;
  double sigma = 3.0;
  int b = 1;
  FunctionParameter phi;
  std::vector<std::size_t> grid;  // sizes (meaning depends on the suite)
  std::uint64_t seed = 7;
  std::size_t vectors = 100;
  double tol = 1e-12;

  /// s0 < s < s1 and b >= 1; DomainError otherwise.
  void validate() const;
  nlohmann::json to_json() const;
};

struct SuiteResult {
  std::string suite;
  bool pass = false;
  nlohmann::json report;  // deterministic: no timings
};

// ---- Lemma 5.1 -------------------------------------------------------------

/// The three shipped cases: phi = 1, log, 1/log (s0 = 2, s = 3, s1 = 6, b = 1,
/// 64 x 64 frequency grid, 100 vectors).
std::vector<VerificationCase> lemma51_cases();

/// Diagonal Fourier couple + psi against the refined norm on random
/// spectra, in 2-D (gamma = 1/(2b)) and the 1-D analog.
SuiteResult verify_lemma51(const VerificationCase& c);

// ---- Propositions 4.3 / 4.4 ---------------------------------------------

SuiteResult verify_prop44(std::uint64_t seed);
SuiteResult verify_prop43(std::uint64_t seed);

// ---- Lemmas 5.3 / 5.4 ------------------------------------------------------

VerificationCase lemma53_54_default_case();

/// Prop. 4.3 route with extension projectors on small periodic grids versus
/// the direct norms (refined norm on R^2_+, factor norms on Omega and
/// (0, tau)); K must be finite and stable within 25% across the two
/// refinements in c.grid (cells per unit length).
SuiteResult verify_lemma53_54(const VerificationCase& c);

// ---- embeddings ----------------------------------------------------------

/// Sup of r^{a} phi(r)^{e} over r >= 1 (dense logarithmic sampling up to
/// 1e12, where the tail is monotone for a < 0).
double sup_power_phi(double a, const FunctionParameter& phi, double e);

/// Periodic grids on which embedding inequalities are asserted.
std::vector<GridSpec> shipped_grids();

SuiteResult verify_embeddings(const VerificationCase& c);

// ---- Main Theorem probe ----------------------------------------------------

struct ProbeOptions {
  std::vector<std::size_t> refinements{32, 64, 128};  // cells across Omega per axis
  double sigma = 3.0;
  FunctionParameter phi;
  std::size_t trials = 6;
  int vanishing_order = 0;  // M; 0 means ceil(sigma) + 1
  int modes = 2;            // band limit of the random smooth factor
  std::uint64_t seed = 7;
  double growth_limit = 2.0;
};

struct RefinementRecord {
  std::size_t n = 0;
  double upper_ratio = 0.0;
  double lower_ratio = 0.0;
  double condition = 0.0;
  std::vector<double> ratios;
  nlohmann::json to_json() const;
};

struct BoundsProbe {
  std::string problem;
  std::string trial_basis;
  double sigma = 0.0;
  int sigma0 = 0;
  int sigma1 = 0;
  std::string phi;
  std::vector<RefinementRecord> records;
  std::vector<double> growth;  // condition[k+1] / condition[k]
  std::vector<double> domain_norms;  // first trial, per refinement
  double cauchy = 0.0;               // relative change between the two finest
  bool pass = false;
  nlohmann::json to_json() const;
};

/// Smallest integer > sigma divisible by 2b.
int sigma1_for(double sigma, int b);

/// FailedPrecondition when prob is not parabolic or sigma <= sigma0.
BoundsProbe probe_main_theorem(const ParabolicProblem& prob, const ProbeOptions& opt);

/// CSV lines "refinement,upper,lower,condition".
std::string probe_csv(const BoundsProbe& p);

// ---- suites ----------------------------------------------------------------

std::vector<std::string> suite_names();

/// Runs one named suite ("lemma51", "prop43", "prop44", "lemma53_54",
/// "embeddings", "hestenes", "parabolic", "varfun", "main", or "all").
/// A case name restricts multi-case suites.  DomainError on unknown names.
SuiteResult run_suite(const std::string& name, std::uint64_t seed,
                      const std::optional<std::string>& case_name = std::nullopt);

}  // namespace refsob
