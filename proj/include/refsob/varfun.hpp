#pragma once

// Function parameters on [1, inf): slowly varying functions (class M),
// interpolation parameters built from them, and sampled tests of slow and
// regular variation.

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace refsob {

using RealFunction = std::function<double(double)>;

/// Product of powers of iterated logarithms, prod_i (log^{(i)} r)^{theta_i}.
/// Throws DomainError if any iterated logarithm is <= 0 at r.
double eval_log_multiscale(std::span<const double> theta, double r);

/// Smallest r at which all k iterated logarithms are >= e.
/// Throws DomainError when that point is not representable (k >= 3).
double log_multiscale_rmin(std::size_t k);

class FunctionParameter {
 public:
  enum class Kind { constant_one, log_multiscale, power_times_slow, tabulated };

  FunctionParameter();  // constant_one

  static FunctionParameter constant_one();
  static FunctionParameter log_multiscale(std::vector<double> theta);
  static FunctionParameter power_times_slow(double rho, FunctionParameter inner);
  static FunctionParameter tabulated(std::vector<std::pair<double, double>> table);

  /// Value at r >= 1. Below the log-multiscale threshold the value at the
  /// threshold is used; tabulated data is interpolated log-log linearly and
  /// held constant outside the table.
  double operator()(double r) const;

  Kind kind() const { return kind_; }
  const std::vector<double>& params() const { return params_; }
  const std::vector<std::pair<double, double>>& table() const { return table_; }
  const FunctionParameter* inner() const { return inner_.get(); }

  /// Start of the region where the closed form is used verbatim.
  double domain_floor() const { return floor_; }

  /// Short descriptor: "one", "log[1,-1]", "pow[0.3]*log[1]", "table[n]".
  std::string describe() const;

  nlohmann::json to_json() const;
  static FunctionParameter from_json(const nlohmann::json& j);

  /// Accepts JSON (leading '{') or the descriptor grammar of describe()
  /// (tables excluded).
  static FunctionParameter parse(const std::string& text);

 private:
  Kind kind_ = Kind::constant_one;
  std::vector<double> params_;
  std::vector<std::pair<double, double>> table_;
  std::shared_ptr<const FunctionParameter> inner_;
  double floor_ = 1.0;
};

/// psi(r) = r^theta * phi(r^{1/(s1-s0)}) for r >= 1, phi(1) on (0,1),
/// theta = (s-s0)/(s1-s0).
class InterpolationPsi {
 public:
  InterpolationPsi(double s0, double s, double s1, FunctionParameter phi);

  double operator()(double r) const;

  double s0() const { return s0_; }
  double s() const { return s_; }
  double s1() const { return s1_; }
  double theta() const { return (s_ - s0_) / (s1_ - s0_); }
  const FunctionParameter& phi() const { return phi_; }

  RealFunction as_function() const;

 private:
  double s0_, s_, s1_;
  FunctionParameter phi_;
};

enum class Verdict { slowly_varying, regularly_varying, rejected };

std::string to_string(Verdict v);

struct VariationReport {
  double estimated_index = 0.0;
  /// max over lambda of |L(lambda) - lambda^index| / lambda^index, where
  /// L(lambda) is the extrapolated limit of phi(lambda r)/phi(r).
  double max_ratio_deviation = 0.0;
  /// max over lambda of |L(lambda) - 1|.
  double max_limit_deviation = 0.0;
  std::vector<double> lambdas_tested;
  std::vector<double> limit_ratios;
  std::vector<double> r_grid;
  /// sup of phi and of 1/phi on the sampled compact [1, r_grid.front()].
  double compact_sup = 0.0;
  double compact_inv_sup = 0.0;
  Verdict verdict = Verdict::rejected;

  nlohmann::json to_json() const;
};

std::vector<double> logspace(double lo, double hi, std::size_t n);

/// Logarithmically spaced [1e2, 1e12] used by the limit tests.
std::vector<double> default_limit_grid();
/// {1/2, 2, 10}
std::vector<double> default_lambdas();
/// Logarithmically spaced [1e2, 1e300]; slope fits need log r >> 1.
std::vector<double> default_index_grid();

inline constexpr double kDefaultVariationTol = 1e-2;

/// Sampled membership test for class M.  The limit of phi(lambda r)/phi(r)
/// is extrapolated from the upper half of the grid with a quadratic fit in
/// 1/log r.  Verdict is slowly_varying or rejected.
VariationReport check_class_M(const FunctionParameter& phi,
                              std::span<const double> r_grid,
                              std::span<const double> lambdas,
                              double tol = kDefaultVariationTol);

/// Same limit extrapolation applied to an arbitrary positive function;
/// verdict is slowly_varying (index ~ 0), regularly_varying or rejected.
VariationReport check_regular_variation(const RealFunction& f,
                                        std::span<const double> r_grid,
                                        std::span<const double> lambdas,
                                        double tol = kDefaultVariationTol);

/// Minimal c >= 1 with c^{-1} r^{-eps} <= phi(r) <= c r^{eps} on the grid.
double min_power_bound_constant(const FunctionParameter& phi, double eps,
                                std::span<const double> r_grid);

struct IndexFit {
  double slope = 0.0;
  double rms_residual = 0.0;
  std::size_t points_used = 0;
};

/// Least-squares slope of log f against log r over the upper half of the grid.
IndexFit fit_variation_index(const RealFunction& f, std::span<const double> r_grid);

inline constexpr double kDefaultIndexResidual = 5e-2;

/// Slope from fit_variation_index; InconclusiveError if the grid is too
/// small (< 8 points or < 6 decades) or the rms residual exceeds the threshold.
double estimate_variation_index(const RealFunction& f, std::span<const double> r_grid,
                                double residual_threshold = kDefaultIndexResidual);

struct InterpolationVerdict {
  enum class Decision { accepted, rejected, inconclusive };
  Decision decision = Decision::inconclusive;
  std::string route;  // "regular_variation", "pseudoconcavity", "borderline"
  double index = 0.0;
  double fit_residual = 0.0;
  double majorant_ratio = 1.0;
  bool has_witness = false;
  std::array<double, 3> witness{};  // r_left < r_mid < r_right

  nlohmann::json to_json() const;
};

std::string to_string(InterpolationVerdict::Decision d);

struct PseudoconcavityOptions {
  double ratio_threshold = 10.0;  // F
  double index_margin = 1e-2;     // borderline band around 0 and 1
  double residual_threshold = kDefaultIndexResidual;
};

/// Least concave majorant of the samples (r_i, f_i) evaluated at r_i,
/// divided by f_i; returns the worst ratio and the witness triple.
struct MajorantResult {
  double max_ratio = 1.0;
  std::array<double, 3> witness{};
};
MajorantResult concave_majorant_ratio(std::span<const double> r, std::span<const double> f);

InterpolationVerdict is_interpolation_parameter(const RealFunction& psi,
                                                std::span<const double> r_grid,
                                                const PseudoconcavityOptions& opt = {});

}  // namespace refsob
