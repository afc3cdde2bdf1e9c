#pragma once

// Reflection (Hestenes) extension across lines parallel to a coordinate
// axis, the smooth cutoff chi_eps, and the projectors built from them.

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "refsob/grid.hpp"

namespace refsob {

using Rational = boost::multiprecision::cpp_rational;

inline constexpr int kMaxHestenesOrder = 12;

struct HestenesCoeffs {
  int k = 0;
  std::vector<Rational> lambda;  // lambda_1 .. lambda_{k+1}

  std::vector<double> as_double() const;
  /// sum_j lambda_j (-1/j)^alpha, exact.
  Rational moment(int alpha) const;
  /// {"k": k, "lambda": ["-3", "4"]} with exact fractions "p/q".
  nlohmann::json to_json() const;
};

/// Exact solve of sum_j lambda_j (-1/j)^alpha = 1, alpha = 0..k.
/// CapExceeded for k > 12, DomainError for k < 0.
HestenesCoeffs hestenes_coeffs(int k);

/// chi_eps(t) = S((t + 2 eps/3) / (eps/3)), S(u) = sigma(u) / (sigma(u) + sigma(1-u)),
/// sigma(u) = exp(-1/u) for u > 0 else 0.
class CutoffChi {
 public:
  explicit CutoffChi(double epsilon);
  double operator()(double t) const;
  double epsilon() const { return eps_; }

 private:
  double eps_;
};

/// The smooth step S on the real line (0 for u <= 0, 1 for u >= 1).
double smooth_step(double u);

enum class Axis { x = 0, t = 1 };
enum class Side { less_than, greater_than };

/// Open half-plane {coord(axis) < threshold} or {coord(axis) > threshold}.
struct HalfPlaneSpec {
  Axis axis = Axis::t;
  Side side = Side::greater_than;
  double threshold = 0.0;

  /// Signed distance into the half-plane (positive inside).
  double inward(double coord) const {
    return side == Side::greater_than ? coord - threshold : threshold - coord;
  }
  /// Coordinate at inward distance d.
  double at_inward(double d) const {
    return side == Side::greater_than ? threshold + d : threshold - d;
  }
};

/// Open half-line {t < threshold} or {t > threshold}.
struct HalfLineSpec {
  Side side = Side::greater_than;
  double threshold = 0.0;

  double inward(double t) const {
    return side == Side::greater_than ? t - threshold : threshold - t;
  }
  double at_inward(double d) const {
    return side == Side::greater_than ? threshold + d : threshold - d;
  }
};

/// Deterministic callable on the closed half-domain.  Exactly one of f1/f2
/// is set.  Non-finite values and foreign exceptions surface as
/// EvaluationError.
struct FunctionOracle {
  std::function<cplx(double)> f1;
  std::function<cplx(double, double)> f2;
  int smoothness = 0;  // declared class C^k

  static FunctionOracle of(std::function<cplx(double)> f, int k);
  static FunctionOracle of(std::function<cplx(double, double)> f, int k);

  cplx operator()(double t) const;
  cplx operator()(double x, double t) const;
};

/// Samples T v on out_grid: v on the closed half-plane, chi_eps times the
/// reflected sum sum_j lambda_j v(-d/j) outside, with d the distance.
GridFunction extend_halfplane(const FunctionOracle& v, int k, double epsilon,
                              const HalfPlaneSpec& pi, const GridSpec& out_grid);
GridFunction extend_halfline(const FunctionOracle& v, int k, double epsilon,
                             const HalfLineSpec& g, const GridSpec& out_grid);

/// T_Pi (w restricted to Pi) for grid data: off-grid values at reflected
/// points come from one-sided Lagrange interpolation on k+2 nodes of the
/// closed half-domain, further limited to source coordinates in
/// [src_lo, src_hi].  Pi's boundary must fall on a grid node.
GridFunction extend_grid(const GridFunction& w, int k, double epsilon, const HalfPlaneSpec& pi,
                         double src_lo = -INFINITY, double src_hi = INFINITY);
GridFunction extend_grid_1d(const GridFunction& h, int k, double epsilon, const HalfLineSpec& g);

/// P w = w - T(w restricted to t < 0).
GridFunction projector_plus(const GridFunction& w, int k, double epsilon = 1.0);

/// P0 w = w - T3 R3 T2 R2 T1 R1 w with Pi1 = {t < tau}, Pi2 = {x < l},
/// Pi3 = {x > 0}; epsilon defaults to l.  The grid must contain
/// [-l, 2l] x [0, tau + l] with nodes on x = 0, x = l, t = tau.
GridFunction projector_Q(const GridFunction& w, int k, double l, double tau, double epsilon = 0.0);

/// P_tau h = h - T(h restricted to t < tau).
GridFunction projector_tau(const GridFunction& h, int k, double tau, double epsilon = 1.0);

/// Lagrange interpolation weights for evaluating at x from the nodes.
std::vector<double> lagrange_weights(const std::vector<double>& nodes, double x);

}  // namespace refsob
