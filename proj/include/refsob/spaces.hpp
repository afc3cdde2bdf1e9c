#pragma once

// Refined (an)isotropic Sobolev norms on grid functions.
//
// A periodic grid function w is read as a compactly supported function on
// its box.  Its Fourier transform is approximated by the DFT scaled with the
// cell volume and (2 pi)^{-d/2}, on the frequency lattice 2 pi k / L; the
// norm is the lattice quadrature of weight * |w~|^2.  With unit weight this
// is exactly the discrete L2 norm.

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "refsob/grid.hpp"
#include "refsob/varfun.hpp"

namespace refsob {

/// b >= 1 and gamma = 1/(2b), stored as the exact rational 1/(2b).
class AnisotropyParams {
 public:
  explicit AnisotropyParams(int b);
  int b() const { return b_; }
  long gamma_num() const { return 1; }
  long gamma_den() const { return 2L * b_; }
  double gamma() const { return 1.0 / static_cast<double>(gamma_den()); }
  /// s * gamma as an integer when it is one.
  std::optional<long> integer_time_order(long s) const;

 private:
  int b_;
};

struct SmoothnessIndex {
  double s = 0.0;
  FunctionParameter phi;
  std::optional<AnisotropyParams> aniso;

  double gamma() const;
  std::string describe() const;
  /// phi must be constant_one or pass the class-M check on the default grid.
  void validate() const;
};

double weight_rgamma(double xi, double eta, double gamma);
/// <xi> = (1 + xi^2)^{1/2}
double smooth_modulus(double xi);

/// r^{2s} phi^2(r) for r >= 1.
double refined_weight(double r, const SmoothnessIndex& idx);

/// Weights r_gamma^{2s} phi^2(r_gamma) (2-D) or <xi>^{2s} phi^2(<xi>) (1-D)
/// over the frequency lattice of a periodic grid, in FFT storage order.
std::vector<double> weight_table(const GridSpec& spec, const SmoothnessIndex& idx);

struct Spectrum {
  GridSpec spec;
  std::vector<cplx> coeffs;  // approximate continuous transform, FFT order
  double cell = 0.0;         // frequency-cell volume
};

Spectrum spectrum_of(const GridFunction& w);
double refined_norm_from_spectrum(const Spectrum& sp, const SmoothnessIndex& idx);

inline constexpr double kAliasingGuard = 1e-8;

/// Throws DomainError unless |w| <= guard * max|w| on the outer ring of the box.
void check_aliasing_guard(const GridFunction& w, double guard = kAliasingGuard);

double norm_refined_aniso(const GridFunction& w, const SmoothnessIndex& idx,
                          double guard = kAliasingGuard);
double norm_refined_iso_1d(const GridFunction& h, const SmoothnessIndex& idx,
                           double guard = kAliasingGuard);
/// Inner product matching the norms above (either dimension).
cplx inner_refined(const GridFunction& w1, const GridFunction& w2, const SmoothnessIndex& idx,
                   double guard = kAliasingGuard);

/// (int |w|^2 + |D_x^s w|^2 + |d_t^{s gamma} w|^2)^{1/2}, derivatives spectral,
/// integral by the grid rule.  Requires s >= 1 and s*gamma a positive integer.
double norm_sobolev_derivative_form(const GridFunction& w, long s, const AnisotropyParams& aniso,
                                    double guard = kAliasingGuard);

/// min and max over the frequency lattice of
/// r_gamma^{2s} / (1 + xi^{2s} + eta^{2 s gamma}); the squared norm ratio
/// refined / derivative-form lies between them.
std::pair<double, double> derivative_form_equivalence(const GridSpec& spec, long s,
                                                      const AnisotropyParams& aniso);

/// Nt so that (max eta)^gamma matches max |xi| within a factor 2.
std::size_t balanced_time_count(std::size_t nx, double x_length, double t_length, double gamma);

/// All samples with t < 0 (1-D: argument < 0) satisfy |w| <= tol * max|w|.
bool is_plus_supported(const GridFunction& w, double tol);

// ---- factor norms ------------------------------------------------------

/// Margins, in grid nodes, of the enlarged periodic box around the closed
/// data grid.  `below` nodes have t < 0 and are held at zero.
struct ExtensionBudget {
  std::size_t left = 0, right = 0, below = 0, above = 0;
};

ExtensionBudget default_budget(const GridSpec& data_grid);

/// The periodic grid with the data grid embedded at offset (left, below);
/// right/above are bumped by one node if needed to make counts even.
GridSpec enlarged_grid(const GridSpec& data_grid, ExtensionBudget& budget);

/// Restriction of an enlarged-grid function to the data grid nodes.
GridFunction restrict_to_data(const GridFunction& w, const GridSpec& data_grid,
                              const ExtensionBudget& budget);

struct FactorSolverOptions {
  std::size_t dense_limit = 3000;  // free unknowns solved by dense Cholesky
  double cg_tolerance = 1e-10;
  std::size_t cg_max_iterations = 50000;
  double tikhonov_floor = 1e-12;  // relative to the largest weight
};

struct FactorNormResult {
  double value = 0.0;
  GridFunction minimizer;  // on the enlarged grid
  std::string method;      // "dense" or "cg"
  std::size_t iterations = 0;
  std::size_t free_unknowns = 0;
};

/// Infimum of the refined norm over plus-supported extensions of u from
/// the closed rectangle to the enlarged box: a constrained quadratic
/// minimization.  Throws SolverError when the system is singular or the
/// iteration does not converge.
FactorNormResult factor_norm_plus_omega_detail(const GridFunction& u, const SmoothnessIndex& idx,
                                               ExtensionBudget budget,
                                               const FactorSolverOptions& opt = {},
                                               const GridFunction* initial = nullptr);
double factor_norm_plus_omega(const GridFunction& u, const SmoothnessIndex& idx,
                              ExtensionBudget budget);

/// 1-D analog on (0, tau): extensions vanish for t < 0 and are free for t > tau.
FactorNormResult factor_norm_plus_interval_detail(const GridFunction& v, const SmoothnessIndex& idx,
                                                  ExtensionBudget budget,
                                                  const FactorSolverOptions& opt = {});
double factor_norm_plus_interval(const GridFunction& v, const SmoothnessIndex& idx,
                                 ExtensionBudget budget);

// ---- Gram forms --------------------------------------------------------

/// First column of the (real, symmetric, circulant) Gram matrix of the
/// discrete refined inner product on the periodic grid: G[p][q] = kernel[p - q].
std::vector<double> gram_kernel(const GridSpec& spec, const SmoothnessIndex& idx);

/// Dense Gram matrix restricted to the given node indices.
Eigen::MatrixXd gram_submatrix(const GridSpec& spec, const std::vector<double>& kernel,
                               const std::vector<std::size_t>& nodes);

/// JSON record {space, s, gamma, phi, value}.
nlohmann::json norm_record(const std::string& space, const SmoothnessIndex& idx, double value);

}  // namespace refsob
