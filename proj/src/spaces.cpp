#include "refsob/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "refsob/errors.hpp"
#include "refsob/fft.hpp"

namespace refsob {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<std::size_t> fft_dims(const GridSpec& spec) {
  if (spec.dim == 1) return {spec.count[0]};
  return {spec.count[0], spec.count[1]};
}

void require_periodic(const GridSpec& spec, const char* what) {
  if (!spec.periodic) throw DomainError(std::string(what) + " needs a periodic grid");
}

// Cell-volume factor C with |w|^2_W = C * sum_k W_k |DFT(w)_k|^2.
double quadrature_factor(const GridSpec& spec) {
  double c = spec.spacing(0) / static_cast<double>(spec.count[0]);
  if (spec.dim == 2) c *= spec.spacing(1) / static_cast<double>(spec.count[1]);
  return c;
}

}  // namespace

AnisotropyParams::AnisotropyParams(int b) : b_(b) {
  if (b < 1) throw DomainError("anisotropy needs b >= 1");
}

std::optional<long> AnisotropyParams::integer_time_order(long s) const {
  if (s % gamma_den() != 0) return std::nullopt;
  return s / gamma_den();
}

double SmoothnessIndex::gamma() const {
  if (!aniso) throw DomainError("smoothness index has no anisotropy parameter");
  return aniso->gamma();
}

std::string SmoothnessIndex::describe() const {
  std::ostringstream os;
  os << "s=" << s << " phi=" << phi.describe();
  if (aniso) os << " gamma=1/" << aniso->gamma_den();
  return os.str();
}

void SmoothnessIndex::validate() const {
  if (!std::isfinite(s)) throw DomainError("smoothness s must be finite");
  if (phi.kind() == FunctionParameter::Kind::constant_one) return;
  const auto grid = default_limit_grid();
  const auto lambdas = default_lambdas();
  const auto rep = check_class_M(phi, grid, lambdas);
  if (rep.verdict != Verdict::slowly_varying)
    throw DomainError("function parameter " + phi.describe() + " is not slowly varying");
}

double weight_rgamma(double xi, double eta, double gamma) {
  return std::sqrt(1.0 + xi * xi + std::pow(std::abs(eta), 2.0 * gamma));
}

double smooth_modulus(double xi) { return std::sqrt(1.0 + xi * xi); }

double refined_weight(double r, const SmoothnessIndex& idx) {
  const double p = idx.phi(r);
  return std::pow(r, 2.0 * idx.s) * p * p;
}

std::vector<double> weight_table(const GridSpec& spec, const SmoothnessIndex& idx) {
  require_periodic(spec, "weight table");
  const auto xi = angular_frequencies(spec.count[0], spec.length(0));
  std::vector<double> w(spec.size());
  if (spec.dim == 1) {
    for (std::size_t i = 0; i < xi.size(); ++i) w[i] = refined_weight(smooth_modulus(xi[i]), idx);
    return w;
  }
  const double gamma = idx.gamma();
  const auto eta = angular_frequencies(spec.count[1], spec.length(1));
  for (std::size_t i = 0; i < xi.size(); ++i)
    for (std::size_t j = 0; j < eta.size(); ++j)
      w[i * eta.size() + j] = refined_weight(weight_rgamma(xi[i], eta[j], gamma), idx);
  return w;
}

Spectrum spectrum_of(const GridFunction& w) {
  const auto& spec = w.spec();
  require_periodic(spec, "spectrum");
  Spectrum sp;
  sp.spec = spec;
  sp.coeffs.assign(w.samples().begin(), w.samples().end());
  Fft fft(fft_dims(spec));
  fft.forward(sp.coeffs);
  double scale = spec.spacing(0) / std::sqrt(kTwoPi);
  sp.cell = kTwoPi / spec.length(0);
  if (spec.dim == 2) {
    scale *= spec.spacing(1) / std::sqrt(kTwoPi);
    sp.cell *= kTwoPi / spec.length(1);
  }
  for (auto& c : sp.coeffs) c *= scale;
  return sp;
}

double refined_norm_from_spectrum(const Spectrum& sp, const SmoothnessIndex& idx) {
  const auto w = weight_table(sp.spec, idx);
  double acc = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) acc += w[k] * std::norm(sp.coeffs[k]);
  return std::sqrt(acc * sp.cell);
}

void check_aliasing_guard(const GridFunction& w, double guard) {
  const double m = w.max_abs();
  if (m == 0.0) return;
  const double limit = guard * m;
  auto bad = [&](cplx v) { return std::abs(v) > limit; };
  if (w.dim() == 1) {
    if (bad(w[0]) || bad(w[w.size() - 1]))
      throw DomainError("support reaches the box boundary (aliasing guard)");
    return;
  }
  const std::size_t nx = w.nx(), nt = w.nt();
  for (std::size_t i = 0; i < nx; ++i)
    if (bad(w.at(i, 0)) || bad(w.at(i, nt - 1)))
      throw DomainError("support reaches the box boundary in t (aliasing guard)");
  for (std::size_t j = 0; j < nt; ++j)
    if (bad(w.at(0, j)) || bad(w.at(nx - 1, j)))
      throw DomainError("support reaches the box boundary in x (aliasing guard)");
}

double norm_refined_aniso(const GridFunction& w, const SmoothnessIndex& idx, double guard) {
  if (w.dim() != 2) throw DomainError("anisotropic norm needs a 2-D grid function");
  if (!idx.aniso) throw DomainError("anisotropic norm needs gamma");
  check_aliasing_guard(w, guard);
  return refined_norm_from_spectrum(spectrum_of(w), idx);
}

double norm_refined_iso_1d(const GridFunction& h, const SmoothnessIndex& idx, double guard) {
  if (h.dim() != 1) throw DomainError("1-D norm needs a 1-D grid function");
  check_aliasing_guard(h, guard);
  return refined_norm_from_spectrum(spectrum_of(h), idx);
}

cplx inner_refined(const GridFunction& w1, const GridFunction& w2, const SmoothnessIndex& idx,
                   double guard) {
  if (!(w1.spec() == w2.spec())) throw DomainError("inner product of functions on different grids");
  check_aliasing_guard(w1, guard);
  check_aliasing_guard(w2, guard);
  const auto a = spectrum_of(w1);
  const auto b = spectrum_of(w2);
  const auto wt = weight_table(w1.spec(), idx);
  cplx acc = 0.0;
  for (std::size_t k = 0; k < wt.size(); ++k) acc += wt[k] * a.coeffs[k] * std::conj(b.coeffs[k]);
  return acc * a.cell;
}

double norm_sobolev_derivative_form(const GridFunction& w, long s, const AnisotropyParams& aniso,
                                    double guard) {
  if (w.dim() != 2) throw DomainError("derivative-form norm needs a 2-D grid function");
  if (s < 1) throw DomainError("derivative-form norm needs s >= 1");
  const auto q = aniso.integer_time_order(s);
  if (!q || *q < 1) throw DomainError("derivative-form norm needs s*gamma a positive integer");
  const auto& spec = w.spec();
  require_periodic(spec, "derivative-form norm");
  check_aliasing_guard(w, guard);

  const std::size_t nx = spec.count[0], nt = spec.count[1];
  const auto xi = angular_frequencies(nx, spec.length(0));
  const auto eta = angular_frequencies(nt, spec.length(1));
  Fft fft({nx, nt});
  std::vector<cplx> hat(w.samples().begin(), w.samples().end());
  fft.forward(hat);

  std::vector<cplx> dx(hat.size()), dt(hat.size());
  const cplx iu(0.0, 1.0);
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < nt; ++j) {
      const std::size_t k = i * nt + j;
      dx[k] = std::pow(-xi[i], static_cast<double>(s)) * hat[k];  // D_x = i d/dx
      dt[k] = std::pow(iu * eta[j], static_cast<double>(*q)) * hat[k];
    }
  }
  fft.backward(dx);
  fft.backward(dt);
  const double n = static_cast<double>(nx * nt);
  double acc = 0.0;
  for (std::size_t k = 0; k < hat.size(); ++k)
    acc += std::norm(w[k]) + std::norm(dx[k] / n) + std::norm(dt[k] / n);
  return std::sqrt(acc * spec.spacing(0) * spec.spacing(1));
}

std::pair<double, double> derivative_form_equivalence(const GridSpec& spec, long s,
                                                      const AnisotropyParams& aniso) {
  const auto q = aniso.integer_time_order(s);
  if (!q) throw DomainError("s*gamma must be an integer");
  const auto xi = angular_frequencies(spec.count[0], spec.length(0));
  const auto eta = angular_frequencies(spec.count[1], spec.length(1));
  double lo = INFINITY, hi = 0.0;
  for (double x : xi) {
    for (double e : eta) {
      const double r = weight_rgamma(x, e, aniso.gamma());
      const double ratio = std::pow(r, 2.0 * static_cast<double>(s)) /
                           (1.0 + std::pow(x, 2.0 * static_cast<double>(s)) +
                            std::pow(e, 2.0 * static_cast<double>(*q)));
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
  }
  return {lo, hi};
}

std::size_t balanced_time_count(std::size_t nx, double x_length, double t_length, double gamma) {
  const double xi_max = std::numbers::pi * static_cast<double>(nx) / x_length;
  const double eta_target = std::pow(xi_max, 1.0 / gamma);
  auto n = static_cast<std::size_t>(std::ceil(eta_target * t_length / std::numbers::pi));
  n = std::max<std::size_t>(n, 4);
  return n % 2 ? n + 1 : n;
}

bool is_plus_supported(const GridFunction& w, double tol) {
  const double limit = tol * w.max_abs();
  const auto& spec = w.spec();
  const int axis = spec.dim == 1 ? 0 : 1;
  const double eps = 1e-9 * spec.spacing(axis);
  for (std::size_t i = 0; i < w.nx(); ++i) {
    for (std::size_t j = 0; j < w.nt(); ++j) {
      const double t = spec.coord(axis, axis == 0 ? i : j);
      if (t < -eps && std::abs(w.at(i, j)) > limit) return false;
    }
  }
  return true;
}

// ---- factor norms ------------------------------------------------------

ExtensionBudget default_budget(const GridSpec& data_grid) {
  ExtensionBudget b;
  if (data_grid.dim == 2) {
    b.left = data_grid.count[0];
    b.right = data_grid.count[0];
    b.below = std::max<std::size_t>(4, data_grid.count[1] / 2);
    b.above = data_grid.count[1];
  } else {
    b.below = std::max<std::size_t>(4, data_grid.count[0] / 2);
    b.above = data_grid.count[0];
  }
  return b;
}

GridSpec enlarged_grid(const GridSpec& data_grid, ExtensionBudget& budget) {
  if (data_grid.periodic) throw DomainError("factor norms take data on a closed grid");
  if (budget.below < 1) throw DomainError("extension budget needs at least one node below t = 0");
  if (data_grid.dim == 1) {
    const double h = data_grid.spacing(0);
    std::size_t n = budget.below + data_grid.count[0] + budget.above;
    if (n % 2) {
      ++budget.above;
      ++n;
    }
    const double lo = data_grid.lo[0] - h * static_cast<double>(budget.below);
    return GridSpec::periodic_1d(lo, lo + h * static_cast<double>(n), n);
  }
  const double hx = data_grid.spacing(0), ht = data_grid.spacing(1);
  std::size_t nx = budget.left + data_grid.count[0] + budget.right;
  std::size_t nt = budget.below + data_grid.count[1] + budget.above;
  if (nx % 2) {
    ++budget.right;
    ++nx;
  }
  if (nt % 2) {
    ++budget.above;
    ++nt;
  }
  const double x_lo = data_grid.lo[0] - hx * static_cast<double>(budget.left);
  const double t_lo = data_grid.lo[1] - ht * static_cast<double>(budget.below);
  return GridSpec::periodic_2d(x_lo, x_lo + hx * static_cast<double>(nx), nx, t_lo,
                               t_lo + ht * static_cast<double>(nt), nt);
}

GridFunction restrict_to_data(const GridFunction& w, const GridSpec& data_grid,
                              const ExtensionBudget& budget) {
  GridFunction out(data_grid);
  if (data_grid.dim == 1) {
    for (std::size_t j = 0; j < data_grid.count[0]; ++j) out[j] = w[budget.below + j];
    return out;
  }
  for (std::size_t i = 0; i < data_grid.count[0]; ++i)
    for (std::size_t j = 0; j < data_grid.count[1]; ++j)
      out.at(i, j) = w.at(budget.left + i, budget.below + j);
  return out;
}

std::vector<double> gram_kernel(const GridSpec& spec, const SmoothnessIndex& idx) {
  const auto w = weight_table(spec, idx);
  std::vector<cplx> k(w.begin(), w.end());
  Fft fft(fft_dims(spec));
  fft.backward(k);
  const double c = quadrature_factor(spec);
  std::vector<double> out(k.size());
  for (std::size_t i = 0; i < k.size(); ++i) out[i] = c * k[i].real();
  return out;
}

Eigen::MatrixXd gram_submatrix(const GridSpec& spec, const std::vector<double>& kernel,
                               const std::vector<std::size_t>& nodes) {
  const std::size_t m = nodes.size();
  Eigen::MatrixXd g(m, m);
  if (spec.dim == 1) {
    const std::size_t n = spec.count[0];
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b) g(a, b) = kernel[(nodes[a] + n - nodes[b]) % n];
    return g;
  }
  const std::size_t nx = spec.count[0], nt = spec.count[1];
  for (std::size_t a = 0; a < m; ++a) {
    const std::size_t ia = nodes[a] / nt, ja = nodes[a] % nt;
    for (std::size_t b = 0; b < m; ++b) {
      const std::size_t ib = nodes[b] / nt, jb = nodes[b] % nt;
      g(a, b) = kernel[((ia + nx - ib) % nx) * nt + (ja + nt - jb) % nt];
    }
  }
  return g;
}

namespace {

enum class NodeRole { zero, fixed, free };

// Applies the full Gram operator through the FFT.
class GramOperator {
 public:
  GramOperator(const GridSpec& spec, const SmoothnessIndex& idx)
      : fft_(fft_dims(spec)), weights_(weight_table(spec, idx)), c_(quadrature_factor(spec)) {
    max_weight_ = *std::max_element(weights_.begin(), weights_.end());
  }

  void apply(std::vector<cplx>& v) const {
    fft_.forward(v);
    for (std::size_t k = 0; k < v.size(); ++k) v[k] *= weights_[k];
    fft_.backward(v);
    for (auto& x : v) x *= c_;
  }

  void apply_inverse(std::vector<cplx>& v) const {
    const double n = static_cast<double>(v.size());
    fft_.forward(v);
    for (std::size_t k = 0; k < v.size(); ++k) v[k] /= weights_[k];
    fft_.backward(v);
    for (auto& x : v) x /= c_ * n * n;
  }

  double quadratic_form(const std::vector<cplx>& v) const {
    std::vector<cplx> h = v;
    fft_.forward(h);
    double acc = 0.0;
    for (std::size_t k = 0; k < h.size(); ++k) acc += weights_[k] * std::norm(h[k]);
    return c_ * acc;
  }

  // Largest eigenvalue of the Gram matrix.
  double spectral_max(std::size_t n) const { return c_ * static_cast<double>(n) * max_weight_; }

 private:
  Fft fft_;
  std::vector<double> weights_;
  double c_;
  double max_weight_;
};

FactorNormResult solve_factor_problem(const GridSpec& big, const SmoothnessIndex& idx,
                                      const std::vector<NodeRole>& roles,
                                      const std::vector<cplx>& fixed_values,
                                      const FactorSolverOptions& opt,
                                      const std::vector<cplx>* initial) {
  const std::size_t n = big.size();
  GramOperator gram(big, idx);
  std::vector<std::size_t> free_nodes;
  for (std::size_t p = 0; p < n; ++p)
    if (roles[p] == NodeRole::free) free_nodes.push_back(p);

  FactorNormResult res;
  res.free_unknowns = free_nodes.size();
  std::vector<cplx> w(n, 0.0);
  for (std::size_t p = 0; p < n; ++p)
    if (roles[p] == NodeRole::fixed) w[p] = fixed_values[p];

  const double floor = opt.tikhonov_floor * gram.spectral_max(n);

  if (!free_nodes.empty()) {
    std::vector<cplx> gz = w;
    gram.apply(gz);
    const std::size_t m = free_nodes.size();

    if (m <= opt.dense_limit) {
      res.method = "dense";
      const auto kernel = gram_kernel(big, idx);
      Eigen::MatrixXd gff = gram_submatrix(big, kernel, free_nodes);
      gff.diagonal().array() += floor;
      Eigen::LLT<Eigen::MatrixXd> llt(gff);
      if (llt.info() != Eigen::Success)
        throw SolverError("factor norm: constrained Gram system is numerically singular");
      Eigen::MatrixXd rhs(m, 2);
      for (std::size_t a = 0; a < m; ++a) {
        rhs(a, 0) = -gz[free_nodes[a]].real();
        rhs(a, 1) = -gz[free_nodes[a]].imag();
      }
      const Eigen::MatrixXd sol = llt.solve(rhs);
      const double resid = (gff * sol - rhs).norm();
      if (!std::isfinite(resid) || resid > 1e-6 * (rhs.norm() + 1e-300) + 1e-300)
        throw SolverError("factor norm: dense solve lost accuracy");
      for (std::size_t a = 0; a < m; ++a) w[free_nodes[a]] = {sol(a, 0), sol(a, 1)};
    } else {
      // Preconditioned CG on the free block; the preconditioner is the
      // free block of the full-space inverse.
      res.method = "cg";
      auto op = [&](const std::vector<cplx>& x) {
        std::vector<cplx> full(n, 0.0);
        for (std::size_t a = 0; a < m; ++a) full[free_nodes[a]] = x[a];
        gram.apply(full);
        std::vector<cplx> out(m);
        for (std::size_t a = 0; a < m; ++a) out[a] = full[free_nodes[a]] + floor * x[a];
        return out;
      };
      auto precond = [&](const std::vector<cplx>& r) {
        std::vector<cplx> full(n, 0.0);
        for (std::size_t a = 0; a < m; ++a) full[free_nodes[a]] = r[a];
        gram.apply_inverse(full);
        std::vector<cplx> out(m);
        for (std::size_t a = 0; a < m; ++a) out[a] = full[free_nodes[a]];
        return out;
      };
      auto dot = [](const std::vector<cplx>& a, const std::vector<cplx>& b) {
        cplx s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
        return s;
      };
      std::vector<cplx> b(m), x(m, 0.0);
      for (std::size_t a = 0; a < m; ++a) b[a] = -gz[free_nodes[a]];
      if (initial)
        for (std::size_t a = 0; a < m; ++a) x[a] = (*initial)[free_nodes[a]];
      const double bnorm = std::sqrt(std::abs(dot(b, b)));
      if (bnorm == 0.0) {
        x.assign(m, 0.0);
      } else {
        std::vector<cplx> ax = op(x);
        std::vector<cplx> r(m);
        for (std::size_t a = 0; a < m; ++a) r[a] = b[a] - ax[a];
        std::vector<cplx> z = precond(r);
        std::vector<cplx> p = z;
        cplx rz = dot(r, z);
        std::size_t it = 0;
        double rnorm = std::sqrt(std::abs(dot(r, r)));
        while (rnorm > opt.cg_tolerance * bnorm) {
          if (++it > opt.cg_max_iterations)
            throw SolverError("factor norm: CG did not converge");
          const std::vector<cplx> ap = op(p);
          const cplx pap = dot(p, ap);
          if (!(std::abs(pap) > 0.0)) throw SolverError("factor norm: CG breakdown");
          const cplx alpha = rz / pap;
          for (std::size_t a = 0; a < m; ++a) {
            x[a] += alpha * p[a];
            r[a] -= alpha * ap[a];
          }
          z = precond(r);
          const cplx rz_new = dot(r, z);
          const cplx beta = rz_new / rz;
          rz = rz_new;
          for (std::size_t a = 0; a < m; ++a) p[a] = z[a] + beta * p[a];
          rnorm = std::sqrt(std::abs(dot(r, r)));
        }
        res.iterations = it;
      }
      for (std::size_t a = 0; a < m; ++a) w[free_nodes[a]] = x[a];
    }
  } else {
    res.method = "none";
  }
  res.value = std::sqrt(std::max(0.0, gram.quadratic_form(w)));
  res.minimizer = GridFunction(big, std::move(w));
  res.minimizer.set_plus(true);
  return res;
}

}  // namespace

FactorNormResult factor_norm_plus_omega_detail(const GridFunction& u, const SmoothnessIndex& idx,
                                               ExtensionBudget budget,
                                               const FactorSolverOptions& opt,
                                               const GridFunction* initial) {
  if (u.dim() != 2) throw DomainError("Omega factor norm needs 2-D data");
  if (!idx.aniso) throw DomainError("Omega factor norm needs gamma");
  const GridSpec& data = u.spec();
  if (data.lo[1] != 0.0) throw DomainError("Omega data must start at t = 0");
  const GridSpec big = enlarged_grid(data, budget);
  const std::size_t nt = big.count[1];
  std::vector<NodeRole> roles(big.size(), NodeRole::free);
  std::vector<cplx> values(big.size(), 0.0);
  for (std::size_t i = 0; i < big.count[0]; ++i)
    for (std::size_t j = 0; j < budget.below; ++j) roles[i * nt + j] = NodeRole::zero;
  for (std::size_t i = 0; i < data.count[0]; ++i) {
    for (std::size_t j = 0; j < data.count[1]; ++j) {
      const std::size_t p = (budget.left + i) * nt + budget.below + j;
      roles[p] = NodeRole::fixed;
      values[p] = u.at(i, j);
    }
  }
  std::vector<cplx> init;
  if (initial) {
    if (!(initial->spec() == big)) throw DomainError("initial guess is not on the enlarged grid");
    init.assign(initial->samples().begin(), initial->samples().end());
  }
  return solve_factor_problem(big, idx, roles, values, opt, initial ? &init : nullptr);
}

double factor_norm_plus_omega(const GridFunction& u, const SmoothnessIndex& idx,
                              ExtensionBudget budget) {
  return factor_norm_plus_omega_detail(u, idx, budget).value;
}

FactorNormResult factor_norm_plus_interval_detail(const GridFunction& v, const SmoothnessIndex& idx,
                                                  ExtensionBudget budget,
                                                  const FactorSolverOptions& opt) {
  if (v.dim() != 1) throw DomainError("interval factor norm needs 1-D data");
  const GridSpec& data = v.spec();
  if (data.lo[0] != 0.0) throw DomainError("interval data must start at t = 0");
  const GridSpec big = enlarged_grid(data, budget);
  std::vector<NodeRole> roles(big.size(), NodeRole::free);
  std::vector<cplx> values(big.size(), 0.0);
  for (std::size_t j = 0; j < budget.below; ++j) roles[j] = NodeRole::zero;
  for (std::size_t j = 0; j < data.count[0]; ++j) {
    roles[budget.below + j] = NodeRole::fixed;
    values[budget.below + j] = v[j];
  }
  return solve_factor_problem(big, idx, roles, values, opt, nullptr);
}

double factor_norm_plus_interval(const GridFunction& v, const SmoothnessIndex& idx,
                                 ExtensionBudget budget) {
  return factor_norm_plus_interval_detail(v, idx, budget).value;
}

nlohmann::json norm_record(const std::string& space, const SmoothnessIndex& idx, double value) {
  nlohmann::json j{{"space", space}, {"s", idx.s}, {"phi", idx.phi.describe()}, {"value", value}};
  if (idx.aniso)
    j["gamma"] = "1/" + std::to_string(idx.aniso->gamma_den());
  else
    j["gamma"] = nullptr;
  return j;
}

}  // namespace refsob
