#include "refsob/extension.hpp"

#include <algorithm>
#include <cmath>

#include "refsob/errors.hpp"

namespace refsob {

std::vector<double> HestenesCoeffs::as_double() const {
  std::vector<double> out;
  out.reserve(lambda.size());
  for (const auto& l : lambda) out.push_back(static_cast<double>(l));
  return out;
}

Rational HestenesCoeffs::moment(int alpha) const {
  Rational acc = 0;
  for (std::size_t j = 0; j < lambda.size(); ++j) {
    Rational base(-1, static_cast<long>(j + 1));
    Rational p = 1;
    for (int a = 0; a < alpha; ++a) p *= base;
    acc += lambda[j] * p;
  }
  return acc;
}

nlohmann::json HestenesCoeffs::to_json() const {
  nlohmann::json lam = nlohmann::json::array();
  for (const auto& l : lambda) lam.push_back(l.str());
  return {{"k", k}, {"lambda", lam}};
}

HestenesCoeffs hestenes_coeffs(int k) {
  if (k < 0) throw DomainError("Hestenes order must be >= 0");
  if (k > kMaxHestenesOrder) throw CapExceeded("Hestenes order above 12 is not supported");
  const int n = k + 1;
  // Rows alpha = 0..k, columns j = 1..k+1, augmented with the right side 1.
  std::vector<std::vector<Rational>> a(n, std::vector<Rational>(n + 1));
  for (int alpha = 0; alpha < n; ++alpha) {
    for (int j = 0; j < n; ++j) {
      Rational base(-1, j + 1), p = 1;
      for (int e = 0; e < alpha; ++e) p *= base;
      a[alpha][j] = p;
    }
    a[alpha][n] = 1;
  }
  for (int c = 0; c < n; ++c) {
    int piv = c;
    while (piv < n && a[piv][c] == 0) ++piv;
    if (piv == n) throw NumericalError("singular moment system");
    std::swap(a[c], a[piv]);
    for (int r = 0; r < n; ++r) {
      if (r == c || a[r][c] == 0) continue;
      const Rational f = a[r][c] / a[c][c];
      for (int q = c; q <= n; ++q) a[r][q] -= f * a[c][q];
    }
  }
  HestenesCoeffs h;
  h.k = k;
  for (int j = 0; j < n; ++j) h.lambda.push_back(a[j][n] / a[j][j]);
  return h;
}

double smooth_step(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / u);
  const double b = std::exp(-1.0 / (1.0 - u));
  return a / (a + b);
}

CutoffChi::CutoffChi(double epsilon) : eps_(epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw DomainError("cutoff width must be > 0");
}

double CutoffChi::operator()(double t) const {
  return smooth_step((t + 2.0 * eps_ / 3.0) / (eps_ / 3.0));
}

// ---- oracles -------------------------------------------------------------

FunctionOracle FunctionOracle::of(std::function<cplx(double)> f, int k) {
  FunctionOracle o;
  o.f1 = std::move(f);
  o.smoothness = k;
  return o;
}

FunctionOracle FunctionOracle::of(std::function<cplx(double, double)> f, int k) {
  FunctionOracle o;
  o.f2 = std::move(f);
  o.smoothness = k;
  return o;
}

namespace {

template <class F>
cplx guarded(F&& f) {
  cplx v;
  try {
    v = f();
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw EvaluationError(std::string("oracle failed: ") + e.what());
  }
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
    throw EvaluationError("oracle returned a non-finite value");
  return v;
}

}  // namespace

cplx FunctionOracle::operator()(double t) const {
  if (!f1) throw EvaluationError("oracle has no 1-D evaluator");
  return guarded([&] { return f1(t); });
}

cplx FunctionOracle::operator()(double x, double t) const {
  if (!f2) throw EvaluationError("oracle has no 2-D evaluator");
  return guarded([&] { return f2(x, t); });
}

// ---- oracle extensions ---------------------------------------------------

namespace {

// Tolerance for deciding that a node sits on the boundary line.
double boundary_slack(const GridSpec& g, int axis) { return 1e-9 * g.spacing(axis); }

}  // namespace

GridFunction extend_halfplane(const FunctionOracle& v, int k, double epsilon,
                              const HalfPlaneSpec& pi, const GridSpec& out_grid) {
  if (out_grid.dim != 2) throw DomainError("half-plane extension needs a 2-D output grid");
  const auto lam = hestenes_coeffs(k).as_double();
  const CutoffChi chi(epsilon);
  const int axis = static_cast<int>(pi.axis);
  const double slack = boundary_slack(out_grid, axis);
  GridFunction out(out_grid);
  for (std::size_t i = 0; i < out_grid.count[0]; ++i) {
    for (std::size_t j = 0; j < out_grid.count[1]; ++j) {
      const double x = out_grid.coord(0, i), t = out_grid.coord(1, j);
      const double d = pi.inward(axis == 0 ? x : t);
      if (d >= -slack) {
        out.at(i, j) = v(x, t);
        continue;
      }
      const double c = chi(d);
      if (c == 0.0) continue;
      cplx acc = 0.0;
      for (std::size_t q = 0; q < lam.size(); ++q) {
        const double r = pi.at_inward(-d / static_cast<double>(q + 1));
        acc += lam[q] * (axis == 0 ? v(r, t) : v(x, r));
      }
      out.at(i, j) = c * acc;
    }
  }
  return out;
}

GridFunction extend_halfline(const FunctionOracle& v, int k, double epsilon, const HalfLineSpec& g,
                             const GridSpec& out_grid) {
  if (out_grid.dim != 1) throw DomainError("half-line extension needs a 1-D output grid");
  const auto lam = hestenes_coeffs(k).as_double();
  const CutoffChi chi(epsilon);
  const double slack = boundary_slack(out_grid, 0);
  GridFunction out(out_grid);
  for (std::size_t j = 0; j < out_grid.count[0]; ++j) {
    const double t = out_grid.coord(0, j);
    const double d = g.inward(t);
    if (d >= -slack) {
      out[j] = v(t);
      continue;
    }
    const double c = chi(d);
    if (c == 0.0) continue;
    cplx acc = 0.0;
    for (std::size_t q = 0; q < lam.size(); ++q)
      acc += lam[q] * v(g.at_inward(-d / static_cast<double>(q + 1)));
    out[j] = c * acc;
  }
  return out;
}

// ---- grid extensions -----------------------------------------------------

std::vector<double> lagrange_weights(const std::vector<double>& nodes, double x) {
  std::vector<double> w(nodes.size(), 1.0);
  for (std::size_t a = 0; a < nodes.size(); ++a)
    for (std::size_t b = 0; b < nodes.size(); ++b)
      if (a != b) w[a] *= (x - nodes[b]) / (nodes[a] - nodes[b]);
  return w;
}

namespace {

struct Term {
  std::size_t index;
  double weight;
};

// Linear map on one grid line: row j of the extension as a sparse list of
// (source index, weight).
std::vector<std::vector<Term>> line_operator(const GridSpec& g, int axis, int k, double epsilon,
                                             Side side, double threshold, double src_lo = -INFINITY,
                                             double src_hi = INFINITY) {
  const std::size_t n = g.count[axis];
  const double h = g.spacing(axis);
  const std::size_t b = g.node_index(axis, threshold);
  if (b == GridSpec::npos) throw DomainError("half-plane boundary does not fall on a grid node");
  HalfLineSpec spec{side, threshold};
  // Closed half-domain index range [first, last].
  const std::size_t c_first = side == Side::greater_than ? b : 0;
  const std::size_t c_last = side == Side::greater_than ? n - 1 : b;
  // Source window inside the closure.
  std::size_t first = c_first, last = c_last;
  const double slack = 1e-9 * h;
  while (first < last && g.coord(axis, first) < src_lo - slack) ++first;
  while (last > first && g.coord(axis, last) > src_hi + slack) --last;
  const std::size_t m = static_cast<std::size_t>(k) + 2;
  if (last - first + 1 < m) throw DomainError("too few nodes in the half-domain for interpolation");

  const auto lam = hestenes_coeffs(k).as_double();
  const CutoffChi chi(epsilon);
  const double lo_c = g.coord(axis, first), hi_c = g.coord(axis, last);
  std::vector<std::vector<Term>> rows(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (j >= c_first && j <= c_last) {
      rows[j].push_back({j, 1.0});
      continue;
    }
    const double d = spec.inward(g.coord(axis, j));
    const double c = chi(d);
    if (c == 0.0) continue;
    for (std::size_t q = 0; q < lam.size(); ++q) {
      const double r = spec.at_inward(-d / static_cast<double>(q + 1));
      if (r < lo_c - 1e-9 * h || r > hi_c + 1e-9 * h) continue;  // beyond the box: zero
      const double pos = (r - g.lo[axis]) / h;
      long start = static_cast<long>(std::floor(pos)) - static_cast<long>(m - 1) / 2;
      start = std::clamp(start, static_cast<long>(first), static_cast<long>(last + 1 - m));
      std::vector<double> nodes(m);
      for (std::size_t a = 0; a < m; ++a) nodes[a] = g.coord(axis, static_cast<std::size_t>(start) + a);
      const auto w = lagrange_weights(nodes, r);
      for (std::size_t a = 0; a < m; ++a)
        rows[j].push_back({static_cast<std::size_t>(start) + a, c * lam[q] * w[a]});
    }
  }
  return rows;
}

}  // namespace

GridFunction extend_grid(const GridFunction& w, int k, double epsilon, const HalfPlaneSpec& pi,
                         double src_lo, double src_hi) {
  if (w.dim() != 2) throw DomainError("grid half-plane extension needs 2-D data");
  const GridSpec& g = w.spec();
  const int axis = static_cast<int>(pi.axis);
  const auto rows = line_operator(g, axis, k, epsilon, pi.side, pi.threshold, src_lo, src_hi);
  GridFunction out(g);
  const std::size_t nx = g.count[0], nt = g.count[1];
  if (axis == 1) {
    for (std::size_t i = 0; i < nx; ++i)
      for (std::size_t j = 0; j < nt; ++j) {
        cplx acc = 0.0;
        for (const auto& term : rows[j]) acc += term.weight * w.at(i, term.index);
        out.at(i, j) = acc;
      }
  } else {
    for (std::size_t i = 0; i < nx; ++i)
      for (std::size_t j = 0; j < nt; ++j) {
        cplx acc = 0.0;
        for (const auto& term : rows[i]) acc += term.weight * w.at(term.index, j);
        out.at(i, j) = acc;
      }
  }
  return out;
}

GridFunction extend_grid_1d(const GridFunction& h, int k, double epsilon, const HalfLineSpec& g) {
  if (h.dim() != 1) throw DomainError("grid half-line extension needs 1-D data");
  const auto rows = line_operator(h.spec(), 0, k, epsilon, g.side, g.threshold);
  GridFunction out(h.spec());
  for (std::size_t j = 0; j < h.size(); ++j) {
    cplx acc = 0.0;
    for (const auto& term : rows[j]) acc += term.weight * h[term.index];
    out[j] = acc;
  }
  return out;
}

GridFunction projector_plus(const GridFunction& w, int k, double epsilon) {
  GridFunction out = w - extend_grid(w, k, epsilon, {Axis::t, Side::less_than, 0.0});
  out.set_plus(true);
  return out;
}

GridFunction projector_Q(const GridFunction& w, int k, double l, double tau, double epsilon) {
  if (w.dim() != 2) throw DomainError("projector_Q needs 2-D data");
  if (!(l > 0.0) || !(tau > 0.0)) throw DomainError("projector_Q needs l > 0 and tau > 0");
  if (epsilon <= 0.0) epsilon = l;
  const GridSpec& g = w.spec();
  const double tol = 1e-9 * std::max(g.spacing(0), g.spacing(1));
  if (g.lo[0] > -l + tol || g.coord(0, g.count[0] - 1) < 2.0 * l - tol ||
      g.lo[1] > tol || g.coord(1, g.count[1] - 1) < tau + l - tol)
    throw DomainError("projector_Q: box must contain [-l, 2l] x [0, tau + l]");
  GridFunction lam = extend_grid(w, k, epsilon, {Axis::t, Side::less_than, tau});
  lam = extend_grid(lam, k, epsilon, {Axis::x, Side::less_than, l}, 0.0, l);
  lam = extend_grid(lam, k, epsilon, {Axis::x, Side::greater_than, 0.0}, 0.0, l);
  GridFunction out = w - lam;
  out.set_plus(w.plus());
  return out;
}

GridFunction projector_tau(const GridFunction& h, int k, double tau, double epsilon) {
  return h - extend_grid_1d(h, k, epsilon, {Side::less_than, tau});
}

}  // namespace refsob
