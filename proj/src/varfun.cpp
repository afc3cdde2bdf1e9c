#include "refsob/varfun.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "refsob/errors.hpp"

namespace refsob {

namespace {

constexpr double kE = std::numbers::e;

void require_positive_finite(double v, double r, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    std::ostringstream os;
    os << what << ": nonpositive or non-finite value " << v << " at r = " << r;
    throw DomainError(os.str());
  }
}

std::string format_list(const std::vector<double>& xs) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) os << ',';
    os << xs[i];
  }
  return os.str();
}

std::vector<double> parse_list(const std::string& body) {
  std::vector<double> out;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos)
        throw ParseError("trailing characters in '" + item + "'");
    } catch (const std::logic_error&) {
      throw ParseError("bad number '" + item + "' in function parameter");
    }
  }
  return out;
}

}  // namespace

double eval_log_multiscale(std::span<const double> theta, double r) {
  double value = 1.0;
  double iterated = r;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    if (!(iterated > 0.0)) throw DomainError("iterated logarithm undefined at r");
    iterated = std::log(iterated);
    if (!(iterated > 0.0)) {
      std::ostringstream os;
      os << "log multiscale: iterated logarithm " << i + 1 << " is " << iterated
         << " <= 0 at r = " << r;
      throw DomainError(os.str());
    }
    value *= std::pow(iterated, theta[i]);
  }
  return value;
}

double log_multiscale_rmin(std::size_t k) {
  double r = kE;
  for (std::size_t i = 0; i < k; ++i) r = std::exp(r);
  if (!std::isfinite(r)) {
    throw DomainError("log multiscale with k = " + std::to_string(k) +
                      " has no representable threshold r_min");
  }
  return r;
}

FunctionParameter::FunctionParameter() = default;

FunctionParameter FunctionParameter::constant_one() { return FunctionParameter{}; }

FunctionParameter FunctionParameter::log_multiscale(std::vector<double> theta) {
  if (theta.empty()) throw DomainError("log multiscale needs k >= 1 exponents");
  FunctionParameter p;
  p.kind_ = Kind::log_multiscale;
  p.floor_ = log_multiscale_rmin(theta.size());
  p.params_ = std::move(theta);
  return p;
}

FunctionParameter FunctionParameter::power_times_slow(double rho, FunctionParameter inner) {
  if (!std::isfinite(rho)) throw DomainError("power exponent must be finite");
  FunctionParameter p;
  p.kind_ = Kind::power_times_slow;
  p.params_ = {rho};
  p.floor_ = inner.floor_;
  p.inner_ = std::make_shared<const FunctionParameter>(std::move(inner));
  return p;
}

FunctionParameter FunctionParameter::tabulated(std::vector<std::pair<double, double>> table) {
  if (table.size() < 2) throw DomainError("tabulated parameter needs >= 2 samples");
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto [r, v] = table[i];
    if (!(r >= 1.0) || !std::isfinite(r)) throw DomainError("tabulated r must be >= 1");
    require_positive_finite(v, r, "tabulated parameter");
    if (i > 0 && !(r > table[i - 1].first))
      throw DomainError("tabulated r values must be strictly increasing");
  }
  FunctionParameter p;
  p.kind_ = Kind::tabulated;
  p.floor_ = table.front().first;
  p.table_ = std::move(table);
  return p;
}

double FunctionParameter::operator()(double r) const {
  if (!(r >= 1.0)) {
    std::ostringstream os;
    os << "function parameter evaluated at r = " << r << " < 1";
    throw DomainError(os.str());
  }
  switch (kind_) {
    case Kind::constant_one:
      return 1.0;
    case Kind::log_multiscale:
      return eval_log_multiscale(params_, std::max(r, floor_));
    case Kind::power_times_slow:
      return std::pow(r, params_[0]) * (*inner_)(r);
    case Kind::tabulated: {
      if (r <= table_.front().first) return table_.front().second;
      if (r >= table_.back().first) return table_.back().second;
      auto hi = std::upper_bound(table_.begin(), table_.end(), r,
                                 [](double x, const auto& e) { return x < e.first; });
      auto lo = hi - 1;
      const double w = (std::log(r) - std::log(lo->first)) /
                       (std::log(hi->first) - std::log(lo->first));
      return std::exp((1.0 - w) * std::log(lo->second) + w * std::log(hi->second));
    }
  }
  return 1.0;
}

std::string FunctionParameter::describe() const {
  switch (kind_) {
    case Kind::constant_one:
      return "one";
    case Kind::log_multiscale:
      return "log[" + format_list(params_) + "]";
    case Kind::power_times_slow:
      return "pow[" + format_list(params_) + "]*" + inner_->describe();
    case Kind::tabulated:
      return "table[" + std::to_string(table_.size()) + "]";
  }
  return "one";
}

nlohmann::json FunctionParameter::to_json() const {
  nlohmann::json j;
  switch (kind_) {
    case Kind::constant_one:
      j["kind"] = "constant_one";
      j["params"] = nlohmann::json::array();
      break;
    case Kind::log_multiscale:
      j["kind"] = "log_multiscale";
      j["params"] = params_;
      break;
    case Kind::power_times_slow:
      j["kind"] = "power_times_slow";
      j["params"] = params_;
      j["inner"] = inner_->to_json();
      break;
    case Kind::tabulated: {
      j["kind"] = "tabulated";
      j["params"] = nlohmann::json::array();
      auto t = nlohmann::json::array();
      for (const auto& [r, v] : table_) t.push_back({r, v});
      j["table"] = t;
      break;
    }
  }
  return j;
}

FunctionParameter FunctionParameter::from_json(const nlohmann::json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "constant_one") return constant_one();
    if (kind == "log_multiscale") return log_multiscale(j.at("params").get<std::vector<double>>());
    if (kind == "power_times_slow") {
      const auto params = j.at("params").get<std::vector<double>>();
      if (params.size() != 1) throw ParseError("power_times_slow takes one exponent");
      FunctionParameter inner = j.contains("inner") ? from_json(j.at("inner")) : constant_one();
      return power_times_slow(params[0], std::move(inner));
    }
    if (kind == "tabulated") {
      std::vector<std::pair<double, double>> table;
      for (const auto& row : j.at("table")) table.emplace_back(row.at(0), row.at(1));
      return tabulated(std::move(table));
    }
    throw ParseError("unknown function parameter kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed function parameter: ") + e.what());
  }
}

FunctionParameter FunctionParameter::parse(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\n");
  if (first == std::string::npos) throw ParseError("empty function parameter");
  if (text[first] == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("function parameter JSON: ") + e.what());
    }
    return from_json(j);
  }
  const std::string s = text.substr(first, text.find_last_not_of(" \t\n") - first + 1);
  if (s == "one" || s == "1") return constant_one();
  auto bracket_body = [&](const std::string& head, std::string& rest) -> std::string {
    const auto close = s.find(']');
    if (s.rfind(head + "[", 0) != 0 || close == std::string::npos)
      throw ParseError("cannot parse function parameter '" + s + "'");
    rest = s.substr(close + 1);
    return s.substr(head.size() + 1, close - head.size() - 1);
  };
  std::string rest;
  if (s.rfind("log[", 0) == 0) {
    auto theta = parse_list(bracket_body("log", rest));
    if (!rest.empty()) throw ParseError("trailing text after log[...]");
    return log_multiscale(std::move(theta));
  }
  if (s.rfind("pow[", 0) == 0) {
    auto rho = parse_list(bracket_body("pow", rest));
    if (rho.size() != 1) throw ParseError("pow[...] takes one exponent");
    FunctionParameter inner;
    if (!rest.empty()) {
      if (rest[0] != '*') throw ParseError("expected '*' after pow[...]");
      inner = parse(rest.substr(1));
    }
    return power_times_slow(rho[0], std::move(inner));
  }
  throw ParseError("cannot parse function parameter '" + s + "'");
}

InterpolationPsi::InterpolationPsi(double s0, double s, double s1, FunctionParameter phi)
    : s0_(s0), s_(s), s1_(s1), phi_(std::move(phi)) {
  if (!(s0 < s && s < s1)) throw DomainError("interpolation parameter needs s0 < s < s1");
}

double InterpolationPsi::operator()(double r) const {
  if (!(r > 0.0)) throw DomainError("psi is defined on (0, inf) only");
  if (r < 1.0) return phi_(1.0);
  return std::pow(r, theta()) * phi_(std::pow(r, 1.0 / (s1_ - s0_)));
}

RealFunction InterpolationPsi::as_function() const {
  return [psi = *this](double r) { return psi(r); };
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::slowly_varying:
      return "slowly_varying";
    case Verdict::regularly_varying:
      return "regularly_varying";
    case Verdict::rejected:
      return "rejected";
  }
  return "rejected";
}

nlohmann::json VariationReport::to_json() const {
  return {{"estimated_index", estimated_index},
          {"max_ratio_deviation", max_ratio_deviation},
          {"max_limit_deviation", max_limit_deviation},
          {"lambdas_tested", lambdas_tested},
          {"limit_ratios", limit_ratios},
          {"r_grid_min", r_grid.empty() ? 0.0 : r_grid.front()},
          {"r_grid_max", r_grid.empty() ? 0.0 : r_grid.back()},
          {"r_grid_points", r_grid.size()},
          {"compact_sup", compact_sup},
          {"compact_inv_sup", compact_inv_sup},
          {"verdict", to_string(verdict)}};
}

std::vector<double> logspace(double lo, double hi, std::size_t n) {
  if (n < 2 || !(lo > 0.0) || !(hi > lo)) throw DomainError("logspace needs 0 < lo < hi, n >= 2");
  std::vector<double> out(n);
  const double a = std::log10(lo), b = std::log10(hi);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  return out;
}

std::vector<double> default_limit_grid() { return logspace(1e2, 1e12, 41); }
std::vector<double> default_lambdas() { return {0.5, 2.0, 10.0}; }
std::vector<double> default_index_grid() { return logspace(1e2, 1e300, 60); }

namespace {

void validate_grid(std::span<const double> r_grid, std::size_t min_points) {
  if (r_grid.size() < min_points)
    throw InconclusiveError("grid has " + std::to_string(r_grid.size()) + " points, need " +
                            std::to_string(min_points));
  for (std::size_t i = 0; i < r_grid.size(); ++i) {
    if (!(r_grid[i] >= 1.0) || !std::isfinite(r_grid[i]))
      throw DomainError("grid points must be finite and >= 1");
    if (i > 0 && !(r_grid[i] > r_grid[i - 1]))
      throw DomainError("grid must be strictly increasing");
  }
}

// Limit extrapolation of log(f(lambda r)/f(r)) in u = 1/log r.
VariationReport limit_analysis(const RealFunction& f, std::span<const double> r_grid,
                               std::span<const double> lambdas, double tol) {
  validate_grid(r_grid, 8);
  if (r_grid.back() < 1e3) throw InconclusiveError("grid too short to observe a limit");
  if (lambdas.empty()) throw DomainError("need at least one lambda");
  for (double lam : lambdas)
    if (!(lam > 0.0) || lam == 1.0) throw DomainError("lambdas must be positive and != 1");

  VariationReport rep;
  rep.r_grid.assign(r_grid.begin(), r_grid.end());
  rep.lambdas_tested.assign(lambdas.begin(), lambdas.end());

  // Condition b): boundedness of f and 1/f on the compact [1, r_grid[0]].
  double sup = 0.0, inv_sup = 0.0;
  const double r0 = r_grid.front();
  for (int i = 0; i <= 64; ++i) {
    const double r = 1.0 + (r0 - 1.0) * i / 64.0;
    const double v = f(r);
    require_positive_finite(v, r, "function parameter");
    sup = std::max(sup, v);
    inv_sup = std::max(inv_sup, 1.0 / v);
  }
  rep.compact_sup = sup;
  rep.compact_inv_sup = inv_sup;

  const std::size_t n = r_grid.size();
  const std::size_t start = n / 2;
  const std::size_t m = n - start;
  if (m < 4) throw InconclusiveError("upper half of the grid has fewer than 4 points");

  Eigen::MatrixXd basis(m, 3);
  for (std::size_t i = 0; i < m; ++i) {
    const double u = 1.0 / std::log(r_grid[start + i]);
    basis(i, 0) = 1.0;
    basis(i, 1) = u;
    basis(i, 2) = u * u;
  }
  const auto qr = basis.colPivHouseholderQr();

  std::vector<double> log_limits;
  for (double lam : lambdas) {
    Eigen::VectorXd y(m);
    for (std::size_t i = 0; i < m; ++i) {
      const double r = r_grid[start + i];
      const double a = f(lam * r < 1.0 ? 1.0 : lam * r);
      const double b = f(r);
      require_positive_finite(a, lam * r, "function parameter");
      require_positive_finite(b, r, "function parameter");
      y(i) = std::log(a / b);
    }
    // Deviations that keep growing toward the end of the grid mean the
    // limit has not been reached.
    bool growing = true;
    for (std::size_t i = 1; i < m && growing; ++i)
      growing = std::abs(y(i)) > std::abs(y(i - 1));
    const double spread = std::abs(std::abs(y(m - 1)) - std::abs(y(0)));
    if (growing && spread > 1e-9 * (1.0 + std::abs(y(0)))) {
      std::ostringstream os;
      os << "ratio deviations still increasing along the grid for lambda = " << lam;
      throw InconclusiveError(os.str());
    }
    const Eigen::VectorXd c = qr.solve(y);
    log_limits.push_back(c(0));
  }

  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    const double ll = std::log(lambdas[i]);
    num += log_limits[i] * ll;
    den += ll * ll;
  }
  rep.estimated_index = num / den;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    const double limit = std::exp(log_limits[i]);
    const double target = std::pow(lambdas[i], rep.estimated_index);
    rep.limit_ratios.push_back(limit);
    rep.max_ratio_deviation = std::max(rep.max_ratio_deviation, std::abs(limit - target) / target);
    rep.max_limit_deviation = std::max(rep.max_limit_deviation, std::abs(limit - 1.0));
  }

  if (rep.max_limit_deviation < tol && std::abs(rep.estimated_index) < tol)
    rep.verdict = Verdict::slowly_varying;
  else if (rep.max_ratio_deviation < tol)
    rep.verdict = Verdict::regularly_varying;
  else
    rep.verdict = Verdict::rejected;
  return rep;
}

}  // namespace

VariationReport check_class_M(const FunctionParameter& phi, std::span<const double> r_grid,
                              std::span<const double> lambdas, double tol) {
  auto rep = limit_analysis([&phi](double r) { return phi(r); }, r_grid, lambdas, tol);
  if (rep.verdict != Verdict::slowly_varying) rep.verdict = Verdict::rejected;
  return rep;
}

VariationReport check_regular_variation(const RealFunction& f, std::span<const double> r_grid,
                                        std::span<const double> lambdas, double tol) {
  return limit_analysis(f, r_grid, lambdas, tol);
}

double min_power_bound_constant(const FunctionParameter& phi, double eps,
                                std::span<const double> r_grid) {
  if (!(eps > 0.0)) throw DomainError("eps must be positive");
  double c = 1.0;
  for (double r : r_grid) {
    const double v = phi(r);
    require_positive_finite(v, r, "function parameter");
    const double re = std::pow(r, eps);
    c = std::max({c, v / re, 1.0 / (v * re)});
  }
  return c;
}

IndexFit fit_variation_index(const RealFunction& f, std::span<const double> r_grid) {
  validate_grid(r_grid, 8);
  const std::size_t start = r_grid.size() / 2;
  std::vector<double> xs, ys;
  for (std::size_t i = start; i < r_grid.size(); ++i) {
    const double v = f(r_grid[i]);
    if (!std::isfinite(v)) break;  // overflow at the far end of long grids
    require_positive_finite(v, r_grid[i], "function");
    xs.push_back(std::log(r_grid[i]));
    ys.push_back(std::log(v));
  }
  IndexFit fit;
  fit.points_used = xs.size();
  if (xs.size() < 4) throw InconclusiveError("fewer than 4 finite samples in the fit window");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  fit.slope = sxy / sxx;
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double res = ys[i] - (my + fit.slope * (xs[i] - mx));
    ss += res * res;
  }
  fit.rms_residual = std::sqrt(ss / n);
  return fit;
}

double estimate_variation_index(const RealFunction& f, std::span<const double> r_grid,
                                double residual_threshold) {
  validate_grid(r_grid, 8);
  if (std::log10(r_grid.back() / r_grid.front()) < 6.0)
    throw InconclusiveError("index estimation needs a grid spanning >= 6 decades");
  const IndexFit fit = fit_variation_index(f, r_grid);
  if (fit.rms_residual > residual_threshold) {
    std::ostringstream os;
    os << "log-log fit residual " << fit.rms_residual << " exceeds " << residual_threshold;
    throw InconclusiveError(os.str());
  }
  return fit.slope;
}

MajorantResult concave_majorant_ratio(std::span<const double> r, std::span<const double> f) {
  MajorantResult out;
  const std::size_t n = r.size();
  if (n != f.size() || n < 3) throw DomainError("majorant needs >= 3 matching samples");
  const double rmax = r.back();
  const double fmax = *std::max_element(f.begin(), f.end());
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = r[i] / rmax;
    y[i] = f[i] / fmax;
  }
  // Upper hull (monotone chain, left to right).
  std::vector<std::size_t> hull;
  for (std::size_t i = 0; i < n; ++i) {
    while (hull.size() >= 2) {
      const std::size_t a = hull[hull.size() - 2], b = hull.back();
      const double cross = (x[b] - x[a]) * (y[i] - y[a]) - (y[b] - y[a]) * (x[i] - x[a]);
      if (cross >= 0.0)
        hull.pop_back();
      else
        break;
    }
    hull.push_back(i);
  }
  out.witness = {r.front(), r.front(), r.back()};
  std::size_t seg = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (seg + 1 < hull.size() - 1 && hull[seg + 1] < i) ++seg;
    const std::size_t a = hull[seg];
    const std::size_t b = hull[std::min(seg + 1, hull.size() - 1)];
    double h = y[i];
    if (b != a && i != a && i != b) {
      const double w = (x[i] - x[a]) / (x[b] - x[a]);
      h = (1.0 - w) * y[a] + w * y[b];
    }
    const double ratio = h * fmax / f[i];
    if (ratio > out.max_ratio) {
      out.max_ratio = ratio;
      out.witness = {r[a], r[i], r[b]};
    }
  }
  return out;
}

std::string to_string(InterpolationVerdict::Decision d) {
  switch (d) {
    case InterpolationVerdict::Decision::accepted:
      return "accepted";
    case InterpolationVerdict::Decision::rejected:
      return "rejected";
    case InterpolationVerdict::Decision::inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

nlohmann::json InterpolationVerdict::to_json() const {
  nlohmann::json j{{"decision", to_string(decision)},
                   {"route", route},
                   {"index", index},
                   {"fit_residual", fit_residual},
                   {"majorant_ratio", majorant_ratio}};
  if (has_witness) j["witness"] = witness;
  return j;
}

InterpolationVerdict is_interpolation_parameter(const RealFunction& psi,
                                                std::span<const double> r_grid,
                                                const PseudoconcavityOptions& opt) {
  validate_grid(r_grid, 8);
  InterpolationVerdict v;
  const IndexFit fit = fit_variation_index(psi, r_grid);
  v.index = fit.slope;
  v.fit_residual = fit.rms_residual;
  const bool good_fit = fit.rms_residual <= opt.residual_threshold;
  const double theta = fit.slope;

  if (good_fit && theta >= opt.index_margin && theta <= 1.0 - opt.index_margin) {
    v.decision = InterpolationVerdict::Decision::accepted;
    v.route = "regular_variation";
    return v;
  }

  // Majorant test on the tail (upper half, finite values only).
  std::vector<double> rt, ft;
  for (std::size_t i = r_grid.size() / 2; i < r_grid.size(); ++i) {
    const double val = psi(r_grid[i]);
    if (!std::isfinite(val)) break;
    require_positive_finite(val, r_grid[i], "psi");
    rt.push_back(r_grid[i]);
    ft.push_back(val);
  }
  if (rt.size() < 4) throw InconclusiveError("tail of the grid has fewer than 4 finite samples");
  const MajorantResult full = concave_majorant_ratio(rt, ft);
  // Same test on a shortened tail, for grid-growth stability.
  const std::size_t cut = std::max<std::size_t>(3, (rt.size() * 3) / 4);
  const MajorantResult shorter = concave_majorant_ratio(std::span(rt).first(cut),
                                                        std::span(ft).first(cut));
  v.majorant_ratio = full.max_ratio;

  const bool borderline = good_fit && (std::abs(theta) < opt.index_margin ||
                                       std::abs(theta - 1.0) < opt.index_margin);
  if (full.max_ratio > opt.ratio_threshold || shorter.max_ratio > opt.ratio_threshold) {
    v.decision = InterpolationVerdict::Decision::rejected;
    v.route = "pseudoconcavity";
    v.has_witness = true;
    v.witness = full.max_ratio >= shorter.max_ratio ? full.witness : shorter.witness;
    return v;
  }
  if (borderline) {
    v.decision = InterpolationVerdict::Decision::inconclusive;
    v.route = "borderline";
    return v;
  }
  v.decision = InterpolationVerdict::Decision::accepted;
  v.route = "pseudoconcavity";
  return v;
}

}  // namespace refsob
