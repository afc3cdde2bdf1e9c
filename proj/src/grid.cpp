#include "refsob/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "detail/binary_io.hpp"
#include "refsob/errors.hpp"

namespace refsob {

GridSpec GridSpec::periodic_1d(double lo, double hi, std::size_t n) {
  GridSpec g;
  g.dim = 1;
  g.lo = {lo, 0.0};
  g.hi = {hi, 0.0};
  g.count = {n, 1};
  g.periodic = true;
  g.validate();
  return g;
}

GridSpec GridSpec::closed_1d(double lo, double hi, std::size_t n) {
  GridSpec g = periodic_1d(lo, hi, n % 2 ? n + 1 : n);
  g.count[0] = n;
  g.periodic = false;
  g.validate();
  return g;
}

GridSpec GridSpec::periodic_2d(double x_lo, double x_hi, std::size_t nx, double t_lo,
                               double t_hi, std::size_t nt) {
  GridSpec g;
  g.dim = 2;
  g.lo = {x_lo, t_lo};
  g.hi = {x_hi, t_hi};
  g.count = {nx, nt};
  g.periodic = true;
  g.validate();
  return g;
}

GridSpec GridSpec::closed_2d(double x_lo, double x_hi, std::size_t nx, double t_lo, double t_hi,
                             std::size_t nt) {
  GridSpec g;
  g.dim = 2;
  g.lo = {x_lo, t_lo};
  g.hi = {x_hi, t_hi};
  g.count = {nx, nt};
  g.periodic = false;
  g.validate();
  return g;
}

double GridSpec::spacing(int axis) const {
  const double n = static_cast<double>(count[axis]);
  return periodic ? length(axis) / n : length(axis) / (n - 1.0);
}

std::size_t GridSpec::node_index(int axis, double c) const {
  const double h = spacing(axis);
  const double q = (c - lo[axis]) / h;
  const double r = std::round(q);
  if (std::abs(q - r) > 1e-9 || r < 0.0 || r >= static_cast<double>(count[axis])) return npos;
  return static_cast<std::size_t>(r);
}

void GridSpec::validate() const {
  if (dim != 1 && dim != 2) throw DomainError("grid dimension must be 1 or 2");
  for (int a = 0; a < dim; ++a) {
    if (count[a] < 4) throw DomainError("grid needs at least 4 samples per axis");
    if (periodic && count[a] % 2 != 0)
      throw DomainError("periodic grid needs an even sample count per axis");
    if (!(hi[a] > lo[a]) || !std::isfinite(lo[a]) || !std::isfinite(hi[a]))
      throw DomainError("grid extent must be finite with hi > lo");
  }
}

bool operator==(const GridSpec& a, const GridSpec& b) {
  if (a.dim != b.dim || a.periodic != b.periodic) return false;
  for (int i = 0; i < a.dim; ++i)
    if (a.lo[i] != b.lo[i] || a.hi[i] != b.hi[i] || a.count[i] != b.count[i]) return false;
  return true;
}

GridFunction::GridFunction(GridSpec spec) : spec_(spec), samples_(spec.size()) { spec_.validate(); }

GridFunction::GridFunction(GridSpec spec, std::vector<cplx> samples)
    : spec_(spec), samples_(std::move(samples)) {
  spec_.validate();
  if (samples_.size() != spec_.size()) throw DomainError("sample count does not match grid");
}

GridFunction GridFunction::sample(const GridSpec& spec, const std::function<cplx(double)>& f) {
  if (spec.dim != 1) throw DomainError("1-D sampler on a 2-D grid");
  GridFunction g(spec);
  for (std::size_t i = 0; i < spec.count[0]; ++i) g[i] = f(spec.coord(0, i));
  return g;
}

GridFunction GridFunction::sample(const GridSpec& spec,
                                  const std::function<cplx(double, double)>& f) {
  if (spec.dim != 2) throw DomainError("2-D sampler on a 1-D grid");
  GridFunction g(spec);
  for (std::size_t i = 0; i < spec.count[0]; ++i)
    for (std::size_t j = 0; j < spec.count[1]; ++j) g.at(i, j) = f(spec.coord(0, i), spec.coord(1, j));
  return g;
}

double GridFunction::max_abs() const {
  double m = 0.0;
  for (const auto& v : samples_) m = std::max(m, std::abs(v));
  return m;
}

double GridFunction::l2_norm() const {
  double cell = spec_.spacing(0);
  if (spec_.dim == 2) cell *= spec_.spacing(1);
  double s = 0.0;
  for (const auto& v : samples_) s += std::norm(v);
  return std::sqrt(s * cell);
}

GridFunction& GridFunction::operator+=(const GridFunction& o) {
  if (!(spec_ == o.spec_)) throw DomainError("grid mismatch in +=");
  for (std::size_t i = 0; i < samples_.size(); ++i) samples_[i] += o.samples_[i];
  plus_ = plus_ && o.plus_;
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& o) {
  if (!(spec_ == o.spec_)) throw DomainError("grid mismatch in -=");
  for (std::size_t i = 0; i < samples_.size(); ++i) samples_[i] -= o.samples_[i];
  plus_ = plus_ && o.plus_;
  return *this;
}

GridFunction& GridFunction::operator*=(cplx a) {
  for (auto& v : samples_) v *= a;
  return *this;
}

GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
GridFunction operator*(cplx a, GridFunction b) { return b *= a; }

// ---- CSV ---------------------------------------------------------------

void write_csv(std::ostream& os, const GridFunction& g) {
  const auto& s = g.spec();
  os.precision(17);
  os << "# dim=" << s.dim << "\n# counts=" << s.count[0];
  if (s.dim == 2) os << ',' << s.count[1];
  os << "\n# box=" << s.lo[0] << ',' << s.hi[0];
  if (s.dim == 2) os << ',' << s.lo[1] << ',' << s.hi[1];
  os << "\n# closed=" << (s.periodic ? 0 : 1) << "\n# plus=" << (g.plus() ? 1 : 0) << '\n';
  os << "index,value_re,value_im\n";
  for (std::size_t i = 0; i < g.size(); ++i) os << i << ',' << g[i].real() << ',' << g[i].imag() << '\n';
}

namespace {

std::vector<double> split_numbers(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::logic_error&) {
      throw ParseError("bad number '" + item + "' in grid file");
    }
  }
  return out;
}

}  // namespace

GridFunction read_csv(std::istream& is) {
  GridSpec spec;
  bool plus = false;
  std::vector<double> counts, box;
  std::string line;
  std::vector<cplx> values;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::string key = line.substr(1, eq - 1);
      key.erase(0, key.find_first_not_of(' '));
      const std::string val = line.substr(eq + 1);
      if (key == "dim") spec.dim = std::stoi(val);
      else if (key == "counts") counts = split_numbers(val);
      else if (key == "box") box = split_numbers(val);
      else if (key == "closed") spec.periodic = std::stoi(val) == 0;
      else if (key == "plus") plus = std::stoi(val) != 0;
      continue;
    }
    if (line.rfind("index", 0) == 0) continue;
    const auto cols = split_numbers(line);
    if (cols.size() != 3) throw ParseError("grid CSV rows need index,value_re,value_im");
    if (static_cast<std::size_t>(cols[0]) != values.size())
      throw ParseError("grid CSV indices must be consecutive from 0");
    values.emplace_back(cols[1], cols[2]);
  }
  if (counts.size() != static_cast<std::size_t>(spec.dim) ||
      box.size() != 2 * static_cast<std::size_t>(spec.dim))
    throw ParseError("grid CSV header incomplete");
  for (int a = 0; a < spec.dim; ++a) {
    spec.count[a] = static_cast<std::size_t>(counts[a]);
    spec.lo[a] = box[2 * a];
    spec.hi[a] = box[2 * a + 1];
  }
  if (spec.dim == 1) spec.count[1] = 1;
  GridFunction g(spec, std::move(values));
  g.set_plus(plus);
  return g;
}

// ---- binary ------------------------------------------------------------

using detail::get_f64;
using detail::put_f64;

void write_binary(std::ostream& os, const GridFunction& g) {
  const auto& s = g.spec();
  put_f64(os, s.dim);
  for (int a = 0; a < s.dim; ++a) put_f64(os, static_cast<double>(s.count[a]));
  for (int a = 0; a < s.dim; ++a) {
    put_f64(os, s.lo[a]);
    put_f64(os, s.hi[a]);
  }
  put_f64(os, (s.periodic ? 0.0 : 1.0) + (g.plus() ? 2.0 : 0.0));
  for (const auto& v : g.samples()) {
    put_f64(os, v.real());
    put_f64(os, v.imag());
  }
}

GridFunction read_binary(std::istream& is) {
  GridSpec spec;
  const double dim = get_f64(is);
  if (dim != 1.0 && dim != 2.0) throw ParseError("binary grid: bad dimension");
  spec.dim = static_cast<int>(dim);
  for (int a = 0; a < spec.dim; ++a) spec.count[a] = static_cast<std::size_t>(get_f64(is));
  if (spec.dim == 1) spec.count[1] = 1;
  for (int a = 0; a < spec.dim; ++a) {
    spec.lo[a] = get_f64(is);
    spec.hi[a] = get_f64(is);
  }
  const auto flags = static_cast<int>(get_f64(is));
  spec.periodic = (flags & 1) == 0;
  spec.validate();
  std::vector<cplx> values(spec.size());
  for (auto& v : values) {
    const double re = get_f64(is);
    const double im = get_f64(is);
    v = {re, im};
  }
  GridFunction g(spec, std::move(values));
  g.set_plus((flags & 2) != 0);
  return g;
}

void save_grid(const std::string& path, const GridFunction& g) {
  const bool csv = path.size() >= 4 && path.substr(path.size() - 4) == ".csv";
  std::ofstream os(path, csv ? std::ios::out : std::ios::out | std::ios::binary);
  if (!os) throw Error("cannot open '" + path + "' for writing");
  csv ? write_csv(os, g) : write_binary(os, g);
}

GridFunction load_grid(const std::string& path) {
  const bool csv = path.size() >= 4 && path.substr(path.size() - 4) == ".csv";
  std::ifstream is(path, csv ? std::ios::in : std::ios::in | std::ios::binary);
  if (!is) throw Error("cannot open '" + path + "'");
  return csv ? read_csv(is) : read_binary(is);
}

}  // namespace refsob
