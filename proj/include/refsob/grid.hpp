#pragma once

// Uniformly sampled complex functions on an interval or a box.
//
// Axis 0 is x (or the single variable of a 1-D function), axis 1 is t.
// Periodic grids sample [lo, hi) with spacing (hi-lo)/N and are the carrier
// of Fourier-side norms; closed grids sample [lo, hi] with both endpoints
// and carry data restricted to a closed rectangle or interval.

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace refsob {

using cplx = std::complex<double>;

struct GridSpec {
  int dim = 1;
  std::array<double, 2> lo{0.0, 0.0};
  std::array<double, 2> hi{1.0, 1.0};
  std::array<std::size_t, 2> count{4, 1};
  bool periodic = true;

  static GridSpec periodic_1d(double lo, double hi, std::size_t n);
  static GridSpec closed_1d(double lo, double hi, std::size_t n);
  static GridSpec periodic_2d(double x_lo, double x_hi, std::size_t nx, double t_lo,
                              double t_hi, std::size_t nt);
  static GridSpec closed_2d(double x_lo, double x_hi, std::size_t nx, double t_lo,
                            double t_hi, std::size_t nt);

  std::size_t size() const { return dim == 1 ? count[0] : count[0] * count[1]; }
  double length(int axis) const { return hi[axis] - lo[axis]; }
  double spacing(int axis) const;
  double coord(int axis, std::size_t i) const { return lo[axis] + spacing(axis) * static_cast<double>(i); }
  /// Index of the node at coordinate c, or npos when c is not (within 1e-9
  /// of the spacing) a node.
  std::size_t node_index(int axis, double c) const;

  /// Throws DomainError: counts >= 4, even for periodic grids, positive extents.
  void validate() const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

bool operator==(const GridSpec& a, const GridSpec& b);

class GridFunction {
 public:
  GridFunction() = default;
  explicit GridFunction(GridSpec spec);
  GridFunction(GridSpec spec, std::vector<cplx> samples);

  static GridFunction sample(const GridSpec& spec, const std::function<cplx(double)>& f);
  static GridFunction sample(const GridSpec& spec, const std::function<cplx(double, double)>& f);

  const GridSpec& spec() const { return spec_; }
  int dim() const { return spec_.dim; }
  std::size_t nx() const { return spec_.count[0]; }
  std::size_t nt() const { return spec_.dim == 1 ? 1 : spec_.count[1]; }
  std::size_t size() const { return samples_.size(); }

  cplx& operator[](std::size_t i) { return samples_[i]; }
  cplx operator[](std::size_t i) const { return samples_[i]; }
  cplx& at(std::size_t ix, std::size_t it) { return samples_[ix * nt() + it]; }
  cplx at(std::size_t ix, std::size_t it) const { return samples_[ix * nt() + it]; }

  std::span<const cplx> samples() const { return samples_; }
  std::span<cplx> samples() { return samples_; }

  /// Declared support flag: vanishes for t < 0 (1-D: argument < 0).
  bool plus() const { return plus_; }
  void set_plus(bool p) { plus_ = p; }

  double max_abs() const;
  /// Discrete L2 norm, sqrt(sum |w|^2 * cell volume).
  double l2_norm() const;

  GridFunction& operator+=(const GridFunction& o);
  GridFunction& operator-=(const GridFunction& o);
  GridFunction& operator*=(cplx a);

 private:
  GridSpec spec_;
  std::vector<cplx> samples_;
  bool plus_ = false;
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator*(cplx a, GridFunction b);

/// CSV with '#' header lines carrying the grid spec, then rows
/// "index,value_re,value_im" in storage order.
void write_csv(std::ostream& os, const GridFunction& g);
GridFunction read_csv(std::istream& is);

/// Little-endian binary: 8-byte floats dim, counts (dim of them), box
/// extents (lo, hi per axis), flags (bit 0 closed, bit 1 plus); then
/// interleaved (re, im) 8-byte floats in storage order.
void write_binary(std::ostream& os, const GridFunction& g);
GridFunction read_binary(std::istream& is);

/// Dispatches on extension: ".csv" or anything else (binary).
void save_grid(const std::string& path, const GridFunction& g);
GridFunction load_grid(const std::string& path);

}  // namespace refsob
