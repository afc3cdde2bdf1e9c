#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace refsob {

/// In-place complex DFT over a 1-D or row-major 2-D array (FFTW backed).
/// Both directions are unnormalized: backward(forward(v)) == N * v.
class Fft {
 public:
  explicit Fft(std::vector<std::size_t> dims);
  ~Fft();
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  void forward(std::span<std::complex<double>> data) const;
  void backward(std::span<std::complex<double>> data) const;

  std::size_t size() const { return size_; }

 private:
  struct Impl;
  Impl* impl_;
  std::size_t size_;
};

/// Angular frequencies 2 pi k / length in FFT storage order
/// (k = 0, 1, ..., n/2 - 1, -n/2, ..., -1).
std::vector<double> angular_frequencies(std::size_t n, double length);

}  // namespace refsob
