#include "refsob/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <mutex>
#include <numbers>

#include "refsob/errors.hpp"

namespace refsob {

namespace {
// The FFTW planner is not reentrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct Fft::Impl {
  fftw_complex* buffer = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

Fft::Fft(std::vector<std::size_t> dims) : impl_(new Impl), size_(1) {
  if (dims.empty() || dims.size() > 2) throw DomainError("FFT supports 1-D and 2-D arrays");
  std::vector<int> n;
  for (auto d : dims) {
    size_ *= d;
    n.push_back(static_cast<int>(d));
  }
  std::lock_guard lock(planner_mutex());
  impl_->buffer = fftw_alloc_complex(size_);
  impl_->fwd = fftw_plan_dft(static_cast<int>(n.size()), n.data(), impl_->buffer, impl_->buffer,
                             FFTW_FORWARD, FFTW_ESTIMATE);
  impl_->bwd = fftw_plan_dft(static_cast<int>(n.size()), n.data(), impl_->buffer, impl_->buffer,
                             FFTW_BACKWARD, FFTW_ESTIMATE);
}

Fft::~Fft() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(impl_->fwd);
  fftw_destroy_plan(impl_->bwd);
  fftw_free(impl_->buffer);
  delete impl_;
}

void Fft::forward(std::span<std::complex<double>> data) const {
  if (data.size() != size_) throw DomainError("FFT size mismatch");
  std::memcpy(impl_->buffer, data.data(), size_ * sizeof(fftw_complex));
  fftw_execute(impl_->fwd);
  std::memcpy(static_cast<void*>(data.data()), impl_->buffer, size_ * sizeof(fftw_complex));
}

void Fft::backward(std::span<std::complex<double>> data) const {
  if (data.size() != size_) throw DomainError("FFT size mismatch");
  std::memcpy(impl_->buffer, data.data(), size_ * sizeof(fftw_complex));
  fftw_execute(impl_->bwd);
  std::memcpy(static_cast<void*>(data.data()), impl_->buffer, size_ * sizeof(fftw_complex));
}

std::vector<double> angular_frequencies(std::size_t n, double length) {
  std::vector<double> xi(n);
  const auto half = static_cast<long>(n / 2);
  for (std::size_t i = 0; i < n; ++i) {
    long k = static_cast<long>(i);
    if (k >= half) k -= static_cast<long>(n);
    xi[i] = 2.0 * std::numbers::pi * static_cast<double>(k) / length;
  }
  return xi;
}

}  // namespace refsob
