#include "gsqg/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <mutex>
#include <stdexcept>

namespace gsqg {
namespace {

// FFTW's planner is not reentrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct FftWorkspace::Impl {
  double* real = nullptr;
  fftw_complex* spec = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;
  std::size_t n_real = 0;
  std::size_t n_spec = 0;
};

FftWorkspace& FftWorkspace::for_grid(int grid_size) {
  thread_local std::map<int, std::unique_ptr<FftWorkspace>> cache;
  auto it = cache.find(grid_size);
  if (it == cache.end()) {
    it = cache.emplace(grid_size, std::unique_ptr<FftWorkspace>(new FftWorkspace(grid_size))).first;
  }
  return *it->second;
}

FftWorkspace::FftWorkspace(int grid_size) : m_(grid_size), impl_(std::make_unique<Impl>()) {
  if (grid_size <= 0 || grid_size % 2 != 0) throw std::invalid_argument("FFT grid size must be positive and even");
  impl_->n_real = static_cast<std::size_t>(m_) * m_;
  impl_->n_spec = static_cast<std::size_t>(m_) * (m_ / 2 + 1);
  impl_->real = fftw_alloc_real(impl_->n_real);
  impl_->spec = fftw_alloc_complex(impl_->n_spec);
  std::lock_guard lock(planner_mutex());
  impl_->fwd = fftw_plan_dft_r2c_2d(m_, m_, impl_->real, impl_->spec, FFTW_ESTIMATE);
  impl_->inv = fftw_plan_dft_c2r_2d(m_, m_, impl_->spec, impl_->real, FFTW_ESTIMATE);
  if (impl_->fwd == nullptr || impl_->inv == nullptr) throw std::runtime_error("FFTW planning failed");
}

FftWorkspace::~FftWorkspace() {
  std::lock_guard lock(planner_mutex());
  if (impl_->fwd) fftw_destroy_plan(impl_->fwd);
  if (impl_->inv) fftw_destroy_plan(impl_->inv);
  fftw_free(impl_->real);
  fftw_free(impl_->spec);
}

void FftWorkspace::forward(std::span<const double> grid, std::span<Complex> half) {
  if (grid.size() != impl_->n_real || half.size() != impl_->n_spec) throw std::invalid_argument("FFT size mismatch");
  std::copy(grid.begin(), grid.end(), impl_->real);
  fftw_execute(impl_->fwd);
  const double scale = 1.0 / static_cast<double>(impl_->n_real);
  for (std::size_t i = 0; i < impl_->n_spec; ++i) {
    half[i] = Complex(impl_->spec[i][0] * scale, impl_->spec[i][1] * scale);
  }
}

void FftWorkspace::inverse(std::span<const Complex> half, std::span<double> grid) {
  if (grid.size() != impl_->n_real || half.size() != impl_->n_spec) throw std::invalid_argument("FFT size mismatch");
  for (std::size_t i = 0; i < impl_->n_spec; ++i) {
    impl_->spec[i][0] = half[i].real();
    impl_->spec[i][1] = half[i].imag();
  }
  fftw_execute(impl_->inv);
  std::copy(impl_->real, impl_->real + impl_->n_real, grid.begin());
}

}  // namespace gsqg
