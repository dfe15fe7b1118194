#pragma once

#include <memory>
#include <span>

#include "gsqg/spectral_field.hpp"

namespace gsqg {

/// Per-thread real<->half-complex 2D transform on an M x M grid, backed by
/// FFTW with deterministic (estimate-mode) plans. Obtain through for_grid();
/// instances are never shared between threads.
class FftWorkspace {
 public:
  static FftWorkspace& for_grid(int grid_size);

  ~FftWorkspace();
  FftWorkspace(const FftWorkspace&) = delete;
  FftWorkspace& operator=(const FftWorkspace&) = delete;

  [[nodiscard]] int grid_size() const { return m_; }

  /// Row-major M x M samples (x1 slow) to coefficients normalized by 1/M^2.
  void forward(std::span<const double> grid, std::span<Complex> half);
  /// Coefficients to samples; the input is not modified.
  void inverse(std::span<const Complex> half, std::span<double> grid);

 private:
  explicit FftWorkspace(int grid_size);

  struct Impl;
  int m_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace gsqg
