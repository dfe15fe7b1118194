#pragma once

#include <limits>
#include <utility>
#include <vector>

#include "gsqg/spectral_field.hpp"

namespace gsqg {

/// Row-major M x M samples at x = 2 pi (i1, i2) / M with i1 (the x1 index)
/// varying slowest.
struct RealGrid {
  int grid_size = 0;
  std::vector<double> values;

  RealGrid() = default;
  explicit RealGrid(int m) : grid_size(m), values(static_cast<std::size_t>(m) * m, 0.0) {}
  double& at(int i1, int i2) { return values[static_cast<std::size_t>(i1) * grid_size + i2]; }
  [[nodiscard]] double at(int i1, int i2) const { return values[static_cast<std::size_t>(i1) * grid_size + i2]; }
};

/// Two-component field, e.g. the velocity R_perp theta.
struct VectorField {
  SpectralField x1;
  SpectralField x2;
};

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Forward transform; the mean and the Nyquist lines are dropped.
SpectralField from_physical(const RealGrid& samples);
/// Inverse transform on the field's own grid.
RealGrid to_physical(const SpectralField& f);
/// Inverse transform on a finer grid (oversample >= 1 times M), used for
/// more accurate physical-space quadrature.
RealGrid to_physical(const SpectralField& f, int grid_size);

/// Multiplies every coefficient by |n|^{2s}.
SpectralField fractional_laplacian(const SpectralField& f, double s);

/// u = grad_perp (-Delta)^{-alpha} f: u1 = -i n2 |n|^{-2 alpha} f, u2 = i n1 |n|^{-2 alpha} f.
VectorField riesz_perp(const SpectralField& f, double alpha);

/// Gradient (i n1 f, i n2 f).
VectorField gradient(const SpectralField& f);

/// Homogeneous Sobolev norm sqrt(sum |n|^{2s} |f(n)|^2) over the full lattice.
double sobolev_norm(const SpectralField& f, double s);
/// Same as sobolev_norm squared, without the square root.
double sobolev_norm_sq(const SpectralField& f, double s);

/// <f, g>_{H^s} = sum |n|^{2s} Re(f(n) conj g(n)). Throws on grid mismatch.
double inner_product_hs(const SpectralField& f, const SpectralField& g, double s);

/// Keeps the modes with |n| <= cutoff (closed inequality).
SpectralField project_low(const SpectralField& f, double cutoff);
/// f - project_low(f, cutoff).
SpectralField project_high(const SpectralField& f, double cutoff);
/// ||f_{>cutoff}||^2_{H^s} without materializing the projection.
double high_tail_norm_sq(const SpectralField& f, double cutoff, double s);

/// (integral |f|^p dx / (2 pi)^2)^{1/p} by grid quadrature; p = kInfinity gives
/// the grid maximum of |f|. oversample >= 1 evaluates on an oversample*M grid.
/// Throws std::invalid_argument for p < 1.
double lp_norm(const SpectralField& f, double p, int oversample = 1);
/// lp_norm on already-evaluated samples.
double lp_norm(const RealGrid& samples, double p);

/// Critical integrability exponent 2 / (1 + alpha).
constexpr double critical_exponent(double alpha) { return 2.0 / (1.0 + alpha); }

/// Largest |c(n) - conj(c(-n))| over the stored n2 = 0 column.
double hermitian_defect(const SpectralField& f);

}  // namespace gsqg
