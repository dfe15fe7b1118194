#include "gsqg/spectral_ops.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "gsqg/fft.hpp"

namespace gsqg {
namespace {

double weight_pow(long long n_sq, double s) {
  if (s == 0.0) return 1.0;
  return std::pow(static_cast<double>(n_sq), s);
}

template <class Mult>
SpectralField apply_multiplier(const SpectralField& f, Mult&& mult) {
  SpectralField out(f.grid_size());
  auto src = f.half_spectrum();
  auto dst = out.mutable_half_spectrum();
  for (int r = 0; r < f.rows(); ++r) {
    for (int c = 0; c < f.cols(); ++c) {
      if (f.lattice_weight(r, c) == 0) continue;
      const std::size_t i = f.index(r, c);
      dst[i] = mult(f.wavenumber_at(r, c)) * src[i];
    }
  }
  return out;
}

}  // namespace

SpectralField from_physical(const RealGrid& samples) {
  const int m = samples.grid_size;
  if (m <= 0 || m % 2 != 0) {
    throw std::invalid_argument("from_physical: grid size must be positive and even, got " + std::to_string(m));
  }
  if (samples.values.size() != static_cast<std::size_t>(m) * m) {
    throw std::invalid_argument("from_physical: sample count does not match grid size");
  }
  SpectralField f(m);
  FftWorkspace::for_grid(m).forward(samples.values, f.mutable_half_spectrum());
  f.enforce_invariants();
  return f;
}

RealGrid to_physical(const SpectralField& f) { return to_physical(f, f.grid_size()); }

RealGrid to_physical(const SpectralField& f, int grid_size) {
  if (grid_size < f.grid_size()) throw std::invalid_argument("to_physical: target grid smaller than field grid");
  RealGrid g(grid_size);
  if (grid_size == f.grid_size()) {
    FftWorkspace::for_grid(grid_size).inverse(f.half_spectrum(), g.values);
  } else {
    const SpectralField padded = f.resampled(grid_size);
    FftWorkspace::for_grid(grid_size).inverse(padded.half_spectrum(), g.values);
  }
  return g;
}

SpectralField fractional_laplacian(const SpectralField& f, double s) {
  return apply_multiplier(f, [s](Wavenumber n) { return Complex(weight_pow(n.modulus_sq(), s), 0.0); });
}

VectorField riesz_perp(const SpectralField& f, double alpha) {
  VectorField u;
  u.x1 = apply_multiplier(f, [alpha](Wavenumber n) {
    return Complex(0.0, -static_cast<double>(n.n2) * weight_pow(n.modulus_sq(), -alpha));
  });
  u.x2 = apply_multiplier(f, [alpha](Wavenumber n) {
    return Complex(0.0, static_cast<double>(n.n1) * weight_pow(n.modulus_sq(), -alpha));
  });
  return u;
}

VectorField gradient(const SpectralField& f) {
  VectorField g;
  g.x1 = apply_multiplier(f, [](Wavenumber n) { return Complex(0.0, n.n1); });
  g.x2 = apply_multiplier(f, [](Wavenumber n) { return Complex(0.0, n.n2); });
  return g;
}

double sobolev_norm_sq(const SpectralField& f, double s) {
  double acc = 0.0;
  f.for_each_mode([&](Wavenumber n, Complex c, int w) { acc += w * weight_pow(n.modulus_sq(), s) * std::norm(c); });
  return acc;
}

double sobolev_norm(const SpectralField& f, double s) { return std::sqrt(sobolev_norm_sq(f, s)); }

double inner_product_hs(const SpectralField& f, const SpectralField& g, double s) {
  require_same_grid(f, g, "inner_product_hs");
  auto gs = g.half_spectrum();
  double acc = 0.0;
  f.for_each_mode([&](Wavenumber n, Complex c, int w) {
    const int row = n.n1 >= 0 ? n.n1 : n.n1 + f.grid_size();
    const Complex d = gs[f.index(row, n.n2)];
    acc += w * weight_pow(n.modulus_sq(), s) * (c.real() * d.real() + c.imag() * d.imag());
  });
  return acc;
}

SpectralField project_low(const SpectralField& f, double cutoff) {
  if (!(cutoff > 0.0)) throw std::invalid_argument("project_low: cutoff must be positive");
  const double c2 = cutoff * cutoff;
  return apply_multiplier(f, [c2](Wavenumber n) {
    return Complex(static_cast<double>(n.modulus_sq()) <= c2 ? 1.0 : 0.0, 0.0);
  });
}

SpectralField project_high(const SpectralField& f, double cutoff) { return f - project_low(f, cutoff); }

double high_tail_norm_sq(const SpectralField& f, double cutoff, double s) {
  const double c2 = cutoff * cutoff;
  double acc = 0.0;
  f.for_each_mode([&](Wavenumber n, Complex c, int w) {
    if (static_cast<double>(n.modulus_sq()) > c2) acc += w * weight_pow(n.modulus_sq(), s) * std::norm(c);
  });
  return acc;
}

double lp_norm(const RealGrid& samples, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : samples.values) m = std::max(m, std::abs(v));
    return m;
  }
  double acc = 0.0;
  if (p == 2.0) {
    for (double v : samples.values) acc += v * v;
  } else if (p == 1.0) {
    for (double v : samples.values) acc += std::abs(v);
  } else {
    for (double v : samples.values) acc += std::pow(std::abs(v), p);
  }
  acc /= static_cast<double>(samples.values.size());
  return std::pow(acc, 1.0 / p);
}

double lp_norm(const SpectralField& f, double p, int oversample) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
  if (oversample < 1) throw std::invalid_argument("lp_norm: oversample must be >= 1");
  return lp_norm(to_physical(f, f.grid_size() * oversample), p);
}

double hermitian_defect(const SpectralField& f) {
  double worst = 0.0;
  const int h = f.grid_size() / 2;
  for (int n1 = 1; n1 < h; ++n1) {
    const Complex a = f.half_spectrum()[f.index(n1, 0)];
    const Complex b = f.half_spectrum()[f.index(f.grid_size() - n1, 0)];
    worst = std::max(worst, std::abs(a - std::conj(b)));
  }
  return worst;
}

}  // namespace gsqg
