#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace gsqg {

using Complex = std::complex<double>;

/// Integer wavevector n = (n1, n2) on the 2-torus.
struct Wavenumber {
  int n1 = 0;
  int n2 = 0;

  [[nodiscard]] double modulus() const;
  [[nodiscard]] long long modulus_sq() const {
    return static_cast<long long>(n1) * n1 + static_cast<long long>(n2) * n2;
  }
  [[nodiscard]] bool is_zero() const { return n1 == 0 && n2 == 0; }
  friend bool operator==(const Wavenumber&, const Wavenumber&) = default;
};

/// A single Fourier mode amplitude. The Hermitian partner at -n is implied.
struct Mode {
  Wavenumber n;
  Complex amplitude;
};

/// Zero-mean real field on [0, 2pi)^2 stored as Hermitian-symmetric Fourier
/// coefficients in the half-complex r2c layout: M rows (n1 wrapped) by M/2+1
/// columns (n2 >= 0).
///
/// Conventions: theta(x) = sum_n c(n) e^{i n.x}, so the coefficient of a grid
/// function g is (1/M^2) sum_j g(x_j) e^{-i n.x_j}. The n = 0 entry and the
/// Nyquist row/column (|n_i| = M/2) are always zero.
class SpectralField {
 public:
  SpectralField() = default;
  /// Zero field on an M x M grid. Throws std::invalid_argument for odd or
  /// non-positive M.
  explicit SpectralField(int grid_size);

  /// Builds a field from a list of modes; each entry also sets its partner
  /// c(-n) = conj(c(n)). Repeated wavevectors accumulate.
  static SpectralField from_modes(int grid_size, std::span<const Mode> modes);

  [[nodiscard]] int grid_size() const { return m_; }
  [[nodiscard]] int rows() const { return m_; }
  [[nodiscard]] int cols() const { return m_ / 2 + 1; }
  [[nodiscard]] bool empty() const { return m_ == 0; }

  /// Coefficient at an arbitrary wavevector; zero outside the stored range.
  [[nodiscard]] Complex coeff(Wavenumber n) const;
  /// Whether n lies inside the truncation |n_i| < M/2.
  [[nodiscard]] bool representable(Wavenumber n) const;

  [[nodiscard]] std::span<const Complex> half_spectrum() const { return data_; }
  /// Raw access for builders inside the library. Callers must finish with
  /// enforce_invariants() before handing the field out.
  [[nodiscard]] std::span<Complex> mutable_half_spectrum() { return data_; }

  /// Zeroes n = 0 and the Nyquist lines and restores Hermitian symmetry on
  /// the n2 = 0 column by averaging each pair.
  void enforce_invariants();

  /// Wavevector stored at half-spectrum (row, col).
  [[nodiscard]] Wavenumber wavenumber_at(int row, int col) const {
    return {row < m_ / 2 ? row : row - m_, col};
  }
  [[nodiscard]] std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(cols()) +
           static_cast<std::size_t>(col);
  }
  /// Multiplicity of a stored entry in full-lattice sums: 1 on the n2 = 0
  /// column (both n and -n are stored), 2 elsewhere, 0 on dropped lines.
  [[nodiscard]] int lattice_weight(int row, int col) const;

  /// Largest absolute difference of stored coefficients; grids must match.
  [[nodiscard]] double max_abs_diff(const SpectralField& other) const;

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double scale);
  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(SpectralField a, double s) { return a *= s; }
  friend SpectralField operator*(double s, SpectralField a) { return a *= s; }

  /// Copy onto another grid, dropping modes that do not fit.
  [[nodiscard]] SpectralField resampled(int grid_size) const;

  /// Calls fn(n, coefficient, weight) for every stored entry with weight > 0.
  template <class Fn>
  void for_each_mode(Fn&& fn) const {
    for (int r = 0; r < rows(); ++r) {
      for (int c = 0; c < cols(); ++c) {
        const int w = lattice_weight(r, c);
        if (w == 0) continue;
        fn(wavenumber_at(r, c), data_[index(r, c)], w);
      }
    }
  }

 private:
  int m_ = 0;
  std::vector<Complex> data_;
};

/// Throws std::invalid_argument when the grids of a and b differ.
void require_same_grid(const SpectralField& a, const SpectralField& b, const char* what);

}  // namespace gsqg
