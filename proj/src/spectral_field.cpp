#include "gsqg/spectral_field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace gsqg {

double Wavenumber::modulus() const { return std::sqrt(static_cast<double>(modulus_sq())); }

SpectralField::SpectralField(int grid_size) : m_(grid_size) {
  if (grid_size <= 0 || grid_size % 2 != 0) {
    throw std::invalid_argument("grid size must be a positive even integer, got " +
                                std::to_string(grid_size));
  }
  data_.assign(static_cast<std::size_t>(rows()) * static_cast<std::size_t>(cols()), Complex{});
}

SpectralField SpectralField::from_modes(int grid_size, std::span<const Mode> modes) {
  SpectralField f(grid_size);
  for (const Mode& m : modes) {
    if (m.n.is_zero()) continue;
    if (!f.representable(m.n)) {
      throw std::invalid_argument("mode (" + std::to_string(m.n.n1) + "," + std::to_string(m.n.n2) +
                                  ") does not fit on a grid of size " + std::to_string(grid_size));
    }
    // Store the representative with n2 > 0, or n2 == 0 and both signs.
    Wavenumber n = m.n;
    Complex a = m.amplitude;
    if (n.n2 < 0) {
      n = {-n.n1, -n.n2};
      a = std::conj(a);
    }
    const int row = n.n1 >= 0 ? n.n1 : n.n1 + grid_size;
    f.data_[f.index(row, n.n2)] += a;
    if (n.n2 == 0) {
      const int prow = n.n1 > 0 ? grid_size - n.n1 : -n.n1;
      f.data_[f.index(prow, 0)] += std::conj(a);
    }
  }
  f.enforce_invariants();
  return f;
}

bool SpectralField::representable(Wavenumber n) const {
  const int h = m_ / 2;
  return std::abs(n.n1) < h && std::abs(n.n2) < h;
}

Complex SpectralField::coeff(Wavenumber n) const {
  if (m_ == 0 || n.is_zero() || !representable(n)) return {};
  bool conj = false;
  if (n.n2 < 0) {
    n = {-n.n1, -n.n2};
    conj = true;
  }
  const int row = n.n1 >= 0 ? n.n1 : n.n1 + m_;
  const Complex c = data_[index(row, n.n2)];
  return conj ? std::conj(c) : c;
}

int SpectralField::lattice_weight(int row, int col) const {
  const int h = m_ / 2;
  if (row == h || col == h) return 0;
  if (row == 0 && col == 0) return 0;
  return col == 0 ? 1 : 2;
}

void SpectralField::enforce_invariants() {
  if (m_ == 0) return;
  const int h = m_ / 2;
  for (int c = 0; c < cols(); ++c) data_[index(h, c)] = {};
  for (int r = 0; r < rows(); ++r) data_[index(r, h)] = {};
  data_[0] = {};
  for (int r = 1; r < h; ++r) {
    Complex& a = data_[index(r, 0)];
    Complex& b = data_[index(m_ - r, 0)];
    const Complex avg = 0.5 * (a + std::conj(b));
    a = avg;
    b = std::conj(avg);
  }
}

double SpectralField::max_abs_diff(const SpectralField& other) const {
  require_same_grid(*this, other, "max_abs_diff");
  double worst = 0.0;
  for (std::size_t i = 0; i < data_.size(); ++i) worst = std::max(worst, std::abs(data_[i] - other.data_[i]));
  return worst;
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  require_same_grid(*this, other, "operator+=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  require_same_grid(*this, other, "operator-=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double scale) {
  for (Complex& c : data_) c *= scale;
  return *this;
}

SpectralField SpectralField::resampled(int grid_size) const {
  SpectralField out(grid_size);
  const int h = std::min(m_, grid_size) / 2;
  for (int n1 = -h + 1; n1 < h; ++n1) {
    for (int n2 = 0; n2 < h; ++n2) {
      const Complex c = coeff({n1, n2});
      const int row = n1 >= 0 ? n1 : n1 + grid_size;
      out.data_[out.index(row, n2)] = c;
    }
  }
  out.enforce_invariants();
  return out;
}

void require_same_grid(const SpectralField& a, const SpectralField& b, const char* what) {
  if (a.grid_size() != b.grid_size()) {
    throw std::invalid_argument(std::string(what) + ": grid mismatch (" + std::to_string(a.grid_size()) +
                                " vs " + std::to_string(b.grid_size()) + ")");
  }
}

}  // namespace gsqg
