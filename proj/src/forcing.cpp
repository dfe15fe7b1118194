#include "gsqg/forcing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace gsqg {

double TimeProfile::value(double t) const {
  switch (kind) {
    case Kind::kConstant:
      return 1.0;
    case Kind::kSinusoidal:
      return std::cos(omega * t + phase);
    case Kind::kRamp:
      return -std::expm1(-t / tau);
    case Kind::kExponential:
      return std::exp(rate * t);
  }
  return 0.0;
}

double TimeProfile::sup_abs(double t_end) const {
  switch (kind) {
    case Kind::kConstant:
    case Kind::kSinusoidal:
      return 1.0;
    case Kind::kRamp:
      return -std::expm1(-t_end / tau);
    case Kind::kExponential:
      return std::max(1.0, std::exp(rate * t_end));
  }
  return 0.0;
}

const char* to_string(TimeProfile::Kind k) {
  switch (k) {
    case TimeProfile::Kind::kConstant:
      return "const";
    case TimeProfile::Kind::kSinusoidal:
      return "sin";
    case TimeProfile::Kind::kRamp:
      return "ramp";
    case TimeProfile::Kind::kExponential:
      return "exp";
  }
  return "?";
}

void ForcingSpec::validate(int grid_size, const DealiasPolicy& policy) const {
  const double r = policy.radius(grid_size);
  for (const ForcingEntry& e : entries) {
    if (e.n.is_zero()) throw std::invalid_argument("forcing entry at n = 0 would break the zero-mean condition");
    if (e.n.modulus() > r) {
      throw std::invalid_argument("forcing mode (" + std::to_string(e.n.n1) + "," + std::to_string(e.n.n2) +
                                  ") lies outside the dealiasing radius");
    }
    if (e.profile.kind == TimeProfile::Kind::kRamp && !(e.profile.tau > 0.0)) {
      throw std::invalid_argument("ramp forcing needs tau > 0");
    }
  }
}

void ForcingSpec::accumulate(int grid_size, double t, double scale, std::span<Complex> half) const {
  const int cols = grid_size / 2 + 1;
  for (const ForcingEntry& e : entries) {
    Complex a = scale * e.profile.value(t) * e.amplitude;
    Wavenumber n = e.n;
    if (n.n2 < 0) {
      n = {-n.n1, -n.n2};
      a = std::conj(a);
    }
    const int row = n.n1 >= 0 ? n.n1 : n.n1 + grid_size;
    half[static_cast<std::size_t>(row) * cols + n.n2] += a;
    if (n.n2 == 0) {
      const int prow = n.n1 > 0 ? grid_size - n.n1 : -n.n1;
      half[static_cast<std::size_t>(prow) * cols] += std::conj(a);
    }
  }
}

SpectralField ForcingSpec::evaluate(int grid_size, double t) const {
  SpectralField f(grid_size);
  for (const ForcingEntry& e : entries) {
    if (!f.representable(e.n)) throw std::invalid_argument("forcing mode does not fit on the grid");
  }
  accumulate(grid_size, t, 1.0, f.mutable_half_spectrum());
  f.enforce_invariants();
  return f;
}

}  // namespace gsqg
