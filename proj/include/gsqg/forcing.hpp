#pragma once

#include <span>
#include <vector>

#include "gsqg/nonlinearity.hpp"
#include "gsqg/spectral_field.hpp"

namespace gsqg {

/// Closed-form scalar time profile a(t) multiplying a complex amplitude.
struct TimeProfile {
  enum class Kind {
    kConstant,     // 1
    kSinusoidal,   // cos(omega t + phase)
    kRamp,         // 1 - exp(-t / tau)
    kExponential,  // exp(rate t)
  };
  Kind kind = Kind::kConstant;
  double omega = 0.0;
  double phase = 0.0;
  double tau = 1.0;
  double rate = 0.0;

  [[nodiscard]] double value(double t) const;
  /// sup over [0, t_end] of |a|, used for boundedness checks.
  [[nodiscard]] double sup_abs(double t_end) const;
};

const char* to_string(TimeProfile::Kind k);

struct ForcingEntry {
  Wavenumber n;
  Complex amplitude;
  TimeProfile profile;
};

/// Finite-mode, zero-mean body force; each entry also forces -n with the
/// conjugate amplitude. An empty spec is the zero force.
struct ForcingSpec {
  std::vector<ForcingEntry> entries;

  [[nodiscard]] bool empty() const { return entries.empty(); }
  /// Rejects n = 0 and modes outside the dealiasing radius of the grid.
  void validate(int grid_size, const DealiasPolicy& policy) const;
  /// f(t) on the given grid.
  [[nodiscard]] SpectralField evaluate(int grid_size, double t) const;
  /// Adds scale * f(t) into a half-spectrum of the given grid.
  void accumulate(int grid_size, double t, double scale, std::span<Complex> half) const;
};

}  // namespace gsqg
