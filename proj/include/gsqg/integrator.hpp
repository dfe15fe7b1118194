#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "gsqg/diagnostics.hpp"
#include "gsqg/forcing.hpp"
#include "gsqg/nonlinearity.hpp"
#include "gsqg/spectral_field.hpp"

namespace gsqg {

/// Full problem specification of one viscous run.
struct SimParams {
  double alpha = 0.5;
  double gamma = 0.5;
  double nu = 0.0;
  int grid_size = 64;
  double dt = 1e-2;
  double t_end = 1.0;
  DealiasPolicy dealias{};
  /// When false the transport term is dropped (pure fractional heat flow).
  bool nonlinear = true;

  /// Throws ConfigError on alpha outside (0,1], gamma <= 0, nu < 0,
  /// dt <= 0, t_end < 0, or an unusable grid/dealias combination.
  void validate() const;
  /// Largest retained |n_i| under the dealiasing cutoff.
  [[nodiscard]] int max_wavenumber_component() const;
};

/// Per-mode diagonal multiplier in the half-spectrum layout.
struct DiagonalMultiplier {
  int grid_size = 0;
  std::vector<double> values;

  [[nodiscard]] SpectralField apply(const SpectralField& f) const;
  [[nodiscard]] double at(Wavenumber n) const;
};

/// exp(-nu |n|^{2 gamma} dt_frac) for every mode. Throws for dt_frac < 0.
DiagonalMultiplier dissipation_factor(const SimParams& params, double dt_frac);

struct TrajectoryState {
  double t = 0.0;
  SpectralField field;
  long long step_index = 0;
};

/// Blow-up guard threshold on |theta(n)|.
inline constexpr double kBlowUpLimit = 1e12;
/// Advective CFL bound: dt * max|n_i| * max|u| <= kCflLimit.
inline constexpr double kCflLimit = 0.5;

/// One integrating-factor RK4 (Lawson) step of size params.dt. Throws
/// NumericalAbort on CFL violation or a non-finite / exploding coefficient.
TrajectoryState step(const TrajectoryState& state, const SimParams& params, const ForcingSpec& forcing);

struct RunOptions {
  /// Time between recorded samples; 0 records after every step.
  double sample_interval = 0.0;
  /// Shrink the step below params.dt when the CFL bound requires it.
  bool adaptive_cfl = false;
  double cfl_safety = 0.8;
  /// Cutoffs N for the high-frequency tail norms recorded per sample.
  std::vector<double> tail_cutoffs;
  bool keep_snapshots = false;
  bool physical_norms = true;
  int lp_oversample = 1;
  /// Return the partial series with abort set instead of throwing.
  bool capture_abort = false;
};

using Observer = std::function<void(const TrajectoryState&, const DiagnosticSample&)>;

/// Integrates to params.t_end, recording a sample at t = 0, every
/// sample_interval, and at t_end. The balance integrals are advanced with
/// the same RK4 stages as the field, so the residuals are fourth order in dt.
DiagnosticSeries run(const SpectralField& theta0, const SimParams& params, const ForcingSpec& forcing,
                     const std::vector<Observer>& observers = {}, const RunOptions& options = {});

/// Stateful stepper used by run(); exposed for tests and tools that need
/// control over individual steps.
class Stepper {
 public:
  Stepper(const SimParams& params, const ForcingSpec& forcing);
  ~Stepper();
  Stepper(const Stepper&) = delete;
  Stepper& operator=(const Stepper&) = delete;

  /// Running integrals (nu||.||^2_{H^{gamma-alpha}}, nu||.||^2_{H^gamma},
  /// <f,.>_{H^{-alpha}}, <f,.>_{L^2}) since the stepper was created.
  struct Quadratures {
    double diss_ham = 0.0;
    double diss_l2 = 0.0;
    double pair_ham = 0.0;
    double pair_l2 = 0.0;
  };

  /// Advances state by one step that does not overshoot t_target. In fixed
  /// mode the step is dt_max (or less to land on t_target) and a CFL
  /// violation throws; in adaptive mode the step also respects the CFL bound.
  /// Returns the step size taken.
  double advance(TrajectoryState& state, double t_target, double dt_max, bool adaptive, double cfl_safety);

  [[nodiscard]] const Quadratures& quadratures() const { return quad_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  Quadratures quad_;
};

}  // namespace gsqg
