#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gsqg/errors.hpp"
#include "gsqg/forcing.hpp"
#include "gsqg/spectral_field.hpp"

namespace gsqg {

/// One recorded time sample. Norms are unsquared. The cumulative integrals
/// carry their viscosity factor: cum_diss_ham = nu int_0^t ||theta||^2_{H^{gamma-alpha}},
/// cum_diss_l2 = nu int_0^t ||theta||^2_{H^gamma}; cum_pair_* integrate the
/// forcing pairings.
struct DiagnosticSample {
  double t = 0.0;
  double h_minus_alpha = 0.0;
  double l2 = 0.0;
  double h_gamma_minus_alpha = 0.0;
  double h_gamma = 0.0;
  double lp_alpha = 0.0;
  double l1 = 0.0;
  double linf = 0.0;
  double pair_ham = 0.0;
  double pair_l2 = 0.0;
  double cum_diss_ham = 0.0;
  double cum_diss_l2 = 0.0;
  double cum_pair_ham = 0.0;
  double cum_pair_l2 = 0.0;
};

/// Time-indexed record of one run.
struct DiagnosticSeries {
  double alpha = 0.0;
  double gamma = 0.0;
  double nu = 0.0;
  int grid_size = 0;
  /// False when the L^p columns could not be evaluated (they are NaN then).
  bool physical_norms = true;
  std::vector<DiagnosticSample> samples;
  /// Cutoffs N for which ||theta_{>N}||^2_{H^{-alpha}} is recorded per sample.
  std::vector<double> tail_cutoffs;
  std::vector<std::vector<double>> tail_sq;
  /// Spectral states aligned with samples, only when requested.
  std::vector<SpectralField> snapshots;
  /// Set when the run stopped early.
  std::optional<AbortRecord> abort;

  [[nodiscard]] bool empty() const { return samples.empty(); }
  [[nodiscard]] const DiagnosticSample& initial() const { return samples.front(); }
  [[nodiscard]] const DiagnosticSample& final() const { return samples.back(); }
};

/// Fixed column order of the series CSV.
inline constexpr const char* kSeriesColumns[] = {
    "t",       "h_minus_alpha", "l2",           "h_gamma_minus_alpha", "h_gamma", "lp_alpha", "l1",
    "linf",    "pair_ham",      "pair_l2",      "cum_diss_ham",        "cum_diss_l2", "res_ham", "res_l2"};

void write_series_csv(std::ostream& out, const DiagnosticSeries& series);
/// Writes only the header line.
void write_series_csv_header(std::ostream& out);

/// Builds the norm part of a sample from a state (cumulative fields left 0).
DiagnosticSample measure_state(const SpectralField& theta, double t, double alpha, double gamma,
                               const ForcingSpec& forcing, bool physical_norms, int lp_oversample = 1);

/// 1/2||theta(t)||^2_{H^{-alpha}} + nu int ||theta||^2_{H^{gamma-alpha}} - 1/2||theta_0||^2_{H^{-alpha}}
///   - int <f, theta>_{H^{-alpha}}, one entry per sample (the first is 0).
std::vector<double> hamiltonian_balance_residual(const DiagnosticSeries& series);
/// Same with (L^2, H^gamma, <f,theta>_{L^2}).
std::vector<double> l2_balance_residual(const DiagnosticSeries& series);

struct BalanceResidual {
  std::vector<double> hamiltonian;
  std::vector<double> l2;
  [[nodiscard]] double max_abs_hamiltonian() const;
  [[nodiscard]] double max_abs_l2() const;
};
BalanceResidual balance_residuals(const DiagnosticSeries& series);

/// Result of the transport-diffusion L^p bound check for p in {1, p_alpha, 2, inf}.
struct LpCheck {
  std::vector<double> exponents;
  /// max_t ||theta(t)||_p - ||theta_0||_p - int_0^t ||f||_p, per exponent.
  std::vector<double> worst_violation;
  std::vector<double> initial_norm;
  /// Time integral of ||f||_p over the whole run, per exponent.
  std::vector<double> forcing_integral;

  /// True if every violation is <= rel_tol * ||theta_0||_p + abs_allowance.
  [[nodiscard]] bool passes(double rel_tol, double abs_allowance = 0.0) const;
};

/// Requires physical norms in the series. The forcing integral is evaluated
/// with composite Simpson on a substep grid finer than the sampling.
LpCheck lp_monotonicity_check(const DiagnosticSeries& series, const ForcingSpec& forcing);

struct DecayEnvelope {
  double fitted_slope = 0.0;       // d log ||theta||^2_{L^2} / d log t on [delta, T]
  double envelope_constant = 0.0;  // sup (nu t)^{alpha/gamma} ||theta(t)||^2_{L^2}
  int samples_used = 0;
};

/// Throws std::invalid_argument when fewer than three samples fall in [delta, T].
DecayEnvelope decay_envelope_check(const DiagnosticSeries& series, double delta);

/// Trapezoid integral over samples of y(sample index).
template <class Fn>
double trapezoid(const DiagnosticSeries& s, std::size_t from, std::size_t to, Fn&& y) {
  double acc = 0.0;
  for (std::size_t k = from; k + 1 <= to && k + 1 < s.samples.size(); ++k) {
    acc += 0.5 * (s.samples[k + 1].t - s.samples[k].t) * (y(k) + y(k + 1));
  }
  return acc;
}

/// Index of the sample whose time is closest to t.
std::size_t snap_to_sample(const DiagnosticSeries& series, double t);

}  // namespace gsqg
