#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gsqg/config.hpp"
#include "gsqg/diagnostics.hpp"

namespace gsqg {

using SweepConfig = Config;

/// Critical frequency N_nu = nu^{-1/(2 gamma)}.
double critical_frequency(double nu, double gamma);

struct GridChoice {
  int grid_size = 0;
  /// The cap prevented (2/3)(M/2) >= 2 N_nu.
  bool capped = false;
};

/// Smallest power of two M >= 32 whose dealiasing radius holds 2 N_nu, the
/// datum and the forcing, limited to cfg.grid_cap.
GridChoice grid_for_viscosity(double nu, const SweepConfig& cfg);

/// Everything measured for one viscosity.
struct NuResult {
  double nu = 0.0;
  int grid_size = 0;
  /// "grid" for a time-stepped run, "linear-flow" for the exact family evaluator.
  std::string method;
  double D = 0.0;
  std::map<double, double> D_delta;  // delta as requested -> value at the snapped time
  std::map<double, double> H;        // includes delta = 0
  std::map<double, double> tails;    // lambda -> int_0^T ||theta_{>lambda N_nu}||^2_{H^{-alpha}}
  std::map<double, bool> tail_resolved;
  /// nu int_0^nu ||theta||^2_{H^{gamma-alpha}}; NaN when the samples cannot resolve [0, nu].
  double D_window = 0.0;
  /// Tail integrals over [0, T] at the fixed cutoffs of cfg.tail_grid.
  std::vector<double> phi_tails;
  double hamiltonian_residual = 0.0;  // max_t |residual| of the Hamiltonian balance
  double l2_residual = 0.0;
  std::optional<LpCheck> lp;
  std::vector<std::string> flags;
  std::optional<AbortRecord> abort;
  DiagnosticSeries series;

  [[nodiscard]] bool usable() const { return !abort.has_value(); }
};

struct CauchyEntry {
  double nu_i = 0.0;
  double nu_j = 0.0;
  /// ||theta^{nu_i} - theta^{nu_j}||_{L^2([0,T]; H^{-alpha})}; NaN if either run aborted.
  double distance = 0.0;
};

struct ResolutionCheck {
  double nu = 0.0;
  int grid_size = 0;
  int coarse_grid_size = 0;
  /// Relative change per functional between the two grids.
  std::map<std::string, double> relative_change;
  double max_relative_change = 0.0;
  double tolerance = 0.0;
  [[nodiscard]] bool passes() const { return max_relative_change <= tolerance; }
};

struct SweepReport {
  SweepConfig config;
  std::string generated;  // ISO-8601 UTC
  std::vector<NuResult> per_nu;
  std::vector<double> phi;  // aligned with config.tail_grid
  std::vector<CauchyEntry> cauchy;
  std::optional<ResolutionCheck> resolution;
};

/// Runs one simulation per viscosity (concurrently, capped by GSQG_THREADS)
/// and assembles the report. Aborted runs stay in the report, flagged.
SweepReport run_sweep(const SweepConfig& cfg);

/// Writes report.json, one series CSV per viscosity and the initial and
/// final spectral snapshots, all under cfg.output_dir.
void write_sweep_outputs(const SweepReport& report, const std::filesystem::path& dir);
std::string report_json(const SweepReport& report);

/// Least-squares slope of log y against log x.
double fit_log_slope(const std::vector<double>& x, const std::vector<double>& y);

struct HigherOrderVerdict {
  double delta = 0.0;
  double max_H = 0.0;
  /// d log H / d log(1/nu) over the usable entries: positive means growth as nu -> 0.
  double slope = 0.0;
  bool pass = false;
};

/// H(nu, delta) must stay finite with slope <= 0.2. Throws std::invalid_argument for delta outside (0, T).
HigherOrderVerdict higher_order_bound_check(const SweepReport& report, double delta, double slope_tolerance = 0.2);
/// Slope of log H(., delta) against log nu, any delta in [0, T] present in the report.
double higher_order_trend(const SweepReport& report, double delta);

struct DissipationTableRow {
  double delta = 0.0;
  double sup_D_delta = 0.0;
};

struct InstantDissipationVerdict {
  std::vector<DissipationTableRow> table;  // delta decreasing
  double reference = 0.0;                  // D(nu_max)
  bool monotone = false;
  bool pass = false;
};

InstantDissipationVerdict no_instant_dissipation_check(const SweepReport& report, double fraction = 0.05);

struct EquivalenceCurve {
  double lambda = 0.0;
  std::vector<double> nu;
  std::vector<double> tail;
  std::vector<double> D;
  bool tail_vanishes = false;
  bool D_vanishes = false;
  bool resolved = false;  // at least two resolved viscosities
  bool consistent = false;
};

struct EquivalenceVerdict {
  std::vector<EquivalenceCurve> curves;
  bool consistent = false;
};

EquivalenceVerdict frequency_equivalence_check(const SweepReport& report, double threshold = 0.05);

struct GlobalExistenceReport {
  SweepReport sweep;
  std::vector<double> consecutive_distances;
  bool distances_decreasing = false;
  /// max |2 * Hamiltonian residual| of the finest run over ||theta_0||^2_{H^{-alpha}}.
  double hamiltonian_residual_relative = 0.0;
  /// max over runs of the L^{p_alpha} violation over ||theta_0||_{L^{p_alpha}}.
  double lp_alpha_violation_relative = 0.0;
  bool phi_decreasing = false;
};

/// Requires gamma = 1 and alpha in (0, 1) (ConfigError otherwise).
GlobalExistenceReport global_existence_experiment(const SweepConfig& cfg);

/// Outcome of one configured run ([run] section).
struct SingleRun {
  SimParams params;
  DiagnosticSeries series;
  SpectralField final_state;
  /// T = 0: nothing was integrated and the CSV carries only its header.
  bool header_only = false;
  /// max over samples of max_n |theta(n, t) - theta_0(n) e^{exact_rate t}|, when exact_rate is set.
  std::optional<double> exact_error;
};

/// Integrates the [run] problem; a numerical abort is captured in series.abort.
SingleRun run_single(const Config& cfg);

/// series.csv, final.bin, final.csv and abort.json (only after an abort) under dir.
void write_single_outputs(const SingleRun& run, const std::filesystem::path& dir);

/// Machine-readable one-object JSON form of an abort record.
std::string abort_json(const AbortRecord& record);

/// Worker count for sweeps: GSQG_THREADS if set, else the hardware concurrency.
int sweep_threads();

}  // namespace gsqg
