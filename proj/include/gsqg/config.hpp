#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gsqg/counterexample.hpp"
#include "gsqg/forcing.hpp"
#include "gsqg/integrator.hpp"
#include "gsqg/spectral_field.hpp"

namespace gsqg {

/// Randomized-phase datum with |theta(n)| = amplitude |n|^{-decay} for 1 <= |n| <= kmax.
struct RoughProfile {
  double decay = 1.55;
  int kmax = 16;
  double amplitude = 1.0;
};

/// Recipe for theta_0 shared by every run of a sweep.
struct InitialCondition {
  enum class Kind { kModes, kBump, kRough };
  Kind kind = Kind::kModes;
  std::vector<Mode> modes;
  BumpProfile bump;
  RoughProfile rough;
  std::uint64_t seed = 1;

  /// Largest |n| carried by the datum; 0 for the bump, whose spectrum depends on nu.
  [[nodiscard]] double spectral_radius() const;
  /// Datum on an M x M grid. The rough phases depend only on the seed, never on M.
  /// The bump datum is nu-dependent and goes through build_counterexample_family.
  [[nodiscard]] SpectralField build(int grid_size) const;
};

const char* to_string(InitialCondition::Kind k);

/// Every key of the configuration file, grouped by section.
///
///   [problem] alpha, gamma, cutoff
///   [run]     nu, M, dt, T, stride, adaptive, nonlinear, exact_rate
///   [sweep]   nus, T, deltas, lambdas, Ns, M_cap, samples, cfl, dt_max,
///             threshold, nonlinear, resolution_check, lattice_radius
///   [initial] kind, parameters, seed
///   [forcing] entries
///   [output]  dir
struct Config {
  double alpha = 0.5;
  double gamma = 0.5;
  double cutoff = 2.0 / 3.0;

  double nu = 1e-2;
  int grid_size = 64;
  double dt = 1e-2;
  double stride = 0.0;
  bool adaptive = false;
  /// When set, the run is compared against theta_0 e^{exact_rate t}.
  std::optional<double> exact_rate;

  std::vector<double> nus;
  double t_end = 1.0;
  std::vector<double> deltas;
  std::vector<double> lambdas;
  std::vector<double> tail_grid;
  int grid_cap = 512;
  int samples = 100;
  double cfl_safety = 0.8;
  double dt_max = 1e-2;
  double threshold = 0.05;
  bool nonlinear = true;
  bool resolution_check = false;
  int lattice_radius = 512;

  InitialCondition initial;
  ForcingSpec forcing;
  std::filesystem::path output_dir = "out";

  /// Invariants of a sweep: nus in (0,1) strictly decreasing, 0 < T,
  /// deltas in [0, T], positive lambdas and Ns, M_cap a power of two >= 32.
  void validate_sweep() const;
  /// Invariants of a single run (delegates to SimParams).
  void validate_run() const;

  /// Parameters of the single run described by [run].
  [[nodiscard]] SimParams run_params() const;
};

/// Default viscosity grid: geometric, 6 points per decade over [1e-4, 1e-1], decreasing.
std::vector<double> default_viscosities();

/// Parses INI text. Unknown sections or keys and malformed values throw ConfigError.
Config parse_config(std::string_view text);
Config load_config(const std::filesystem::path& path);
/// Sets one key as if it appeared in the file. Changing [initial] kind resets
/// the datum parameters to the defaults of the new kind.
void set_config_value(Config& cfg, std::string_view section, std::string_view key, std::string_view value);

/// "n1 n2 re im; ..." (semicolon separated).
std::vector<Mode> parse_modes(std::string_view text);
/// "n1 n2 kind re im [args]; ..." with kind const | sin omega phase | ramp tau | exp rate.
ForcingSpec parse_forcing(std::string_view text);
/// Numbers separated by commas and/or whitespace.
std::vector<double> parse_number_list(std::string_view text);
/// "modes:<modes>", "bump:r0=.. k=.. amplitude=..", "rough:decay=.. kmax=.. amplitude=.. seed=..".
InitialCondition parse_initial_spec(std::string_view text);

}  // namespace gsqg
