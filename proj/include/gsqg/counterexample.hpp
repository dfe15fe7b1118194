#pragma once

#include <vector>

#include "gsqg/diagnostics.hpp"
#include "gsqg/integrator.hpp"
#include "gsqg/spectral_field.hpp"

namespace gsqg {

/// Radial zero-mean bump theta_0 = Delta psi with psi(r) = A (1 - r^2/r0^2)^k
/// for r < r0, supported in the ball of radius r0.
struct BumpProfile {
  double r0 = 2.0;
  int k = 8;
  double amplitude = 1.0;

  /// Throws ConfigError unless 0 < r0 < pi, k >= 3 and amplitude != 0.
  void validate() const;
  [[nodiscard]] double psi(double r) const;
  [[nodiscard]] double theta0(double r) const;
  /// Plane Fourier transform of theta_0 at radial frequency rho,
  /// integral theta_0(x) e^{-i xi.x} dx with |xi| = rho.
  [[nodiscard]] double fourier(double rho) const;
  /// Radial frequency beyond which |fourier| is negligible for every norm in use.
  [[nodiscard]] double frequency_extent() const { return 400.0 / r0; }
};

/// Member nu of the rescaled heat-flow family
/// theta^nu(x, t) = nu^{-(1+alpha)/gamma} theta(x / nu^{1/gamma}, t / nu),
/// where theta solves d_t theta = -(-Delta)^gamma theta from the bump.
/// theta^nu is radial, so the transport term vanishes and it solves the
/// viscous equation with f = 0.
struct CounterexampleRecipe {
  double alpha = 0.5;
  double gamma = 0.5;
  double nu = 1e-2;
  BumpProfile bump;

  [[nodiscard]] double length_scale() const;     // nu^{1/gamma}
  [[nodiscard]] double amplitude_scale() const;  // nu^{-(1+alpha)/gamma}
  /// Torus coefficient at t = 0 of the periodized datum at |n| = modulus.
  [[nodiscard]] double coefficient(double modulus) const;
  /// Physical value of the datum at distance r from the origin.
  [[nodiscard]] double datum(double r) const;
  /// Parameters of the equivalent grid run (transport disabled).
  [[nodiscard]] SimParams sim_params(int grid_size, double t_end, double dt) const;
};

struct CounterexampleFamily {
  SpectralField theta0;
  CounterexampleRecipe recipe;
};

/// Samples the rescaled datum on an M x M grid via its exact coefficients.
/// Throws ConfigError when nu^{1/gamma} r0 >= pi (the support would wrap).
CounterexampleFamily build_counterexample_family(double nu, double alpha, double gamma, const BumpProfile& bump,
                                                 int grid_size);

/// Exact evaluator of norms and time integrals of one family member on the
/// full torus lattice. Modes with |n| <= lattice_radius are summed exactly;
/// the radial remainder is integrated as a continuum, which is accurate
/// because the coefficients vary on the scale 1/nu^{1/gamma} >> 1 there.
class LinearFlowEvaluator {
 public:
  explicit LinearFlowEvaluator(const CounterexampleRecipe& recipe, int lattice_radius = 512);

  [[nodiscard]] const CounterexampleRecipe& recipe() const { return recipe_; }

  /// ||theta^nu_{>cutoff}(t)||^2_{H^s}.
  [[nodiscard]] double norm_sq(double s, double t, double cutoff = 0.0) const;
  /// int_a^b ||theta^nu_{>cutoff}(tau)||^2_{H^s} dtau, exact in time.
  [[nodiscard]] double time_integral(double s, double a, double b, double cutoff = 0.0) const;
  /// int_0^T <theta^a(t), theta^b(t)>_{H^s} dt for two family members.
  friend double cross_time_integral(const LinearFlowEvaluator& a, const LinearFlowEvaluator& b, double s,
                                    double t_end);

  /// Synthetic series sampled at the given times. L^p columns are NaN.
  [[nodiscard]] DiagnosticSeries series(const std::vector<double>& times,
                                        const std::vector<double>& tail_cutoffs) const;

 private:
  struct Node {
    double rho;
    double weight;  // lattice multiplicity or continuum quadrature weight (2 pi rho drho)
    double coeff;   // coefficient at t = 0
  };
  template <class Fn>
  double sum(double cutoff, Fn&& g) const;
  std::vector<Node> continuum_nodes(double lower) const;

  CounterexampleRecipe recipe_;
  int lattice_radius_;
  std::vector<Node> lattice_;
  std::vector<Node> continuum_;
};

/// ||theta^a - theta^b||^2_{L^2([0,T]; H^s)}.
double distance_sq(const LinearFlowEvaluator& a, const LinearFlowEvaluator& b, double s, double t_end);

/// Sample times resolving both the initial layer t ~ nu and the whole window.
std::vector<double> counterexample_sample_times(double nu, double t_end, int samples);

}  // namespace gsqg
