#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "../support/oracles.hpp"
#include "doctest.h"
#include "gsqg/diagnostics.hpp"
#include "gsqg/integrator.hpp"
#include "gsqg/spectral_ops.hpp"

using namespace gsqg;

namespace {

ForcingSpec sinusoidal_forcing() {
  ForcingSpec f;
  TimeProfile p;
  p.kind = TimeProfile::Kind::kSinusoidal;
  p.omega = 3.0;
  p.phase = 0.4;
  f.entries.push_back({{1, 2}, {0.3, -0.1}, p});
  f.entries.push_back({{3, -1}, {0.0, 0.2}, TimeProfile{}});
  return f;
}

SimParams forced_params(double dt) {
  SimParams p;
  p.grid_size = 32;
  p.alpha = 0.5;
  p.gamma = 1.0;
  p.nu = 0.02;
  p.dt = dt;
  p.t_end = 0.5;
  return p;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST_CASE("CSV header lists the fixed columns") {
  std::ostringstream out;
  write_series_csv_header(out);
  CHECK(out.str() ==
        "t,h_minus_alpha,l2,h_gamma_minus_alpha,h_gamma,lp_alpha,l1,linf,pair_ham,pair_l2,cum_diss_ham,cum_diss_l2,"
        "res_ham,res_l2\n");
}

TEST_CASE("CSV has one row per sample with the residual columns last") {
  SimParams p = forced_params(0.05);
  p.t_end = 0.2;
  const SpectralField theta0 = oracle::random_field(32, 4, 1.0, 7, 0.1);
  const DiagnosticSeries s = run(theta0, p, sinusoidal_forcing());
  std::ostringstream out;
  write_series_csv(out, s);
  std::istringstream in(out.str());
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  REQUIRE(lines.size() == s.samples.size() + 1);
  const auto rh = hamiltonian_balance_residual(s);
  for (std::size_t k = 1; k < lines.size(); ++k) {
    std::vector<double> cells;
    std::istringstream row(lines[k]);
    std::string cell;
    while (std::getline(row, cell, ',')) cells.push_back(std::stod(cell));
    REQUIRE(cells.size() == std::size(kSeriesColumns));
    CHECK(cells[0] == s.samples[k - 1].t);
    CHECK(cells[1] == s.samples[k - 1].h_minus_alpha);
    CHECK(cells[12] == rh[k - 1]);
  }
}

TEST_CASE("pure dissipation single mode balances to quadrature error") {
  SimParams p;
  p.grid_size = 16;
  p.alpha = 0.5;
  p.gamma = 0.5;
  p.nu = 0.3;
  p.dt = 0.01;
  p.t_end = 1.0;
  p.nonlinear = false;
  const Mode m{{2, 1}, {0.4, 0.1}};
  const DiagnosticSeries s = run(SpectralField::from_modes(16, std::span(&m, 1)), p, {});
  CHECK(max_abs(hamiltonian_balance_residual(s)) < 1e-12);
  CHECK(max_abs(l2_balance_residual(s)) < 1e-11);
  // Closed form: nu int_0^T ||theta||^2_{H^gamma} = (1 - e^{-2 nu |n|^{2 gamma} T}) ||theta_0||^2 / 2.
  const double k2g = std::sqrt(5.0);
  const double theta0_sq = 2.0 * std::norm(m.amplitude);
  const double expected = 0.5 * theta0_sq * (1.0 - std::exp(-2.0 * p.nu * k2g));
  CHECK(s.final().cum_diss_l2 == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("inviscid residuals equal the conservation drift") {
  SimParams p;
  p.grid_size = 32;
  p.alpha = 0.75;
  p.gamma = 1.0;
  p.nu = 0.0;
  p.dt = 0.01;
  p.t_end = 0.3;
  const SpectralField theta0 = oracle::random_field(32, 6, 1.0, 11, 0.3);
  const DiagnosticSeries s = run(theta0, p, {});
  const auto rh = hamiltonian_balance_residual(s);
  for (std::size_t k = 0; k < s.samples.size(); ++k) {
    const double drift = 0.5 * (std::pow(s.samples[k].h_minus_alpha, 2) - std::pow(s.samples[0].h_minus_alpha, 2));
    CHECK(rh[k] == doctest::Approx(drift).epsilon(1e-12).scale(1e-14));
  }
  CHECK(max_abs(rh) < 1e-9);
}

TEST_CASE("forced balance residuals converge at fourth order") {
  const SpectralField theta0 = oracle::random_field(32, 5, 1.0, 3, 0.1);
  std::vector<double> ham, l2;
  for (double dt : {0.04, 0.02, 0.01}) {
    const DiagnosticSeries s = run(theta0, forced_params(dt), sinusoidal_forcing());
    const BalanceResidual r = balance_residuals(s);
    ham.push_back(r.max_abs_hamiltonian());
    l2.push_back(r.max_abs_l2());
  }
  for (std::size_t i = 0; i + 1 < ham.size(); ++i) {
    CHECK(std::log2(ham[i] / ham[i + 1]) == doctest::Approx(4.0).epsilon(0.1));
    CHECK(std::log2(l2[i] / l2[i + 1]) == doctest::Approx(4.0).epsilon(0.1));
  }
}

TEST_CASE("Lp check: pure dissipation strictly decreases every norm") {
  SimParams p;
  p.grid_size = 32;
  p.alpha = 0.5;
  p.gamma = 1.0;
  p.nu = 0.05;
  p.dt = 0.02;
  p.t_end = 1.0;
  p.nonlinear = false;
  const Mode m{{1, 2}, {0.5, 0.0}};
  const DiagnosticSeries s = run(SpectralField::from_modes(32, std::span(&m, 1)), p, {});
  const LpCheck c = lp_monotonicity_check(s, {});
  REQUIRE(c.exponents.size() == 4);
  CHECK(c.exponents[1] == doctest::Approx(critical_exponent(0.5)));
  for (double v : c.worst_violation) CHECK(v <= 0.0);
  for (std::size_t k = 1; k < s.samples.size(); ++k) {
    CHECK(s.samples[k].l1 < s.samples[k - 1].l1);
    CHECK(s.samples[k].linf < s.samples[k - 1].linf);
  }
  CHECK(c.passes(0.0));
}

TEST_CASE("Lp check: forced nonlinear run respects the bound") {
  const SpectralField theta0 = oracle::random_field(32, 5, 1.0, 5, 0.1);
  const DiagnosticSeries s = run(theta0, forced_params(0.01), sinusoidal_forcing());
  const LpCheck c = lp_monotonicity_check(s, sinusoidal_forcing());
  for (double f : c.forcing_integral) CHECK(f > 0.0);
  CHECK(c.passes(1e-4));
}

TEST_CASE("Lp check detects growth on a synthetic series") {
  DiagnosticSeries s;
  s.alpha = 0.5;
  s.gamma = 1.0;
  s.grid_size = 16;
  for (int k = 0; k <= 4; ++k) {
    DiagnosticSample x;
    x.t = 0.25 * k;
    x.l1 = 1.0 + 0.1 * k;
    x.lp_alpha = 1.0;
    x.l2 = 1.0;
    x.linf = 1.0 - 0.01 * k;
    s.samples.push_back(x);
  }
  const LpCheck c = lp_monotonicity_check(s, {});
  CHECK(c.worst_violation[0] == doctest::Approx(0.4));
  CHECK(c.worst_violation[1] == doctest::Approx(0.0));
  CHECK(c.worst_violation[3] <= 0.0);
  CHECK_FALSE(c.passes(1e-4));
}

TEST_CASE("Lp check requires physical norms") {
  DiagnosticSeries s;
  s.physical_norms = false;
  s.samples.resize(2);
  s.samples[1].t = 1.0;
  CHECK_THROWS(lp_monotonicity_check(s, {}));
}

TEST_CASE("decay envelope on a single mode and on too few samples") {
  SimParams p;
  p.grid_size = 16;
  p.alpha = 0.5;
  p.gamma = 1.0;
  p.nu = 0.1;
  p.dt = 0.05;
  p.t_end = 1.0;
  p.nonlinear = false;
  const Mode m{{1, 0}, {0.5, 0.0}};
  RunOptions o;
  o.sample_interval = 0.1;
  const DiagnosticSeries s = run(SpectralField::from_modes(16, std::span(&m, 1)), p, {}, {}, o);
  const DecayEnvelope e = decay_envelope_check(s, 0.1);
  CHECK(e.samples_used >= 3);
  // sup over t in [0.1, 1] of (nu t)^{1/2} * 0.5 e^{-0.2 t}, attained at t = 1.
  CHECK(e.envelope_constant == doctest::Approx(std::sqrt(0.1) * 0.5 * std::exp(-0.2)).epsilon(1e-10));
  CHECK(std::isfinite(e.fitted_slope));
  CHECK_THROWS_AS(decay_envelope_check(s, 0.95), std::invalid_argument);
}

TEST_CASE("recorded dissipation norm splits into low and high parts") {
  SimParams p = forced_params(0.02);
  RunOptions o;
  o.keep_snapshots = true;
  o.sample_interval = 0.1;
  o.tail_cutoffs = {2.0, 4.5};
  const SpectralField theta0 = oracle::random_field(32, 8, 1.0, 9, 0.1);
  const DiagnosticSeries s = run(theta0, p, sinusoidal_forcing(), {}, o);
  REQUIRE(s.snapshots.size() == s.samples.size());
  const double sd = p.gamma - p.alpha;
  for (std::size_t k = 0; k < s.samples.size(); ++k) {
    const double recorded = std::pow(s.samples[k].h_gamma_minus_alpha, 2);
    for (double n : {1.0, 2.0, 3.5, 7.0}) {
      const double lo = sobolev_norm_sq(project_low(s.snapshots[k], n), sd);
      const double hi = sobolev_norm_sq(project_high(s.snapshots[k], n), sd);
      CHECK(lo + hi == doctest::Approx(recorded).epsilon(1e-12));
    }
    for (std::size_t c = 0; c < o.tail_cutoffs.size(); ++c) {
      const double tail = high_tail_norm_sq(s.snapshots[k], o.tail_cutoffs[c], -p.alpha);
      CHECK(s.tail_sq[k][c] == doctest::Approx(tail).epsilon(1e-12));
    }
  }
}

TEST_CASE("snap_to_sample and trapezoid") {
  DiagnosticSeries s;
  for (int k = 0; k <= 10; ++k) {
    DiagnosticSample x;
    x.t = 0.1 * k;
    s.samples.push_back(x);
  }
  CHECK(snap_to_sample(s, 0.0) == 0);
  CHECK(snap_to_sample(s, 0.34) == 3);
  CHECK(snap_to_sample(s, 5.0) == 10);
  // Linear integrand is integrated exactly.
  const double v = trapezoid(s, 2, 7, [&](std::size_t k) { return 3.0 * s.samples[k].t + 1.0; });
  CHECK(v == doctest::Approx(1.5 * (0.49 - 0.04) + 0.5));
}
