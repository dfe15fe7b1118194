// Acceptance criteria, one line each: "[PASS|FAIL] <id> <name>: <detail>".
// With no argument every criterion runs; otherwise only the listed ids.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "../support/oracles.hpp"
#include "gsqg/counterexample.hpp"
#include "gsqg/diagnostics.hpp"
#include "gsqg/experiments.hpp"
#include "gsqg/integrator.hpp"
#include "gsqg/nonlinearity.hpp"
#include "gsqg/scenarios.hpp"
#include "gsqg/spectral_ops.hpp"

using namespace gsqg;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

std::string fix(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

const std::vector<double> kAlphas = {0.25, 0.5, 0.75, 1.0};

// Exactly `pairs` distinct active mode pairs with |n| <= kmax and O(1) amplitudes.
SpectralField sparse_random(int m, int pairs, int kmax, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> comp(-kmax, kmax);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Mode> modes;
  std::vector<std::pair<int, int>> used;
  while (static_cast<int>(modes.size()) < pairs) {
    Wavenumber n{comp(rng), comp(rng)};
    if (n.is_zero() || n.modulus() > kmax) continue;
    if (n.n2 < 0 || (n.n2 == 0 && n.n1 < 0)) n = {-n.n1, -n.n2};
    if (std::find(used.begin(), used.end(), std::pair{n.n1, n.n2}) != used.end()) continue;
    used.emplace_back(n.n1, n.n2);
    modes.push_back({n, {u(rng), u(rng)}});
  }
  return SpectralField::from_modes(m, modes);
}

// ---------------------------------------------------------------- sweeps, computed once per process

const SweepReport& smooth_compact() {
  static const SweepReport r = run_sweep(scenario_config("smooth-compact"));
  return r;
}

const SweepReport& counterexample() {
  static const SweepReport r = run_sweep(scenario_config("counterexample"));
  return r;
}

// ---------------------------------------------------------------- criteria

Outcome convolution_oracle() {
  const int m = 32;
  const DealiasPolicy policy;
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> npairs(1, 8);
  double worst = 0.0;
  int cases = 0;
  for (double alpha : kAlphas) {
    for (int i = 0; i < 50; ++i) {
      const SpectralField theta = sparse_random(m, npairs(rng), 6, rng);
      const SpectralField n = nonlinear_term(theta, alpha, policy);
      const oracle::Sparse ref = oracle::transport_convolution(oracle::to_sparse(theta), alpha, policy.radius(m));
      // Bound on every coefficient of the convolution: sum |theta_p| |p|^{1-2a} times sum |theta_q| |q|.
      double velocity = 0.0, gradient = 0.0, diff = 0.0;
      for (const auto& [k, c] : oracle::to_sparse(theta)) {
        const double kk = std::hypot(k.first, k.second);
        velocity += std::abs(c) * std::pow(kk, 1.0 - 2.0 * alpha);
        gradient += std::abs(c) * kk;
      }
      const int h = m / 2;
      for (int a = -h + 1; a < h; ++a) {
        for (int b = -h + 1; b < h; ++b) {
          const auto it = ref.find({a, b});
          const Complex r = it == ref.end() ? Complex{} : it->second;
          diff = std::max(diff, std::abs(n.coeff({a, b}) - r));
        }
      }
      worst = std::max(worst, diff / (velocity * gradient));
      ++cases;
    }
  }
  return {worst <= 1e-12, std::to_string(cases) + " fields, max relative error " + sci(worst) + " (tol 1e-12)"};
}

Outcome cancellation_certificates() {
  std::mt19937_64 rng(77);
  double worst_h = 0.0, worst_l = 0.0;
  for (double alpha : kAlphas) {
    for (int i = 0; i < 50; ++i) {
      const SpectralField theta = sparse_random(64, 32, 20, rng);
      const CancellationResiduals r = cancellation_residuals(theta, alpha);
      worst_h = std::max(worst_h, r.hamiltonian);
      worst_l = std::max(worst_l, r.l2);
    }
  }
  return {worst_h <= 1e-10 && worst_l <= 1e-10,
          "200 fields, max |<N,theta>_{H^-a}| " + sci(worst_h) + ", max |<N,theta>_{L2}| " + sci(worst_l) +
              " (tol 1e-10)"};
}

Outcome weak_form_identity() {
  std::mt19937_64 rng(31);
  double worst = 0.0;
  for (double alpha : kAlphas) {
    for (int i = 0; i < 20; ++i) {
      const SpectralField theta = sparse_random(64, 12, 8, rng);
      const SpectralField phi_field = sparse_random(64, 4, 4, rng);
      const TestFunction phi = TestFunction::from_field(phi_field);
      const WeakFormTerms w = weak_form_terms(theta, phi, alpha);
      // Both sides are bounded by ||theta||^2_{L2} times sup |grad phi|; lhs itself may cancel to zero.
      double grad_phi = 0.0;
      for (const auto& [k, c] : oracle::to_sparse(phi_field)) grad_phi += std::abs(c) * std::hypot(k.first, k.second);
      const double size = oracle::sobolev_sq(oracle::to_sparse(theta), 0.0) * grad_phi;
      worst = std::max(worst, w.gap / size);
    }
  }
  return {worst <= 1e-8, "80 (theta, phi) pairs, max relative gap " + sci(worst) + " (tol 1e-8)"};
}

Outcome integrator_order() {
  // theta* = e^{-t} cos x1 with forcing (nu - 1) theta*; u*.grad theta* vanishes.
  // A transverse forced mode makes the run genuinely nonlinear for the balance residuals.
  const int m = 64;
  SimParams p;
  p.grid_size = m;
  p.alpha = 0.5;
  p.gamma = 1.0;
  p.nu = 5.0;
  p.t_end = 1.0;
  const std::vector<Mode> shear = {{{1, 0}, {0.5, 0.0}}};
  ForcingSpec f;
  TimeProfile decay;
  decay.kind = TimeProfile::Kind::kExponential;
  decay.rate = -1.0;
  for (const Mode& md : shear) {
    const double k2g = std::pow(md.n.modulus(), 2.0 * p.gamma);
    f.entries.push_back({md.n, md.amplitude * (p.nu * k2g - 1.0), decay});
  }
  const SpectralField theta0 = SpectralField::from_modes(m, shear);
  std::vector<Mode> fin = shear;
  for (Mode& md : fin) md.amplitude *= std::exp(-1.0);
  const SpectralField exact = SpectralField::from_modes(m, fin);

  SimParams pb = p;
  pb.nu = 0.2;
  ForcingSpec fb;
  TimeProfile wave;
  wave.kind = TimeProfile::Kind::kSinusoidal;
  wave.omega = 2.0;
  fb.entries.push_back({{1, 2}, {0.2, -0.1}, wave});
  fb.entries.push_back({{3, -1}, {0.0, 0.15}, TimeProfile{}});
  const SpectralField theta_b = oracle::random_field(m, 10, 1.0, 5, 0.05);

  std::vector<double> err, ham, l2;
  RunOptions o;
  o.keep_snapshots = true;
  o.physical_norms = false;
  RunOptions ob;
  ob.physical_norms = false;
  for (double dt : {0.02, 0.01, 0.005, 0.0025}) {
    p.dt = dt;
    err.push_back(run(theta0, p, f, {}, o).snapshots.back().max_abs_diff(exact));
    pb.dt = dt;
    const BalanceResidual r = balance_residuals(run(theta_b, pb, fb, {}, ob));
    ham.push_back(r.max_abs_hamiltonian());
    l2.push_back(r.max_abs_l2());
  }
  bool pass = true;
  std::ostringstream d;
  const auto ratios = [&](const char* name, const std::vector<double>& v) {
    d << name << " ratios";
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
      const double r = v[i] / v[i + 1];
      d << ' ' << fix(r);
      if (!(r >= 12.0 && r <= 20.0)) pass = false;
    }
    d << "; ";
  };
  ratios("error", err);
  ratios("hamiltonian residual", ham);
  ratios("L2 residual", l2);
  d << "finest error " << sci(err.back()) << ", residuals " << sci(ham.back()) << ' ' << sci(l2.back());
  d << "; want 16 +- 25%";
  return {pass, d.str()};
}

Outcome exact_dissipation() {
  double worst = 0.0;
  const std::vector<Mode> modes = {{{1, 0}, {0.5, 0.0}}, {{3, 4}, {0.1, -0.2}}, {{-2, 5}, {0.0, 0.3}},
                                   {{7, 1}, {0.05, 0.05}}};
  for (double gamma : {0.5, 1.0}) {
    for (double nu : {1e-1, 1e-3}) {
      SimParams p;
      p.grid_size = 32;
      p.alpha = 0.5;
      p.gamma = gamma;
      p.nu = nu;
      p.dt = 0.05;
      p.t_end = 2.0;
      p.nonlinear = false;
      RunOptions o;
      o.keep_snapshots = true;
      o.sample_interval = 0.5;
      o.physical_norms = false;
      const DiagnosticSeries s = run(SpectralField::from_modes(32, modes), p, {}, {}, o);
      for (std::size_t k = 0; k < s.samples.size(); ++k) {
        for (const Mode& md : modes) {
          const Complex want = md.amplitude * std::exp(-nu * std::pow(md.n.modulus(), 2.0 * gamma) * s.samples[k].t);
          worst = std::max(worst, std::abs(s.snapshots[k].coeff(md.n) - want) / std::abs(want));
        }
      }
    }
  }
  return {worst <= 1e-10, "max relative mode error " + sci(worst) + " over (gamma, nu) in {0.5,1}x{1e-1,1e-3} (tol 1e-10)"};
}

Outcome counterexample_scaling() {
  const SweepReport& rep = counterexample();
  const SweepConfig& c = rep.config;
  std::vector<double> d;
  for (const NuResult& r : rep.per_nu) d.push_back(r.D_window);
  const auto [lo, hi] = std::minmax_element(d.begin(), d.end());
  const double spread = (*hi - *lo) / *hi;
  std::ostringstream det;
  det << "D across nu: relative spread " << sci(spread) << " (tol 2e-2)";
  bool pass = spread <= 0.02 && std::all_of(d.begin(), d.end(), [](double v) { return std::isfinite(v); });
  for (double s : {-c.alpha, c.gamma - c.alpha}) {
    std::vector<double> integral;
    for (double nu : c.nus) {
      const CounterexampleFamily fam = build_counterexample_family(nu, c.alpha, c.gamma, c.initial.bump, 32);
      integral.push_back(LinearFlowEvaluator(fam.recipe, c.lattice_radius).time_integral(s, 0.0, c.t_end));
    }
    const double slope = fit_log_slope(c.nus, integral);
    const double want = 1.0 - 2.0 * (c.alpha + s) / c.gamma;
    det << "; s=" << fix(s) << " exponent " << fix(slope) << " (want " << fix(want) << " +- 0.05)";
    pass = pass && std::abs(slope - want) <= 0.05;
  }
  return {pass, det.str()};
}

Outcome higher_order_bound() {
  const SweepReport& smooth = smooth_compact();
  const HigherOrderVerdict v = higher_order_bound_check(smooth, 0.1 * smooth.config.t_end);
  const SweepReport& ce = counterexample();
  const double trend = higher_order_trend(ce, 0.0);
  const double want = -ce.config.alpha / ce.config.gamma;
  const bool grows = std::abs(trend - want) <= 0.15;
  return {v.pass && grows, "smooth-compact delta=0.1T: max H " + sci(v.max_H) + ", slope vs 1/nu " + fix(v.slope) +
                               " (<= 0.2); counterexample delta=0: slope of H vs nu " + fix(trend) + " (want " +
                               fix(want) + " +- 0.15)"};
}

Outcome compactness_no_dissipation() {
  std::ostringstream det;
  bool pass = true;

  const SweepReport& smooth = smooth_compact();
  const auto& sp = smooth.per_nu;
  const double d_ratio = sp.back().D / sp.front().D;
  det << "smooth-compact D(nu_min)/D(nu_max) " << sci(d_ratio) << " (<= 0.05)";
  pass = pass && d_ratio <= 0.05;
  for (double l : smooth.config.lambdas) {
    // Last viscosity whose cutoff lambda*N_nu is still inside the grid.
    std::optional<double> last;
    double last_nu = 0.0;
    for (const NuResult& r : sp) {
      if (r.usable() && r.tail_resolved.at(l)) {
        last = r.tails.at(l);
        last_nu = r.nu;
      }
    }
    const double first = sp.front().tails.at(l);
    const double ratio = last && first > 0.0 ? *last / first : (last && *last == 0.0 ? 0.0 : NAN);
    det << "; tail(lambda=" << l << ") ratio " << sci(ratio) << " at nu=" << sci(last_nu);
    pass = pass && std::isfinite(ratio) && ratio <= 0.05;
  }
  const EquivalenceVerdict es = frequency_equivalence_check(smooth, smooth.config.threshold);
  det << "; smooth-compact verdict " << (es.consistent ? "CONSISTENT" : "INCONSISTENT");
  pass = pass && es.consistent;

  const SweepReport& ce = counterexample();
  double d_min = INFINITY;
  for (const NuResult& r : ce.per_nu) d_min = std::min(d_min, r.D);
  const double ce_ratio = d_min / ce.per_nu.front().D;
  det << "; counterexample min D/D(nu_max) " << fix(ce_ratio) << " (>= 0.5)";
  pass = pass && ce_ratio >= 0.5;
  const EquivalenceVerdict ec = frequency_equivalence_check(ce, ce.config.threshold);
  det << "; counterexample verdict " << (ec.consistent ? "CONSISTENT" : "INCONSISTENT");
  for (const EquivalenceCurve& cv : ec.curves) {
    if (cv.resolved) det << " [lambda=" << cv.lambda << " tail " << sci(cv.tail.front()) << "->" << sci(cv.tail.back()) << "]";
  }
  pass = pass && ec.consistent;
  return {pass, det.str()};
}

Outcome global_existence() {
  const GlobalExistenceReport g = global_existence_experiment(scenario_config("global-existence"));
  std::ostringstream det;
  det << "consecutive distances";
  for (double d : g.consecutive_distances) det << ' ' << sci(d);
  det << (g.distances_decreasing ? " (strictly decreasing)" : " (NOT strictly decreasing)");
  det << "; hamiltonian residual / ||theta0||^2 " << sci(g.hamiltonian_residual_relative) << " (<= 1e-2)";
  det << "; L^p_alpha violation " << sci(g.lp_alpha_violation_relative) << " (<= 1e-3)";
  det << "; Phi(N)";
  for (double v : g.sweep.phi) det << ' ' << sci(v);
  det << (g.phi_decreasing ? " (monotone)" : " (NOT monotone)");
  const bool pass = g.distances_decreasing && g.hamiltonian_residual_relative <= 1e-2 &&
                    g.lp_alpha_violation_relative <= 1e-3 && g.phi_decreasing;
  return {pass, det.str()};
}

Outcome lp_bound() {
  const int m = 256;
  SimParams p;
  p.grid_size = m;
  p.alpha = 0.5;
  p.gamma = 0.5;
  p.nu = 0.05;
  p.dt = 0.01;
  p.t_end = 1.0;
  const SpectralField theta0 = oracle::random_field(m, 12, 1.5, 99, 0.3);
  ForcingSpec f;
  TimeProfile wave;
  wave.kind = TimeProfile::Kind::kSinusoidal;
  wave.omega = 3.0;
  f.entries.push_back({{2, 1}, {0.2, 0.1}, wave});
  f.entries.push_back({{-1, 4}, {0.0, 0.1}, TimeProfile{}});
  RunOptions o;
  o.sample_interval = 0.02;
  o.adaptive_cfl = true;
  std::ostringstream det;
  bool pass = true;
  for (const bool forced : {false, true}) {
    const ForcingSpec& ff = forced ? f : ForcingSpec{};
    const LpCheck c = lp_monotonicity_check(run(theta0, p, ff, {}, o), ff);
    double worst = -INFINITY;
    for (std::size_t k = 0; k < c.exponents.size(); ++k) worst = std::max(worst, c.worst_violation[k] / c.initial_norm[k]);
    det << (forced ? "; forced" : "unforced") << " max violation/||theta0||_p " << sci(worst);
    pass = pass && c.passes(1e-4);
  }
  det << " over p in {1, p_alpha, 2, inf} at M=256 (tol 1e-4)";
  return {pass, det.str()};
}

struct Criterion {
  const char* id;
  const char* name;
  std::function<Outcome()> fn;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {"C1", "convolution_oracle", convolution_oracle},
      {"C2", "cancellation_certificates", cancellation_certificates},
      {"C3", "weak_form_identity", weak_form_identity},
      {"C4", "integrator_order", integrator_order},
      {"C5", "exact_dissipation", exact_dissipation},
      {"C6", "counterexample_scaling", counterexample_scaling},
      {"C7", "higher_order_bound", higher_order_bound},
      {"C8", "compactness_no_dissipation", compactness_no_dissipation},
      {"C9", "global_existence", global_existence},
      {"C10", "lp_transport_diffusion_bound", lp_bound},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> wanted(argv + 1, argv + argc);
  int failed = 0, ran = 0;
  for (const Criterion& c : criteria()) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] %s %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
    ++ran;
  }
  if (ran == 0) {
    std::fprintf(stderr, "no criterion matched\n");
    return 2;
  }
  return failed == 0 ? 0 : 1;
}
