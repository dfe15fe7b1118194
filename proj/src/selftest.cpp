#include "gsqg/selftest.hpp"

#include <chrono>
#include <cmath>
#include <map>
#include <sstream>
#include <utility>

#include "gsqg/counterexample.hpp"
#include "gsqg/integrator.hpp"
#include "gsqg/nonlinearity.hpp"
#include "gsqg/scenarios.hpp"
#include "gsqg/spectral_ops.hpp"

namespace gsqg {
namespace {

using Key = std::pair<int, int>;

struct Outcome {
  bool passed;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(3);
  s << std::scientific << v;
  return s.str();
}

// Small deterministic generator so the suites never depend on <random> details.
struct Lcg {
  std::uint64_t s;
  double next() {
    s = s * 6364136223846793005ULL + 1442695040888963407ULL;
    return static_cast<double>(s >> 11) * 0x1p-53;
  }
};

SpectralField sparse_field(int m, int modes, int kmax, std::uint64_t seed) {
  Lcg g{seed};
  std::vector<Mode> out;
  for (int i = 0; i < modes; ++i) {
    int a = static_cast<int>(g.next() * (2 * kmax + 1)) - kmax;
    int b = static_cast<int>(g.next() * (kmax + 1));
    if (a == 0 && b == 0) b = 1;
    out.push_back({{a, b}, {g.next() - 0.5, g.next() - 0.5}});
  }
  return SpectralField::from_modes(m, out);
}

Outcome plancherel() {
  const SpectralField f = sparse_field(32, 12, 10, 7);
  const RealGrid g = to_physical(f);
  double mean_sq = 0.0;
  for (double v : g.values) mean_sq += v * v;
  mean_sq /= static_cast<double>(g.values.size());
  const double spec = sobolev_norm_sq(f, 0.0);
  const double err = std::abs(mean_sq - spec) / spec;
  const double rt = from_physical(g).max_abs_diff(f);
  return {err <= 1e-13 && rt <= 1e-14, "plancherel rel " + fmt(err) + ", round trip " + fmt(rt)};
}

Outcome convolution() {
  const double alpha = 0.5;
  const int m = 32;
  const DealiasPolicy policy;
  const double r2 = policy.radius(m) * policy.radius(m);
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const SpectralField f = sparse_field(m, 6, 6, seed);
    std::map<Key, Complex> s;
    for (int a = -m / 2 + 1; a < m / 2; ++a) {
      for (int b = -m / 2 + 1; b < m / 2; ++b) {
        const Complex c = f.coeff({a, b});
        if (c != Complex{} && a * a + b * b <= r2) s[{a, b}] = c;
      }
    }
    // N(k) = sum_{p+q=k} (u(p) . i q) theta(q), u(p) = i p^perp |p|^{-2 alpha} theta(p).
    std::map<Key, Complex> ref;
    for (const auto& [p, tp] : s) {
      const double w = std::pow(static_cast<double>(p.first * p.first + p.second * p.second), -alpha);
      for (const auto& [q, tq] : s) {
        const Key k{p.first + q.first, p.second + q.second};
        const int k2 = k.first * k.first + k.second * k.second;
        if (k2 == 0 || k2 > r2) continue;
        ref[k] += -w * (-p.second * q.first + p.first * q.second) * tp * tq;
      }
    }
    const SpectralField n = nonlinear_term(f, alpha, policy);
    double scale = 0.0, err = 0.0;
    for (int a = -m / 2 + 1; a < m / 2; ++a) {
      for (int b = -m / 2 + 1; b < m / 2; ++b) {
        const auto it = ref.find({a, b});
        const Complex want = it == ref.end() ? Complex{} : it->second;
        scale = std::max(scale, std::abs(want));
        err = std::max(err, std::abs(n.coeff({a, b}) - want));
      }
    }
    worst = std::max(worst, err / std::max(scale, 1e-300));
  }
  return {worst <= 1e-12, "max relative error " + fmt(worst)};
}

Outcome cancellations() {
  double worst = 0.0;
  for (double alpha : {0.25, 0.5, 0.75, 1.0}) {
    for (std::uint64_t seed = 11; seed <= 15; ++seed) {
      const CancellationResiduals r = cancellation_residuals(sparse_field(64, 32, 16, seed), alpha);
      worst = std::max({worst, r.hamiltonian, r.l2});
    }
  }
  return {worst <= 1e-10, "max residual " + fmt(worst)};
}

Outcome pure_dissipation() {
  SimParams p;
  p.grid_size = 32;
  p.alpha = 0.5;
  p.gamma = 0.75;
  p.nu = 0.1;
  p.dt = 0.03;
  p.t_end = 0.9;
  p.nonlinear = false;
  const SpectralField f = sparse_field(32, 10, 8, 21);
  RunOptions o;
  o.keep_snapshots = true;
  o.physical_norms = false;
  const DiagnosticSeries s = run(f, p, {}, {}, o);
  double worst = 0.0;
  const SpectralField& fin = s.snapshots.back();
  f.for_each_mode([&](Wavenumber n, Complex c, int) {
    if (c == Complex{}) return;
    const Complex want = c * std::exp(-p.nu * std::pow(static_cast<double>(n.modulus_sq()), p.gamma) * p.t_end);
    worst = std::max(worst, std::abs(fin.coeff(n) - want) / std::abs(want));
  });
  return {worst <= 1e-10, "max relative error " + fmt(worst)};
}

Outcome manufactured_order() {
  // theta* = e^{-t} (cos x1 / 2 + cos 2x1 / 4), forcing (nu |n|^{2 gamma} - 1) theta*(n).
  const double nu = 6.0;
  SimParams p;
  p.grid_size = 16;
  p.alpha = 0.5;
  p.gamma = 1.0;
  p.nu = nu;
  p.t_end = 1.0;
  ForcingSpec f;
  TimeProfile prof;
  prof.kind = TimeProfile::Kind::kExponential;
  prof.rate = -1.0;
  f.entries.push_back({{1, 0}, {0.5 * (nu - 1.0), 0.0}, prof});
  f.entries.push_back({{2, 0}, {0.25 * (4.0 * nu - 1.0), 0.0}, prof});
  const std::vector<Mode> m0 = {{{1, 0}, {0.5, 0}}, {{2, 0}, {0.25, 0}}};
  const std::vector<Mode> m1 = {{{1, 0}, {0.5 * std::exp(-1.0), 0}}, {{2, 0}, {0.25 * std::exp(-1.0), 0}}};
  const SpectralField exact = SpectralField::from_modes(16, m1);
  std::vector<double> err;
  for (double dt : {0.02, 0.01, 0.005}) {
    p.dt = dt;
    RunOptions o;
    o.keep_snapshots = true;
    o.physical_norms = false;
    err.push_back(run(SpectralField::from_modes(16, m0), p, f, {}, o).snapshots.back().max_abs_diff(exact));
  }
  const double o1 = std::log2(err[0] / err[1]), o2 = std::log2(err[1] / err[2]);
  return {o1 > 3.7 && o1 < 4.3 && o2 > 3.7 && o2 < 4.3, "observed orders " + fmt(o1) + ", " + fmt(o2)};
}

Outcome balance() {
  SimParams p;
  p.grid_size = 32;
  p.alpha = 0.5;
  p.gamma = 1.0;
  p.nu = 0.01;
  p.dt = 0.005;
  p.t_end = 0.5;
  ForcingSpec f;
  TimeProfile prof;
  prof.kind = TimeProfile::Kind::kSinusoidal;
  prof.omega = 3.0;
  f.entries.push_back({{1, 2}, {0.1, -0.05}, prof});
  RunOptions o;
  o.sample_interval = 0.05;
  o.physical_norms = false;
  const DiagnosticSeries s = run(sparse_field(32, 16, 8, 31) * 0.3, p, f, {}, o);
  const BalanceResidual r = balance_residuals(s);
  const double h0 = s.initial().h_minus_alpha, l0 = s.initial().l2;
  const double rh = r.max_abs_hamiltonian() / (h0 * h0), rl = r.max_abs_l2() / (l0 * l0);
  return {rh <= 1e-8 && rl <= 1e-8, "relative residuals " + fmt(rh) + ", " + fmt(rl)};
}

Outcome counterexample_window() {
  double lo = 1e300, hi = 0.0;
  for (double nu : {1e-2, 1e-3}) {
    const LinearFlowEvaluator ev({0.5, 0.5, nu, BumpProfile{}}, 64);
    const double d = nu * ev.time_integral(0.0, 0.0, nu);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  const double spread = (hi - lo) / hi;
  return {spread <= 1e-3, "relative spread " + fmt(spread)};
}

Outcome presets() {
  for (const std::string& name : scenario_names()) scenario_config(name).validate_sweep();
  return {true, std::to_string(scenario_names().size()) + " presets parse and validate"};
}

}  // namespace

std::vector<SelftestResult> run_selftest(const std::function<void(const SelftestResult&)>& on_result) {
  const std::vector<std::pair<const char*, Outcome (*)()>> suites = {
      {"spectral_core.plancherel", plancherel},
      {"nonlinearity.convolution_oracle", convolution},
      {"nonlinearity.cancellations", cancellations},
      {"integrator.pure_dissipation", pure_dissipation},
      {"integrator.manufactured_order", manufactured_order},
      {"diagnostics.balance_residuals", balance},
      {"experiments.counterexample_window", counterexample_window},
      {"experiments.presets", presets},
  };
  std::vector<SelftestResult> out;
  for (const auto& [name, fn] : suites) {
    SelftestResult r;
    r.suite = name;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const Outcome o = fn();
      r.passed = o.passed;
      r.detail = o.detail;
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (on_result) on_result(r);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace gsqg
