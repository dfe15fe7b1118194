#include "gsqg/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "gsqg/snapshot.hpp"
#include "gsqg/spectral_ops.hpp"

namespace gsqg {

DiagnosticSample measure_state(const SpectralField& theta, double t, double alpha, double gamma,
                               const ForcingSpec& forcing, bool physical_norms, int lp_oversample) {
  DiagnosticSample s;
  s.t = t;
  s.h_minus_alpha = sobolev_norm(theta, -alpha);
  s.l2 = sobolev_norm(theta, 0.0);
  s.h_gamma_minus_alpha = sobolev_norm(theta, gamma - alpha);
  s.h_gamma = sobolev_norm(theta, gamma);
  if (physical_norms) {
    const RealGrid g = to_physical(theta, theta.grid_size() * lp_oversample);
    s.lp_alpha = lp_norm(g, critical_exponent(alpha));
    s.l1 = lp_norm(g, 1.0);
    s.linf = lp_norm(g, kInfinity);
  } else {
    s.lp_alpha = s.l1 = s.linf = std::numeric_limits<double>::quiet_NaN();
  }
  if (!forcing.empty()) {
    const SpectralField f = forcing.evaluate(theta.grid_size(), t);
    s.pair_ham = inner_product_hs(f, theta, -alpha);
    s.pair_l2 = inner_product_hs(f, theta, 0.0);
  }
  return s;
}

std::vector<double> hamiltonian_balance_residual(const DiagnosticSeries& series) {
  std::vector<double> res;
  if (series.empty()) return res;
  const double h0 = series.initial().h_minus_alpha;
  res.reserve(series.samples.size());
  for (const DiagnosticSample& s : series.samples) {
    res.push_back(0.5 * s.h_minus_alpha * s.h_minus_alpha + s.cum_diss_ham - 0.5 * h0 * h0 - s.cum_pair_ham);
  }
  return res;
}

std::vector<double> l2_balance_residual(const DiagnosticSeries& series) {
  std::vector<double> res;
  if (series.empty()) return res;
  const double e0 = series.initial().l2;
  res.reserve(series.samples.size());
  for (const DiagnosticSample& s : series.samples) {
    res.push_back(0.5 * s.l2 * s.l2 + s.cum_diss_l2 - 0.5 * e0 * e0 - s.cum_pair_l2);
  }
  return res;
}

namespace {
double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}
}  // namespace

double BalanceResidual::max_abs_hamiltonian() const { return max_abs(hamiltonian); }
double BalanceResidual::max_abs_l2() const { return max_abs(l2); }

BalanceResidual balance_residuals(const DiagnosticSeries& series) {
  return {hamiltonian_balance_residual(series), l2_balance_residual(series)};
}

void write_series_csv_header(std::ostream& out) {
  bool first = true;
  for (const char* c : kSeriesColumns) {
    if (!first) out << ',';
    out << c;
    first = false;
  }
  out << '\n';
}

void write_series_csv(std::ostream& out, const DiagnosticSeries& series) {
  write_series_csv_header(out);
  const auto rh = hamiltonian_balance_residual(series);
  const auto rl = l2_balance_residual(series);
  for (std::size_t k = 0; k < series.samples.size(); ++k) {
    const DiagnosticSample& s = series.samples[k];
    const double row[] = {s.t,        s.h_minus_alpha, s.l2,           s.h_gamma_minus_alpha, s.h_gamma,
                          s.lp_alpha, s.l1,            s.linf,         s.pair_ham,            s.pair_l2,
                          s.cum_diss_ham, s.cum_diss_l2, rh[k],        rl[k]};
    for (std::size_t c = 0; c < std::size(row); ++c) {
      if (c) out << ',';
      out << format_double(row[c]);
    }
    out << '\n';
  }
}

namespace {

int forcing_grid(const ForcingSpec& forcing) {
  int kmax = 1;
  for (const ForcingEntry& e : forcing.entries) kmax = std::max({kmax, std::abs(e.n.n1), std::abs(e.n.n2)});
  int m = 64;
  while (m < 8 * kmax) m *= 2;
  return m;
}

}  // namespace

bool LpCheck::passes(double rel_tol, double abs_allowance) const {
  for (std::size_t i = 0; i < exponents.size(); ++i) {
    if (!(worst_violation[i] <= rel_tol * initial_norm[i] + abs_allowance)) return false;
  }
  return true;
}

LpCheck lp_monotonicity_check(const DiagnosticSeries& series, const ForcingSpec& forcing) {
  if (series.empty()) throw std::invalid_argument("lp_monotonicity_check: empty series");
  if (!series.physical_norms) throw std::invalid_argument("lp_monotonicity_check: series has no physical norms");
  LpCheck out;
  out.exponents = {1.0, critical_exponent(series.alpha), 2.0, kInfinity};
  const std::size_t np = out.exponents.size();

  auto norm_of = [&](const DiagnosticSample& s, std::size_t i) {
    switch (i) {
      case 0:
        return s.l1;
      case 1:
        return s.lp_alpha;
      case 2:
        return s.l2;
      default:
        return s.linf;
    }
  };

  // Cumulative int_0^{t_k} ||f||_p by composite Simpson per sample interval.
  std::vector<std::vector<double>> cum(series.samples.size(), std::vector<double>(np, 0.0));
  if (!forcing.empty()) {
    const int mf = forcing_grid(forcing);
    auto fnorms = [&](double t) {
      const RealGrid g = to_physical(forcing.evaluate(mf, t));
      std::vector<double> v(np);
      for (std::size_t i = 0; i < np; ++i) v[i] = lp_norm(g, out.exponents[i]);
      return v;
    };
    constexpr int kSub = 8;
    for (std::size_t k = 0; k + 1 < series.samples.size(); ++k) {
      const double a = series.samples[k].t;
      const double b = series.samples[k + 1].t;
      const double h = (b - a) / kSub;
      std::vector<double> acc(np, 0.0);
      for (int j = 0; j <= kSub; ++j) {
        const double w = (j == 0 || j == kSub) ? 1.0 : (j % 2 ? 4.0 : 2.0);
        const auto v = fnorms(a + j * h);
        for (std::size_t i = 0; i < np; ++i) acc[i] += w * v[i];
      }
      for (std::size_t i = 0; i < np; ++i) cum[k + 1][i] = cum[k][i] + acc[i] * h / 3.0;
    }
  }

  out.worst_violation.assign(np, -std::numeric_limits<double>::infinity());
  out.initial_norm.resize(np);
  out.forcing_integral = cum.back();
  for (std::size_t i = 0; i < np; ++i) out.initial_norm[i] = norm_of(series.initial(), i);
  for (std::size_t k = 0; k < series.samples.size(); ++k) {
    for (std::size_t i = 0; i < np; ++i) {
      const double v = norm_of(series.samples[k], i) - out.initial_norm[i] - cum[k][i];
      out.worst_violation[i] = std::max(out.worst_violation[i], v);
    }
  }
  return out;
}

DecayEnvelope decay_envelope_check(const DiagnosticSeries& series, double delta) {
  DecayEnvelope env;
  std::vector<double> xs, ys;
  const double power = series.alpha / series.gamma;
  for (const DiagnosticSample& s : series.samples) {
    if (s.t < delta || s.t <= 0.0) continue;
    const double e = s.l2 * s.l2;
    env.envelope_constant = std::max(env.envelope_constant, std::pow(series.nu * s.t, power) * e);
    if (e > 0.0) {
      xs.push_back(std::log(s.t));
      ys.push_back(std::log(e));
    }
  }
  env.samples_used = static_cast<int>(xs.size());
  if (xs.size() < 3) throw std::invalid_argument("decay_envelope_check: fewer than three samples in [delta, T]");
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  env.fitted_slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return env;
}

std::size_t snap_to_sample(const DiagnosticSeries& series, double t) {
  std::size_t best = 0;
  double dist = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < series.samples.size(); ++k) {
    const double d = std::abs(series.samples[k].t - t);
    if (d < dist) {
      dist = d;
      best = k;
    }
  }
  return best;
}

}  // namespace gsqg
