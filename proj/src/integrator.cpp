#include "gsqg/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "gsqg/errors.hpp"
#include "gsqg/spectral_ops.hpp"

namespace gsqg {

void SimParams::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in (0, 1]");
  if (!(gamma > 0.0)) throw ConfigError("gamma must be positive");
  if (!(nu >= 0.0) || !std::isfinite(nu)) throw ConfigError("nu must be a finite nonnegative number");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be positive");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw ConfigError("t_end must be nonnegative");
  if (grid_size < 4 || grid_size % 2 != 0) throw ConfigError("grid size must be an even integer >= 4");
  try {
    dealias.validate(grid_size);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

int SimParams::max_wavenumber_component() const {
  const int r = static_cast<int>(std::floor(dealias.radius(grid_size)));
  return std::max(1, std::min(r, grid_size / 2 - 1));
}

SpectralField DiagonalMultiplier::apply(const SpectralField& f) const {
  if (f.grid_size() != grid_size) throw std::invalid_argument("DiagonalMultiplier: grid mismatch");
  SpectralField out = f;
  auto d = out.mutable_half_spectrum();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] *= values[i];
  return out;
}

double DiagonalMultiplier::at(Wavenumber n) const {
  const SpectralField shape(grid_size);
  if (!shape.representable(n)) throw std::invalid_argument("DiagonalMultiplier: wavenumber off the grid");
  if (n.n2 < 0) n = {-n.n1, -n.n2};
  const int row = n.n1 >= 0 ? n.n1 : n.n1 + grid_size;
  return values[shape.index(row, n.n2)];
}

namespace {

// nu |n|^{2 gamma} per stored entry.
std::vector<double> dissipation_rates(int m, double nu, double gamma) {
  const SpectralField shape(m);
  std::vector<double> rate(shape.half_spectrum().size(), 0.0);
  for (int r = 0; r < shape.rows(); ++r) {
    for (int c = 0; c < shape.cols(); ++c) {
      const auto k2 = static_cast<double>(shape.wavenumber_at(r, c).modulus_sq());
      if (k2 > 0.0) rate[shape.index(r, c)] = nu * std::pow(k2, gamma);
    }
  }
  return rate;
}

}  // namespace

DiagonalMultiplier dissipation_factor(const SimParams& params, double dt_frac) {
  if (!(dt_frac >= 0.0)) throw std::invalid_argument("dissipation_factor: dt_frac must be nonnegative");
  DiagonalMultiplier d;
  d.grid_size = params.grid_size;
  d.values = dissipation_rates(params.grid_size, params.nu, params.gamma);
  for (double& v : d.values) v = std::exp(-v * dt_frac);
  return d;
}

struct Stepper::Impl {
  SimParams params;
  ForcingSpec forcing;
  NonlinearOperator op;
  int kmax;
  std::vector<double> rate;
  std::vector<double> w_ham;  // weight * nu |n|^{2(gamma - alpha)}
  std::vector<double> w_l2;   // weight * nu |n|^{2 gamma}
  double cached_h = -1.0;
  std::vector<double> e_half, e_full;
  SpectralField k1, k2, k3, k4, a, b, c, next;

  Impl(const SimParams& p, const ForcingSpec& f)
      : params(p), forcing(f), op(p.grid_size, p.alpha, p.dealias), kmax(p.max_wavenumber_component()) {
    const int m = p.grid_size;
    rate = dissipation_rates(m, p.nu, p.gamma);
    const SpectralField shape(m);
    w_ham.assign(rate.size(), 0.0);
    w_l2.assign(rate.size(), 0.0);
    for (int r = 0; r < shape.rows(); ++r) {
      for (int col = 0; col < shape.cols(); ++col) {
        const int w = shape.lattice_weight(r, col);
        if (w == 0) continue;
        const auto k2v = static_cast<double>(shape.wavenumber_at(r, col).modulus_sq());
        const std::size_t i = shape.index(r, col);
        w_ham[i] = w * p.nu * std::pow(k2v, p.gamma - p.alpha);
        w_l2[i] = w * p.nu * std::pow(k2v, p.gamma);
      }
    }
    for (SpectralField* s : {&k1, &k2, &k3, &k4, &a, &b, &c, &next}) *s = SpectralField(m);
  }

  void set_step(double h) {
    if (h == cached_h) return;
    cached_h = h;
    e_half.resize(rate.size());
    e_full.resize(rate.size());
    for (std::size_t i = 0; i < rate.size(); ++i) {
      e_half[i] = std::exp(-rate[i] * 0.5 * h);
      e_full[i] = std::exp(-rate[i] * h);
    }
  }

  // out = f(t) - N(x); returns max|u| on the grid.
  double rhs(double t, const SpectralField& x, SpectralField& out) {
    double umax = 0.0;
    if (params.nonlinear) {
      umax = op.apply(x, out);
      out *= -1.0;
    } else {
      for (Complex& v : out.mutable_half_spectrum()) v = {};
    }
    if (!forcing.empty()) forcing.accumulate(params.grid_size, t, 1.0, out.mutable_half_spectrum());
    return umax;
  }

  // Integrands of the running balance integrals at state x and time t.
  Quadratures integrands(double t, const SpectralField& x) const {
    Quadratures q;
    const auto d = x.half_spectrum();
    for (std::size_t i = 0; i < d.size(); ++i) {
      const double e = std::norm(d[i]);
      q.diss_ham += w_ham[i] * e;
      q.diss_l2 += w_l2[i] * e;
    }
    for (const ForcingEntry& fe : forcing.entries) {
      const double re = 2.0 * std::real(fe.profile.value(t) * fe.amplitude * std::conj(x.coeff(fe.n)));
      const auto k2v = static_cast<double>(fe.n.modulus_sq());
      q.pair_ham += std::pow(k2v, -params.alpha) * re;
      q.pair_l2 += re;
    }
    return q;
  }
};

Stepper::Stepper(const SimParams& params, const ForcingSpec& forcing) {
  params.validate();
  try {
    forcing.validate(params.grid_size, params.dealias);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  impl_ = std::make_unique<Impl>(params, forcing);
}

Stepper::~Stepper() = default;

double Stepper::advance(TrajectoryState& state, double t_target, double dt_max, bool adaptive, double cfl_safety) {
  Impl& s = *impl_;
  if (state.field.grid_size() != s.params.grid_size) throw std::invalid_argument("Stepper: grid mismatch");
  const double remaining = t_target - state.t;
  if (!(remaining > 0.0)) return 0.0;
  const double t = state.t;
  const SpectralField& x = state.field;

  const double umax = s.rhs(t, x, s.k1);
  double cap = dt_max;
  const double speed = s.kmax * umax;
  if (adaptive && speed > 0.0) cap = std::min(cap, cfl_safety * kCflLimit / speed);
  // Equal steps up to the target; the tolerance absorbs round-off in remaining/cap.
  const double count = std::max(1.0, std::ceil(remaining / cap * (1.0 - 1e-12)));
  const double h = count == 1.0 ? remaining : remaining / count;
  const double cfl = h * speed;
  if (!std::isfinite(umax) || cfl > kCflLimit) {
    AbortRecord rec;
    rec.reason = std::isfinite(umax) ? AbortRecord::Reason::kCflViolation : AbortRecord::Reason::kNonFinite;
    rec.t = t;
    rec.step_index = state.step_index;
    rec.value = cfl;
    rec.limit = kCflLimit;
    throw NumericalAbort(rec);
  }

  s.set_step(h);
  const auto th = x.half_spectrum();
  const std::size_t n = th.size();
  const auto& eh = s.e_half;
  const auto& ef = s.e_full;

  auto A = s.a.mutable_half_spectrum();
  const auto K1 = s.k1.half_spectrum();
  for (std::size_t i = 0; i < n; ++i) A[i] = eh[i] * (th[i] + 0.5 * h * K1[i]);
  s.rhs(t + 0.5 * h, s.a, s.k2);

  auto B = s.b.mutable_half_spectrum();
  const auto K2 = s.k2.half_spectrum();
  for (std::size_t i = 0; i < n; ++i) B[i] = eh[i] * th[i] + 0.5 * h * K2[i];
  s.rhs(t + 0.5 * h, s.b, s.k3);

  auto C = s.c.mutable_half_spectrum();
  const auto K3 = s.k3.half_spectrum();
  for (std::size_t i = 0; i < n; ++i) C[i] = ef[i] * th[i] + h * eh[i] * K3[i];
  s.rhs(t + h, s.c, s.k4);

  auto out = s.next.mutable_half_spectrum();
  const auto K4 = s.k4.half_spectrum();
  double peak = 0.0;
  bool finite = true;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = ef[i] * th[i] + (h / 6.0) * (ef[i] * K1[i] + 2.0 * eh[i] * (K2[i] + K3[i]) + K4[i]);
    const double mag = std::abs(out[i]);
    if (!std::isfinite(mag)) finite = false;
    peak = std::max(peak, mag);
  }
  s.next.enforce_invariants();
  if (!finite || peak > kBlowUpLimit) {
    AbortRecord rec;
    rec.reason = finite ? AbortRecord::Reason::kBlowUp : AbortRecord::Reason::kNonFinite;
    rec.t = t + h;
    rec.step_index = state.step_index + 1;
    rec.value = finite ? peak : std::numeric_limits<double>::infinity();
    rec.limit = kBlowUpLimit;
    throw NumericalAbort(rec);
  }

  const Quadratures q0 = s.integrands(t, x);
  const Quadratures qa = s.integrands(t + 0.5 * h, s.a);
  const Quadratures qb = s.integrands(t + 0.5 * h, s.b);
  const Quadratures qc = s.integrands(t + h, s.c);
  auto combine = [h](double v0, double va, double vb, double vc) { return h / 6.0 * (v0 + 2.0 * (va + vb) + vc); };
  quad_.diss_ham += combine(q0.diss_ham, qa.diss_ham, qb.diss_ham, qc.diss_ham);
  quad_.diss_l2 += combine(q0.diss_l2, qa.diss_l2, qb.diss_l2, qc.diss_l2);
  quad_.pair_ham += combine(q0.pair_ham, qa.pair_ham, qb.pair_ham, qc.pair_ham);
  quad_.pair_l2 += combine(q0.pair_l2, qa.pair_l2, qb.pair_l2, qc.pair_l2);

  std::swap(state.field, s.next);
  state.t = count == 1.0 ? t_target : t + h;
  ++state.step_index;
  return h;
}

TrajectoryState step(const TrajectoryState& state, const SimParams& params, const ForcingSpec& forcing) {
  Stepper stepper(params, forcing);
  TrajectoryState next = state;
  stepper.advance(next, state.t + params.dt, params.dt, false, 1.0);
  return next;
}

namespace {

void record(DiagnosticSeries& series, const TrajectoryState& state, const Stepper::Quadratures& q,
            const SimParams& params, const ForcingSpec& forcing, const RunOptions& options,
            const std::vector<Observer>& observers) {
  DiagnosticSample s = measure_state(state.field, state.t, params.alpha, params.gamma, forcing,
                                     options.physical_norms, options.lp_oversample);
  s.cum_diss_ham = q.diss_ham;
  s.cum_diss_l2 = q.diss_l2;
  s.cum_pair_ham = q.pair_ham;
  s.cum_pair_l2 = q.pair_l2;
  series.samples.push_back(s);
  std::vector<double> tails;
  tails.reserve(options.tail_cutoffs.size());
  for (double cut : options.tail_cutoffs) tails.push_back(high_tail_norm_sq(state.field, cut, -params.alpha));
  series.tail_sq.push_back(std::move(tails));
  if (options.keep_snapshots) series.snapshots.push_back(state.field);
  for (const Observer& obs : observers) obs(state, s);
}

}  // namespace

DiagnosticSeries run(const SpectralField& theta0, const SimParams& params, const ForcingSpec& forcing,
                     const std::vector<Observer>& observers, const RunOptions& options) {
  params.validate();
  if (theta0.grid_size() != params.grid_size) {
    throw ConfigError("initial datum grid " + std::to_string(theta0.grid_size()) + " does not match M = " +
                      std::to_string(params.grid_size));
  }
  if (!(options.sample_interval >= 0.0)) throw ConfigError("sample interval must be nonnegative");
  if (options.lp_oversample < 1) throw ConfigError("lp oversampling factor must be >= 1");
  if (!(options.cfl_safety > 0.0 && options.cfl_safety <= 1.0)) throw ConfigError("cfl safety must lie in (0, 1]");

  Stepper stepper(params, forcing);
  DiagnosticSeries series;
  series.alpha = params.alpha;
  series.gamma = params.gamma;
  series.nu = params.nu;
  series.grid_size = params.grid_size;
  series.physical_norms = options.physical_norms;
  series.tail_cutoffs = options.tail_cutoffs;

  TrajectoryState state{0.0, theta0, 0};
  state.field.enforce_invariants();
  record(series, state, stepper.quadratures(), params, forcing, options, observers);

  try {
    long long sample_index = 0;
    while (state.t < params.t_end) {
      double target = params.t_end;
      if (options.sample_interval > 0.0) {
        ++sample_index;
        target = std::min(params.t_end, static_cast<double>(sample_index) * options.sample_interval);
        // Skip sample times that round onto the current time.
        if (target <= state.t) continue;
      }
      do {
        stepper.advance(state, target, params.dt, options.adaptive_cfl, options.cfl_safety);
        if (options.sample_interval == 0.0) break;
      } while (state.t < target);
      record(series, state, stepper.quadratures(), params, forcing, options, observers);
    }
  } catch (const NumericalAbort& e) {
    if (!options.capture_abort) throw;
    series.abort = e.record();
  }
  return series;
}

}  // namespace gsqg
