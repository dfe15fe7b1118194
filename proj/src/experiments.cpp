#include "gsqg/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <fstream>
#include <limits>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "gsqg/counterexample.hpp"
#include "gsqg/errors.hpp"
#include "gsqg/integrator.hpp"
#include "gsqg/snapshot.hpp"
#include "gsqg/spectral_ops.hpp"
#include "json.hpp"

namespace gsqg {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Spectral states of one run restricted to the dealiasing disc, one per sample.
struct PackedHistory {
  int grid_size = 0;
  std::vector<Wavenumber> modes;
  std::vector<double> weights;  // lattice multiplicity
  std::vector<int> slot;        // half-spectrum index -> position in modes, or -1
  std::vector<double> times;
  std::vector<std::vector<Complex>> states;

  void init(int m, double radius) {
    grid_size = m;
    const SpectralField shape(m);
    slot.assign(static_cast<std::size_t>(shape.rows()) * static_cast<std::size_t>(shape.cols()), -1);
    for (int r = 0; r < shape.rows(); ++r) {
      for (int c = 0; c < shape.cols(); ++c) {
        const int w = shape.lattice_weight(r, c);
        const Wavenumber n = shape.wavenumber_at(r, c);
        if (w == 0 || n.modulus() > radius) continue;
        slot[shape.index(r, c)] = static_cast<int>(modes.size());
        modes.push_back(n);
        weights.push_back(w);
      }
    }
  }

  void push(double t, const SpectralField& f) {
    std::vector<Complex> v(modes.size());
    const auto d = f.half_spectrum();
    for (std::size_t i = 0; i < slot.size(); ++i) {
      if (slot[i] >= 0) v[static_cast<std::size_t>(slot[i])] = d[i];
    }
    times.push_back(t);
    states.push_back(std::move(v));
  }

  [[nodiscard]] int lookup(Wavenumber n) const {
    const SpectralField shape(grid_size);
    if (!shape.representable(n)) return -1;
    if (n.n2 < 0) n = {-n.n1, -n.n2};
    const int row = n.n1 >= 0 ? n.n1 : n.n1 + grid_size;
    return slot[shape.index(row, n.n2)];
  }
};

// int_0^T ||a - b||^2_{H^{-alpha}} by the trapezoid rule over shared sample times.
double history_distance_sq(const PackedHistory& a, const PackedHistory& b, double alpha) {
  const PackedHistory& big = a.grid_size >= b.grid_size ? a : b;
  const PackedHistory& small = &big == &a ? b : a;
  if (big.times.size() != small.times.size() || big.times.empty()) return kNaN;
  std::vector<int> map(big.modes.size());
  std::vector<double> mult(big.modes.size());
  for (std::size_t i = 0; i < big.modes.size(); ++i) {
    map[i] = small.lookup(big.modes[i]);
    mult[i] = big.weights[i] * std::pow(static_cast<double>(big.modes[i].modulus_sq()), -alpha);
  }
  std::vector<double> dist(big.times.size());
  for (std::size_t k = 0; k < big.times.size(); ++k) {
    if (std::abs(big.times[k] - small.times[k]) > 1e-12 * std::max(1.0, big.times[k])) return kNaN;
    double acc = 0.0;
    const auto& vb = big.states[k];
    const auto& vs = small.states[k];
    for (std::size_t i = 0; i < vb.size(); ++i) {
      const Complex other = map[i] >= 0 ? vs[static_cast<std::size_t>(map[i])] : Complex{};
      acc += mult[i] * std::norm(vb[i] - other);
    }
    // Modes of the smaller disc that the bigger one lacks cannot exist: its radius is larger.
    dist[k] = acc;
  }
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < dist.size(); ++k) {
    total += 0.5 * (big.times[k + 1] - big.times[k]) * (dist[k] + dist[k + 1]);
  }
  return total;
}

struct RunArtifacts {
  NuResult result;
  PackedHistory history;
  SpectralField initial, final;
  std::unique_ptr<LinearFlowEvaluator> evaluator;
};

std::vector<double> tail_cutoffs_for(double nu, const SweepConfig& cfg) {
  std::vector<double> cuts;
  const double n_nu = critical_frequency(nu, cfg.gamma);
  for (double l : cfg.lambdas) cuts.push_back(l * n_nu);
  for (double n : cfg.tail_grid) cuts.push_back(n);
  return cuts;
}

SimParams grid_params(double nu, int m, const SweepConfig& cfg) {
  SimParams p;
  p.alpha = cfg.alpha;
  p.gamma = cfg.gamma;
  p.nu = nu;
  p.grid_size = m;
  p.dt = cfg.dt_max;
  p.t_end = cfg.t_end;
  p.dealias.cutoff_fraction = cfg.cutoff;
  p.nonlinear = cfg.nonlinear;
  return p;
}

double viscous_weight(const SweepConfig& cfg, double nu) { return std::pow(nu, (cfg.alpha + cfg.gamma) / cfg.gamma); }

RunArtifacts run_grid(double nu, int m, bool capped, const SweepConfig& cfg, bool keep_history) {
  RunArtifacts art;
  NuResult& r = art.result;
  r.nu = nu;
  r.grid_size = m;
  r.method = "grid";
  const SimParams p = grid_params(nu, m, cfg);
  const double radius = p.dealias.radius(m);
  if (keep_history) art.history.init(m, radius);

  RunOptions o;
  o.sample_interval = cfg.t_end / cfg.samples;
  o.adaptive_cfl = true;
  o.cfl_safety = cfg.cfl_safety;
  o.tail_cutoffs = tail_cutoffs_for(nu, cfg);
  o.capture_abort = true;
  std::vector<Observer> obs;
  obs.emplace_back([&](const TrajectoryState& s, const DiagnosticSample&) {
    if (keep_history) art.history.push(s.t, s.field);
    if (art.initial.empty()) art.initial = s.field;
    art.final = s.field;
  });
  r.series = run(cfg.initial.build(m), p, cfg.forcing, obs, o);
  const DiagnosticSeries& s = r.series;

  if (capped) r.flags.push_back("dissipative_scale_unresolved");
  if (s.abort) {
    r.abort = s.abort;
    r.flags.push_back(std::string("aborted:") + to_string(s.abort->reason));
    r.D = r.D_window = r.hamiltonian_residual = r.l2_residual = kNaN;
    for (double d : cfg.deltas) r.D_delta[d] = kNaN;
    r.H[0.0] = kNaN;
    for (double d : cfg.deltas) r.H[d] = kNaN;
    for (double l : cfg.lambdas) {
      r.tails[l] = kNaN;
      r.tail_resolved[l] = false;
    }
    r.phi_tails.assign(cfg.tail_grid.size(), kNaN);
    return art;
  }

  const DiagnosticSample& fin = s.final();
  r.D = fin.cum_diss_ham;
  const double w = viscous_weight(cfg, nu) / nu;
  r.H[0.0] = w * fin.cum_diss_l2;
  for (double d : cfg.deltas) {
    const DiagnosticSample& at = s.samples[snap_to_sample(s, d)];
    r.D_delta[d] = at.cum_diss_ham;
    r.H[d] = w * (fin.cum_diss_l2 - at.cum_diss_l2);
  }
  const std::size_t last = s.samples.size() - 1;
  for (std::size_t i = 0; i < cfg.lambdas.size(); ++i) {
    const double l = cfg.lambdas[i];
    r.tails[l] = trapezoid(s, 0, last, [&](std::size_t k) { return s.tail_sq[k][i]; });
    r.tail_resolved[l] = l * critical_frequency(nu, cfg.gamma) <= radius;
    if (!r.tail_resolved[l]) r.flags.push_back("tail_unresolved:lambda=" + format_double(l));
  }
  for (std::size_t j = 0; j < cfg.tail_grid.size(); ++j) {
    const std::size_t col = cfg.lambdas.size() + j;
    r.phi_tails.push_back(trapezoid(s, 0, last, [&](std::size_t k) { return s.tail_sq[k][col]; }));
  }
  // [0, nu] is resolved only if some sample lands on t = nu.
  const DiagnosticSample& wnd = s.samples[snap_to_sample(s, nu)];
  r.D_window = std::abs(wnd.t - nu) <= 1e-12 ? wnd.cum_diss_ham : kNaN;
  const BalanceResidual br = balance_residuals(s);
  r.hamiltonian_residual = br.max_abs_hamiltonian();
  r.l2_residual = br.max_abs_l2();
  r.lp = lp_monotonicity_check(s, cfg.forcing);
  return art;
}

RunArtifacts run_linear_flow(double nu, const SweepConfig& cfg) {
  RunArtifacts art;
  NuResult& r = art.result;
  r.nu = nu;
  r.grid_size = cfg.grid_cap;
  r.method = "linear-flow";
  const CounterexampleFamily fam = build_counterexample_family(nu, cfg.alpha, cfg.gamma, cfg.initial.bump, cfg.grid_cap);
  art.evaluator = std::make_unique<LinearFlowEvaluator>(fam.recipe, cfg.lattice_radius);
  const LinearFlowEvaluator& ev = *art.evaluator;
  const double a = cfg.alpha, g = cfg.gamma, t_end = cfg.t_end;

  r.series = ev.series(counterexample_sample_times(nu, t_end, cfg.samples), tail_cutoffs_for(nu, cfg));
  r.D = nu * ev.time_integral(g - a, 0.0, t_end);
  const double w = viscous_weight(cfg, nu);
  r.H[0.0] = w * ev.time_integral(g, 0.0, t_end);
  for (double d : cfg.deltas) {
    r.D_delta[d] = nu * ev.time_integral(g - a, 0.0, d);
    r.H[d] = w * ev.time_integral(g, d, t_end);
  }
  for (double l : cfg.lambdas) {
    r.tails[l] = ev.time_integral(-a, 0.0, t_end, l * critical_frequency(nu, g));
    r.tail_resolved[l] = true;
  }
  for (double n : cfg.tail_grid) r.phi_tails.push_back(ev.time_integral(-a, 0.0, t_end, n));
  r.D_window = nu * ev.time_integral(g - a, 0.0, std::min(nu, t_end));
  const BalanceResidual br = balance_residuals(r.series);
  r.hamiltonian_residual = br.max_abs_hamiltonian();
  r.l2_residual = br.max_abs_l2();
  r.flags.push_back("linear_flow_exact");

  // Snapshots are the grid view of the exact flow on M_cap modes.
  art.initial = fam.theta0;
  SimParams p = fam.recipe.sim_params(cfg.grid_cap, t_end, t_end);
  art.final = dissipation_factor(p, t_end).apply(fam.theta0);
  if (critical_frequency(nu, g) > p.dealias.radius(cfg.grid_cap)) r.flags.push_back("snapshot_truncated");
  return art;
}

template <class Fn>
void parallel_for(std::size_t count, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(sweep_threads()));
  std::vector<std::exception_ptr> errors(count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

double relative_change(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

ResolutionCheck resolution_check(const NuResult& fine, const SweepConfig& cfg) {
  ResolutionCheck rc;
  rc.nu = fine.nu;
  rc.grid_size = fine.grid_size;
  rc.coarse_grid_size = fine.grid_size / 2;
  rc.tolerance = cfg.threshold;
  const RunArtifacts coarse = run_grid(fine.nu, rc.coarse_grid_size, false, cfg, false);
  const NuResult& c = coarse.result;
  if (!c.usable()) {
    rc.max_relative_change = kNaN;
    return rc;
  }
  rc.relative_change["D"] = relative_change(fine.D, c.D);
  for (const auto& [d, h] : fine.H) rc.relative_change["H(" + format_double(d) + ")"] = relative_change(h, c.H.at(d));
  const double ham = fine.series.initial().h_minus_alpha;
  for (const auto& [l, v] : fine.tails) {
    if (!fine.tail_resolved.at(l) || !c.tail_resolved.at(l)) continue;
    // Tails far below the Hamiltonian are pure round-off on both grids.
    if (std::max(v, c.tails.at(l)) < 1e-8 * ham * ham * cfg.t_end) continue;
    rc.relative_change["tail(" + format_double(l) + ")"] = relative_change(v, c.tails.at(l));
  }
  rc.max_relative_change = 0.0;
  for (const auto& [k, v] : rc.relative_change) rc.max_relative_change = std::max(rc.max_relative_change, v);
  return rc;
}

using ojson = nlohmann::ordered_json;

std::string key(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string nu_tag(double nu) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", nu);
  return buf;
}

template <class V>
ojson keyed_map(const std::map<double, V>& m) {
  ojson o = ojson::object();
  for (const auto& [k, v] : m) o[key(k)] = v;
  return o;
}

std::string initial_parameters(const InitialCondition& ic) {
  std::ostringstream s;
  switch (ic.kind) {
    case InitialCondition::Kind::kModes:
      for (std::size_t i = 0; i < ic.modes.size(); ++i) {
        const Mode& m = ic.modes[i];
        s << (i ? "; " : "") << m.n.n1 << ' ' << m.n.n2 << ' ' << format_double(m.amplitude.real()) << ' '
          << format_double(m.amplitude.imag());
      }
      break;
    case InitialCondition::Kind::kBump:
      s << "r0=" << format_double(ic.bump.r0) << " k=" << ic.bump.k << " amplitude=" << format_double(ic.bump.amplitude);
      break;
    case InitialCondition::Kind::kRough:
      s << "decay=" << format_double(ic.rough.decay) << " kmax=" << ic.rough.kmax
        << " amplitude=" << format_double(ic.rough.amplitude);
      break;
  }
  return s.str();
}

std::string forcing_entries(const ForcingSpec& f) {
  std::ostringstream s;
  for (std::size_t i = 0; i < f.entries.size(); ++i) {
    const ForcingEntry& e = f.entries[i];
    s << (i ? "; " : "") << e.n.n1 << ' ' << e.n.n2 << ' ';
    switch (e.profile.kind) {
      case TimeProfile::Kind::kConstant:
        s << "const";
        break;
      case TimeProfile::Kind::kSinusoidal:
        s << "sin";
        break;
      case TimeProfile::Kind::kRamp:
        s << "ramp";
        break;
      case TimeProfile::Kind::kExponential:
        s << "exp";
        break;
    }
    s << ' ' << format_double(e.amplitude.real()) << ' ' << format_double(e.amplitude.imag());
    switch (e.profile.kind) {
      case TimeProfile::Kind::kSinusoidal:
        s << ' ' << format_double(e.profile.omega) << ' ' << format_double(e.profile.phase);
        break;
      case TimeProfile::Kind::kRamp:
        s << ' ' << format_double(e.profile.tau);
        break;
      case TimeProfile::Kind::kExponential:
        s << ' ' << format_double(e.profile.rate);
        break;
      default:
        break;
    }
  }
  return s.str();
}

ojson config_json(const SweepConfig& c) {
  ojson j;
  j["problem"] = {{"alpha", c.alpha}, {"gamma", c.gamma}, {"cutoff", c.cutoff}};
  j["sweep"] = {{"nus", c.nus},
                {"T", c.t_end},
                {"deltas", c.deltas},
                {"lambdas", c.lambdas},
                {"Ns", c.tail_grid},
                {"M_cap", c.grid_cap},
                {"samples", c.samples},
                {"cfl", c.cfl_safety},
                {"dt_max", c.dt_max},
                {"threshold", c.threshold},
                {"nonlinear", c.nonlinear},
                {"resolution_check", c.resolution_check},
                {"lattice_radius", c.lattice_radius}};
  j["initial"] = {{"kind", to_string(c.initial.kind)},
                  {"parameters", initial_parameters(c.initial)},
                  {"seed", c.initial.seed}};
  j["forcing"] = {{"entries", forcing_entries(c.forcing)}};
  j["output"] = {{"dir", c.output_dir.string()}};
  return j;
}

}  // namespace

double critical_frequency(double nu, double gamma) { return std::pow(nu, -1.0 / (2.0 * gamma)); }

GridChoice grid_for_viscosity(double nu, const SweepConfig& cfg) {
  DealiasPolicy policy;
  policy.cutoff_fraction = cfg.cutoff;
  double need_datum = cfg.initial.spectral_radius();
  for (const ForcingEntry& e : cfg.forcing.entries) need_datum = std::max(need_datum, e.n.modulus());
  const double need = std::max(2.0 * critical_frequency(nu, cfg.gamma), need_datum);
  int m = 32;
  while (policy.radius(m) < need && m < cfg.grid_cap) m *= 2;
  if (policy.radius(m) < need_datum) {
    throw ConfigError("datum or forcing does not fit under the dealiasing radius at M_cap = " +
                      std::to_string(cfg.grid_cap));
  }
  return {m, policy.radius(m) < need};
}

int sweep_threads() {
  if (const char* env = std::getenv("GSQG_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<int>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

SweepReport run_sweep(const SweepConfig& cfg) {
  cfg.validate_sweep();
  const bool linear_flow = cfg.initial.kind == InitialCondition::Kind::kBump;
  std::vector<GridChoice> grids;
  for (double nu : cfg.nus) grids.push_back(linear_flow ? GridChoice{cfg.grid_cap, false} : grid_for_viscosity(nu, cfg));
  if (!linear_flow) {
    // Fail fast on forcing or datum problems before any long run starts.
    try {
      cfg.forcing.validate(grids.front().grid_size, DealiasPolicy{cfg.cutoff});
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }

  std::vector<RunArtifacts> arts(cfg.nus.size());
  parallel_for(cfg.nus.size(), [&](std::size_t i) {
    arts[i] = linear_flow ? run_linear_flow(cfg.nus[i], cfg)
                          : run_grid(cfg.nus[i], grids[i].grid_size, grids[i].capped, cfg, true);
  });

  SweepReport rep;
  rep.config = cfg;
  rep.generated = utc_timestamp();
  for (const RunArtifacts& a : arts) rep.per_nu.push_back(a.result);

  rep.phi.assign(cfg.tail_grid.size(), 0.0);
  for (const NuResult& r : rep.per_nu) {
    if (!r.usable()) continue;
    for (std::size_t j = 0; j < rep.phi.size(); ++j) rep.phi[j] = std::max(rep.phi[j], r.phi_tails[j]);
  }

  for (std::size_t i = 0; i < arts.size(); ++i) {
    for (std::size_t j = i + 1; j < arts.size(); ++j) {
      CauchyEntry e{cfg.nus[i], cfg.nus[j], kNaN};
      if (arts[i].result.usable() && arts[j].result.usable()) {
        const double d2 = linear_flow ? distance_sq(*arts[i].evaluator, *arts[j].evaluator, -cfg.alpha, cfg.t_end)
                                      : history_distance_sq(arts[i].history, arts[j].history, cfg.alpha);
        e.distance = std::sqrt(std::max(0.0, d2));
      }
      rep.cauchy.push_back(e);
    }
  }

  if (cfg.resolution_check && !linear_flow) {
    for (auto it = rep.per_nu.rbegin(); it != rep.per_nu.rend(); ++it) {
      if (!it->usable()) continue;
      DealiasPolicy policy{cfg.cutoff};
      double need = cfg.initial.spectral_radius();
      for (const ForcingEntry& e : cfg.forcing.entries) need = std::max(need, e.n.modulus());
      if (it->grid_size / 2 >= 32 && policy.radius(it->grid_size / 2) >= need) rep.resolution = resolution_check(*it, cfg);
      break;
    }
  }

  // Keep the initial and final states for the snapshot files only.
  for (std::size_t i = 0; i < arts.size(); ++i) {
    rep.per_nu[i].series.snapshots = {arts[i].initial, arts[i].final};
  }
  return rep;
}

std::string report_json(const SweepReport& report) {
  const SweepConfig& c = report.config;
  ojson j;
  j["header"] = {{"format", "gsqg-sweep-report"}, {"version", 1}, {"generated", report.generated}};
  j["config"] = config_json(c);
  ojson per = ojson::array();
  for (const NuResult& r : report.per_nu) {
    ojson e;
    e["nu"] = r.nu;
    e["M"] = r.grid_size;
    e["method"] = r.method;
    e["N_nu"] = critical_frequency(r.nu, c.gamma);
    e["D"] = r.D;
    e["D_delta"] = keyed_map(r.D_delta);
    e["H"] = keyed_map(r.H);
    e["tails"] = keyed_map(r.tails);
    e["tail_resolved"] = keyed_map(r.tail_resolved);
    e["D_window"] = r.D_window;
    ojson pt = ojson::object();
    for (std::size_t k = 0; k < c.tail_grid.size(); ++k) pt[key(c.tail_grid[k])] = r.phi_tails[k];
    e["phi_tails"] = pt;
    e["hamiltonian_residual"] = r.hamiltonian_residual;
    e["l2_residual"] = r.l2_residual;
    if (r.lp) {
      ojson lp = ojson::array();
      for (std::size_t k = 0; k < r.lp->exponents.size(); ++k) {
        lp.push_back({{"p", std::isinf(r.lp->exponents[k]) ? ojson("inf") : ojson(r.lp->exponents[k])},
                      {"worst_violation", r.lp->worst_violation[k]},
                      {"initial_norm", r.lp->initial_norm[k]},
                      {"forcing_integral", r.lp->forcing_integral[k]}});
      }
      e["lp"] = lp;
    } else {
      e["lp"] = nullptr;
    }
    e["flags"] = r.flags;
    if (r.abort) {
      e["abort"] = ojson::parse(abort_json(*r.abort));
    } else {
      e["abort"] = nullptr;
    }
    e["series_csv"] = "series_nu_" + nu_tag(r.nu) + ".csv";
    per.push_back(e);
  }
  j["per_nu"] = per;
  ojson phi = ojson::object();
  for (std::size_t k = 0; k < c.tail_grid.size(); ++k) phi[key(c.tail_grid[k])] = report.phi[k];
  j["phi"] = phi;
  ojson cau = ojson::array();
  for (const CauchyEntry& e : report.cauchy) cau.push_back({{"nu_i", e.nu_i}, {"nu_j", e.nu_j}, {"distance", e.distance}});
  j["cauchy"] = cau;

  ojson checks;
  ojson hob = ojson::array();
  for (double d : c.deltas) {
    if (!(d > 0.0 && d < c.t_end)) continue;
    const HigherOrderVerdict v = higher_order_bound_check(report, d);
    hob.push_back({{"delta", d}, {"max_H", v.max_H}, {"slope", v.slope}, {"pass", v.pass}});
  }
  checks["higher_order_bound"] = hob;
  const InstantDissipationVerdict nid = no_instant_dissipation_check(report, c.threshold);
  ojson table = ojson::array();
  for (const auto& row : nid.table) table.push_back({{"delta", row.delta}, {"sup_D_delta", row.sup_D_delta}});
  checks["no_instant_dissipation"] = {
      {"table", table}, {"reference", nid.reference}, {"monotone", nid.monotone}, {"pass", nid.pass}};
  const EquivalenceVerdict eq = frequency_equivalence_check(report, c.threshold);
  ojson curves = ojson::array();
  for (const EquivalenceCurve& cv : eq.curves) {
    curves.push_back({{"lambda", cv.lambda},
                      {"nu", cv.nu},
                      {"tail", cv.tail},
                      {"D", cv.D},
                      {"resolved", cv.resolved},
                      {"tail_vanishes", cv.tail_vanishes},
                      {"D_vanishes", cv.D_vanishes},
                      {"consistent", cv.consistent}});
  }
  checks["frequency_equivalence"] = {{"curves", curves}, {"verdict", eq.consistent ? "CONSISTENT" : "INCONSISTENT"}};
  j["checks"] = checks;

  if (report.resolution) {
    const ResolutionCheck& rc = *report.resolution;
    ojson ch = ojson::object();
    for (const auto& [k, v] : rc.relative_change) ch[k] = v;
    j["resolution"] = {{"nu", rc.nu},
                       {"M", rc.grid_size},
                       {"M_coarse", rc.coarse_grid_size},
                       {"relative_change", ch},
                       {"max_relative_change", rc.max_relative_change},
                       {"tolerance", rc.tolerance},
                       {"pass", rc.passes()}};
  } else {
    j["resolution"] = nullptr;
  }
  return j.dump(2) + "\n";
}

void write_sweep_outputs(const SweepReport& report, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
  auto open = [&](const fs::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    return out;
  };
  {
    auto out = open(dir / "report.json");
    out << report_json(report);
  }
  for (const NuResult& r : report.per_nu) {
    const std::string tag = nu_tag(r.nu);
    {
      auto out = open(dir / ("series_nu_" + tag + ".csv"));
      write_series_csv(out, r.series);
    }
    const auto& snaps = r.series.snapshots;
    if (snaps.size() != 2) continue;
    const char* names[2] = {"initial", "final"};
    const double times[2] = {0.0, r.series.final().t};
    for (int k = 0; k < 2; ++k) {
      const SnapshotHeader h{snaps[k].grid_size(), report.config.alpha, report.config.gamma, r.nu, times[k]};
      const std::string stem = "snapshot_nu_" + tag + "_" + names[k];
      write_snapshot_binary(dir / (stem + ".bin"), h, snaps[k]);
      write_snapshot_csv(dir / (stem + ".csv"), h, snaps[k]);
    }
  }
}

SingleRun run_single(const Config& cfg) {
  cfg.validate_run();
  SingleRun out;
  out.params = cfg.run_params();
  SpectralField theta0;
  if (cfg.initial.kind == InitialCondition::Kind::kBump) {
    theta0 = build_counterexample_family(cfg.nu, cfg.alpha, cfg.gamma, cfg.initial.bump, cfg.grid_size).theta0;
  } else {
    theta0 = cfg.initial.build(cfg.grid_size);
  }
  RunOptions o;
  o.sample_interval = cfg.stride;
  o.adaptive_cfl = cfg.adaptive;
  o.cfl_safety = cfg.cfl_safety;
  o.capture_abort = true;
  std::vector<Observer> obs;
  obs.emplace_back([&](const TrajectoryState& s, const DiagnosticSample&) {
    out.final_state = s.field;
    if (cfg.exact_rate) {
      const double e = s.field.max_abs_diff(theta0 * std::exp(*cfg.exact_rate * s.t));
      out.exact_error = std::max(out.exact_error.value_or(0.0), e);
    }
  });
  out.series = run(theta0, out.params, cfg.forcing, obs, o);
  out.header_only = cfg.t_end == 0.0;
  return out;
}

std::string abort_json(const AbortRecord& a) {
  const ojson j = {{"reason", to_string(a.reason)}, {"t", a.t}, {"step", a.step_index}, {"value", a.value}, {"limit", a.limit}};
  return j.dump();
}

void write_single_outputs(const SingleRun& r, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
  {
    std::ofstream out(dir / "series.csv", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir / "series.csv").string());
    if (r.header_only) {
      write_series_csv_header(out);
    } else {
      write_series_csv(out, r.series);
    }
  }
  const SnapshotHeader h{r.params.grid_size, r.params.alpha, r.params.gamma, r.params.nu, r.series.final().t};
  write_snapshot_binary(dir / "final.bin", h, r.final_state);
  write_snapshot_csv(dir / "final.csv", h, r.final_state);
  const fs::path abort_path = dir / "abort.json";
  if (r.series.abort) {
    std::ofstream out(abort_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + abort_path.string());
    out << abort_json(*r.series.abort) << "\n";
  } else {
    fs::remove(abort_path, ec);
  }
}

double fit_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_log_slope: need two or more points");
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::invalid_argument("fit_log_slope: values must be positive");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_log_slope: x values must differ");
  return sxy / sxx;
}

namespace {

// (nu, H) pairs of usable entries with H > 0 at the given delta.
void collect_H(const SweepReport& report, double delta, std::vector<double>& nu, std::vector<double>& h, double& max_h) {
  max_h = 0.0;
  for (const NuResult& r : report.per_nu) {
    if (!r.usable()) continue;
    const auto it = r.H.find(delta);
    if (it == r.H.end()) throw std::invalid_argument("delta " + format_double(delta) + " is not in the report");
    max_h = std::max(max_h, it->second);
    if (!std::isfinite(it->second)) max_h = it->second;
    if (it->second > 0.0) {
      nu.push_back(r.nu);
      h.push_back(it->second);
    }
  }
}

}  // namespace

HigherOrderVerdict higher_order_bound_check(const SweepReport& report, double delta, double slope_tolerance) {
  if (!(delta > 0.0 && delta < report.config.t_end)) {
    throw std::invalid_argument("higher_order_bound_check: delta must lie in (0, T)");
  }
  HigherOrderVerdict v;
  v.delta = delta;
  std::vector<double> nu, h;
  collect_H(report, delta, nu, h, v.max_H);
  v.slope = nu.size() >= 2 ? -fit_log_slope(nu, h) : kNaN;
  v.pass = std::isfinite(v.max_H) && (nu.size() < 2 || v.slope <= slope_tolerance);
  return v;
}

double higher_order_trend(const SweepReport& report, double delta) {
  std::vector<double> nu, h;
  double max_h = 0.0;
  collect_H(report, delta, nu, h, max_h);
  return fit_log_slope(nu, h);
}

InstantDissipationVerdict no_instant_dissipation_check(const SweepReport& report, double fraction) {
  InstantDissipationVerdict v;
  std::vector<double> deltas;
  for (double d : report.config.deltas) {
    if (d > 0.0) deltas.push_back(d);
  }
  std::sort(deltas.rbegin(), deltas.rend());
  deltas.erase(std::unique(deltas.begin(), deltas.end()), deltas.end());
  for (const NuResult& r : report.per_nu) {
    if (r.usable()) {
      v.reference = r.D;
      break;
    }
  }
  for (double d : deltas) {
    double sup = 0.0;
    for (const NuResult& r : report.per_nu) {
      if (r.usable()) sup = std::max(sup, r.D_delta.at(d));
    }
    v.table.push_back({d, sup});
  }
  v.monotone = true;
  for (std::size_t i = 1; i < v.table.size(); ++i) {
    if (v.table[i].sup_D_delta > v.table[i - 1].sup_D_delta) v.monotone = false;
  }
  v.pass = v.monotone && !v.table.empty() && v.table.back().sup_D_delta <= fraction * v.reference;
  return v;
}

EquivalenceVerdict frequency_equivalence_check(const SweepReport& report, double threshold) {
  EquivalenceVerdict out;
  std::vector<double> d_all;
  for (const NuResult& r : report.per_nu) {
    if (r.usable()) d_all.push_back(r.D);
  }
  const bool d_vanishes = d_all.size() >= 2 && d_all.back() <= threshold * d_all.front();
  bool any = false;
  out.consistent = true;
  for (double l : report.config.lambdas) {
    EquivalenceCurve c;
    c.lambda = l;
    for (const NuResult& r : report.per_nu) {
      if (!r.usable() || !r.tail_resolved.at(l)) continue;
      c.nu.push_back(r.nu);
      c.tail.push_back(r.tails.at(l));
      c.D.push_back(r.D);
    }
    c.resolved = c.nu.size() >= 2;
    c.D_vanishes = d_vanishes;
    if (c.resolved) {
      c.tail_vanishes = c.tail.back() <= threshold * c.tail.front();
      c.consistent = c.tail_vanishes == c.D_vanishes;
      out.consistent = out.consistent && c.consistent;
      any = true;
    }
    out.curves.push_back(c);
  }
  out.consistent = out.consistent && any;
  return out;
}

GlobalExistenceReport global_existence_experiment(const SweepConfig& cfg) {
  if (cfg.gamma != 1.0) throw ConfigError("the global existence experiment requires gamma = 1");
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw ConfigError("the global existence experiment requires alpha in (0, 1)");
  GlobalExistenceReport g;
  g.sweep = run_sweep(cfg);
  const auto& per = g.sweep.per_nu;
  for (std::size_t i = 0; i + 1 < per.size(); ++i) {
    for (const CauchyEntry& e : g.sweep.cauchy) {
      if (e.nu_i == per[i].nu && e.nu_j == per[i + 1].nu) g.consecutive_distances.push_back(e.distance);
    }
  }
  g.distances_decreasing = g.consecutive_distances.size() >= 2;
  for (std::size_t i = 0; i < g.consecutive_distances.size(); ++i) {
    if (!std::isfinite(g.consecutive_distances[i])) g.distances_decreasing = false;
    if (i > 0 && !(g.consecutive_distances[i] < g.consecutive_distances[i - 1])) g.distances_decreasing = false;
  }
  g.hamiltonian_residual_relative = kNaN;
  for (auto it = per.rbegin(); it != per.rend(); ++it) {
    if (!it->usable()) continue;
    const double h0 = it->series.initial().h_minus_alpha;
    g.hamiltonian_residual_relative = 2.0 * it->hamiltonian_residual / (h0 * h0);
    break;
  }
  g.lp_alpha_violation_relative = 0.0;
  for (const NuResult& r : per) {
    if (!r.usable() || !r.lp) continue;
    // p_alpha is the second exponent of the check.
    g.lp_alpha_violation_relative =
        std::max(g.lp_alpha_violation_relative, std::max(0.0, r.lp->worst_violation[1]) / r.lp->initial_norm[1]);
  }
  const auto& phi = g.sweep.phi;
  g.phi_decreasing = phi.size() >= 2 && phi.back() < phi.front();
  for (std::size_t i = 1; i < phi.size(); ++i) {
    if (phi[i] > phi[i - 1]) g.phi_decreasing = false;
  }
  return g;
}

}  // namespace gsqg
