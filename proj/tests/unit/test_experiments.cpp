#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "gsqg/errors.hpp"
#include "gsqg/experiments.hpp"
#include "gsqg/scenarios.hpp"
#include "json.hpp"

using namespace gsqg;
using nlohmann::json;

namespace {

// One shear-free mode under the linear flow: every functional has a closed form.
Config single_mode_sweep() {
  Config c = parse_config(R"(
[problem]
alpha = 0.5
gamma = 0.5
[sweep]
nus = 0.1, 0.05
T = 1
deltas = 0.1, 0.5
lambdas = 0.5
Ns = 1, 2
M_cap = 64
samples = 100
nonlinear = false
[initial]
kind = modes
parameters = 1 1 0.3 0
)");
  c.output_dir = std::filesystem::temp_directory_path() / "gsqg_unit_sweep";
  return c;
}

constexpr double kC2 = 0.09;  // |c|^2
const double kRoot2 = std::sqrt(2.0);

// nu int_a^b ||theta||^2_{H^0} for the single mode, |n|^{2 gamma} = sqrt 2.
double d_exact(double nu, double a, double b) {
  return kC2 * (std::exp(-2.0 * nu * kRoot2 * a) - std::exp(-2.0 * nu * kRoot2 * b)) / kRoot2;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

SweepReport synthetic(const std::vector<double>& nus, const std::vector<double>& D, const std::vector<double>& H,
                      const std::vector<double>& tails) {
  SweepReport r;
  r.config = parse_config("[sweep]\nT = 1\ndeltas = 0.1\nlambdas = 1\n");
  r.config.nus = nus;
  for (std::size_t i = 0; i < nus.size(); ++i) {
    NuResult x;
    x.nu = nus[i];
    x.D = D[i];
    x.D_delta[0.1] = 0.5 * D[i];
    x.H[0.0] = 10 * H[i];
    x.H[0.1] = H[i];
    x.tails[1.0] = tails[i];
    x.tail_resolved[1.0] = true;
    r.per_nu.push_back(x);
  }
  return r;
}

}  // namespace

TEST_CASE("critical frequency and the grid rule") {
  CHECK(critical_frequency(1e-2, 0.5) == doctest::Approx(100.0));
  CHECK(critical_frequency(1e-2, 1.0) == doctest::Approx(10.0));
  Config c = parse_config("");
  c.grid_cap = 512;
  // N = 10 needs (2/3)(M/2) >= 20.
  GridChoice g = grid_for_viscosity(0.1, c);
  CHECK(g.grid_size == 64);
  CHECK_FALSE(g.capped);
  // Tiny N: the floor of 32 applies.
  c.gamma = 2.0;
  g = grid_for_viscosity(0.5, c);
  CHECK(g.grid_size == 32);
  // A wide datum pushes M up.
  c.initial.modes = {{{40, 0}, {1.0, 0.0}}};
  g = grid_for_viscosity(0.5, c);
  CHECK(g.grid_size == 128);
  c.gamma = 0.5;
  c.initial.modes.clear();
  c.grid_cap = 64;
  g = grid_for_viscosity(1e-3, c);
  CHECK(g.grid_size == 64);
  CHECK(g.capped);
}

TEST_CASE("fit_log_slope recovers a power law") {
  std::vector<double> x, y;
  for (double v : {1e-3, 3e-3, 1e-2, 3e-2}) {
    x.push_back(v);
    y.push_back(2.5 * std::pow(v, -0.75));
  }
  CHECK(fit_log_slope(x, y) == doctest::Approx(-0.75).epsilon(1e-12));
}

TEST_CASE("single-mode sweep reproduces the closed forms") {
  const Config cfg = single_mode_sweep();
  const SweepReport rep = run_sweep(cfg);
  REQUIRE(rep.per_nu.size() == 2);
  for (const NuResult& r : rep.per_nu) {
    const double nu = r.nu;
    CHECK(r.usable());
    CHECK(r.method == "grid");
    CHECK(r.D == doctest::Approx(d_exact(nu, 0.0, 1.0)).epsilon(1e-9));
    CHECK(r.D_delta.at(0.1) == doctest::Approx(d_exact(nu, 0.0, 0.1)).epsilon(1e-9));
    // H(delta) = nu^{(alpha+gamma)/gamma} int_delta^T ||theta||^2_{H^gamma}.
    CHECK(r.H.at(0.0) == doctest::Approx(nu * kRoot2 * d_exact(nu, 0.0, 1.0)).epsilon(1e-9));
    CHECK(r.H.at(0.5) == doctest::Approx(nu * kRoot2 * d_exact(nu, 0.5, 1.0)).epsilon(1e-9));
    // Only the tail above N = 1 carries the mode: int ||theta||^2_{H^{-1/2}}.
    const double tail1 = kC2 * (1.0 - std::exp(-2.0 * nu * kRoot2)) / (2.0 * nu);
    CHECK(r.phi_tails[0] == doctest::Approx(tail1).epsilon(1e-5));
    CHECK(r.phi_tails[1] == 0.0);
    CHECK(r.tails.at(0.5) == 0.0);
    CHECK(r.hamiltonian_residual < 1e-12);
  }
  CHECK(rep.per_nu[0].grid_size == 64);
  CHECK(std::count(rep.per_nu[1].flags.begin(), rep.per_nu[1].flags.end(), "dissipative_scale_unresolved") == 1);
  // Cauchy distance of the two linear flows.
  REQUIRE(rep.cauchy.size() == 1);
  const double a = 2 * 0.1 * kRoot2, b = 2 * 0.05 * kRoot2;
  const auto expint = [](double r) { return (1.0 - std::exp(-r)) / r; };
  // int_0^1 (2|c|^2 / sqrt 2)(e^{-a t/2} - e^{-b t/2})^2 dt
  const double exact = 2.0 * kC2 / kRoot2 * (expint(a) - 2.0 * expint(0.5 * (a + b)) + expint(b));
  CHECK(rep.cauchy[0].distance == doctest::Approx(std::sqrt(exact)).epsilon(1e-4));
}

TEST_CASE("report JSON follows the schema and files are deterministic") {
  const Config cfg = single_mode_sweep();
  std::filesystem::remove_all(cfg.output_dir);
  const SweepReport rep = run_sweep(cfg);
  write_sweep_outputs(rep, cfg.output_dir);
  const json j = json::parse(report_json(rep));
  CHECK(j.at("header").at("format") == "gsqg-sweep-report");
  CHECK(j.at("header").at("version") == 1);
  CHECK(j.at("header").at("generated").get<std::string>().back() == 'Z');
  for (const char* k : {"problem", "sweep", "initial", "forcing", "output"}) CHECK(j.at("config").contains(k));
  REQUIRE(j.at("per_nu").size() == 2);
  for (const json& e : j.at("per_nu")) {
    for (const char* k : {"nu", "M", "method", "N_nu", "D", "D_delta", "H", "tails", "tail_resolved", "D_window",
                          "phi_tails", "hamiltonian_residual", "l2_residual", "lp", "flags", "abort", "series_csv"}) {
      CHECK_MESSAGE(e.contains(k), k);
    }
    CHECK(e.at("H").contains("0"));
    CHECK(e.at("H").contains("0.5"));
    CHECK(e.at("lp").size() == 4);
    CHECK(e.at("abort").is_null());
    CHECK(std::filesystem::exists(cfg.output_dir / e.at("series_csv").get<std::string>()));
  }
  CHECK(j.at("phi").size() == 2);
  CHECK(j.at("cauchy").size() == 1);
  for (const char* k : {"higher_order_bound", "no_instant_dissipation", "frequency_equivalence"}) {
    CHECK(j.at("checks").contains(k));
  }
  const std::string verdict = j.at("checks").at("frequency_equivalence").at("verdict");
  CHECK((verdict == "CONSISTENT" || verdict == "INCONSISTENT"));

  const auto files_before = slurp(cfg.output_dir / "series_nu_1.000e-01.csv");
  const auto snap_before = slurp(cfg.output_dir / "snapshot_nu_1.000e-01_final.bin");
  CHECK(std::filesystem::exists(cfg.output_dir / "snapshot_nu_5.000e-02_initial.csv"));
  write_sweep_outputs(run_sweep(cfg), cfg.output_dir);
  CHECK(slurp(cfg.output_dir / "series_nu_1.000e-01.csv") == files_before);
  CHECK(slurp(cfg.output_dir / "snapshot_nu_1.000e-01_final.bin") == snap_before);
  std::filesystem::remove_all(cfg.output_dir);
}

TEST_CASE("higher-order verdict on synthetic reports") {
  const SweepReport flat = synthetic({1e-1, 1e-2, 1e-3}, {1, 1, 1}, {2.0, 2.0, 2.0}, {1, 1, 1});
  const HigherOrderVerdict v = higher_order_bound_check(flat, 0.1);
  CHECK(v.max_H == doctest::Approx(2.0));
  CHECK(v.slope == doctest::Approx(0.0).scale(1e-12));
  CHECK(v.pass);
  const SweepReport growing = synthetic({1e-1, 1e-2, 1e-3}, {1, 1, 1}, {1.0, 10.0, 100.0}, {1, 1, 1});
  const HigherOrderVerdict g = higher_order_bound_check(growing, 0.1);
  CHECK(g.slope == doctest::Approx(1.0));
  CHECK_FALSE(g.pass);
  CHECK(higher_order_trend(growing, 0.1) == doctest::Approx(-1.0));
  CHECK(higher_order_trend(growing, 0.0) == doctest::Approx(-1.0));
  CHECK_THROWS_AS(higher_order_bound_check(flat, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(higher_order_bound_check(flat, 1.0), std::invalid_argument);
}

TEST_CASE("instant dissipation and frequency equivalence on synthetic reports") {
  const SweepReport vanishing = synthetic({1e-1, 1e-2, 1e-3}, {1.0, 0.1, 0.01}, {1, 1, 1}, {1.0, 0.2, 0.01});
  const InstantDissipationVerdict nid = no_instant_dissipation_check(vanishing);
  REQUIRE(nid.table.size() == 1);
  CHECK(nid.table[0].sup_D_delta == doctest::Approx(0.5));
  CHECK(nid.reference == 1.0);
  CHECK_FALSE(nid.pass);
  const EquivalenceVerdict eq = frequency_equivalence_check(vanishing);
  REQUIRE(eq.curves.size() == 1);
  CHECK(eq.curves[0].D_vanishes);
  CHECK(eq.curves[0].tail_vanishes);
  CHECK(eq.consistent);

  // Tails vanish while D does not: inconsistent.
  const SweepReport split = synthetic({1e-1, 1e-2, 1e-3}, {1.0, 1.0, 1.0}, {1, 1, 1}, {1.0, 0.2, 0.01});
  CHECK_FALSE(frequency_equivalence_check(split).consistent);

  // A single resolved viscosity cannot give a verdict.
  SweepReport thin = synthetic({1e-1, 1e-2}, {1.0, 0.01}, {1, 1}, {1.0, 0.01});
  thin.per_nu[1].tail_resolved[1.0] = false;
  const EquivalenceVerdict t = frequency_equivalence_check(thin);
  CHECK_FALSE(t.curves[0].resolved);
  CHECK_FALSE(t.consistent);

  // Aborted entries are skipped.
  SweepReport ab = synthetic({1e-1, 1e-2, 1e-3}, {1.0, 0.1, 7.0}, {1, 1, 1}, {1.0, 0.2, 5.0});
  ab.per_nu[2].abort = AbortRecord{};
  CHECK(frequency_equivalence_check(ab, 0.2).consistent);
}

TEST_CASE("global existence experiment preconditions") {
  Config c = scenario_config("global-existence");
  c.gamma = 0.5;
  CHECK_THROWS_AS(global_existence_experiment(c), ConfigError);
  c = scenario_config("global-existence");
  c.alpha = 1.0;
  CHECK_THROWS_AS(global_existence_experiment(c), ConfigError);
}

TEST_CASE("single runs: header-only, exact rate and aborts") {
  Config c = parse_config(run_preset_text("manufactured"));
  const SingleRun m = run_single(c);
  REQUIRE(m.exact_error.has_value());
  CHECK(*m.exact_error < 1e-6);
  CHECK_FALSE(m.header_only);

  c.t_end = 0.0;
  const SingleRun z = run_single(c);
  CHECK(z.header_only);
  CHECK(z.series.samples.size() == 1);

  Config bad = parse_config("[run]\nnu = 1e-3\nM = 32\ndt = 5\nT = 10\n[initial]\nparameters = 1 0 1 0; 0 1 0 1; 1 1 1 1\n");
  const SingleRun a = run_single(bad);
  REQUIRE(a.series.abort.has_value());
  CHECK(a.series.abort->reason == AbortRecord::Reason::kCflViolation);
  const json j = json::parse(abort_json(*a.series.abort));
  CHECK(j.at("reason") == to_string(AbortRecord::Reason::kCflViolation));
  for (const char* k : {"t", "step", "value", "limit"}) CHECK(j.contains(k));
}
