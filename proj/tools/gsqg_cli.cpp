// Command-line front end. Talks to the solver only through the C API.
#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "gsqg/gsqg.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

int exit_code(gsqg_status s) {
  switch (s) {
    case GSQG_OK:
      return kExitOk;
    case GSQG_CONFIG:
    case GSQG_INVALID_ARGUMENT:
      return kExitConfig;
    case GSQG_NUMERICAL:
      return kExitNumerical;
    default:
      return kExitFailure;
  }
}

int report_error(gsqg_status s) {
  std::cerr << "gsqg: " << gsqg_status_name(s) << ": " << gsqg_last_error() << '\n';
  return exit_code(s);
}

template <class T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(p); }
  T** out() { return &p; }
  T* get() const { return p; }
};

using ConfigHandle = Handle<gsqg_config, gsqg_config_free>;
using SeriesHandle = Handle<gsqg_series, gsqg_series_free>;
using ReportHandle = Handle<gsqg_report, gsqg_report_free>;

// "section.key=value"
gsqg_status apply_override(gsqg_config* cfg, const std::string& text) {
  const auto dot = text.find('.');
  const auto eq = text.find('=');
  if (dot == std::string::npos || eq == std::string::npos || dot > eq) {
    std::cerr << "gsqg: --set expects section.key=value, got '" << text << "'\n";
    return GSQG_CONFIG;
  }
  const std::string section = text.substr(0, dot);
  const std::string key = text.substr(dot + 1, eq - dot - 1);
  const std::string value = text.substr(eq + 1);
  return gsqg_config_set(cfg, section.c_str(), key.c_str(), value.c_str());
}

struct Overrides {
  std::vector<std::string> sets;
  std::string out_dir;

  void attach(CLI::App* app) {
    app->add_option("--set", sets, "Override one config key, e.g. --set sweep.M_cap=256")->type_name("SEC.KEY=VAL");
    app->add_option("-o,--out", out_dir, "Output directory (replaces [output] dir)");
  }

  gsqg_status apply(gsqg_config* cfg) const {
    for (const std::string& s : sets) {
      if (const gsqg_status st = apply_override(cfg, s); st != GSQG_OK) return st;
    }
    if (!out_dir.empty()) return gsqg_config_set(cfg, "output", "dir", out_dir.c_str());
    return GSQG_OK;
  }
};

struct RunArgs {
  std::string config;
  std::string preset;
  std::optional<std::string> alpha, gamma, nu, grid, dt, t_end, stride, exact_rate;
  std::optional<std::string> init, force;
  bool adaptive = false;
  bool linear = false;
  Overrides overrides;
};

int do_run(const RunArgs& a) {
  ConfigHandle cfg;
  gsqg_status st;
  if (!a.config.empty()) {
    st = gsqg_config_load(a.config.c_str(), cfg.out());
  } else if (!a.preset.empty()) {
    st = gsqg_config_preset(a.preset.c_str(), cfg.out());
  } else {
    st = gsqg_config_parse("", cfg.out());
  }
  if (st != GSQG_OK) return report_error(st);

  const std::pair<const char*, const std::optional<std::string>*> inline_flags[] = {
      {"problem.alpha", &a.alpha}, {"problem.gamma", &a.gamma}, {"run.nu", &a.nu},
      {"run.M", &a.grid},          {"run.dt", &a.dt},           {"run.T", &a.t_end},
      {"run.stride", &a.stride},   {"run.exact_rate", &a.exact_rate}};
  for (const auto& [key, value] : inline_flags) {
    if (!value->has_value()) continue;
    if ((st = apply_override(cfg.get(), std::string(key) + "=" + **value)) != GSQG_OK) return report_error(st);
  }
  if (a.adaptive && (st = gsqg_config_set(cfg.get(), "run", "adaptive", "true")) != GSQG_OK) return report_error(st);
  if (a.linear && (st = gsqg_config_set(cfg.get(), "run", "nonlinear", "false")) != GSQG_OK) return report_error(st);
  if (a.init && (st = gsqg_config_set_initial(cfg.get(), a.init->c_str())) != GSQG_OK) return report_error(st);
  if (a.force && (st = gsqg_config_set(cfg.get(), "forcing", "entries", a.force->c_str())) != GSQG_OK) {
    return report_error(st);
  }
  if ((st = a.overrides.apply(cfg.get())) != GSQG_OK) return report_error(st);

  SeriesHandle series;
  const gsqg_status run_status = gsqg_run(cfg.get(), series.out());
  if (run_status != GSQG_OK && run_status != GSQG_NUMERICAL) return report_error(run_status);
  const char* dir = gsqg_config_output_dir(cfg.get());
  if ((st = gsqg_series_write_outputs(series.get(), dir)) != GSQG_OK) return report_error(st);

  const size_t n = gsqg_series_length(series.get());
  std::vector<double> row(gsqg_series_columns());
  double max_res_ham = 0.0, max_res_l2 = 0.0;
  for (size_t i = 0; i < n; ++i) {
    gsqg_series_row(series.get(), i, row.data());
    max_res_ham = std::max(max_res_ham, std::abs(row[row.size() - 2]));
    max_res_l2 = std::max(max_res_l2, std::abs(row[row.size() - 1]));
  }
  std::printf("samples: %zu\n", n);
  if (n > 0) {
    gsqg_series_row(series.get(), n - 1, row.data());
    std::printf("final t: %.10g\n", row[0]);
    std::printf("max |hamiltonian residual|: %.3e\n", max_res_ham);
    std::printf("max |l2 residual|: %.3e\n", max_res_l2);
  }
  if (double err = 0.0; gsqg_series_exact_error(series.get(), &err)) std::printf("max error vs exact: %.6e\n", err);
  std::printf("outputs: %s\n", dir);

  gsqg_abort_info info{};
  if (gsqg_series_abort(series.get(), &info)) {
    static const char* const reasons[] = {"cfl_violation", "non_finite", "blow_up"};
    std::printf("{\"reason\":\"%s\",\"t\":%.17g,\"step\":%lld,\"value\":%.17g,\"limit\":%.17g}\n", reasons[info.reason],
                info.t, info.step, info.value, info.limit);
    return kExitNumerical;
  }
  return kExitOk;
}

int sweep_and_write(gsqg_config* cfg) {
  ReportHandle report;
  gsqg_status st = gsqg_sweep(cfg, report.out());
  if (st != GSQG_OK) return report_error(st);
  if ((st = gsqg_report_write(report.get(), nullptr)) != GSQG_OK) return report_error(st);
  const size_t flagged = gsqg_report_aborted_count(report.get());
  std::printf("report: %s/report.json\n", gsqg_config_output_dir(cfg));
  if (flagged > 0) std::printf("aborted viscosities: %zu (see flags in the report)\n", flagged);
  return kExitOk;
}

int do_sweep(const std::string& path, const Overrides& ov) {
  ConfigHandle cfg;
  gsqg_status st = gsqg_config_load(path.c_str(), cfg.out());
  if (st != GSQG_OK) return report_error(st);
  if ((st = ov.apply(cfg.get())) != GSQG_OK) return report_error(st);
  return sweep_and_write(cfg.get());
}

int do_scenario(const std::string& name, bool print_only, const Overrides& ov) {
  const char* text = nullptr;
  gsqg_status st = gsqg_preset_text(name.c_str(), &text);
  if (st != GSQG_OK) return report_error(st);
  if (print_only) {
    std::fputs(text, stdout);
    return kExitOk;
  }
  ConfigHandle cfg;
  if ((st = gsqg_config_parse(text, cfg.out())) != GSQG_OK) return report_error(st);
  if ((st = ov.apply(cfg.get())) != GSQG_OK) return report_error(st);
  return sweep_and_write(cfg.get());
}

void print_suite(const char* suite, int passed, const char* detail, double seconds, void*) {
  std::printf("[%s] %-36s %7.3fs  %s\n", passed ? "PASS" : "FAIL", suite, seconds, detail);
  std::fflush(stdout);
}

int do_selftest() {
  int failures = 0;
  const gsqg_status st = gsqg_selftest(print_suite, nullptr, &failures);
  if (st != GSQG_OK) return report_error(st);
  std::printf("%s: %d failing suite(s)\n", failures == 0 ? "all suites passed" : "selftest failed", failures);
  return failures == 0 ? kExitOk : kExitFailure;
}

int do_export(const std::string& input, const std::string& output, const std::string& preset) {
  if (!preset.empty()) {
    const char* text = nullptr;
    const gsqg_status st = gsqg_preset_text(preset.c_str(), &text);
    if (st != GSQG_OK) return report_error(st);
    if (output.empty() || output == "-") {
      std::fputs(text, stdout);
      return kExitOk;
    }
    std::FILE* f = std::fopen(output.c_str(), "wb");
    if (!f || std::fputs(text, f) < 0) {
      if (f) std::fclose(f);
      std::cerr << "gsqg: cannot write " << output << '\n';
      return kExitFailure;
    }
    std::fclose(f);
    return kExitOk;
  }
  if (input.empty() || output.empty()) {
    std::cerr << "gsqg: export needs INPUT and OUTPUT snapshot paths, or --preset NAME\n";
    return kExitConfig;
  }
  const gsqg_status st = gsqg_export_snapshot(input.c_str(), output.c_str());
  return st == GSQG_OK ? kExitOk : report_error(st);
}

std::string preset_list() {
  std::string out;
  for (size_t i = 0; i < gsqg_preset_count(); ++i) {
    if (i) out += ", ";
    out += gsqg_preset_name(i);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string("gSQG vanishing-viscosity solver and experiment harness ") + gsqg_version()};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", gsqg_version());

  RunArgs run;
  CLI::App* run_cmd = app.add_subcommand("run", "Integrate one problem and write series.csv and the final snapshot");
  auto* cfg_opt = run_cmd->add_option("-c,--config", run.config, "INI configuration file")->check(CLI::ExistingFile);
  run_cmd->add_option("--preset", run.preset, "Start from a bundled preset (" + preset_list() + ")")->excludes(cfg_opt);
  run_cmd->add_option("--alpha", run.alpha, "Velocity exponent alpha");
  run_cmd->add_option("--gamma", run.gamma, "Dissipation exponent gamma");
  run_cmd->add_option("--nu", run.nu, "Viscosity");
  run_cmd->add_option("--M", run.grid, "Grid size (power of two)");
  run_cmd->add_option("--dt", run.dt, "Time step (maximum step when adaptive)");
  run_cmd->add_option("--T", run.t_end, "Final time");
  run_cmd->add_option("--stride", run.stride, "Sampling interval of the series (0 = every step)");
  run_cmd->add_option("--exact-rate", run.exact_rate, "Compare against theta_0 e^{rate t}");
  run_cmd->add_option("--init", run.init, "Initial datum: modes:..., bump:..., rough:...");
  run_cmd->add_option("--force", run.force, "Forcing entries: 'n1 n2 kind re im [args]; ...'");
  run_cmd->add_flag("--adaptive", run.adaptive, "CFL-adaptive time step");
  run_cmd->add_flag("--linear", run.linear, "Drop the nonlinear term");
  run.overrides.attach(run_cmd);

  std::string sweep_config;
  Overrides sweep_ov;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Run a viscosity sweep and write report.json with per-viscosity files");
  sweep_cmd->add_option("-c,--config", sweep_config, "INI configuration file")->required()->check(CLI::ExistingFile);
  sweep_ov.attach(sweep_cmd);

  std::string scenario_name;
  bool scenario_print = false;
  Overrides scenario_ov;
  CLI::App* scenario_cmd = app.add_subcommand("scenario", "Run a bundled sweep");
  scenario_cmd->add_option("name", scenario_name, "Scenario name")->required();
  scenario_cmd->add_flag("--print", scenario_print, "Print the scenario configuration instead of running it");
  scenario_ov.attach(scenario_cmd);

  CLI::App* selftest_cmd = app.add_subcommand("selftest", "Run the oracle suites of every module");

  std::string export_in, export_out, export_preset;
  CLI::App* export_cmd = app.add_subcommand("export", "Convert a snapshot between .bin and .csv, or write a preset config");
  export_cmd->add_option("input", export_in, "Input snapshot");
  export_cmd->add_option("output", export_out, "Output snapshot; the extension selects the format");
  export_cmd->add_option("--preset", export_preset, "Write the named preset's configuration to OUTPUT (or stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (*run_cmd) return do_run(run);
  if (*sweep_cmd) return do_sweep(sweep_config, sweep_ov);
  if (*scenario_cmd) {
    static const char* const kScenarios[] = {"smooth-compact", "counterexample", "global-existence",
                                             "supercritical-probe"};
    if (std::find(std::begin(kScenarios), std::end(kScenarios), scenario_name) == std::end(kScenarios)) {
      std::cerr << "gsqg: unknown scenario '" << scenario_name
                << "' (smooth-compact, counterexample, global-existence, supercritical-probe)\n";
      return kExitConfig;
    }
    return do_scenario(scenario_name, scenario_print, scenario_ov);
  }
  if (*selftest_cmd) return do_selftest();
  if (*export_cmd) {
    // With --preset the single positional is the output file.
    if (!export_preset.empty() && export_out.empty()) export_out = export_in;
    return do_export(export_in, export_out, export_preset);
  }
  return kExitConfig;
}
