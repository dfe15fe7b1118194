#include "gsqg/gsqg.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <new>
#include <stdexcept>
#include <string>
#include <vector>

#include "gsqg/config.hpp"
#include "gsqg/errors.hpp"
#include "gsqg/experiments.hpp"
#include "gsqg/scenarios.hpp"
#include "gsqg/selftest.hpp"
#include "gsqg/snapshot.hpp"
#include "gsqg/spectral_ops.hpp"

struct gsqg_config {
  gsqg::Config cfg;
  std::string output_dir;  // backing store for gsqg_config_output_dir
};

struct gsqg_field {
  gsqg::Snapshot snap;
};

struct gsqg_series {
  gsqg::SingleRun run;
  std::vector<double> res_ham, res_l2;
};

struct gsqg_report {
  gsqg::SweepReport report;
  std::string json;
};

namespace {

thread_local std::string g_last_error;

gsqg_status fail(gsqg_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

// Maps every exception thrown by the library to a status code.
template <class Fn>
gsqg_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    return fn();
  } catch (const gsqg::ConfigError& e) {
    return fail(GSQG_CONFIG, e.what());
  } catch (const gsqg::NumericalAbort& e) {
    return fail(GSQG_NUMERICAL, e.what());
  } catch (const gsqg::FormatError& e) {
    return fail(GSQG_IO, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(GSQG_IO, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(GSQG_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(GSQG_INTERNAL, "out of memory");
  } catch (const std::runtime_error& e) {
    return fail(GSQG_IO, e.what());
  } catch (const std::exception& e) {
    return fail(GSQG_INTERNAL, e.what());
  } catch (...) {
    return fail(GSQG_INTERNAL, "unknown error");
  }
}

#define GSQG_REQUIRE(cond, what) \
  do {                           \
    if (!(cond)) return fail(GSQG_INVALID_ARGUMENT, what); \
  } while (0)

bool is_csv(const std::filesystem::path& p) { return p.extension() == ".csv"; }

gsqg::Snapshot read_any(const char* path) {
  const std::filesystem::path p(path);
  if (!std::filesystem::exists(p)) throw std::filesystem::filesystem_error("no such file", p, std::error_code());
  return is_csv(p) ? gsqg::read_snapshot_csv(p) : gsqg::read_snapshot_binary(p);
}

void write_any(const gsqg::Snapshot& s, const char* path) {
  const std::filesystem::path p(path);
  if (is_csv(p)) {
    gsqg::write_snapshot_csv(p, s.header, s.field);
  } else {
    gsqg::write_snapshot_binary(p, s.header, s.field);
  }
}

gsqg_config* wrap(gsqg::Config c) {
  auto* h = new gsqg_config{std::move(c), {}};
  h->output_dir = h->cfg.output_dir.string();
  return h;
}

std::vector<std::string> all_presets() {
  std::vector<std::string> names = gsqg::scenario_names();
  for (const std::string& n : gsqg::run_preset_names()) names.push_back(n);
  return names;
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = all_presets();
  return names;
}

std::string preset(const std::string& name) {
  for (const std::string& n : gsqg::scenario_names()) {
    if (n == name) return gsqg::scenario_text(name);
  }
  return gsqg::run_preset_text(name);
}

}  // namespace

extern "C" {

const char* gsqg_version(void) { return "1.0.0"; }

const char* gsqg_last_error(void) { return g_last_error.c_str(); }

const char* gsqg_status_name(gsqg_status status) {
  switch (status) {
    case GSQG_OK:
      return "ok";
    case GSQG_INVALID_ARGUMENT:
      return "invalid argument";
    case GSQG_CONFIG:
      return "configuration error";
    case GSQG_NUMERICAL:
      return "numerical abort";
    case GSQG_IO:
      return "i/o error";
    case GSQG_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

gsqg_status gsqg_config_load(const char* path, gsqg_config** out) {
  GSQG_REQUIRE(path && out, "gsqg_config_load: null argument");
  return guarded([&] {
    *out = wrap(gsqg::load_config(path));
    return GSQG_OK;
  });
}

gsqg_status gsqg_config_parse(const char* ini_text, gsqg_config** out) {
  GSQG_REQUIRE(ini_text && out, "gsqg_config_parse: null argument");
  return guarded([&] {
    *out = wrap(gsqg::parse_config(ini_text));
    return GSQG_OK;
  });
}

gsqg_status gsqg_config_preset(const char* name, gsqg_config** out) {
  GSQG_REQUIRE(name && out, "gsqg_config_preset: null argument");
  return guarded([&] {
    *out = wrap(gsqg::parse_config(preset(name)));
    return GSQG_OK;
  });
}

gsqg_status gsqg_preset_text(const char* name, const char** text) {
  GSQG_REQUIRE(name && text, "gsqg_preset_text: null argument");
  return guarded([&] {
    static std::map<std::string, std::string> texts;
    static std::mutex m;
    std::string body = preset(name);
    std::lock_guard lock(m);
    *text = texts.try_emplace(name, std::move(body)).first->second.c_str();
    return GSQG_OK;
  });
}

size_t gsqg_preset_count(void) { return preset_names().size(); }

const char* gsqg_preset_name(size_t index) {
  return index < preset_names().size() ? preset_names()[index].c_str() : nullptr;
}

gsqg_status gsqg_config_set(gsqg_config* cfg, const char* section, const char* key, const char* value) {
  GSQG_REQUIRE(cfg && section && key && value, "gsqg_config_set: null argument");
  return guarded([&] {
    gsqg::set_config_value(cfg->cfg, section, key, value);
    cfg->output_dir = cfg->cfg.output_dir.string();
    return GSQG_OK;
  });
}

gsqg_status gsqg_config_set_initial(gsqg_config* cfg, const char* spec) {
  GSQG_REQUIRE(cfg && spec, "gsqg_config_set_initial: null argument");
  return guarded([&] {
    cfg->cfg.initial = gsqg::parse_initial_spec(spec);
    return GSQG_OK;
  });
}

const char* gsqg_config_output_dir(const gsqg_config* cfg) { return cfg ? cfg->output_dir.c_str() : nullptr; }

void gsqg_config_free(gsqg_config* cfg) { delete cfg; }

gsqg_status gsqg_field_initial(const gsqg_config* cfg, int grid_size, gsqg_field** out) {
  GSQG_REQUIRE(cfg && out, "gsqg_field_initial: null argument");
  return guarded([&] {
    const gsqg::Config& c = cfg->cfg;
    gsqg::Snapshot s;
    s.header = {grid_size, c.alpha, c.gamma, c.nu, 0.0};
    if (c.initial.kind == gsqg::InitialCondition::Kind::kBump) {
      s.field = gsqg::build_counterexample_family(c.nu, c.alpha, c.gamma, c.initial.bump, grid_size).theta0;
    } else {
      s.field = c.initial.build(grid_size);
    }
    *out = new gsqg_field{std::move(s)};
    return GSQG_OK;
  });
}

gsqg_status gsqg_field_read(const char* path, gsqg_field** out) {
  GSQG_REQUIRE(path && out, "gsqg_field_read: null argument");
  return guarded([&] {
    *out = new gsqg_field{read_any(path)};
    return GSQG_OK;
  });
}

gsqg_status gsqg_field_write(const gsqg_field* field, const char* path) {
  GSQG_REQUIRE(field && path, "gsqg_field_write: null argument");
  return guarded([&] {
    write_any(field->snap, path);
    return GSQG_OK;
  });
}

int gsqg_field_grid_size(const gsqg_field* field) { return field ? field->snap.field.grid_size() : 0; }

double gsqg_field_time(const gsqg_field* field) { return field ? field->snap.header.t : 0.0; }

gsqg_status gsqg_field_coeff(const gsqg_field* field, int n1, int n2, double* re, double* im) {
  GSQG_REQUIRE(field && re && im, "gsqg_field_coeff: null argument");
  const gsqg::Complex c = field->snap.field.coeff({n1, n2});
  *re = c.real();
  *im = c.imag();
  return GSQG_OK;
}

gsqg_status gsqg_field_sobolev_norm(const gsqg_field* field, double s, double* out) {
  GSQG_REQUIRE(field && out, "gsqg_field_sobolev_norm: null argument");
  return guarded([&] {
    *out = gsqg::sobolev_norm(field->snap.field, s);
    return GSQG_OK;
  });
}

void gsqg_field_free(gsqg_field* field) { delete field; }

gsqg_status gsqg_run(const gsqg_config* cfg, gsqg_series** out) {
  GSQG_REQUIRE(cfg && out, "gsqg_run: null argument");
  *out = nullptr;
  return guarded([&] {
    auto* s = new gsqg_series{gsqg::run_single(cfg->cfg), {}, {}};
    s->res_ham = gsqg::hamiltonian_balance_residual(s->run.series);
    s->res_l2 = gsqg::l2_balance_residual(s->run.series);
    *out = s;
    if (s->run.series.abort) return fail(GSQG_NUMERICAL, "run aborted: " + gsqg::abort_json(*s->run.series.abort));
    return GSQG_OK;
  });
}

size_t gsqg_series_length(const gsqg_series* series) {
  if (!series || series->run.header_only) return 0;
  return series->run.series.samples.size();
}

size_t gsqg_series_columns(void) { return std::size(gsqg::kSeriesColumns); }

const char* gsqg_series_column_name(size_t index) {
  return index < gsqg_series_columns() ? gsqg::kSeriesColumns[index] : nullptr;
}

gsqg_status gsqg_series_row(const gsqg_series* series, size_t index, double* v) {
  GSQG_REQUIRE(series && v, "gsqg_series_row: null argument");
  GSQG_REQUIRE(index < gsqg_series_length(series), "gsqg_series_row: index out of range");
  const gsqg::DiagnosticSample& s = series->run.series.samples[index];
  const double row[] = {s.t,        s.h_minus_alpha, s.l2,           s.h_gamma_minus_alpha,    s.h_gamma,
                        s.lp_alpha, s.l1,            s.linf,         s.pair_ham,               s.pair_l2,
                        s.cum_diss_ham, s.cum_diss_l2, series->res_ham[index], series->res_l2[index]};
  static_assert(std::size(row) == std::size(gsqg::kSeriesColumns));
  std::memcpy(v, row, sizeof row);
  return GSQG_OK;
}

int gsqg_series_abort(const gsqg_series* series, gsqg_abort_info* info) {
  if (!series || !series->run.series.abort) return 0;
  if (info) {
    const gsqg::AbortRecord& a = *series->run.series.abort;
    info->reason = a.reason == gsqg::AbortRecord::Reason::kCflViolation ? GSQG_ABORT_CFL
                   : a.reason == gsqg::AbortRecord::Reason::kNonFinite  ? GSQG_ABORT_NON_FINITE
                                                                        : GSQG_ABORT_BLOW_UP;
    info->t = a.t;
    info->step = a.step_index;
    info->value = a.value;
    info->limit = a.limit;
  }
  return 1;
}

int gsqg_series_exact_error(const gsqg_series* series, double* error) {
  if (!series || !series->run.exact_error) return 0;
  if (error) *error = *series->run.exact_error;
  return 1;
}

gsqg_status gsqg_series_final_field(const gsqg_series* series, gsqg_field** out) {
  GSQG_REQUIRE(series && out, "gsqg_series_final_field: null argument");
  return guarded([&] {
    const gsqg::SingleRun& r = series->run;
    gsqg::Snapshot s{{r.params.grid_size, r.params.alpha, r.params.gamma, r.params.nu, r.series.final().t},
                     r.final_state};
    *out = new gsqg_field{std::move(s)};
    return GSQG_OK;
  });
}

gsqg_status gsqg_series_write_csv(const gsqg_series* series, const char* path) {
  GSQG_REQUIRE(series && path, "gsqg_series_write_csv: null argument");
  return guarded([&] {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(std::string("cannot write ") + path);
    if (series->run.header_only) {
      gsqg::write_series_csv_header(out);
    } else {
      gsqg::write_series_csv(out, series->run.series);
    }
    return GSQG_OK;
  });
}

gsqg_status gsqg_series_write_outputs(const gsqg_series* series, const char* dir) {
  GSQG_REQUIRE(series && dir, "gsqg_series_write_outputs: null argument");
  return guarded([&] {
    gsqg::write_single_outputs(series->run, dir);
    return GSQG_OK;
  });
}

void gsqg_series_free(gsqg_series* series) { delete series; }

gsqg_status gsqg_sweep(const gsqg_config* cfg, gsqg_report** out) {
  GSQG_REQUIRE(cfg && out, "gsqg_sweep: null argument");
  *out = nullptr;
  return guarded([&] {
    auto* r = new gsqg_report{gsqg::run_sweep(cfg->cfg), {}};
    r->json = gsqg::report_json(r->report);
    *out = r;
    return GSQG_OK;
  });
}

const char* gsqg_report_json(const gsqg_report* report) { return report ? report->json.c_str() : nullptr; }

gsqg_status gsqg_report_write(const gsqg_report* report, const char* dir) {
  GSQG_REQUIRE(report, "gsqg_report_write: null report");
  return guarded([&] {
    gsqg::write_sweep_outputs(report->report, dir ? std::filesystem::path(dir) : report->report.config.output_dir);
    return GSQG_OK;
  });
}

size_t gsqg_report_aborted_count(const gsqg_report* report) {
  if (!report) return 0;
  size_t n = 0;
  for (const auto& r : report->report.per_nu) n += r.usable() ? 0 : 1;
  return n;
}

void gsqg_report_free(gsqg_report* report) { delete report; }

gsqg_status gsqg_selftest(gsqg_selftest_callback callback, void* user, int* failures) {
  return guarded([&] {
    int failed = 0;
    gsqg::run_selftest([&](const gsqg::SelftestResult& r) {
      if (!r.passed) ++failed;
      if (callback) callback(r.suite.c_str(), r.passed ? 1 : 0, r.detail.c_str(), r.seconds, user);
    });
    if (failures) *failures = failed;
    return GSQG_OK;
  });
}

gsqg_status gsqg_export_snapshot(const char* in_path, const char* out_path) {
  GSQG_REQUIRE(in_path && out_path, "gsqg_export_snapshot: null argument");
  return guarded([&] {
    write_any(read_any(in_path), out_path);
    return GSQG_OK;
  });
}

}  // extern "C"
