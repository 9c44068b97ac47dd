#include "d2dsim/d2dsim.h"

#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <string>

#include "d2dsim/config.hpp"

struct d2d_config {
  d2dsim::ExperimentConfig cfg;
};

struct d2d_report {
  d2dsim::RunResult result;
  std::string summary;
};

namespace {

thread_local std::string g_last_error;

d2d_status fail(d2d_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Maps the exception in flight to a status code.
d2d_status translate_exception() {
  try {
    throw;
  } catch (const d2dsim::ConfigError& e) {
    return fail(D2D_ERR_CONFIG, e.what());
  } catch (const d2dsim::InvalidConfig& e) {
    return fail(D2D_ERR_CONFIG, e.what());
  } catch (const d2dsim::OutputError& e) {
    return fail(D2D_ERR_IO, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(D2D_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(D2D_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(D2D_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(D2D_ERR_INTERNAL, "unknown error");
  }
}

template <class Fn>
d2d_status guarded(Fn&& fn) {
  g_last_error.clear();
  try {
    fn();
    return D2D_OK;
  } catch (...) {
    return translate_exception();
  }
}

d2d_status copy_out(const std::string& s, char* buf, size_t len, size_t* needed) {
  if (needed) *needed = s.size() + 1;
  if (buf && len > 0) {
    const size_t n = std::min(len - 1, s.size());
    std::memcpy(buf, s.data(), n);
    buf[n] = '\0';
  }
  return D2D_OK;
}

}  // namespace

extern "C" {

const char* d2d_version(void) { return D2DSIM_VERSION; }

const char* d2d_last_error(void) { return g_last_error.c_str(); }

const char* d2d_status_name(d2d_status status) {
  switch (status) {
    case D2D_OK: return "ok";
    case D2D_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case D2D_ERR_CONFIG: return "config";
    case D2D_ERR_IO: return "io";
    case D2D_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

d2d_status d2d_config_new(d2d_config** out) {
  if (!out) return fail(D2D_ERR_INVALID_ARGUMENT, "null output handle");
  return guarded([&] { *out = new d2d_config{}; });
}

d2d_status d2d_config_load(const char* path, d2d_config** out) {
  if (!path || !out) return fail(D2D_ERR_INVALID_ARGUMENT, "null argument");
  g_last_error.clear();
  try {
    auto cfg = d2dsim::parse_config(path);
    *out = new d2d_config{std::move(cfg)};
    return D2D_OK;
  } catch (const d2dsim::ConfigIoError& e) {
    return fail(D2D_ERR_IO, e.what());
  } catch (...) {
    return translate_exception();
  }
}

d2d_status d2d_config_set(d2d_config* cfg, const char* key, const char* value) {
  if (!cfg || !key || !value) return fail(D2D_ERR_INVALID_ARGUMENT, "null argument");
  g_last_error.clear();
  try {
    d2dsim::apply_config_value(cfg->cfg, key, value);
    return D2D_OK;
  } catch (const d2dsim::ConfigError& e) {
    // no source or line for a single key
    std::string what = e.what();
    if (what.starts_with(": ")) what.erase(0, 2);
    return fail(D2D_ERR_CONFIG, what);
  } catch (...) {
    return translate_exception();
  }
}

d2d_status d2d_config_validate(const d2d_config* cfg) {
  if (!cfg) return fail(D2D_ERR_INVALID_ARGUMENT, "null config");
  return guarded([&] { cfg->cfg.validate(); });
}

d2d_status d2d_config_echo(const d2d_config* cfg, char* buf, size_t len, size_t* needed) {
  if (!cfg) return fail(D2D_ERR_INVALID_ARGUMENT, "null config");
  return copy_out(d2dsim::config_echo(cfg->cfg), buf, len, needed);
}

const char* d2d_config_out_dir(const d2d_config* cfg) { return cfg ? cfg->cfg.out_dir.c_str() : ""; }

void d2d_config_free(d2d_config* cfg) { delete cfg; }

void d2d_set_threads(unsigned threads) { d2dsim::set_worker_threads(threads); }

d2d_status d2d_run(const d2d_config* cfg, d2d_report** out) {
  if (!cfg || !out) return fail(D2D_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    auto report = std::make_unique<d2d_report>();
    report->result = d2dsim::run_experiment(cfg->cfg);
    report->summary = d2dsim::summary_text(report->result);
    *out = report.release();
  });
}

d2d_experiment d2d_report_experiment(const d2d_report* report) {
  return report && report->result.config.experiment == d2dsim::ExperimentKind::Throughput
             ? D2D_EXPERIMENT_THROUGHPUT
             : D2D_EXPERIMENT_SINR;
}

size_t d2d_report_sample_count(const d2d_report* report) {
  if (!report) return 0;
  const auto& r = report->result;
  return r.config.experiment == d2dsim::ExperimentKind::Sinr ? r.sinr.sinr.size()
                                                             : r.throughput.baseline.flows.size();
}

size_t d2d_report_setting_count(const d2d_report* report) {
  return report ? report->result.sinr.settings.size() : 0;
}

d2d_status d2d_report_fraction_above(const d2d_report* report, size_t setting, double* out) {
  if (!report || !out) return fail(D2D_ERR_INVALID_ARGUMENT, "null argument");
  const auto rows = report->result.sinr.sinr_summary(report->result.config.radio.coverage_threshold_db);
  if (setting >= rows.size()) return fail(D2D_ERR_INVALID_ARGUMENT, "setting index out of range");
  *out = rows[setting].fraction_above;
  return D2D_OK;
}

d2d_status d2d_report_throughput(const d2d_report* report, int run, double* mean_bps, double* p5_bps) {
  if (!report || !mean_bps || !p5_bps) return fail(D2D_ERR_INVALID_ARGUMENT, "null argument");
  if (run != 0 && run != 1) return fail(D2D_ERR_INVALID_ARGUMENT, "run must be 0 (baseline) or 1 (offload)");
  const auto& tp = report->result.throughput;
  const auto s = (run == 0 ? tp.baseline : tp.offload).throughput_summary();
  *mean_bps = s.mean_bps;
  *p5_bps = s.p5_bps;
  return D2D_OK;
}

double d2d_report_wall_clock_s(const d2d_report* report) { return report ? report->result.wall_clock_s : 0.0; }

d2d_status d2d_report_summary(const d2d_report* report, char* buf, size_t len, size_t* needed) {
  if (!report) return fail(D2D_ERR_INVALID_ARGUMENT, "null report");
  return copy_out(report->summary, buf, len, needed);
}

d2d_status d2d_report_write(const d2d_report* report, const char* out_dir) {
  if (!report || !out_dir) return fail(D2D_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { d2dsim::emit_reports(report->result, out_dir); });
}

void d2d_report_free(d2d_report* report) { delete report; }

d2d_status d2d_discovery_overhead(uint64_t reserved_subframes, double period_s, double* capacity_fraction,
                                  double* sleep_fraction) {
  if (!capacity_fraction || !sleep_fraction) return fail(D2D_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const auto o = d2dsim::discovery_overhead(reserved_subframes, period_s);
    *capacity_fraction = o.capacity_fraction;
    *sleep_fraction = o.sleep_fraction;
  });
}

}  // extern "C"
