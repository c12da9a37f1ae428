#include "spinpair.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#include "spinpair/campaign.hpp"
#include "spinpair/config.hpp"
#include "spinpair/constants.hpp"
#include "spinpair/inference.hpp"
#include "spinpair/instrument.hpp"
#include "spinpair/report.hpp"

struct sps_config {
  spinpair::Config cfg;
};

struct sps_report {
  spinpair::Report rep;
};

namespace {

thread_local std::string g_last_error;

int fail(int code, const std::string& msg) {
  g_last_error = msg;
  return code;
}

template <typename F>
int guarded(F&& body) {
  try {
    return body();
  } catch (const std::invalid_argument& e) {
    return fail(SPS_ERR_CONFIG, e.what());
  } catch (const std::exception& e) {
    return fail(SPS_ERR_RUNTIME, e.what());
  }
}

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (p) std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

int hand_out(const std::string& s, char** out) {
  *out = dup_string(s);
  return *out ? SPS_OK : fail(SPS_ERR_RUNTIME, "out of memory");
}

/// Column lookup by name with a positional fallback.
std::size_t pick_column(const spinpair::Table& t, const char* name, std::size_t fallback) {
  for (std::size_t i = 0; i < t.columns.size(); ++i)
    if (t.columns[i] == name) return i;
  return fallback;
}

}  // namespace

extern "C" {

const char* sps_version(void) { return spinpair::constants::version; }

const char* sps_last_error(void) { return g_last_error.c_str(); }

int sps_config_parse(const char* text, sps_config** out) {
  if (!text || !out) return fail(SPS_ERR_ARG, "null argument");
  *out = nullptr;
  return guarded([&]() -> int {
    std::vector<std::string> errors;
    spinpair::Config cfg = spinpair::parse_config(text, errors);
    if (!errors.empty()) {
      std::string joined = "invalid configuration:";
      for (const auto& e : errors) joined += "\n  " + e;
      return fail(SPS_ERR_CONFIG, joined);
    }
    *out = new sps_config{std::move(cfg)};
    return SPS_OK;
  });
}

int sps_config_load(const char* path, sps_config** out) {
  if (!path || !out) return fail(SPS_ERR_ARG, "null argument");
  *out = nullptr;
  return guarded([&]() -> int {
    std::vector<std::string> errors;
    spinpair::Config cfg = spinpair::load_config(path, errors);
    if (!errors.empty()) {
      std::string joined = "invalid configuration:";
      for (const auto& e : errors) joined += "\n  " + e;
      return fail(SPS_ERR_CONFIG, joined);
    }
    *out = new sps_config{std::move(cfg)};
    return SPS_OK;
  });
}

int sps_config_preset(const char* name, sps_config** out) {
  if (!name || !out) return fail(SPS_ERR_ARG, "null argument");
  *out = nullptr;
  return guarded([&]() -> int {
    *out = new sps_config{spinpair::preset_config(name)};
    return SPS_OK;
  });
}

int sps_config_set(sps_config* cfg, const char* assignment) {
  if (!cfg || !assignment) return fail(SPS_ERR_ARG, "null argument");
  std::string error;
  if (!spinpair::apply_override(cfg->cfg, assignment, error))
    return fail(SPS_ERR_CONFIG, error);
  return SPS_OK;
}

int sps_config_emit(const sps_config* cfg, char** out) {
  if (!cfg || !out) return fail(SPS_ERR_ARG, "null argument");
  return hand_out(cfg->cfg.emit(), out);
}

uint64_t sps_config_hash(const sps_config* cfg) { return cfg ? cfg->cfg.hash() : 0; }

void sps_config_free(sps_config* cfg) { delete cfg; }

int sps_run_simulate(const sps_config* cfg, sps_report** out) {
  if (!cfg || !out) return fail(SPS_ERR_ARG, "null argument");
  *out = nullptr;
  return guarded([&]() -> int {
    *out = new sps_report{spinpair::run_simulate(cfg->cfg)};
    return SPS_OK;
  });
}

int sps_run_campaign(const sps_config* cfg, sps_report** out) {
  if (!cfg || !out) return fail(SPS_ERR_ARG, "null argument");
  *out = nullptr;
  return guarded([&]() -> int {
    auto* rep = new sps_report{spinpair::run_campaign(cfg->cfg)};
    *out = rep;
    if (rep->rep.has("status") && rep->rep.text("status") == "failed")
      return fail(SPS_ERR_RUNTIME, rep->rep.has("error") ? rep->rep.text("error")
                                                         : "campaign failed");
    return SPS_OK;
  });
}

int sps_fit_records(const char* fringe_csv, sps_report** out) {
  if (!fringe_csv || !out) return fail(SPS_ERR_ARG, "null argument");
  *out = nullptr;
  return guarded([&]() -> int {
    const spinpair::Table t = spinpair::read_csv_table(fringe_csv);
    const std::size_t c_phi = pick_column(t, "phi_parity", 0);
    const std::size_t c_y = pick_column(t, "parity", 1);
    const std::size_t c_sig = pick_column(t, "sigma", 2);
    std::vector<double> phi, y, sigma;
    for (const auto& row : t.rows) {
      phi.push_back(row.at(c_phi));
      y.push_back(row.at(c_y));
      sigma.push_back(row.at(c_sig));
    }
    const spinpair::FringeFit fit = spinpair::fit_fringe(phi, y, sigma);
    spinpair::Report rep;
    rep.put_text("artifact_version", spinpair::constants::version);
    rep.put_text("source", fringe_csv);
    rep.put_int("points", static_cast<long long>(t.rows.size()));
    rep.put("fit_sin", fit.a);
    rep.put("fit_cos", fit.b);
    rep.put("fit_sin_sigma", fit.sigma_a);
    rep.put("fit_cos_sigma", fit.sigma_b);
    rep.put("amplitude", fit.amplitude());
    rep.put("amplitude_sigma", fit.amplitude_sigma());
    rep.put("phase_rad", fit.phase());
    rep.put("fit_chi2", fit.chi2);
    rep.put_int("fit_dof", fit.dof);
    *out = new sps_report{std::move(rep)};
    return SPS_OK;
  });
}

int sps_adev(const char* records_csv, double tau0_s, sps_report** out) {
  if (!records_csv || !out) return fail(SPS_ERR_ARG, "null argument");
  *out = nullptr;
  return guarded([&]() -> int {
    const spinpair::Table t = spinpair::read_csv_table(records_csv);
    if (t.columns.empty()) return fail(SPS_ERR_CONFIG, "records table has no columns");
    const std::size_t c_val = pick_column(t, "value", t.columns.size() - 1);
    std::vector<double> series;
    for (const auto& row : t.rows) series.push_back(row.at(c_val));
    const double tau0 = tau0_s > 0 ? tau0_s : 1.0;
    const auto points = spinpair::allan_deviation(series, tau0);

    spinpair::Report rep;
    rep.put_text("artifact_version", spinpair::constants::version);
    rep.put_text("source", records_csv);
    rep.put_int("samples", static_cast<long long>(series.size()));
    rep.put("tau0_s", tau0);
    spinpair::Table& table = rep.add_table("adev");
    table.columns = {"tau_s", "adev", "window"};
    std::vector<double> taus, adevs, weights;
    for (const auto& p : points) {
      table.rows.push_back({p.tau_s, p.adev, static_cast<double>(p.window)});
      if (p.adev > 0) {
        taus.push_back(p.tau_s);
        adevs.push_back(p.adev);
        weights.push_back(p.adev);  // unit weight in log space
      }
    }
    if (taus.size() >= 2) {
      const spinpair::FitResult fit = spinpair::fit_power_law(taus, adevs, weights);
      rep.put("slope_loglog", -fit.params[0]);
      rep.put("slope_sigma", fit.sigmas[0]);
    }
    *out = new sps_report{std::move(rep)};
    return SPS_OK;
  });
}

int sps_calibrate(const char* table_csv, sps_report** out) {
  if (!table_csv || !out) return fail(SPS_ERR_ARG, "null argument");
  *out = nullptr;
  return guarded([&]() -> int {
    const spinpair::Table t = spinpair::read_csv_table(table_csv);
    const std::size_t c_t = pick_column(t, "t_s", 0);
    const std::size_t c_f = pick_column(t, "fidelity", 1);
    std::vector<std::pair<double, double>> points;
    for (const auto& row : t.rows) points.emplace_back(row.at(c_t), row.at(c_f));
    const spinpair::AffineFidelity line = spinpair::fit_fidelity_curve(points);

    spinpair::Report rep;
    rep.put_text("artifact_version", spinpair::constants::version);
    rep.put_text("source", table_csv);
    rep.put_int("points", static_cast<long long>(points.size()));
    rep.put("intercept", line.intercept);
    rep.put("slope_per_s", line.slope);
    rep.put("fidelity_at_15", line.value(15.0));
    rep.put("contrast_at_15", std::pow(2.0 * line.value(15.0) - 1.0, 2));
    *out = new sps_report{std::move(rep)};
    return SPS_OK;
  });
}

int sps_report_kv(const sps_report* rep, char** out) {
  if (!rep || !out) return fail(SPS_ERR_ARG, "null argument");
  return hand_out(rep->rep.to_kv(), out);
}

size_t sps_report_table_count(const sps_report* rep) {
  return rep ? rep->rep.tables().size() : 0;
}

int sps_report_table_name(const sps_report* rep, size_t index, char** out) {
  if (!rep || !out) return fail(SPS_ERR_ARG, "null argument");
  if (index >= rep->rep.tables().size()) return fail(SPS_ERR_ARG, "table index out of range");
  return hand_out(rep->rep.tables()[index].name, out);
}

int sps_report_table_csv(const sps_report* rep, const char* name, char** out) {
  if (!rep || !name || !out) return fail(SPS_ERR_ARG, "null argument");
  return guarded([&]() -> int {
    for (const auto& t : rep->rep.tables())
      if (t.name == name) return hand_out(spinpair::table_to_csv(t), out);
    return fail(SPS_ERR_ARG, std::string("no such table: ") + name);
  });
}

int sps_report_write(const sps_report* rep, const char* dir) {
  if (!rep || !dir) return fail(SPS_ERR_ARG, "null argument");
  return guarded([&]() -> int {
    rep->rep.write(dir);
    return SPS_OK;
  });
}

int sps_report_checks_pass(const sps_report* rep) {
  return rep && rep->rep.all_checks_pass() ? 1 : 0;
}

int sps_report_scalar(const sps_report* rep, const char* key, double* out) {
  if (!rep || !key || !out) return fail(SPS_ERR_ARG, "null argument");
  if (!rep->rep.has(key)) return fail(SPS_ERR_ARG, std::string("no such key: ") + key);
  try {
    *out = rep->rep.scalar(key);
  } catch (const std::exception& e) {
    return fail(SPS_ERR_ARG, e.what());
  }
  return SPS_OK;
}

void sps_report_free(sps_report* rep) { delete rep; }

void sps_string_free(char* s) { std::free(s); }

}  // extern "C"
