// Command-line front end. Everything physical happens behind the shared
// library's C interface; this file only moves strings around.

#include <cstdint>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "spinpair.h"

namespace {

struct StringFree {
  void operator()(char* p) const { sps_string_free(p); }
};
using CStr = std::unique_ptr<char, StringFree>;

struct ConfigFree {
  void operator()(sps_config* p) const { sps_config_free(p); }
};
using ConfigPtr = std::unique_ptr<sps_config, ConfigFree>;

struct ReportFree {
  void operator()(sps_report* p) const { sps_report_free(p); }
};
using ReportPtr = std::unique_ptr<sps_report, ReportFree>;

int complain(int code) {
  std::cerr << "error: " << sps_last_error() << "\n";
  return code == SPS_ERR_ARG ? SPS_ERR_RUNTIME : code;
}

/// Writes files, prints the requested rendering, applies --check; returns
/// the process exit code given the run's own status.
int finish_report(sps_report* rep, const std::string& out_dir, const std::string& format,
                  bool check, int run_status) {
  if (!out_dir.empty()) {
    const int rc = sps_report_write(rep, out_dir.c_str());
    if (rc != SPS_OK) return complain(rc);
  }
  if (format == "csv") {
    const size_t n = sps_report_table_count(rep);
    for (size_t i = 0; i < n; ++i) {
      char* name_raw = nullptr;
      if (sps_report_table_name(rep, i, &name_raw) != SPS_OK) continue;
      CStr name(name_raw);
      char* csv_raw = nullptr;
      if (sps_report_table_csv(rep, name.get(), &csv_raw) != SPS_OK) continue;
      CStr csv(csv_raw);
      std::cout << "# table " << name.get() << "\n" << csv.get();
    }
  } else {
    char* kv_raw = nullptr;
    if (sps_report_kv(rep, &kv_raw) != SPS_OK) return complain(SPS_ERR_RUNTIME);
    CStr kv(kv_raw);
    std::cout << kv.get();
  }
  if (run_status != SPS_OK) return run_status;
  if (check && !sps_report_checks_pass(rep)) {
    std::cerr << "error: one or more acceptance bands missed\n";
    return SPS_ERR_CHECK;
  }
  return 0;
}

struct CommonFlags {
  std::string out_dir;
  std::string format = "kv";
  bool check = false;
  std::vector<std::string> overrides;
  std::int64_t seed = -1;
  std::int64_t shots = -1;
  std::int64_t threads = -1;

  void attach(CLI::App* cmd, bool with_run_flags) {
    cmd->add_option("--out-dir", out_dir, "directory for report.kv and table CSVs");
    cmd->add_option("--format", format, "stdout rendering")
        ->check(CLI::IsMember({"kv", "csv"}));
    if (with_run_flags) {
      cmd->add_flag("--check", check, "exit 4 when a band check fails");
      cmd->add_option("--override", overrides, "section.key=value, repeatable");
      cmd->add_option("--seed", seed, "overrides run.seed");
      cmd->add_option("--shots", shots, "overrides run.shots");
      cmd->add_option("--threads", threads, "overrides run.threads");
    }
  }

  int apply(sps_config* cfg) const {
    for (const auto& ov : overrides) {
      const int rc = sps_config_set(cfg, ov.c_str());
      if (rc != SPS_OK) return rc;
    }
    auto set = [cfg](const std::string& key, std::int64_t v) {
      return sps_config_set(cfg, (key + "=" + std::to_string(v)).c_str());
    };
    if (seed >= 0)
      if (const int rc = set("run.seed", seed); rc != SPS_OK) return rc;
    if (shots >= 0)
      if (const int rc = set("run.shots", shots); rc != SPS_OK) return rc;
    if (threads >= 0)
      if (const int rc = set("run.threads", threads); rc != SPS_OK) return rc;
    return SPS_OK;
  }
};

int run_config_command(ConfigPtr cfg, const CommonFlags& flags, bool campaign) {
  if (const int rc = flags.apply(cfg.get()); rc != SPS_OK) return complain(rc);
  sps_report* rep_raw = nullptr;
  const int rc = campaign ? sps_run_campaign(cfg.get(), &rep_raw)
                          : sps_run_simulate(cfg.get(), &rep_raw);
  ReportPtr rep(rep_raw);
  if (rc != SPS_OK && !rep) return complain(rc);
  if (rc != SPS_OK) std::cerr << "error: " << sps_last_error() << "\n";
  return finish_report(rep.get(), flags.out_dir, flags.format, flags.check, rc);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two trapped spins: simulator, figure campaigns, and analysis"};
  app.require_subcommand(1);
  app.set_version_flag("--version", []() { return std::string(sps_version()); });

  std::string config_path, preset, records_path;
  double tau0 = 1.0;

  auto* sim = app.add_subcommand("simulate", "run the cells a config file describes");
  sim->add_option("config", config_path, "configuration file")->required();
  CommonFlags sim_flags;
  sim_flags.attach(sim, true);

  auto* camp = app.add_subcommand("campaign", "run a named figure study");
  camp->add_option("name", preset, "fig2a fig2b fig2c fig3a fig3b fig3c fig4 witness")
      ->required();
  CommonFlags camp_flags;
  camp_flags.attach(camp, true);

  auto* fit = app.add_subcommand("fit", "sinusoid fit of an emitted fringe table");
  fit->add_option("records", records_path, "fringe CSV")->required();
  CommonFlags fit_flags;
  fit_flags.attach(fit, false);

  auto* adev = app.add_subcommand("adev", "overlapping Allan deviation of a shot series");
  adev->add_option("records", records_path, "records CSV (value column)")->required();
  adev->add_option("--tau0", tau0, "seconds per sample (default 1)");
  CommonFlags adev_flags;
  adev_flags.attach(adev, false);

  auto* cal = app.add_subcommand("calibrate", "affine readout-fidelity fit");
  cal->add_option("table", records_path, "calibration CSV (t_s, fidelity)")->required();
  CommonFlags cal_flags;
  cal_flags.attach(cal, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : SPS_ERR_CONFIG;
  }

  if (sim->parsed()) {
    sps_config* cfg = nullptr;
    if (const int rc = sps_config_load(config_path.c_str(), &cfg); rc != SPS_OK)
      return complain(rc);
    return run_config_command(ConfigPtr(cfg), sim_flags, false);
  }
  if (camp->parsed()) {
    sps_config* cfg = nullptr;
    if (const int rc = sps_config_preset(preset.c_str(), &cfg); rc != SPS_OK)
      return complain(rc);
    return run_config_command(ConfigPtr(cfg), camp_flags, true);
  }

  sps_report* rep_raw = nullptr;
  int rc = SPS_ERR_RUNTIME;
  const CommonFlags* flags = nullptr;
  if (fit->parsed()) {
    rc = sps_fit_records(records_path.c_str(), &rep_raw);
    flags = &fit_flags;
  } else if (adev->parsed()) {
    rc = sps_adev(records_path.c_str(), tau0, &rep_raw);
    flags = &adev_flags;
  } else {
    rc = sps_calibrate(records_path.c_str(), &rep_raw);
    flags = &cal_flags;
  }
  ReportPtr rep(rep_raw);
  if (rc != SPS_OK) return complain(rc);
  return finish_report(rep.get(), flags->out_dir, flags->format, false, SPS_OK);
}
