#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spinpair/engine.hpp"

namespace spinpair {

/// Flat, file-backed parameter set. Geometry may be given either as the ion
/// separation directly or as the trap frequency it follows from, never both.
struct Config {
  // geometry
  bool geometry_from_trap = false;
  double d_um = 2.4;
  double f_trap_mhz = 0.0;

  // field
  double b0_mt = 0.44;
  double grad_static_t_per_m = 3e-7;

  // noise
  double collective_rms_t = 1e-7;
  double collective_corr_s = 10e-3;
  double gradient_rms_t_per_m = 0.0;
  double gradient_corr_s = 0.1;

  // instrument
  double prep_fidelity = 0.99;
  double psi_plus_fidelity = 0.95;
  double pulse_error_rad = 0.0;
  double det_up_intercept = 0.9675;
  double det_up_slope = -0.0035;
  double det_down_intercept = 0.9675;
  double det_down_slope = -0.0035;
  double mle_up_intercept = 0.9675;
  double mle_up_slope = -0.0035;
  double mle_down_intercept = 0.9675;
  double mle_down_slope = -0.0035;

  // sequence
  std::string init = "ud";
  double t_s = 15.0;
  double f0_hz = 2.0;
  std::vector<double> phi_rad = {1.5707963267948966};
  bool interleave = true;
  bool analysis = true;

  // run
  bool seed_set = false;
  std::uint64_t seed = 0;
  long shots = 500;
  double dt_s = 1e-3;
  int threads = 0;

  // output
  bool shot_series = false;

  // campaign
  std::string preset;

  bool operator==(const Config&) const = default;

  /// Collects every violation instead of stopping at the first.
  std::vector<std::string> validate() const;

  double separation_m() const;
  ModelParams model() const;
  SequenceSpec sequence(double phi, bool init_flip) const;
  RunSettings run() const;

  /// Canonical round-trippable text; parse_config(emit()) reproduces *this.
  std::string emit() const;

  /// FNV-1a over the canonical text minus execution-only keys (threads,
  /// shot_series), so the hash identifies the physical configuration.
  std::uint64_t hash() const;
};

/// Parses INI-style text ([section], key = value, # or ; comments). Errors
/// are appended to errors; the returned config is only meaningful when none
/// were added.
Config parse_config(const std::string& text, std::vector<std::string>& errors);

Config load_config(const std::string& path, std::vector<std::string>& errors);

/// Applies one "section.key=value" override.
bool apply_override(Config& cfg, const std::string& assignment, std::string& error);

std::vector<std::string> preset_names();
bool is_preset(const std::string& name);

/// Baseline config of a named study; throws std::invalid_argument on an
/// unknown name.
Config preset_config(const std::string& name);

}  // namespace spinpair
