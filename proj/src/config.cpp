#include "spinpair/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "spinpair/constants.hpp"
#include "spinpair/report.hpp"
#include "spinpair/rng.hpp"

namespace spinpair {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

bool parse_double(const std::string& s, double& out) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  char* end = nullptr;
  out = std::strtod(t.c_str(), &end);
  return end == t.c_str() + t.size() && std::isfinite(out);
}

bool parse_long(const std::string& s, long& out) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  char* end = nullptr;
  out = std::strtol(t.c_str(), &end, 10);
  return end == t.c_str() + t.size();
}

bool parse_int(const std::string& s, int& out) {
  long v = 0;
  if (!parse_long(s, v) || v < -2147483647L || v > 2147483647L) return false;
  out = static_cast<int>(v);
  return true;
}

bool parse_u64(const std::string& s, std::uint64_t& out) {
  const std::string t = trim(s);
  if (t.empty() || t[0] == '-') return false;
  char* end = nullptr;
  out = std::strtoull(t.c_str(), &end, 10);
  return end == t.c_str() + t.size();
}

bool parse_bool(const std::string& s, bool& out) {
  const std::string t = trim(s);
  if (t == "true" || t == "1") {
    out = true;
    return true;
  }
  if (t == "false" || t == "0") {
    out = false;
    return true;
  }
  return false;
}

bool parse_list(const std::string& s, std::vector<double>& out) {
  out.clear();
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, ',')) {
    double v = 0;
    if (!parse_double(item, v)) return false;
    out.push_back(v);
  }
  return !out.empty();
}

/// Applies one key; returns an error message or "".
std::string set_key(Config& cfg, const std::string& section, const std::string& key,
                    const std::string& value) {
  const std::string full = section + "." + key;
  auto bad = [&full]() { return "invalid value for " + full; };

  if (section == "geometry") {
    if (key == "d_um") {
      if (!parse_double(value, cfg.d_um)) return bad();
      cfg.geometry_from_trap = false;
      return "";
    }
    if (key == "f_trap_mhz") {
      if (!parse_double(value, cfg.f_trap_mhz)) return bad();
      cfg.geometry_from_trap = true;
      return "";
    }
  } else if (section == "field") {
    if (key == "b0_mt") return parse_double(value, cfg.b0_mt) ? "" : bad();
    if (key == "grad_static_t_per_m")
      return parse_double(value, cfg.grad_static_t_per_m) ? "" : bad();
  } else if (section == "noise") {
    if (key == "collective_rms_t") return parse_double(value, cfg.collective_rms_t) ? "" : bad();
    if (key == "collective_corr_s")
      return parse_double(value, cfg.collective_corr_s) ? "" : bad();
    if (key == "gradient_rms_t_per_m")
      return parse_double(value, cfg.gradient_rms_t_per_m) ? "" : bad();
    if (key == "gradient_corr_s") return parse_double(value, cfg.gradient_corr_s) ? "" : bad();
  } else if (section == "instrument") {
    if (key == "prep_fidelity") return parse_double(value, cfg.prep_fidelity) ? "" : bad();
    if (key == "psi_plus_fidelity")
      return parse_double(value, cfg.psi_plus_fidelity) ? "" : bad();
    if (key == "pulse_error_rad") return parse_double(value, cfg.pulse_error_rad) ? "" : bad();
    if (key == "det_up_intercept") return parse_double(value, cfg.det_up_intercept) ? "" : bad();
    if (key == "det_up_slope") return parse_double(value, cfg.det_up_slope) ? "" : bad();
    if (key == "det_down_intercept")
      return parse_double(value, cfg.det_down_intercept) ? "" : bad();
    if (key == "det_down_slope") return parse_double(value, cfg.det_down_slope) ? "" : bad();
    if (key == "mle_up_intercept") return parse_double(value, cfg.mle_up_intercept) ? "" : bad();
    if (key == "mle_up_slope") return parse_double(value, cfg.mle_up_slope) ? "" : bad();
    if (key == "mle_down_intercept")
      return parse_double(value, cfg.mle_down_intercept) ? "" : bad();
    if (key == "mle_down_slope") return parse_double(value, cfg.mle_down_slope) ? "" : bad();
  } else if (section == "sequence") {
    if (key == "init") {
      const std::string v = trim(value);
      if (v.empty()) return bad();
      cfg.init = v;
      return "";
    }
    if (key == "t_s") return parse_double(value, cfg.t_s) ? "" : bad();
    if (key == "f0_hz") return parse_double(value, cfg.f0_hz) ? "" : bad();
    if (key == "phi_rad") return parse_list(value, cfg.phi_rad) ? "" : bad();
    if (key == "interleave") return parse_bool(value, cfg.interleave) ? "" : bad();
    if (key == "analysis") return parse_bool(value, cfg.analysis) ? "" : bad();
  } else if (section == "run") {
    if (key == "seed") {
      if (!parse_u64(value, cfg.seed)) return bad();
      cfg.seed_set = true;
      return "";
    }
    if (key == "shots") return parse_long(value, cfg.shots) ? "" : bad();
    if (key == "dt_s") return parse_double(value, cfg.dt_s) ? "" : bad();
    if (key == "threads") return parse_int(value, cfg.threads) ? "" : bad();
  } else if (section == "output") {
    if (key == "shot_series") return parse_bool(value, cfg.shot_series) ? "" : bad();
  } else if (section == "campaign") {
    if (key == "preset") {
      cfg.preset = trim(value);
      return "";
    }
  } else {
    return "unknown section [" + section + "]";
  }
  return "unknown key " + full;
}

/// Shortest decimal form that parses back to exactly the same double; the
/// emitted file must reproduce the configuration bit for bit.
std::string format_exact(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string join_list(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += format_exact(values[i]);
  }
  return out;
}

std::string emit_internal(const Config& c, bool include_runtime) {
  std::ostringstream os;
  os << "[geometry]\n";
  if (c.geometry_from_trap)
    os << "f_trap_mhz = " << format_exact(c.f_trap_mhz) << "\n";
  else
    os << "d_um = " << format_exact(c.d_um) << "\n";
  os << "\n[field]\n";
  os << "b0_mt = " << format_exact(c.b0_mt) << "\n";
  os << "grad_static_t_per_m = " << format_exact(c.grad_static_t_per_m) << "\n";
  os << "\n[noise]\n";
  os << "collective_rms_t = " << format_exact(c.collective_rms_t) << "\n";
  os << "collective_corr_s = " << format_exact(c.collective_corr_s) << "\n";
  os << "gradient_rms_t_per_m = " << format_exact(c.gradient_rms_t_per_m) << "\n";
  os << "gradient_corr_s = " << format_exact(c.gradient_corr_s) << "\n";
  os << "\n[instrument]\n";
  os << "prep_fidelity = " << format_exact(c.prep_fidelity) << "\n";
  os << "psi_plus_fidelity = " << format_exact(c.psi_plus_fidelity) << "\n";
  os << "pulse_error_rad = " << format_exact(c.pulse_error_rad) << "\n";
  os << "det_up_intercept = " << format_exact(c.det_up_intercept) << "\n";
  os << "det_up_slope = " << format_exact(c.det_up_slope) << "\n";
  os << "det_down_intercept = " << format_exact(c.det_down_intercept) << "\n";
  os << "det_down_slope = " << format_exact(c.det_down_slope) << "\n";
  os << "mle_up_intercept = " << format_exact(c.mle_up_intercept) << "\n";
  os << "mle_up_slope = " << format_exact(c.mle_up_slope) << "\n";
  os << "mle_down_intercept = " << format_exact(c.mle_down_intercept) << "\n";
  os << "mle_down_slope = " << format_exact(c.mle_down_slope) << "\n";
  os << "\n[sequence]\n";
  os << "init = " << c.init << "\n";
  os << "t_s = " << format_exact(c.t_s) << "\n";
  os << "f0_hz = " << format_exact(c.f0_hz) << "\n";
  os << "phi_rad = " << join_list(c.phi_rad) << "\n";
  os << "interleave = " << (c.interleave ? "true" : "false") << "\n";
  os << "analysis = " << (c.analysis ? "true" : "false") << "\n";
  os << "\n[run]\n";
  os << "seed = " << c.seed << "\n";
  os << "shots = " << c.shots << "\n";
  os << "dt_s = " << format_exact(c.dt_s) << "\n";
  if (include_runtime) os << "threads = " << c.threads << "\n";
  os << "\n[output]\n";
  if (include_runtime)
    os << "shot_series = " << (c.shot_series ? "true" : "false") << "\n";
  os << "\n[campaign]\n";
  os << "preset = " << c.preset << "\n";
  return os.str();
}

}  // namespace

std::vector<std::string> Config::validate() const {
  std::vector<std::string> errors;
  auto err = [&errors](const std::string& m) { errors.push_back(m); };

  if (geometry_from_trap) {
    if (!(f_trap_mhz > 0)) err("geometry.f_trap_mhz must be positive");
  } else if (!(d_um > 0)) {
    err("geometry.d_um must be positive");
  }
  if (!(b0_mt > 0)) err("field.b0_mt must be positive");
  if (!std::isfinite(grad_static_t_per_m)) err("field.grad_static_t_per_m must be finite");

  if (collective_rms_t < 0) err("noise.collective_rms_t must be non-negative");
  if (collective_rms_t > 0 && !(collective_corr_s > 0))
    err("noise.collective_corr_s must be positive");
  if (gradient_rms_t_per_m < 0) err("noise.gradient_rms_t_per_m must be non-negative");
  if (gradient_rms_t_per_m > 0 && !(gradient_corr_s > 0))
    err("noise.gradient_corr_s must be positive");

  if (prep_fidelity < 0.5 || prep_fidelity > 1)
    err("instrument.prep_fidelity must lie in [0.5, 1]");
  if (psi_plus_fidelity < 0 || psi_plus_fidelity > 1)
    err("instrument.psi_plus_fidelity must lie in [0, 1]");
  if (!std::isfinite(pulse_error_rad)) err("instrument.pulse_error_rad must be finite");
  for (const auto& [name, v] :
       {std::pair<const char*, double>{"det_up_intercept", det_up_intercept},
        {"det_down_intercept", det_down_intercept},
        {"mle_up_intercept", mle_up_intercept},
        {"mle_down_intercept", mle_down_intercept}})
    if (v < 0 || v > 1) err(std::string("instrument.") + name + " must lie in [0, 1]");
  for (const auto& [name, v] : {std::pair<const char*, double>{"det_up_slope", det_up_slope},
                                {"det_down_slope", det_down_slope},
                                {"mle_up_slope", mle_up_slope},
                                {"mle_down_slope", mle_down_slope}})
    if (!std::isfinite(v)) err(std::string("instrument.") + name + " must be finite");

  bool init_ok = true;
  try {
    parse_init(init);
  } catch (const std::exception& e) {
    init_ok = false;
    err(std::string("sequence.init: ") + e.what());
  }
  if (!(t_s > 0)) err("sequence.t_s must be positive");
  if (f0_hz < 0) err("sequence.f0_hz must be non-negative");
  if (t_s > 0 && f0_hz >= 0) {
    try {
      build_echo_train(t_s, f0_hz);
    } catch (const std::exception& e) {
      err(std::string("sequence: ") + e.what());
    }
  }
  if (phi_rad.empty()) err("sequence.phi_rad must list at least one phase");
  for (double p : phi_rad)
    if (!std::isfinite(p)) {
      err("sequence.phi_rad entries must be finite");
      break;
    }

  if (!seed_set) err("run.seed is required");
  if (shots <= 0) err("run.shots must be positive");
  if (!(dt_s > 0)) err("run.dt_s must be positive");
  if (threads < 0) err("run.threads must be non-negative");

  if (errors.empty() && init_ok) {
    const ModelParams m = model();
    const double guard = max_slice_dt(m.noise, m.static_detuning(), 4.0 * m.xi());
    if (dt_s > guard)
      err("run.dt_s = " + format_number(dt_s) + " is coarser than the slicing guard " +
          format_number(guard));
  }
  return errors;
}

double Config::separation_m() const {
  if (geometry_from_trap) return ion_separation(f_trap_mhz * 1e6);
  return d_um * 1e-6;
}

ModelParams Config::model() const {
  ModelParams m;
  m.d_m = separation_m();
  m.b0_t = b0_mt * 1e-3;
  m.grad_static_t_per_m = grad_static_t_per_m;
  m.noise.collective_rms_t = collective_rms_t;
  m.noise.collective_corr_s = collective_corr_s;
  m.noise.gradient_rms_t_per_m = gradient_rms_t_per_m;
  m.noise.gradient_corr_s = gradient_corr_s;
  m.instrument.prep_fidelity = prep_fidelity;
  m.instrument.psi_plus_fidelity = psi_plus_fidelity;
  m.instrument.pulse_error_rad = pulse_error_rad;
  m.instrument.det_up = {det_up_intercept, det_up_slope};
  m.instrument.det_down = {det_down_intercept, det_down_slope};
  m.instrument.mle_up = {mle_up_intercept, mle_up_slope};
  m.instrument.mle_down = {mle_down_intercept, mle_down_slope};
  return m;
}

SequenceSpec Config::sequence(double phi, bool init_flip) const {
  SequenceSpec s;
  s.init = parse_init(init);
  s.t_s = t_s;
  s.f0_hz = f0_hz;
  s.phi_rad = phi;
  s.init_flip = init_flip;
  s.analysis_pulse = analysis;
  return s;
}

RunSettings Config::run() const {
  RunSettings r;
  r.seed = seed;
  r.shots = shots;
  r.dt_s = dt_s;
  r.threads = threads;
  r.record_shots = shot_series;
  return r;
}

std::string Config::emit() const { return emit_internal(*this, true); }

std::uint64_t Config::hash() const { return fnv1a(emit_internal(*this, false)); }

Config parse_config(const std::string& text, std::vector<std::string>& errors) {
  Config cfg;
  std::string section;
  std::set<std::string> seen;
  std::istringstream is(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(is, raw)) {
    ++lineno;
    std::string line = raw;
    const auto hash_pos = line.find_first_of("#;");
    if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        errors.push_back("line " + std::to_string(lineno) + ": malformed section header");
        continue;
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      errors.push_back("line " + std::to_string(lineno) + ": expected key = value");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = line.substr(eq + 1);
    if (section.empty()) {
      errors.push_back("line " + std::to_string(lineno) + ": key " + key +
                       " appears before any section");
      continue;
    }
    const std::string full = section + "." + key;
    if (!seen.insert(full).second) {
      errors.push_back("line " + std::to_string(lineno) + ": duplicate key " + full);
      continue;
    }
    const std::string msg = set_key(cfg, section, key, value);
    if (!msg.empty()) errors.push_back("line " + std::to_string(lineno) + ": " + msg);
  }
  if (seen.count("geometry.d_um") && seen.count("geometry.f_trap_mhz"))
    errors.push_back("geometry: give either d_um or f_trap_mhz, not both");
  if (errors.empty()) {
    auto v = cfg.validate();
    errors.insert(errors.end(), v.begin(), v.end());
  }
  return cfg;
}

Config load_config(const std::string& path, std::vector<std::string>& errors) {
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    errors.push_back("cannot read config file: " + path);
    return Config{};
  }
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_config(buf.str(), errors);
}

bool apply_override(Config& cfg, const std::string& assignment, std::string& error) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    error = "override must look like section.key=value: " + assignment;
    return false;
  }
  const std::string key = trim(assignment.substr(0, eq));
  const std::string value = assignment.substr(eq + 1);
  const auto dot = key.find('.');
  if (dot == std::string::npos) {
    error = "override key must be section.key: " + key;
    return false;
  }
  const std::string msg = set_key(cfg, key.substr(0, dot), key.substr(dot + 1), value);
  if (!msg.empty()) {
    error = msg;
    return false;
  }
  return true;
}

std::vector<std::string> preset_names() {
  return {"fig2a", "fig2b", "fig2c", "fig3a", "fig3b", "fig3c", "fig4", "witness"};
}

bool is_preset(const std::string& name) {
  const auto names = preset_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

Config preset_config(const std::string& name) {
  Config c;
  c.seed_set = true;

  // thirteen evenly spaced phases over a full turn
  std::vector<double> full_turn;
  for (int k = 0; k <= 12; ++k)
    full_turn.push_back(static_cast<double>(k) * constants::two_pi / 12.0);
  const double quarter = 0.5 * constants::pi;

  if (name == "default") {
    c.seed = 7;
    return c;
  }
  c.preset = name;
  // slices are exact for piecewise-constant noise, so every study can sit
  // right at the tau_c/5 guard
  c.dt_s = 2e-3;
  if (name == "fig2a") {
    // readout calibration vs interrogation time; campaign sweeps T and class
    c.seed = 11;
    c.init = "uu";
    c.analysis = false;
    c.interleave = false;
    c.phi_rad = {0.0};
  } else if (name == "fig2b") {
    // same calibration keyed by ion separation
    c.seed = 22;
    c.init = "uu";
    c.analysis = false;
    c.interleave = false;
    c.phi_rad = {0.0};
  } else if (name == "fig2c") {
    // Bell-state storage fringe at two durations; gradient noise tuned to the
    // observed coherence decay
    c.seed = 33;
    c.init = "psi_plus";
    c.interleave = false;
    c.phi_rad = full_turn;
    c.gradient_rms_t_per_m = 8.0e-7;
    c.gradient_corr_s = 0.1;
  } else if (name == "fig3a") {
    c.seed = 41;
    c.init = "ud";
    c.t_s = 1.0;
    c.phi_rad = full_turn;
  } else if (name == "fig3b") {
    c.seed = 42;
    c.init = "ud";
    c.t_s = 15.0;
    c.phi_rad = full_turn;
  } else if (name == "fig3c") {
    c.seed = 43;
    c.init = "ud";
    c.phi_rad = {quarter};
    c.shots = 20000;
  } else if (name == "fig4") {
    c.seed = 44;
    c.init = "ud";
    c.phi_rad = {quarter};
    c.shots = 20000;
  } else if (name == "witness") {
    c.seed = 55;
    c.init = "ud";
    c.phi_rad = {quarter};
    c.shots = 2388;
    c.det_up_intercept = 0.95;
    c.det_up_slope = 0.0;
    c.det_down_intercept = 0.95;
    c.det_down_slope = 0.0;
  } else {
    throw std::invalid_argument("unknown preset: " + name);
  }
  return c;
}

}  // namespace spinpair
