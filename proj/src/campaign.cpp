#include "spinpair/campaign.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "spinpair/constants.hpp"
#include "spinpair/engine.hpp"
#include "spinpair/inference.hpp"

namespace spinpair {

namespace {

void ensure_valid(const Config& cfg) {
  const auto errors = cfg.validate();
  if (errors.empty()) return;
  std::string joined = "invalid configuration:";
  for (const auto& e : errors) joined += "\n  " + e;
  throw std::invalid_argument(joined);
}

void add_provenance(Report& rep, const Config& cfg) {
  rep.put_text("artifact_version", constants::version);
  rep.put_text("preset", cfg.preset.empty() ? "none" : cfg.preset);
  rep.put_text("seed", std::to_string(cfg.seed));
  std::ostringstream h;
  h << "0x" << std::hex << cfg.hash();
  rep.put_text("config_hash", h.str());
  const ModelParams m = cfg.model();
  rep.put("d_um", m.d_m * 1e6);
  rep.put("xi_model_mhz", m.xi() / constants::two_pi * 1e3);
  rep.put("detuning_model_rad_s", m.static_detuning());
  rep.put("t_entangle_s", entangling_time(m.xi()));
}

/// Single parity estimate at one analysis phase.
struct ParityPoint {
  double phi = 0.0;
  double value = 0.0;
  double sigma = 0.0;
  long shots = 0;
};

/// Runs cells, assigns stable labels, and mirrors every cell (counts next to
/// the density-matrix oracle) into the shared cells table.
class Runner {
 public:
  Runner(const Config& cfg, Report& rep)
      : run_(cfg.run()), cells_(rep.add_table("cells")) {
    cells_.columns = {"cell",      "init",      "t_s",        "d_um",          "f0_hz",
                      "phi_rad",   "flip",      "analysis",   "shots",         "n_uu",
                      "n_dd",      "n_one",     "oracle_uu",  "oracle_dd",     "oracle_one",
                      "oracle_sig_uu", "oracle_sig_dd", "oracle_sig_one"};
    if (run_.record_shots) {
      shots_ = &rep.add_table("shots");
      shots_->columns = {"cell", "shot", "value"};
    }
  }

  CellResult cell(const ModelParams& m, const SequenceSpec& spec, long shots) {
    RunSettings rs = run_;
    rs.shots = shots;
    const long idx = next_++;
    const CellResult res = run_cell(m, spec, cell_label(m, spec), rs);
    cells_.rows.push_back({static_cast<double>(idx),
                           static_cast<double>(static_cast<int>(spec.init)), spec.t_s,
                           m.d_m * 1e6, spec.f0_hz, spec.phi_rad, spec.init_flip ? 1.0 : 0.0,
                           spec.analysis_pulse ? 1.0 : 0.0,
                           static_cast<double>(res.counts.total()),
                           static_cast<double>(res.counts.n_uu),
                           static_cast<double>(res.counts.n_dd),
                           static_cast<double>(res.counts.n_one), res.oracle_mean[0],
                           res.oracle_mean[1], res.oracle_mean[2], res.oracle_sigma[0],
                           res.oracle_sigma[1], res.oracle_sigma[2]});
    if (shots_)
      for (std::size_t k = 0; k < res.shot_values.size(); ++k)
        shots_->rows.push_back({static_cast<double>(idx), static_cast<double>(k),
                                static_cast<double>(res.shot_values[k])});
    return res;
  }

  /// Parity at one phase; when interleaved, the pi-shifted twin is measured
  /// on the other half of the shot budget and the difference cancels any
  /// additive readout offset.
  ParityPoint parity(const ModelParams& m, const SequenceSpec& base, double phi, long shots,
                     bool interleave) {
    SequenceSpec spec = base;
    spec.phi_rad = phi;
    ParityPoint p;
    p.phi = phi;
    if (interleave) {
      spec.init_flip = false;
      const CellResult a = cell(m, spec, shots / 2);
      spec.init_flip = true;
      const CellResult b = cell(m, spec, shots - shots / 2);
      p.value = 0.5 * (a.counts.correlator() - b.counts.correlator());
      p.sigma = 0.5 * std::hypot(a.counts.correlator_sigma(), b.counts.correlator_sigma());
      p.shots = a.counts.total() + b.counts.total();
    } else {
      spec.init_flip = false;
      const CellResult a = cell(m, spec, shots);
      p.value = a.counts.correlator();
      p.sigma = a.counts.correlator_sigma();
      p.shots = a.counts.total();
    }
    // a unanimous cell has zero sample variance but not zero uncertainty;
    // floor at 1/N so downstream fit weights stay finite
    p.sigma = std::max(p.sigma, 1.0 / static_cast<double>(std::max(p.shots, 1L)));
    return p;
  }

 private:
  static std::string cell_label(const ModelParams& m, const SequenceSpec& spec) {
    std::ostringstream os;
    os << init_name(spec.init) << " d=" << format_number(m.d_m * 1e6)
       << " t=" << format_number(spec.t_s) << " f0=" << format_number(spec.f0_hz)
       << " phi=" << format_number(spec.phi_rad) << " flip=" << (spec.init_flip ? 1 : 0)
       << " an=" << (spec.analysis_pulse ? 1 : 0);
    return os.str();
  }

  RunSettings run_;
  Table& cells_;
  Table* shots_ = nullptr;
  long next_ = 0;
};

Table& new_fringe_table(Report& rep, const std::string& name) {
  Table& t = rep.add_table(name);
  t.columns = {"phi_parity", "parity", "sigma", "N"};
  return t;
}

/// Sweeps the analysis phase grid once and returns the collected points.
struct FringeData {
  std::vector<double> phis, values, sigmas;
};

FringeData sweep_fringe(Runner& runner, const ModelParams& m, const SequenceSpec& base,
                        const std::vector<double>& phi_grid, long shots, bool interleave,
                        Table& fringe) {
  FringeData d;
  for (double phi : phi_grid) {
    const ParityPoint p = runner.parity(m, base, phi, shots, interleave);
    fringe.rows.push_back({p.phi, p.value, p.sigma, static_cast<double>(p.shots)});
    d.phis.push_back(p.phi);
    d.values.push_back(p.value);
    d.sigmas.push_back(p.sigma);
  }
  return d;
}

/// Per-spin bright/dark readout calibration from a both-up and a both-down
/// cell: the preparation channel folds into the estimate, as it would for a
/// real detector characterized in place.
struct CalPoint {
  double d_up = 0.0, d_down = 0.0, sigma_up = 0.0, sigma_down = 0.0;
};

CalPoint calibration_point(Runner& runner, const ModelParams& m, const SequenceSpec& base,
                           long shots) {
  SequenceSpec spec = base;
  spec.analysis_pulse = false;
  spec.phi_rad = 0.0;
  spec.init_flip = false;

  spec.init = InitKind::kBothUp;
  const CellResult up = runner.cell(m, spec, shots);
  spec.init = InitKind::kBothDown;
  const CellResult down = runner.cell(m, spec, shots);

  CalPoint pt;
  const double n_up = 2.0 * static_cast<double>(up.counts.total());
  const double n_down = 2.0 * static_cast<double>(down.counts.total());
  pt.d_up = (2.0 * up.counts.n_uu + up.counts.n_one) / n_up;
  pt.d_down = (2.0 * down.counts.n_dd + down.counts.n_one) / n_down;
  pt.sigma_up = std::sqrt(std::max(pt.d_up * (1.0 - pt.d_up), 0.0) / n_up);
  pt.sigma_down = std::sqrt(std::max(pt.d_down * (1.0 - pt.d_down), 0.0) / n_down);
  return pt;
}

void campaign_fig2a(const Config& cfg, Report& rep, Runner& runner) {
  const std::vector<double> times = {5, 10, 15, 20, 25};
  Table& cal = rep.add_table("calibration");
  cal.columns = {"t_s", "d_up", "d_down", "sigma_up", "sigma_down"};

  const ModelParams m = cfg.model();
  std::vector<std::pair<double, double>> points;
  double at5 = 0, at25 = 0;
  for (double t : times) {
    SequenceSpec base = cfg.sequence(0.0, false);
    base.t_s = t;
    const CalPoint pt = calibration_point(runner, m, base, cfg.shots);
    cal.rows.push_back({t, pt.d_up, pt.d_down, pt.sigma_up, pt.sigma_down});
    points.emplace_back(t, pt.d_up);
    points.emplace_back(t, pt.d_down);
    const double mean = 0.5 * (pt.d_up + pt.d_down);
    if (t == 5) at5 = mean;
    if (t == 25) at25 = mean;
  }
  const AffineFidelity line = fit_fidelity_curve(points);
  rep.put("fidelity_at_5", at5);
  rep.put("fidelity_at_25", at25);
  rep.put("fit_intercept", line.intercept);
  rep.put("fit_slope_per_s", line.slope);
  rep.put("contrast_at_15", std::pow(2.0 * line.value(15.0) - 1.0, 2));
  rep.add_check("fidelity_at_5", at5, 0.93, 0.97);
  rep.add_check("fidelity_at_25", at25, 0.86, 0.90);
  rep.add_check("contrast_at_15", std::pow(2.0 * line.value(15.0) - 1.0, 2), 0.62, 0.74);
  rep.add_check("slope_per_s", line.slope, -0.0055, -0.0015);
}

void campaign_fig2b(const Config& cfg, Report& rep, Runner& runner) {
  const std::vector<double> separations = {2.2, 2.4, 2.6, 2.8, 3.0};
  Table& cal = rep.add_table("calibration");
  cal.columns = {"d_um", "d_up", "d_down", "sigma_up", "sigma_down"};

  std::vector<std::pair<double, double>> points;
  double at24 = 0;
  for (double d_um : separations) {
    ModelParams m = cfg.model();
    m.d_m = d_um * 1e-6;
    const SequenceSpec base = cfg.sequence(0.0, false);
    const CalPoint pt = calibration_point(runner, m, base, cfg.shots);
    cal.rows.push_back({d_um, pt.d_up, pt.d_down, pt.sigma_up, pt.sigma_down});
    points.emplace_back(d_um, pt.d_up);
    points.emplace_back(d_um, pt.d_down);
    if (d_um == 2.4) at24 = 0.5 * (pt.d_up + pt.d_down);
  }
  const AffineFidelity line = fit_fidelity_curve(points);
  rep.put("fidelity_at_2p4", at24);
  rep.put("fit_intercept", line.intercept);
  rep.put("fit_slope_per_um", line.slope);
  rep.add_check("fidelity_at_2p4", at24, 0.88, 0.93);
  rep.add_check("slope_per_um", line.slope, -0.02, 0.02);
}

void campaign_fig2c(const Config& cfg, Report& rep, Runner& runner) {
  const std::vector<double> times = {1, 15};
  const ModelParams m = cfg.model();
  std::vector<double> amps, amp_sigmas;
  for (double t : times) {
    SequenceSpec base = cfg.sequence(0.0, false);
    base.t_s = t;
    Table& fringe = new_fringe_table(rep, "fringe_t" + format_number(t));
    const FringeData data =
        sweep_fringe(runner, m, base, cfg.phi_rad, cfg.shots, cfg.interleave, fringe);
    // the stored state dephases as cos(phi), a quarter turn from the parity
    // fringe of an interaction-built state
    const AmplitudeFit fit = fit_fringe_amplitude(data.phis, data.values, data.sigmas,
                                                  0.5 * constants::pi);
    amps.push_back(fit.amplitude);
    amp_sigmas.push_back(fit.sigma);
    const std::string suffix = "_t" + format_number(t);
    rep.put("amplitude" + suffix, fit.amplitude);
    rep.put("amplitude_sigma" + suffix, fit.sigma);
    rep.put("fit_chi2" + suffix, fit.chi2);
  }
  const double tau = two_point_decay_time(times[0], amps[0], times[1], amps[1]);
  const double lever = times[1] - times[0];
  const double tau_sigma = tau * tau / lever *
                           std::hypot(amp_sigmas[0] / amps[0], amp_sigmas[1] / amps[1]);
  rep.put("tau_s", tau);
  rep.put("tau_sigma_s", tau_sigma);
  rep.add_check("amplitude_t1", amps[0], 0.71, 0.91);
  rep.add_check("amplitude_t15", amps[1], 0.51, 0.67);
  rep.add_check("tau_s", tau, 32.0, 56.0);
}

void campaign_fringe_panel(const Config& cfg, Report& rep, Runner& runner, double amp_lo,
                           double amp_hi, bool estimate_xi) {
  const ModelParams m = cfg.model();
  const SequenceSpec base = cfg.sequence(0.0, false);
  Table& fringe = new_fringe_table(rep, "fringe");
  const FringeData data =
      sweep_fringe(runner, m, base, cfg.phi_rad, cfg.shots, cfg.interleave, fringe);

  const AmplitudeFit fit = fit_fringe_amplitude(data.phis, data.values, data.sigmas, 0.0);
  rep.put("amplitude", fit.amplitude);
  rep.put("amplitude_sigma", fit.sigma);
  rep.put("fit_chi2", fit.chi2);
  rep.put_int("fit_dof", fit.dof);
  rep.add_check("amplitude", fit.amplitude, amp_lo, amp_hi);

  if (estimate_xi) {
    const double contrast = m.instrument.assumed_contrast(base.t_s);
    const XiEstimate est = xi_from_amplitude(fit.amplitude, fit.sigma, base.t_s, contrast);
    rep.put("contrast_assumed", contrast);
    rep.put("xi_mhz", est.xi_rad_s / constants::two_pi * 1e3);
    rep.put("xi_sigma_mhz", est.sigma_rad_s / constants::two_pi * 1e3);
    rep.add_check("xi_mhz", est.xi_rad_s / constants::two_pi * 1e3, 0.7, 1.1);
  }
}

void campaign_fig3c(const Config& cfg, Report& rep, Runner& runner) {
  const std::vector<double> times = {1, 3, 5, 7, 9, 11, 13, 15};
  const ModelParams m = cfg.model();
  Table& scan = rep.add_table("xi_scan");
  scan.columns = {"t_s", "visibility", "sigma", "contrast", "N"};

  std::vector<double> ts, vs, sigmas, contrasts;
  for (double t : times) {
    SequenceSpec base = cfg.sequence(0.0, false);
    base.t_s = t;
    const ParityPoint p =
        runner.parity(m, base, 0.5 * constants::pi, cfg.shots, cfg.interleave);
    const double contrast = m.instrument.assumed_contrast(t);
    scan.rows.push_back({t, p.value, p.sigma, contrast, static_cast<double>(p.shots)});
    ts.push_back(t);
    vs.push_back(p.value);
    sigmas.push_back(p.sigma);
    contrasts.push_back(contrast);
  }
  const FitResult fit = fit_xi_vs_time(ts, vs, sigmas, contrasts);
  const double xi_mhz = fit.params[0] / constants::two_pi * 1e3;
  rep.put("xi_mhz", xi_mhz);
  rep.put("xi_sigma_mhz", fit.sigmas[0] / constants::two_pi * 1e3);
  rep.put("fit_chi2", fit.chi2);
  rep.put_int("fit_dof", fit.dof);
  rep.add_check("xi_mhz", xi_mhz, 0.9, 1.3);
}

void campaign_fig4(const Config& cfg, Report& rep, Runner& runner) {
  const std::vector<double> separations = {2.2, 2.4, 2.6, 2.8, 3.0};
  Table& scan = rep.add_table("distance_scan");
  scan.columns = {"d_um", "visibility", "sigma", "xi_mhz", "xi_sigma_mhz"};

  std::vector<double> ds, xis, xi_sigmas;
  double xi_at_24 = 0;
  for (double d_um : separations) {
    ModelParams m = cfg.model();
    m.d_m = d_um * 1e-6;
    const SequenceSpec base = cfg.sequence(0.0, false);
    const ParityPoint p =
        runner.parity(m, base, 0.5 * constants::pi, cfg.shots, cfg.interleave);
    const double contrast = m.instrument.assumed_contrast(base.t_s);
    const XiEstimate est = xi_from_amplitude(p.value, p.sigma, base.t_s, contrast);
    const double xi_mhz = est.xi_rad_s / constants::two_pi * 1e3;
    const double xi_sigma = est.sigma_rad_s / constants::two_pi * 1e3;
    scan.rows.push_back({d_um, p.value, p.sigma, xi_mhz, xi_sigma});
    ds.push_back(d_um);
    xis.push_back(xi_mhz);
    xi_sigmas.push_back(xi_sigma);
    if (d_um == 2.4) xi_at_24 = xi_mhz;
  }
  const FitResult fit = fit_power_law(ds, xis, xi_sigmas);
  rep.put("exponent", fit.params[0]);
  rep.put("exponent_sigma", fit.sigmas[0]);
  rep.put("xi_at_2p4_mhz", xi_at_24);
  rep.put("fit_chi2", fit.chi2);
  rep.add_check("exponent", fit.params[0], 2.6, 3.4);
  rep.add_check("xi_at_2p4_mhz", xi_at_24, 0.7, 1.1);
}

void campaign_witness(const Config& cfg, Report& rep, Runner& runner) {
  const ModelParams m = cfg.model();
  const long n_pop = cfg.shots / 2;
  const long n_parity = cfg.shots - n_pop;

  // population half: no analysis pulse, straight readout of the stored state
  SequenceSpec pop_spec = cfg.sequence(0.0, false);
  pop_spec.analysis_pulse = false;
  const CellResult pop = runner.cell(m, pop_spec, n_pop);
  const double n_total = static_cast<double>(pop.counts.total());
  const double p_even = (pop.counts.n_uu + pop.counts.n_dd) / n_total;
  const double p_even_sigma = std::sqrt(std::max(p_even * (1.0 - p_even), 0.0) / n_total);

  // parity half: interleaved visibility at the quadrature phase
  const SequenceSpec base = cfg.sequence(0.0, false);
  const ParityPoint vis =
      runner.parity(m, base, 0.5 * constants::pi, n_parity, cfg.interleave);

  const double s_raw = swap_witness(p_even, vis.value);
  const double s_raw_sigma = std::hypot(p_even_sigma, vis.sigma);
  rep.put("p_even_raw", p_even);
  rep.put("visibility_raw", vis.value);
  rep.put("s_raw", s_raw);
  rep.put("s_raw_sigma", s_raw_sigma);
  rep.put_int("shots_total", pop.counts.total() + vis.shots);
  rep.put_int("identity_holds", (s_raw < 0) == (p_even < vis.value) ? 1 : 0);

  // readout-corrected value under the calibration the analysis believes
  const double t = base.t_s;
  const auto confusion =
      confusion_matrix(m.instrument.mle_up.value(t), m.instrument.mle_down.value(t));
  const MleResult mle = mle_populations(
      {pop.counts.n_uu, pop.counts.n_dd, pop.counts.n_one}, confusion);
  const double p_even_mle = mle.populations[0] + mle.populations[1];

  // delta-method error from the unconstrained linear inversion; the boundary
  // MLE itself carries no interior curvature to quote
  const auto inv = invert3(confusion);
  const std::array<double, 3> freq = {pop.counts.n_uu / n_total, pop.counts.n_dd / n_total,
                                      pop.counts.n_one / n_total};
  double even_lin = 0, mean_g = 0, mean_g2 = 0;
  for (int c = 0; c < 3; ++c) {
    const double g = inv[c][0] + inv[c][1];
    even_lin += freq[c] * g;
    mean_g += freq[c] * g;
    mean_g2 += freq[c] * g * g;
  }
  const double even_lin_var = std::max(mean_g2 - mean_g * mean_g, 0.0) / n_total;

  const double contrast = m.instrument.assumed_contrast(t);
  const double v_corr = vis.value / contrast;
  const double v_corr_sigma = vis.sigma / contrast;
  const double s_mle = swap_witness(p_even_mle, v_corr);
  const double s_mle_sigma = std::hypot(std::sqrt(even_lin_var), v_corr_sigma);

  rep.put("p_even_mle", p_even_mle);
  rep.put("p_even_linear", even_lin);
  rep.put_int("mle_boundary", mle.boundary ? 1 : 0);
  rep.put_int("mle_iterations", mle.iterations);
  rep.put("visibility_corrected", v_corr);
  rep.put("s_mle", s_mle);
  rep.put("s_mle_sigma", s_mle_sigma);

  rep.add_check("s_raw", s_raw, -0.22, -0.10);
  rep.add_check("s_mle", s_mle, -0.53, -0.29);
}

}  // namespace

Report run_simulate(const Config& cfg) {
  ensure_valid(cfg);
  Report rep;
  add_provenance(rep, cfg);
  Runner runner(cfg, rep);

  const ModelParams m = cfg.model();
  const SequenceSpec base = cfg.sequence(0.0, false);
  Table& fringe = new_fringe_table(rep, "fringe");
  const FringeData data = sweep_fringe(runner, m, base, cfg.phi_rad, cfg.shots,
                                       cfg.interleave && cfg.analysis, fringe);

  std::vector<double> distinct;
  for (double p : data.phis)
    if (std::find(distinct.begin(), distinct.end(), p) == distinct.end()) distinct.push_back(p);
  if (distinct.size() >= 3) {
    const FringeFit fit = fit_fringe(data.phis, data.values, data.sigmas);
    rep.put("fit_sin", fit.a);
    rep.put("fit_cos", fit.b);
    rep.put("fit_sin_sigma", fit.sigma_a);
    rep.put("fit_cos_sigma", fit.sigma_b);
    rep.put("amplitude", fit.amplitude());
    rep.put("amplitude_sigma", fit.amplitude_sigma());
    rep.put("phase_rad", fit.phase());
    rep.put("fit_chi2", fit.chi2);
    rep.put_int("fit_dof", fit.dof);
  }
  rep.put_text("status", "ok");
  return rep;
}

Report run_campaign(const Config& cfg) {
  ensure_valid(cfg);
  if (!is_preset(cfg.preset))
    throw std::invalid_argument("campaign.preset must name a study (" +
                                [] {
                                  std::string s;
                                  for (const auto& n : preset_names())
                                    s += (s.empty() ? "" : ", ") + n;
                                  return s;
                                }() +
                                "): '" + cfg.preset + "'");
  Report rep;
  add_provenance(rep, cfg);
  Runner runner(cfg, rep);
  try {
    if (cfg.preset == "fig2a")
      campaign_fig2a(cfg, rep, runner);
    else if (cfg.preset == "fig2b")
      campaign_fig2b(cfg, rep, runner);
    else if (cfg.preset == "fig2c")
      campaign_fig2c(cfg, rep, runner);
    else if (cfg.preset == "fig3a")
      campaign_fringe_panel(cfg, rep, runner, -0.04, 0.08, false);
    else if (cfg.preset == "fig3b")
      campaign_fringe_panel(cfg, rep, runner, 0.18, 0.30, true);
    else if (cfg.preset == "fig3c")
      campaign_fig3c(cfg, rep, runner);
    else if (cfg.preset == "fig4")
      campaign_fig4(cfg, rep, runner);
    else
      campaign_witness(cfg, rep, runner);
    rep.put_text("status", "ok");
  } catch (const std::exception& e) {
    // keep whatever was measured before the failure
    rep.put_text("status", "failed");
    rep.put_text("error", e.what());
  }
  return rep;
}

}  // namespace spinpair
