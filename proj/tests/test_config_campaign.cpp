#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "spinpair/campaign.hpp"
#include "spinpair/config.hpp"
#include "spinpair/physics.hpp"
#include "spinpair/report.hpp"

using namespace spinpair;

namespace {

Config parse_ok(const std::string& text) {
  std::vector<std::string> errors;
  const Config cfg = parse_config(text, errors);
  for (const auto& e : errors) INFO(e);
  REQUIRE(errors.empty());
  return cfg;
}

std::vector<std::string> parse_errors(const std::string& text) {
  std::vector<std::string> errors;
  (void)parse_config(text, errors);
  return errors;
}

bool mentions(const std::vector<std::string>& errors, const std::string& needle) {
  for (const auto& e : errors)
    if (e.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("a seed is the only mandatory line") {
  const Config cfg = parse_ok("[run]\nseed = 1\n");
  CHECK(cfg.seed_set);
  CHECK(cfg.seed == 1);
  CHECK(cfg.d_um == 2.4);
  CHECK(cfg.t_s == 15.0);
  CHECK(cfg.shots == 500);
  CHECK(cfg.validate().empty());

  CHECK(mentions(parse_errors("[sequence]\nt_s = 5\n"), "seed"));
}

TEST_CASE("parser rejections carry the offending name and line") {
  auto errs = parse_errors("[run]\nseed = 1\nxi_override = 2\n");
  CHECK(mentions(errs, "xi_override"));
  CHECK(mentions(errs, "line 3"));

  CHECK(mentions(parse_errors("[run]\nseed = 1\nseed = 2\n"), "duplicate"));
  CHECK(mentions(parse_errors("[geometry]\nd_um = 2.4\nf_trap_mhz = 2.4\n[run]\nseed = 1\n"),
                 "not both"));
  CHECK(mentions(parse_errors("[run]\nseed = 1\nshots = many\n"), "shots"));
  CHECK(mentions(parse_errors("[run]\nseed = 1\n[sequence]\nt_s = -3\n"), "sequence.t_s"));
  CHECK(mentions(parse_errors("stray = 1\n"), "section"));
}

TEST_CASE("the slice guard is enforced at parse time") {
  const auto errs =
      parse_errors("[run]\nseed = 1\ndt_s = 0.005\n");  // collective tau_c / 5 = 2 ms
  CHECK(mentions(errs, "dt_s"));
  CHECK(mentions(errs, "coarser"));
}

TEST_CASE("emit and parse are inverses") {
  Config cfg = parse_ok("[run]\nseed = 9\n");
  cfg.threads = 3;
  cfg.shot_series = true;
  cfg.phi_rad = {0.0, 0.7853981633974483, 1.5707963267948966};
  cfg.init = "psi_plus";
  cfg.gradient_rms_t_per_m = 5e-7;
  CHECK(parse_ok(cfg.emit()) == cfg);

  for (const auto& name : preset_names()) {
    const Config p = preset_config(name);
    CHECK(parse_ok(p.emit()) == p);
  }

  // trap-frequency geometry survives the round trip too
  Config trap = parse_ok("[geometry]\nf_trap_mhz = 2.4\n[run]\nseed = 1\n");
  CHECK(trap.geometry_from_trap);
  CHECK(parse_ok(trap.emit()) == trap);
}

TEST_CASE("the hash tracks physics, not execution details") {
  const Config base = parse_ok("[run]\nseed = 5\n");
  Config same = base;
  same.threads = 8;
  same.shot_series = true;
  CHECK(same.hash() == base.hash());

  Config reseeded = base;
  reseeded.seed = 6;
  CHECK(reseeded.hash() != base.hash());

  Config moved = base;
  moved.d_um = 2.6;
  CHECK(moved.hash() != base.hash());
}

TEST_CASE("overrides address keys as section.key") {
  Config cfg = parse_ok("[run]\nseed = 1\n");
  std::string err;
  CHECK(apply_override(cfg, "run.shots=200", err));
  CHECK(cfg.shots == 200);
  CHECK(apply_override(cfg, "sequence.phi_rad=0, 1.5707963267948966", err));
  CHECK(cfg.phi_rad == std::vector<double>{0.0, 1.5707963267948966});
  CHECK(apply_override(cfg, "geometry.d_um = 2.8", err));
  CHECK(cfg.d_um == 2.8);

  CHECK(!apply_override(cfg, "run.warp=9", err));
  CHECK(err.find("warp") != std::string::npos);
  CHECK(!apply_override(cfg, "no_equals_sign", err));
  CHECK(!err.empty());
}

TEST_CASE("trap frequency resolves to the matching separation") {
  Config cfg = parse_ok("[geometry]\nf_trap_mhz = 2.40666983193\n[run]\nseed = 1\n");
  CHECK(cfg.separation_m() == doctest::Approx(ion_separation(2.40666983193e6)).epsilon(1e-12));
  CHECK(cfg.separation_m() == doctest::Approx(2.4e-6).epsilon(1e-9));
}

TEST_CASE("presets are valid and carry their study shape") {
  for (const auto& name : preset_names()) {
    CHECK(is_preset(name));
    const Config p = preset_config(name);
    CHECK(p.validate().empty());
    CHECK(p.seed_set);
    CHECK(p.preset == name);
  }
  CHECK(!is_preset("fig9"));
  CHECK_THROWS(preset_config("fig9"));

  CHECK(preset_config("fig3b").phi_rad.size() == 13);
  CHECK(preset_config("fig3b").shots == 500);
  CHECK(preset_config("witness").shots == 2388);
  CHECK(preset_config("fig2a").analysis == false);
  CHECK(preset_config("fig4").shots == 20000);
}

TEST_CASE("config resolves into engine structures faithfully") {
  Config cfg = parse_ok("[run]\nseed = 123\nshots = 77\nthreads = 2\n");
  const ModelParams m = cfg.model();
  CHECK(m.d_m == doctest::Approx(2.4e-6));
  CHECK(m.b0_t == doctest::Approx(0.44e-3));
  CHECK(m.instrument.det_up.intercept == doctest::Approx(0.9675));
  CHECK(m.instrument.det_up.slope == doctest::Approx(-0.0035));

  const SequenceSpec seq = cfg.sequence(0.25, true);
  CHECK(seq.phi_rad == 0.25);
  CHECK(seq.init_flip);
  CHECK(seq.t_s == 15.0);
  CHECK(seq.f0_hz == 2.0);

  const RunSettings run = cfg.run();
  CHECK(run.seed == 123);
  CHECK(run.shots == 77);
  CHECK(run.threads == 2);
  CHECK(run.dt_s == 1e-3);
}

TEST_CASE("simulate runs are byte-for-byte reproducible") {
  Config cfg = parse_ok(
      "[sequence]\n"
      "t_s = 1\n"
      "phi_rad = 0, 1.0471975511965976, 2.0943951023931953\n"
      "[run]\n"
      "seed = 404\n"
      "shots = 20\n"
      "dt_s = 0.002\n");
  const Report a = run_simulate(cfg);
  const Report b = run_simulate(cfg);
  CHECK(a.to_kv() == b.to_kv());
  REQUIRE(a.tables().size() == b.tables().size());
  for (std::size_t i = 0; i < a.tables().size(); ++i)
    CHECK(table_to_csv(a.tables()[i]) == table_to_csv(b.tables()[i]));

  CHECK(a.text("status") == "ok");
  CHECK(a.has("amplitude"));
  CHECK(a.has("config_hash"));
  CHECK(a.scalar("xi_model_mhz") == doctest::Approx(0.941135271861).epsilon(1e-9));
  CHECK(a.table("fringe").rows.size() == 3);
}

TEST_CASE("a single-phase simulate skips the full fringe fit") {
  Config cfg = parse_ok(
      "[sequence]\nt_s = 1\nphi_rad = 1.5707963267948966\n[run]\nseed = 2\nshots = 10\ndt_s = 0.002\n");
  const Report rep = run_simulate(cfg);
  CHECK(rep.text("status") == "ok");
  CHECK(!rep.has("amplitude"));
  CHECK(rep.table("fringe").rows.size() == 1);
}

TEST_CASE("simulate refuses an invalid config") {
  Config cfg = parse_ok("[run]\nseed = 1\n");
  cfg.shots = 0;
  CHECK_THROWS_AS(run_simulate(cfg), std::invalid_argument);
}

TEST_CASE("witness campaign produces its scalars on a tiny budget") {
  Config cfg = preset_config("witness");
  cfg.shots = 40;
  const Report rep = run_campaign(cfg);
  CHECK(rep.text("status") == "ok");
  CHECK(rep.has("s_raw"));
  CHECK(rep.has("s_mle"));
  CHECK(rep.has("p_even_mle"));
  CHECK(rep.scalar("identity_holds") == 1.0);
  CHECK(rep.checks().size() == 2);
  CHECK(!rep.table("cells").rows.empty());
  // not asserting the bands here: they need the full shot budget
}

TEST_CASE("calibration campaign produces its tables on a tiny budget") {
  Config cfg = preset_config("fig2a");
  cfg.shots = 12;
  const Report rep = run_campaign(cfg);
  CHECK(rep.text("status") == "ok");
  CHECK(rep.table("calibration").rows.size() == 5);
  CHECK(rep.has("fidelity_at_5"));
  CHECK(rep.has("fit_slope_per_s"));
  CHECK(rep.table("cells").rows.size() == 10);
}

TEST_CASE("campaign dispatch rejects unknown or missing studies") {
  Config cfg = parse_ok("[run]\nseed = 1\n");
  cfg.preset = "fig9";
  CHECK_THROWS_AS(run_campaign(cfg), std::invalid_argument);
  cfg.preset.clear();
  CHECK_THROWS_AS(run_campaign(cfg), std::invalid_argument);
}

TEST_CASE("reports round-trip through the filesystem") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "spinpair_report_roundtrip";
  fs::remove_all(dir);

  Report rep;
  rep.put("alpha", 0.123456789012345);
  rep.put_text("status", "ok");
  Table& t = rep.add_table("demo");
  t.columns = {"x", "y"};
  t.rows = {{1.0, -2.5}, {3.75, 4.0}};
  rep.write(dir.string());

  CHECK(fs::exists(dir / "report.kv"));
  const Table back = read_csv_table((dir / "demo.csv").string());
  CHECK(back.name == "demo");
  CHECK(back.columns == t.columns);
  REQUIRE(back.rows.size() == 2);
  CHECK(back.rows[0][1] == doctest::Approx(-2.5));

  std::ifstream kv(dir / "report.kv");
  std::string text((std::istreambuf_iterator<char>(kv)), std::istreambuf_iterator<char>());
  CHECK(text.find("alpha") != std::string::npos);

  CHECK_THROWS(read_csv_table((dir / "missing.csv").string()));
  fs::remove_all(dir);
}

TEST_CASE("loading a missing file reports instead of crashing") {
  std::vector<std::string> errors;
  (void)load_config("/nonexistent/path/params.ini", errors);
  CHECK(!errors.empty());
}
