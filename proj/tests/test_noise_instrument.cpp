#include <array>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "spinpair/instrument.hpp"
#include "spinpair/noise.hpp"
#include "spinpair/rng.hpp"

using namespace spinpair;

TEST_CASE("OU process is stationary with the configured variance") {
  RandomStream rng(4242);
  OuProcess ou(2.5e-7, 0.01, rng);
  const double dt = 0.002;
  double sum = 0, sum2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    ou.step(dt, rng);
    sum += ou.value();
    sum2 += ou.value() * ou.value();
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  // correlated samples: the effective sample count is ~ n dt / (2 tau_c)
  CHECK(std::abs(mean) < 3.0 * 2.5e-7 / std::sqrt(n * dt / (2 * 0.01)));
  CHECK(var == doctest::Approx(2.5e-7 * 2.5e-7).epsilon(0.05));
}

TEST_CASE("OU autocorrelation decays with the configured time constant") {
  RandomStream rng(555);
  OuProcess ou(1.0, 0.01, rng);
  const double dt = 0.001;
  const int lag = 10;  // one correlation time
  std::vector<double> xs;
  for (int i = 0; i < 400000; ++i) {
    ou.step(dt, rng);
    xs.push_back(ou.value());
  }
  double c0 = 0, c1 = 0;
  const int n = static_cast<int>(xs.size()) - lag;
  for (int i = 0; i < n; ++i) {
    c0 += xs[i] * xs[i];
    c1 += xs[i] * xs[i + lag];
  }
  CHECK(c1 / c0 == doctest::Approx(std::exp(-1.0)).epsilon(0.05));
}

TEST_CASE("disabled noise consumes no randomness") {
  NoiseConfig off;
  off.collective_rms_t = 0.0;
  off.gradient_rms_t_per_m = 0.0;

  RandomStream a(77);
  (void)sample_noise(off, 1.0, 0.01, a);
  RandomStream b(77);
  for (int i = 0; i < 5; ++i) CHECK(a.gauss() == b.gauss());
}

TEST_CASE("sampled realization length and values") {
  NoiseConfig cfg;  // collective on by default
  RandomStream rng(8);
  const NoiseRealization r = sample_noise(cfg, 15.0, 0.002, rng);
  CHECK(r.delta_b_t.size() == 7500);
  CHECK(r.grad_t_per_m.size() == 7500);
  for (double g : r.grad_t_per_m) CHECK(g == 0.0);
  // a duration just over one slice still needs two samples
  RandomStream rng2(8);
  CHECK(sample_noise(cfg, 0.0021, 0.002, rng2).delta_b_t.size() == 2);
}

TEST_CASE("slicing guard follows the fastest active scale") {
  NoiseConfig cfg;
  cfg.collective_rms_t = 1e-7;
  cfg.collective_corr_s = 0.01;
  cfg.gradient_rms_t_per_m = 0.0;
  // detuning slow, coupling slow: the noise correlation time rules
  CHECK(max_slice_dt(cfg, 0.12, 0.024) == doctest::Approx(0.002));
  // fast detuning rules instead
  CHECK(max_slice_dt(cfg, 100.0, 0.0) == doctest::Approx(1.0 / 1000.0));
  // both noises active: the shorter correlation time wins
  cfg.gradient_rms_t_per_m = 1e-7;
  cfg.gradient_corr_s = 0.005;
  CHECK(max_slice_dt(cfg, 0.0, 0.0) == doctest::Approx(0.001));
  // nothing active: unbounded
  NoiseConfig off;
  off.collective_rms_t = 0.0;
  CHECK(std::isinf(max_slice_dt(off, 0.0, 0.0)));
}

TEST_CASE("affine fidelity clamps to a physical range") {
  AffineFidelity f{0.9675, -0.0035};
  CHECK(f.value(15.0) == doctest::Approx(0.915));
  CHECK(f.value(1e6) == doctest::Approx(0.5));
  AffineFidelity g{0.99, 0.1};
  CHECK(g.value(10.0) == doctest::Approx(1.0));
}

TEST_CASE("two calibration points fix the fidelity line") {
  const AffineFidelity line = fit_fidelity_curve({{5.0, 0.95}, {25.0, 0.88}});
  CHECK(line.slope == doctest::Approx(-0.0035).epsilon(1e-12));
  CHECK(line.value(15.0) == doctest::Approx(0.915).epsilon(1e-12));
  CHECK_THROWS(fit_fidelity_curve({{5.0, 0.95}}));
  CHECK_THROWS(fit_fidelity_curve({{5.0, 0.95}, {5.0, 0.96}}));
}

TEST_CASE("confusion matrix rows are the readout channel") {
  const auto c = confusion_matrix(0.96, 0.9);
  // one-bright row: bright read bright and dark misread, etc.
  CHECK(c[2][0] == doctest::Approx(0.96 * 0.1));
  CHECK(c[2][1] == doctest::Approx(0.04 * 0.9));
  CHECK(c[2][2] == doctest::Approx(0.96 * 0.9 + 0.04 * 0.1));
  CHECK(c[0][0] == doctest::Approx(0.96 * 0.96));
  CHECK(c[1][1] == doctest::Approx(0.9 * 0.9));
  for (int r = 0; r < 3; ++r) {
    double sum = 0;
    for (int col = 0; col < 3; ++col) {
      CHECK(c[r][col] >= 0.0);
      sum += c[r][col];
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("detection contrast and the alpha law") {
  InstrumentModel inst;
  inst.det_up = {0.912, 0.0};
  inst.det_down = {0.912, 0.0};
  const double d = 0.912;
  CHECK(inst.detection_contrast(0.0) == doctest::Approx(std::pow(2 * d - 1, 2)).epsilon(1e-14));
  // algebraic identity (2D-1)^2 = 1 - 4 D (1-D)
  CHECK(std::pow(2 * d - 1, 2) == doctest::Approx(1.0 - 4.0 * d * (1.0 - d)).epsilon(1e-14));
  CHECK(inst.detection_contrast(0.0) == doctest::Approx(0.678976).epsilon(1e-6));
}

TEST_CASE("basis preparation flips independently at the configured rate") {
  InstrumentModel inst;
  inst.prep_fidelity = 0.9;
  RandomStream rng(31);
  int flip1 = 0, flip2 = 0, both = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const BasisIndex got = inst.prepare_basis(kUD, rng);
    const bool f1 = (got == kDU || got == kDD);  // spin 1 intended up
    const bool f2 = (got == kUU || got == kDU);  // spin 2 intended down
    flip1 += f1;
    flip2 += f2;
    both += f1 && f2;
  }
  const double sigma = std::sqrt(0.1 * 0.9 / n);
  CHECK(std::abs(flip1 / double(n) - 0.1) < 4 * sigma);
  CHECK(std::abs(flip2 / double(n) - 0.1) < 4 * sigma);
  CHECK(both / double(n) == doctest::Approx(0.01).epsilon(0.15));
}

TEST_CASE("entangled preparation mixes in uniform basis states") {
  InstrumentModel inst;
  inst.psi_plus_fidelity = 0.8;
  RandomStream rng(97);
  int pure = 0;
  std::array<int, 4> basis{};
  const int n = 50000;
  for (int i = 0; i < n; ++i) {
    const TwoSpinState s = inst.prepare_entangled(rng);
    if (std::abs(s.amp[kUD]) > 0.6 && std::abs(s.amp[kDU]) > 0.6) {
      ++pure;  // only the Bell state populates both odd amplitudes
    } else {
      for (int k = 0; k < 4; ++k)
        if (std::abs(s.amp[k]) > 0.5) ++basis[k];
    }
  }
  CHECK(pure / double(n) == doctest::Approx(0.8).epsilon(0.02));
  for (int k = 0; k < 4; ++k)
    CHECK(basis[k] / double(n) == doctest::Approx(0.05).epsilon(0.2));
}

TEST_CASE("sampled detection matches its analytic distribution") {
  InstrumentModel inst;
  inst.det_up = {0.93, 0.0};
  inst.det_down = {0.88, 0.0};
  RandomStream rng(2024);

  for (const TwoSpinState& state : {psi_plus(), basis_state(kUU), chi_plus()}) {
    const auto p = inst.outcome_probabilities(state, 7.0);
    CHECK(p[0] + p[1] + p[2] == doctest::Approx(1.0).epsilon(1e-12));
    std::array<long, 3> counts{};
    const int n = 40000;
    for (int i = 0; i < n; ++i)
      ++counts[static_cast<int>(inst.detect(state, 7.0, rng))];
    for (int k = 0; k < 3; ++k) {
      const double sigma = std::sqrt(p[k] * (1 - p[k]) / n);
      CHECK(std::abs(counts[k] / double(n) - p[k]) < 4.5 * sigma + 1e-9);
    }
  }
}

TEST_CASE("instrument validation rejects nonsense") {
  InstrumentModel inst;
  inst.prep_fidelity = 1.2;
  CHECK_THROWS(inst.validate());
  inst = InstrumentModel{};
  inst.psi_plus_fidelity = -0.1;
  CHECK_THROWS(inst.validate());
  CHECK_NOTHROW(InstrumentModel{}.validate());

  // detector curves are not policed here: value() clamps them instead
  AffineFidelity wild{-0.1, 0.0};
  CHECK(wild.value(3.0) == doctest::Approx(0.5));
}
