#pragma once

#include <array>
#include <cstddef>
#include <utility>
#include <vector>

#include "spinpair/physics.hpp"
#include "spinpair/rng.hpp"

namespace spinpair {

/// State-dependent fluorescence readout collapses each shot to three counts:
/// both spins bright, both dark, or exactly one bright.
enum class Outcome { kBothUp = 0, kBothDown = 1, kOneOne = 2 };

/// Per-spin readout fidelity as a function of the interrogation time, clamped
/// to [0.5, 1]. A zero slope models a time-independent detector.
struct AffineFidelity {
  double intercept = 0.9675;
  double slope = -0.0035;

  double value(double t_s) const;
};

/// Least-squares affine fit to measured (time, fidelity) calibration points.
/// Needs at least two distinct times; a single repeated time has no slope.
AffineFidelity fit_fidelity_curve(const std::vector<std::pair<double, double>>& points);

/// 3x3 row-stochastic readout confusion for a spin pair with per-spin
/// fidelities d_up (bright state read bright) and d_down (dark read dark).
/// Rows and columns are ordered kBothUp, kBothDown, kOneOne; rows are the
/// true outcome, columns the reported one.
std::array<std::array<double, 3>, 3> confusion_matrix(double d_up, double d_down);

/// Preparation and detection imperfections. The det_* curves drive the
/// simulated readout; the mle_* curves are what the analysis believes about
/// the detector and default to the same calibration line.
struct InstrumentModel {
  double prep_fidelity = 0.99;       ///< per-spin probability of no preparation flip
  double psi_plus_fidelity = 0.95;   ///< weight of the Bell state in the prepared mixture
  double pulse_error_rad = 0.0;      ///< systematic over-rotation of every echo pi pulse
  AffineFidelity det_up{};
  AffineFidelity det_down{};
  AffineFidelity mle_up{};
  AffineFidelity mle_down{};

  void validate() const;

  /// Independent classical spin flips on the intended product state.
  BasisIndex prepare_basis(BasisIndex target, RandomStream& rng) const;

  /// Bell-state source: the pure target with probability psi_plus_fidelity,
  /// otherwise a uniformly drawn basis state (the fully mixed remainder).
  TwoSpinState prepare_entangled(RandomStream& rng) const;

  /// Projective two-spin measurement followed by per-spin readout errors.
  Outcome detect(const TwoSpinState& state, double t_s, RandomStream& rng) const;

  /// Analytic outcome distribution of detect(), ordered as Outcome.
  std::array<double, 3> outcome_probabilities(const TwoSpinState& state, double t_s) const;

  /// Multiplicative contrast (2 dbar - 1)^2 the readout applies to any
  /// sigma_z-correlation estimator, from the simulated curves.
  double detection_contrast(double t_s) const;

  /// Same contrast computed from the curves the analysis assumes.
  double assumed_contrast(double t_s) const;
};

}  // namespace spinpair
