#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "spinpair/instrument.hpp"
#include "spinpair/noise.hpp"
#include "spinpair/physics.hpp"
#include "spinpair/rng.hpp"
#include "spinpair/sequence.hpp"

namespace spinpair {

/// Static experiment parameters shared by every shot of a run.
struct ModelParams {
  double d_m = 2.4e-6;                  ///< ion separation
  double b0_t = 0.44e-3;                ///< quantizing field
  double grad_static_t_per_m = 3e-7;    ///< residual static field gradient
  NoiseConfig noise{};
  InstrumentModel instrument{};

  void validate() const;
  double xi() const;                    ///< dipolar coupling [rad/s]
  double static_detuning() const;       ///< differential Zeeman detuning [rad/s]
};

struct RunSettings {
  std::uint64_t seed = 0;
  long shots = 500;
  double dt_s = 1e-3;       ///< propagation slice; rejected when coarser than the guard
  int threads = 0;          ///< 0 picks the hardware concurrency
  bool record_shots = false;
};

struct CellCounts {
  long n_uu = 0;
  long n_dd = 0;
  long n_one = 0;

  long total() const { return n_uu + n_dd + n_one; }
  double p_uu() const;
  double p_dd() const;
  double p_one() const;
  /// Even-minus-odd outcome fraction; equals <sigma_x sigma_x> after the
  /// analysis pulse and <sigma_z sigma_z> without it.
  double correlator() const;
  /// Multinomial standard error of correlator().
  double correlator_sigma() const;
};

struct CellResult {
  std::string label;
  SequenceSpec spec;
  CellCounts counts;
  /// Density-matrix expectation of each outcome, averaged over the same
  /// preparation draws and noise realizations the sampled counts saw.
  std::array<double, 3> oracle_mean{};
  /// Standard error of the sampled frequency around oracle_mean (sum of the
  /// per-shot Bernoulli variances).
  std::array<double, 3> oracle_sigma{};
  std::vector<int> shot_values;  ///< per-shot contribution (+1 even, -1 odd) when recorded
};

/// Exact propagator for one noise-frozen slice of the two-spin Hamiltonian.
Mat4 slice_propagator(double omega1, double omega2, double xi, double dt_s);

/// Full free-evolution window with the pi-pulse train under one noise
/// realization; returns the 4x4 propagator (all basis columns evolved
/// together). Throws when the noise grid is coarser than the slicing guard.
Mat4 propagate_window(const ModelParams& model, const EchoTrain& train,
                      const NoiseRealization& noise);

/// Convenience wrapper: draws a noise realization from rng and applies the
/// window propagator to one state.
TwoSpinState evolve_state(TwoSpinState psi, const ModelParams& model, const EchoTrain& train,
                          double dt_s, RandomStream& rng);

struct ShotOutput {
  Outcome outcome = Outcome::kOneOne;
  std::array<double, 3> oracle{};  ///< analytic outcome distribution of this shot
};

/// One complete shot: noise realization, preparation, window propagation,
/// differential phase, optional analysis pulse, readout. The oracle
/// distribution averages the preparation channel analytically over the same
/// noise trajectory.
ShotOutput run_single_shot(const ModelParams& model, const SequenceSpec& spec, double dt_s,
                           RandomStream& rng);

/// Runs every shot of a cell. Each shot is seeded from (seed, label, index),
/// so results do not depend on the thread count.
CellResult run_cell(const ModelParams& model, const SequenceSpec& spec,
                    const std::string& label, const RunSettings& run);

}  // namespace spinpair
