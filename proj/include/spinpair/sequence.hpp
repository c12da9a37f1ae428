#pragma once

#include <string>
#include <vector>

#include "spinpair/physics.hpp"

namespace spinpair {

/// Evenly spaced pi-pulse train over a free-evolution window of length
/// duration_s. With pulse rate f0 the pulses sit at (k + 1/2) / f0, so the
/// first and last free segments are half as long as the interior ones.
struct EchoTrain {
  double duration_s = 0.0;
  std::vector<double> pulse_times_s;

  std::size_t pulse_count() const { return pulse_times_s.size(); }
};

/// Builds the train with M = duration * f0 pulses. M must come out an even
/// integer so the echo returns the populations; windows shorter than one
/// pulse period carry no pulse at all. f0 = 0 disables the echo.
EchoTrain build_echo_train(double duration_s, double f0_hz);

enum class InitKind { kBothUp, kUpDown, kDownUp, kBothDown, kPsiPlus };

InitKind parse_init(const std::string& name);
std::string init_name(InitKind kind);

/// Measurement settings for one experimental cell.
struct SequenceSpec {
  InitKind init = InitKind::kUpDown;
  double t_s = 15.0;            ///< free evolution time
  double f0_hz = 2.0;           ///< echo pulse rate, 0 for none
  double phi_rad = 0.0;         ///< differential analysis phase
  bool init_flip = false;       ///< adds pi to the differential phase
  bool analysis_pulse = true;   ///< false for population-only readout

  double total_phase() const;
  void validate() const;
};

/// Differential phase between the two odd-parity amplitudes:
/// |ud> gains e^{+i phi/2}, |du> gains e^{-i phi/2}.
Mat4 differential_phase_gate(double phi_rad);

/// Collective pi/2 rotation of both spins about +y.
Mat4 analysis_gate();

/// Collective pi pulse about +x with a common over-rotation error.
Mat4 pi_pulse_gate(double error_rad = 0.0);

TwoSpinState apply_gate(const Mat4& gate, const TwoSpinState& state);

}  // namespace spinpair
