#pragma once

#include <cstddef>
#include <vector>

#include "spinpair/rng.hpp"

namespace spinpair {

/// Magnetic noise model: an Ornstein-Uhlenbeck process for the common-mode
/// field delta_B(t) seen identically by both spins, and an independent OU
/// process for the field-gradient fluctuation around the static residual.
struct NoiseConfig {
  double collective_rms_t = 1e-7;      ///< stationary rms of delta_B [T]
  double collective_corr_s = 10e-3;    ///< correlation time [s]
  double gradient_rms_t_per_m = 0.0;   ///< stationary rms of the gradient noise [T/m]
  double gradient_corr_s = 0.1;        ///< correlation time [s]

  void validate() const;
};

/// Exactly discretized OU process, stationary start.
class OuProcess {
 public:
  OuProcess(double rms, double corr_s, RandomStream& rng);
  /// Advances by dt and returns the new value.
  double step(double dt, RandomStream& rng);
  double value() const { return x_; }

 private:
  double rms_;
  double corr_;
  double x_;
};

/// One realization of both processes on a fixed grid; sample k holds the value
/// on [k dt, (k+1) dt).
struct NoiseRealization {
  double dt = 0.0;
  std::vector<double> delta_b_t;        ///< collective field offset [T]
  std::vector<double> grad_t_per_m;     ///< gradient fluctuation [T/m], excludes the static part
};

NoiseRealization sample_noise(const NoiseConfig& cfg, double duration_s, double dt_s,
                              RandomStream& rng);

/// Largest admissible propagation step: min(1 / (10 (|z| + |x|)), corr/5)
/// over the active noise processes. Coarser steps are rejected upstream.
double max_slice_dt(const NoiseConfig& cfg, double dfs_z_rate, double dfs_x_rate);

}  // namespace spinpair
