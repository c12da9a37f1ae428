#include "spinpair/noise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace spinpair {

void NoiseConfig::validate() const {
  if (collective_rms_t < 0 || gradient_rms_t_per_m < 0)
    throw std::invalid_argument("noise rms must be non-negative");
  if (collective_rms_t > 0 && collective_corr_s <= 0)
    throw std::invalid_argument("collective_corr_s must be positive");
  if (gradient_rms_t_per_m > 0 && gradient_corr_s <= 0)
    throw std::invalid_argument("gradient_corr_s must be positive");
}

OuProcess::OuProcess(double rms, double corr_s, RandomStream& rng)
    : rms_(rms), corr_(corr_s), x_(0.0) {
  if (rms_ < 0) throw std::invalid_argument("OuProcess: rms must be non-negative");
  if (rms_ > 0) {
    if (corr_ <= 0) throw std::invalid_argument("OuProcess: corr time must be positive");
    x_ = rms_ * rng.gauss();  // stationary start
  }
}

double OuProcess::step(double dt, RandomStream& rng) {
  if (rms_ == 0.0) return x_;
  if (dt < 0) throw std::invalid_argument("OuProcess: dt must be non-negative");
  const double r = std::exp(-dt / corr_);
  x_ = x_ * r + rms_ * std::sqrt(1.0 - r * r) * rng.gauss();
  return x_;
}

NoiseRealization sample_noise(const NoiseConfig& cfg, double duration_s, double dt_s,
                              RandomStream& rng) {
  cfg.validate();
  if (duration_s < 0) throw std::invalid_argument("sample_noise: duration must be non-negative");
  if (dt_s <= 0) throw std::invalid_argument("sample_noise: dt must be positive");

  const auto n = static_cast<std::size_t>(std::ceil(duration_s / dt_s - 1e-12));
  NoiseRealization out;
  out.dt = dt_s;
  out.delta_b_t.resize(n);
  out.grad_t_per_m.resize(n);

  OuProcess field(cfg.collective_rms_t, cfg.collective_corr_s, rng);
  OuProcess grad(cfg.gradient_rms_t_per_m, cfg.gradient_corr_s, rng);
  for (std::size_t k = 0; k < n; ++k) {
    out.delta_b_t[k] = field.value();
    out.grad_t_per_m[k] = grad.value();
    field.step(dt_s, rng);
    grad.step(dt_s, rng);
  }
  return out;
}

double max_slice_dt(const NoiseConfig& cfg, double dfs_z_rate, double dfs_x_rate) {
  const double w = std::abs(dfs_z_rate) + std::abs(dfs_x_rate);
  double dt = std::numeric_limits<double>::infinity();
  if (w > 0) dt = 1.0 / (10.0 * w);
  if (cfg.collective_rms_t > 0) dt = std::min(dt, cfg.collective_corr_s / 5.0);
  if (cfg.gradient_rms_t_per_m > 0) dt = std::min(dt, cfg.gradient_corr_s / 5.0);
  return dt;
}

}  // namespace spinpair
