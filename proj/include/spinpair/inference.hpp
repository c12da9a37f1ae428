#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace spinpair {

/// Weighted least-squares fit of y = a sin(phi) + b cos(phi).
struct FringeFit {
  double a = 0.0;
  double b = 0.0;
  double sigma_a = 0.0;
  double sigma_b = 0.0;
  double cov_ab = 0.0;
  double chi2 = 0.0;
  long dof = 0;

  double amplitude() const;
  double amplitude_sigma() const;
  double phase() const;
};

FringeFit fit_fringe(const std::vector<double>& phi_rad, const std::vector<double>& y,
                     const std::vector<double>& sigma);

/// One-parameter weighted fit of y = A sin(phi + offset); needs at least
/// three distinct phases with nonzero design weight.
struct AmplitudeFit {
  double amplitude = 0.0;
  double sigma = 0.0;
  double chi2 = 0.0;
  long dof = 0;
};

AmplitudeFit fit_fringe_amplitude(const std::vector<double>& phi_rad,
                                  const std::vector<double>& y,
                                  const std::vector<double>& sigma,
                                  double phase_offset_rad = 0.0);

/// Generic nonlinear fit summary. params/sigmas are model specific.
struct FitResult {
  std::vector<double> params;
  std::vector<double> sigmas;
  double chi2 = 0.0;
  long dof = 0;
  bool converged = true;
};

/// y = v0 exp(-t / tau); params = {v0, tau}.
FitResult fit_decay(const std::vector<double>& t_s, const std::vector<double>& y,
                    const std::vector<double>& sigma);

/// Closed form for exactly two amplitudes.
double two_point_decay_time(double t1_s, double a1, double t2_s, double a2);

/// y = c x^(-n), fitted in log space; params = {n, ln c}.
FitResult fit_power_law(const std::vector<double>& x, const std::vector<double>& y,
                        const std::vector<double>& sigma);

/// Inverts the fringe amplitude contrast * sin(4 xi T) for xi [rad/s] with
/// first-order error propagation; |amplitude| > contrast is unphysical and
/// rejected.
struct XiEstimate {
  double xi_rad_s = 0.0;
  double sigma_rad_s = 0.0;
};

XiEstimate xi_from_amplitude(double amplitude, double sigma_a, double t_s, double contrast);

/// One-parameter least squares of V(T) = contrast(T) sin(4 xi T);
/// params = {xi_rad_s}.
FitResult fit_xi_vs_time(const std::vector<double>& t_s, const std::vector<double>& v,
                         const std::vector<double>& sigma,
                         const std::vector<double>& contrast);

/// Maximum-likelihood true outcome populations behind a known readout
/// confusion, found by expectation-maximization on the probability simplex.
struct MleResult {
  std::array<double, 3> populations{};  ///< ordered kBothUp, kBothDown, kOneOne
  double log_likelihood = 0.0;
  bool boundary = false;                ///< some population pinned at zero
  int iterations = 0;
};

MleResult mle_populations(const std::array<long, 3>& counts,
                          const std::array<std::array<double, 3>, 3>& confusion,
                          int max_iter = 5000, double tol = 1e-13);

/// Plain matrix inverse of a 3x3 confusion matrix, used for unconstrained
/// linear inversion and its delta-method errors; throws on (near) singular
/// input.
std::array<std::array<double, 3>, 3> invert3(const std::array<std::array<double, 3>, 3>& m);

/// Overlapping Allan deviation of an evenly sampled series, octave-spaced
/// averaging times.
struct AdevPoint {
  double tau_s = 0.0;
  double adev = 0.0;
  long window = 0;  ///< samples per average
};

std::vector<AdevPoint> allan_deviation(const std::vector<double>& series, double tau0_s);

/// Exchange witness: even-outcome population minus fringe visibility.
/// Negative values are impossible for any separable or exchange-symmetric
/// preparation.
double swap_witness(double p_even, double visibility);

}  // namespace spinpair
