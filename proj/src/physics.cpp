#include "spinpair/physics.hpp"

#include <cmath>
#include <stdexcept>

#include "spinpair/constants.hpp"

namespace spinpair {

namespace c = constants;

double TwoSpinState::norm2() const {
  double n = 0.0;
  for (const auto& a : amp) n += std::norm(a);
  return n;
}

void TwoSpinState::normalize() {
  double n = std::sqrt(norm2());
  if (n <= 0.0) throw std::domain_error("cannot normalize a zero state");
  for (auto& a : amp) a /= n;
}

std::array<double, 4> TwoSpinState::probabilities() const {
  double n = norm2();
  if (n <= 0.0) throw std::domain_error("zero state has no outcome distribution");
  return {std::norm(amp[0]) / n, std::norm(amp[1]) / n, std::norm(amp[2]) / n,
          std::norm(amp[3]) / n};
}

std::array<double, 3> TwoSpinState::dfs_bloch() const {
  cplx u = std::conj(amp[kUD]) * amp[kDU];
  return {2.0 * u.real(), 2.0 * u.imag(), std::norm(amp[kUD]) - std::norm(amp[kDU])};
}

TwoSpinState basis_state(BasisIndex i) {
  TwoSpinState s;
  s.amp[i] = 1.0;
  return s;
}

TwoSpinState psi_plus() {
  TwoSpinState s;
  s.amp[kUD] = s.amp[kDU] = 1.0 / std::sqrt(2.0);
  return s;
}

TwoSpinState psi_minus() {
  TwoSpinState s;
  s.amp[kUD] = 1.0 / std::sqrt(2.0);
  s.amp[kDU] = -1.0 / std::sqrt(2.0);
  return s;
}

TwoSpinState chi_plus() {
  TwoSpinState s;
  s.amp[kUD] = 1.0 / std::sqrt(2.0);
  s.amp[kDU] = cplx(0.0, 1.0 / std::sqrt(2.0));
  return s;
}

double fidelity(const TwoSpinState& a, const TwoSpinState& b) {
  cplx ov = 0.0;
  for (int i = 0; i < 4; ++i) ov += std::conj(a.amp[i]) * b.amp[i];
  return std::norm(ov) / (a.norm2() * b.norm2());
}

double coupling_strength(double d_m) {
  if (d_m <= 0.0) throw std::invalid_argument("ion separation must be positive");
  return c::mu0 * c::mu_spin * c::mu_spin / (4.0 * c::pi * c::hbar * d_m * d_m * d_m);
}

double separation_for_coupling(double xi_rad_s) {
  if (xi_rad_s <= 0.0) throw std::invalid_argument("coupling must be positive");
  double d3 = c::mu0 * c::mu_spin * c::mu_spin / (4.0 * c::pi * c::hbar * xi_rad_s);
  return std::cbrt(d3);
}

double ion_separation(double f_trap_hz, double mass_kg) {
  if (f_trap_hz <= 0.0) throw std::invalid_argument("trap frequency must be positive");
  double m = mass_kg > 0.0 ? mass_kg : c::m_sr88;
  double w = c::two_pi * f_trap_hz;
  return std::cbrt(2.0 * c::k_e * c::q_e * c::q_e / (m * w * w));
}

double trap_frequency(double d_m, double mass_kg) {
  if (d_m <= 0.0) throw std::invalid_argument("ion separation must be positive");
  double m = mass_kg > 0.0 ? mass_kg : c::m_sr88;
  double w = std::sqrt(2.0 * c::k_e * c::q_e * c::q_e / (m * d_m * d_m * d_m));
  return w / c::two_pi;
}

double larmor_splitting(double b_t) {
  if (b_t < 0.0) throw std::invalid_argument("field magnitude must be non-negative");
  return c::g_e * c::mu_b * b_t / c::h;
}

double gradient_detuning(double grad_t_per_m, double d_m) {
  if (d_m <= 0.0) throw std::invalid_argument("ion separation must be positive");
  return c::gyro * grad_t_per_m * d_m;
}

TwoSpinHamiltonian build_hamiltonian(const HamiltonianParams& p) {
  TwoSpinHamiltonian h;
  h.params = p;
  double sum = 0.5 * (p.omega1 + p.omega2);
  double dif = 0.5 * (p.omega1 - p.omega2);
  auto& m = h.matrix;
  m[kUU][kUU] = sum + 2.0 * p.xi;
  m[kUD][kUD] = dif - 2.0 * p.xi;
  m[kDU][kDU] = -dif - 2.0 * p.xi;
  m[kDD][kDD] = -sum + 2.0 * p.xi;
  // flip-flop term: -xi (sx sx + sy sy) exchanges |ud> and |du| with weight 2
  m[kUD][kDU] = -2.0 * p.xi;
  m[kDU][kUD] = -2.0 * p.xi;
  return h;
}

DfsRotation dfs_effective_hamiltonian(const TwoSpinHamiltonian& h, double tol) {
  const auto& m = h.matrix;
  double leak = 0.0;
  for (int i : {kUU, kDD})
    for (int j : {kUD, kDU}) leak = std::max({leak, std::abs(m[i][j]), std::abs(m[j][i])});
  leak = std::max(leak, std::abs(m[kUU][kDD]));
  leak = std::max(leak, std::abs(m[kDD][kUU]));
  double scale = std::max({1.0, std::abs(m[kUD][kUD]), std::abs(m[kUD][kDU])});
  if (leak > tol * scale)
    throw std::domain_error("Hamiltonian couples the DFS block to the outer states");
  DfsRotation r;
  r.z_rate = (m[kUD][kUD] - m[kDU][kDU]).real();
  r.x_rate = -2.0 * m[kUD][kDU].real();
  return r;
}

double entangling_time(double xi_rad_s) {
  if (xi_rad_s <= 0.0) throw std::invalid_argument("coupling must be positive");
  return c::pi / (8.0 * xi_rad_s);
}

double ideal_parity(double t_s, double xi_rad_s, double phi_parity, int init_sign) {
  if (t_s < 0.0) throw std::invalid_argument("time must be non-negative");
  if (init_sign != 1 && init_sign != -1)
    throw std::invalid_argument("init_sign must be +1 or -1");
  return init_sign * std::sin(4.0 * xi_rad_s * t_s) * std::sin(phi_parity);
}

}  // namespace spinpair
