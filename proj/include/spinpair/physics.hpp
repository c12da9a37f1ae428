#pragma once

#include <array>
#include <complex>

namespace spinpair {

using cplx = std::complex<double>;
using Vec4 = std::array<cplx, 4>;
using Mat4 = std::array<std::array<cplx, 4>, 4>;

/// Two-spin basis ordering used everywhere: |uu>, |ud>, |du>, |dd>.
enum BasisIndex { kUU = 0, kUD = 1, kDU = 2, kDD = 3 };

/// Pure two-spin state, unnormalized amplitudes tolerated only transiently.
struct TwoSpinState {
  Vec4 amp{cplx(0), cplx(0), cplx(0), cplx(0)};

  double norm2() const;
  void normalize();
  /// Outcome probabilities |amp_i|^2, renormalized.
  std::array<double, 4> probabilities() const;
  /// Bloch vector (x, y, z) of the {|ud>, |du>} pseudo-spin, unnormalized
  /// (its length is the population inside the subspace).
  std::array<double, 3> dfs_bloch() const;
};

TwoSpinState basis_state(BasisIndex i);
TwoSpinState psi_plus();   ///< (|ud> + |du>)/sqrt(2)
TwoSpinState psi_minus();  ///< (|ud> - |du>)/sqrt(2)
TwoSpinState chi_plus();   ///< (|ud> + i |du>)/sqrt(2)

double fidelity(const TwoSpinState& a, const TwoSpinState& b);

/// Magnetic dipole-dipole coupling rate xi [rad/s] for two electron spins a
/// distance d apart: xi = mu0 (g mu_B / 2)^2 / (4 pi hbar d^3).
double coupling_strength(double d_m);

/// Distance at which coupling_strength(d) equals xi.
double separation_for_coupling(double xi_rad_s);

/// Equilibrium separation of two ions in a harmonic trap with axial frequency
/// f_trap [Hz]: d = (2 k_e e^2 / (M (2 pi f)^2))^(1/3), mass defaults to Sr-88.
double ion_separation(double f_trap_hz, double mass_kg = -1.0);

/// Inverse of ion_separation.
double trap_frequency(double d_m, double mass_kg = -1.0);

/// Zeeman splitting g mu_B B / h of one spin in field B [T], returned in Hz.
double larmor_splitting(double b_t);

/// Detuning between the two spins' precession rates from a field gradient,
/// delta_omega = g mu_B grad d / hbar [rad/s].
double gradient_detuning(double grad_t_per_m, double d_m);

/// Parameters of H = hbar/2 (w1 sz1 + w2 sz2) + 2 hbar xi sz1 sz2
///                   - hbar xi (sx1 sx2 + sy1 sy2).
/// w1, w2 are the full splitting rates [rad/s] of each spin.
struct HamiltonianParams {
  double omega1 = 0.0;
  double omega2 = 0.0;
  double xi = 0.0;
};

struct TwoSpinHamiltonian {
  HamiltonianParams params;
  Mat4 matrix{};  ///< H / hbar [rad/s] in the |uu>,|ud>,|du>,|dd> basis
};

TwoSpinHamiltonian build_hamiltonian(const HamiltonianParams& p);

/// Rotation of the DFS pseudo-spin Bloch vector. The generator is
/// H_dfs/hbar = (z_rate/2) sz - (x_rate/2) sx up to a block-global phase, so
/// the Bloch vector precesses about (-(x_rate), 0, z_rate). Starting at the
/// north pole |ud> with z_rate = 0 the vector tips toward +y, through
/// chi_plus at a quarter turn.
struct DfsRotation {
  double z_rate = 0.0;  ///< omega1 - omega2 [rad/s]
  double x_rate = 0.0;  ///< 4 xi [rad/s]
};

/// Extracts the DFS rotation from a Hamiltonian, verifying that the matrix
/// does not couple the DFS block {|ud>, |du>} to {|uu>, |dd>}.
DfsRotation dfs_effective_hamiltonian(const TwoSpinHamiltonian& h, double tol = 1e-9);

/// Evolution time to the maximally entangled chi_plus, pi / (8 xi).
double entangling_time(double xi_rad_s);

/// Parity expected from the ideal sequence: prepare |ud> (init_sign +1) or
/// |du> (-1), evolve T with no detuning, apply the differential phase
/// phi_parity and the collective pi/2 analysis pulse:
///   parity = init_sign * sin(4 xi T) * sin(phi_parity).
double ideal_parity(double t_s, double xi_rad_s, double phi_parity, int init_sign);

}  // namespace spinpair
