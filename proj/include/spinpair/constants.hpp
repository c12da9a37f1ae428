#pragma once

/// Physical constants, CODATA 2018 values, SI units throughout.

namespace spinpair::constants {

constexpr double h = 6.62607015e-34;              ///< Planck constant [J s], exact
constexpr double hbar = h / 6.283185307179586476925286766559;  ///< h / 2pi [J s]
constexpr double mu0 = 1.25663706212e-6;          ///< vacuum permeability [N A^-2]
constexpr double mu_b = 9.2740100783e-24;         ///< Bohr magneton [J T^-1]
constexpr double g_e = 2.00231930436256;          ///< electron g-factor magnitude
constexpr double k_e = 8.9875517923e9;            ///< Coulomb constant [N m^2 C^-2]
constexpr double q_e = 1.602176634e-19;           ///< elementary charge [C], exact
constexpr double amu = 1.66053906660e-27;         ///< atomic mass unit [kg]
constexpr double m_sr88 = 87.905612 * amu;        ///< mass of an Sr-88 ion [kg]

constexpr double pi = 3.141592653589793238462643383279;
constexpr double two_pi = 2.0 * pi;

/// Magnetic moment of a single valence electron spin, g mu_B / 2 [J T^-1].
constexpr double mu_spin = g_e * mu_b / 2.0;

/// Spin precession rate per unit field, g mu_B / hbar [rad s^-1 T^-1].
constexpr double gyro = g_e * mu_b / hbar;

/// Artifact version reported in provenance blocks and the shared library.
inline constexpr const char* version = "1.0.0";

}  // namespace spinpair::constants
