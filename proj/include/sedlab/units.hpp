#pragma once

#include <numbers>

// Hartree atomic units throughout: hbar = m_e = e = 4*pi*eps0 = 1.
// Lengths in Bohr radii, energies in Hartree, c = 1/alpha.
namespace sedlab::units {

inline constexpr double pi = std::numbers::pi;

inline constexpr double alpha = 1.0 / 137.035999;  // fine-structure constant
inline constexpr double hbar = 1.0;
inline constexpr double m_e = 1.0;
inline constexpr double m_p = 1836.15267343;  // proton mass in m_e
inline constexpr double m_n = 1838.68366173;  // neutron mass in m_e
inline constexpr double c = 137.035999;
inline constexpr double eps0 = 1.0 / (4.0 * pi);
inline constexpr double mu0 = 4.0 * pi / (c * c);

// Radiation-reaction time of the electron, (2/3) alpha^3 ~ 2.59e-7.
inline constexpr double tau_e = (2.0 / 3.0) * alpha * alpha * alpha;

// SI conversions, for presentation at the boundary only.
inline constexpr double bohr_in_m = 5.29177210903e-11;
inline constexpr double hartree_in_J = 4.3597447222071e-18;
inline constexpr double time_au_in_s = 2.4188843265857e-17;

}  // namespace sedlab::units
