#pragma once

// Hartree atomic units (hbar = m_e = e = 1). Energies in hartree, lengths in bohr.

namespace photodetach::units {

// CODATA 2018
inline constexpr double hartree_in_ev = 27.211386245988;
inline constexpr double bohr2_in_cm2 = 2.8002852e-17;

inline constexpr double ev_to_hartree(double ev) { return ev / hartree_in_ev; }
inline constexpr double hartree_to_ev(double hartree) { return hartree * hartree_in_ev; }

// Cross sections are computed in a.u. of area (bohr^2); this is for display only.
inline constexpr double au_area_to_cm2(double area_au) { return area_au * bohr2_in_cm2; }

}  // namespace photodetach::units
