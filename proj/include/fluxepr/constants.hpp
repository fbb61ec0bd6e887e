#pragma once

// Physical constants, SI units. Exact values follow the 2019 SI redefinition;
// the measured ones are CODATA 2018.
namespace fluxepr::constants {

inline constexpr double planck = 6.62607015e-34;        // J s (exact)
inline constexpr double boltzmann = 1.380649e-23;        // J/K (exact)
inline constexpr double elementary_charge = 1.602176634e-19;  // C (exact)
inline constexpr double speed_of_light = 299792458.0;    // m/s (exact)
inline constexpr double bohr_magneton = 9.2740100783e-24;  // J/T
inline constexpr double mu0 = 1.25663706212e-6;          // N/A^2

// superconducting flux quantum h/2e, Wb
inline constexpr double flux_quantum = planck / (2.0 * elementary_charge);

// Bohr magneton in frequency units, Hz/T
inline constexpr double bohr_magneton_hz = bohr_magneton / planck;

}  // namespace fluxepr::constants
