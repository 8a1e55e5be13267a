#pragma once

// CODATA 2018 values, SI units.
namespace finjj::constants {

inline constexpr double elementary_charge = 1.602176634e-19;    // C (exact)
inline constexpr double electron_mass = 9.1093837015e-31;       // kg
inline constexpr double vacuum_permeability = 1.25663706212e-6;  // N A^-2
inline constexpr double planck_hbar = 1.054571817e-34;           // J s (exact)
inline constexpr double planck_h = 6.62607015e-34;               // J s (exact)

inline constexpr double electron_volt = elementary_charge;  // J
inline constexpr double cooper_pair_charge = 2.0 * elementary_charge;

}  // namespace finjj::constants
