#pragma once

namespace spinlab::constants {

// Magnetic constants in frequency units (CODATA, divided by h).
inline constexpr double mu_b_mhz_per_tesla = 13996.2449361;  // Bohr magneton
inline constexpr double mu_n_mhz_per_tesla = 7.6225932188;   // nuclear magneton

inline constexpr double g_electron = 2.0028;  // NV electron g-factor
inline constexpr double g_orbital = 0.10;     // orbital g-factor of the e_pm hole doublet

// 14N nuclear g-factor, fixed so that g_i * mu_n = 3.0833 kHz/mT, i.e. the
// nuclear Zeeman splitting at 1.2 mT is 3.7 kHz.
inline constexpr double g_nuclear_n14 = 0.404495;
inline constexpr double gamma_n14_khz_per_mt = g_nuclear_n14 * mu_n_mhz_per_tesla;

// h/kB expressed as kelvin per GHz.
inline constexpr double kelvin_per_ghz = 0.0479924307337;

}  // namespace spinlab::constants
