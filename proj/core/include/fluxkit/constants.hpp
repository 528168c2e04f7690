#pragma once

#include <numbers>

// Working unit system used throughout the library:
//   energy      E/h in GHz
//   flux        units of Phi0
//   charge      units of 2e (Cooper pairs)
//   current     nA
//   inductance  pH
//   capacitance fF
// Every conversion factor is derived here, once, from the SI constants.
namespace fluxkit::units {

inline constexpr double pi = std::numbers::pi;

// SI base values (2019 redefinition, exact)
inline constexpr double planck_J_s = 6.62607015e-34;
inline constexpr double hbar_J_s = planck_J_s / (2.0 * pi);
inline constexpr double electron_charge_C = 1.602176634e-19;
inline constexpr double flux_quantum_Wb = planck_J_s / (2.0 * electron_charge_C);

inline constexpr double joule_to_GHz = 1.0 / (planck_J_s * 1e9);

// Josephson energy: E_J/h [GHz] = ej_GHz_per_nA * I0 [nA]
inline constexpr double ej_GHz_per_nA =
    flux_quantum_Wb * 1e-9 / (2.0 * pi) * joule_to_GHz;

// Kinetic term: (Q^2/2C)/h [GHz] = charging_GHz_fF * q^2 / C [fF], q in 2e units
inline constexpr double charging_GHz_fF =
    (2.0 * electron_charge_C) * (2.0 * electron_charge_C) / (2.0 * 1e-15) *
    joule_to_GHz;

// Inductive term: (Phi^2/L)/h [GHz] = inductive_GHz_pH * phi^2 / L [pH], phi in Phi0
// (note: no 1/2; potential terms carry their own factor)
inline constexpr double inductive_GHz_pH =
    flux_quantum_Wb * flux_quantum_Wb / 1e-12 * joule_to_GHz;

// Current from an energy slope: I [nA] = current_nA_per_GHz_Phi0 * dE/df [GHz/Phi0]
inline constexpr double current_nA_per_GHz_Phi0 =
    planck_J_s * 1e9 / flux_quantum_Wb / 1e-9;

// Mutual-inductance energy: (M I_a I_b)/h [GHz] = mutual_GHz * M [pH] Ia [nA] Ib [nA]
inline constexpr double mutual_GHz = 1e-30 * joule_to_GHz;

// Two-level bias: eps/2pi [GHz] = bias_GHz_per_nA * 2 * I_p [nA] * (f - 1/2)
inline constexpr double bias_GHz_per_nA =
    flux_quantum_Wb * 1e-9 / (planck_J_s * 1e9);

// Inverse-inductance from a current slope:
// 1/L_eff [1/pH] = inv_pH_per_nA_Phi0 * dI/df [nA/Phi0]
inline constexpr double inv_pH_per_nA_Phi0 = 1e-9 / flux_quantum_Wb * 1e-12;

inline constexpr double GHz_to_rad_s = 2.0 * pi * 1e9;

// effective hbar for the (flux in Phi0, charge in 2e) pair: [phi, q] = i/(2 pi)
inline constexpr double hbar_reduced = 1.0 / (2.0 * pi);

}  // namespace fluxkit::units
