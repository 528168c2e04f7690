#pragma once

#include <vector>

#include "fluxkit/circuits.hpp"
#include "fluxkit/coupler.hpp"

namespace fluxkit {

struct RenormalizedInductances {
  double l_tilde_a_pH = 0;
  double l_tilde_b_pH = 0;
  double m_tilde_pH = 0;
};

// Maps a galvanically shared inductance onto an effective mutual:
// L~_{A,B} = L_{A,B} - M^2/L_{B,A},  M~ = M (1 - M^2/(L_A L_B)).
RenormalizedInductances galvanic_to_mutual(double l_a_pH, double l_b_pH,
                                           double m_pH);

// hbar J = M~ Ip_A Ip_B
double direct_coupling_rad_s(double m_tilde_pH, double ip_a_nA, double ip_b_nA);

struct CouplingResult {
  double j_rad_s = 0;
  double m_eff_pH = 0;  // M~^2 / L_eff
  double m_tilde_pH = 0;
  double inv_l_eff_per_pH = 0;
  double ip_a_nA = 0, ip_b_nA = 0;
};

// J = (M~^2 / L_eff) Ip_A Ip_B / hbar; sign follows 1/L_eff.
CouplingResult mediated_coupling(double m_tilde_pH, double inv_l_eff_per_pH,
                                 double ip_a_nA, double ip_b_nA);

struct FluxOffset {
  double df_Phi0 = 0;     // M~ <I_C> / Phi0
  double deps_rad_s = 0;  // 2 M~ I_p <I_C> / hbar
};

FluxOffset qubit_flux_offset(double m_tilde_pH, double i_circ_nA, double ip_nA);

// L_loaded = L_q - M^2 / L_eff (physical M)
double loaded_inductance_pH(double l_q_pH, double m_pH, double inv_l_eff_per_pH);

struct DeltaCurvePoint {
  double f_c = 0;
  double delta_GHz = 0;
  double kappa_rad_s_per_Phi0 = 0;  // d Delta / d Phi_C, centered difference
  double l_loaded_pH = 0;
  double ip_nA = 0;
  double inv_l_eff_per_pH = 0;
};

struct DeltaCurveOptions {
  CouplerScanOptions coupler;
  BuildOptions qubit;
  int threads = 0;
};

// Delta(f_C) for one qubit: rebuild with the loaded inductance at each point
// and evaluate the gap at the ring degeneracy; kappa from the grid.
std::vector<DeltaCurvePoint> delta_vs_coupler(const DeviceParams& p,
                                              QubitId which,
                                              const std::vector<double>& f_c_grid,
                                              DeltaCurveOptions opts = {});

}  // namespace fluxkit
