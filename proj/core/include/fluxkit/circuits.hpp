#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fluxkit/operators.hpp"

namespace fluxkit {

enum class QubitId { A, B };

struct QubitParams {
  double i0_small_nA = 0;  // small junction critical current
  double i0_large_nA = 0;  // each of the two large junctions
  double c_sh_fF = 0;      // shunt across the small junction
  double l_q_pH = 0;       // loop inductance
};

// All circuit parameters of the two-qubit/one-coupler device.
struct DeviceParams {
  double j_c_uA_per_um2 = 0;  // critical current density
  double s_c_fF_per_um2 = 0;  // specific junction capacitance
  QubitParams qubit_a, qubit_b;
  double i0_coupler_nA = 0;
  double l_coupler_pH = 0;
  double m_pH = 0;  // shared qubit-coupler inductance, per pair
  std::string parameter_set = "semiclassical";

  const QubitParams& qubit(QubitId id) const {
    return id == QubitId::A ? qubit_a : qubit_b;
  }
  void validate() const;
};

// Reduced external fluxes, units of Phi0.
struct FluxPoint {
  double f_a = 0, f_b = 0, f_c = 0;
};

struct ConvergenceReport {
  bool checked = false;
  double max_shift_GHz = 0;  // largest retained-eigenvalue move on +2 levels
  std::vector<int> levels;
};

// A quantized loop circuit at one external flux: Hamiltonian, the loop
// current operator (nA, counted positive in the screening direction so that
// <I> = dE0/dPhi_ext), and dH/df (GHz per Phi0).
struct CircuitHamiltonian {
  HermitianOperator hamiltonian;
  HermitianOperator current_op;
  HermitianOperator flux_derivative_op;
  std::vector<ModeBasis> basis;
  int gauge_branch = -1;
  ConvergenceReport convergence;
  double f_ext = 0;
};

struct BuildOptions {
  std::vector<int> levels;  // per mode, ascending mode frequency; empty = defaults
  int gauge_branch = -1;    // -1 = the inductor branch
  bool check_convergence = true;
  int retained = 3;             // eigenvalues covered by the contract
  double tolerance_GHz = 1e-6;  // 1 kHz
  int max_rounds = 3;
};

// S_c * (I0 / J_c): junction self-capacitance from its area.
double junction_capacitance_fF(double i0_nA, const DeviceParams& p);

// Single-mode rf-SQUID: kinetic + (loop flux)^2/2L_C + Josephson cosine.
CircuitHamiltonian build_coupler(const DeviceParams& p, double f_c,
                                 const BuildOptions& opts = {});

// Capacitively shunted three-junction flux qubit, quantized as a 4-branch
// ring (small JJ || shunt, two large JJs, loop inductor) with 3 modes.
CircuitHamiltonian build_flux_qubit(const DeviceParams& p, QubitId which,
                                    double f_q,
                                    std::optional<double> l_override_pH = {},
                                    const BuildOptions& opts = {});

// ---- two-level reduction ----

struct TwoLevelModel {
  double delta_GHz = 0;      // minimum 0-1 gap over flux
  double delta_rad_s = 0;
  double ip_nA = 0;          // |<0|I|1>| at the degeneracy point
  double f_degeneracy = 0;
};

// Locates the gap minimum by golden-section search inside [f_lo, f_hi]
// (tolerance in flux) and evaluates I_p there.
TwoLevelModel two_level_reduction(
    const std::function<CircuitHamiltonian(double)>& build, double f_lo,
    double f_hi, double f_tol = 1e-7);

// eps(f) = 2 I_p (f - 1/2) Phi0 / hbar
double two_level_epsilon_rad_s(double ip_nA, double f);
// sqrt(eps^2 + Delta^2)
double two_level_gap_rad_s(double eps_rad_s, double delta_rad_s);

// Gap and I_p evaluated directly at f = 1/2; valid for the bare ring, whose
// flux-reflection symmetry pins the degeneracy there.
TwoLevelModel qubit_degeneracy_point(const DeviceParams& p, QubitId which,
                                     std::optional<double> l_override_pH = {},
                                     const BuildOptions& opts = {});

}  // namespace fluxkit
