#pragma once

#include <optional>
#include <vector>

#include "fluxkit/circuits.hpp"
#include "fluxkit/coupler.hpp"
#include "fluxkit/coupled.hpp"
#include "fluxkit/semiclassical.hpp"

namespace fluxkit {

// 1/f^gamma flux noise, S(w) = A^2 (2 pi 1Hz / w)^gamma, amplitude at the
// 1 Hz pivot.
struct NoiseModel {
  double amplitude_Phi0_per_sqrtHz = 0;
  double gamma = 1.0;
  double omega_low_rad_s = 2.0 * 3.141592653589793 * 3e-3;  // 3 mHz cutoff
  double t_evol_s = 200e-9;

  double omega_low_t() const { return omega_low_rad_s * t_evol_s; }
  void validate() const;
};

// S(omega), Phi0^2/Hz
double psd_Phi0sq_per_Hz(const NoiseModel& m, double omega_rad_s);

// g_0(z) = sinc^2(z/2) (Ramsey), g_1(z) = sinc^2(z/4) sin^2(z/4) (echo)
double filter_function(int n, double z);

// eta_N = (2 pi)^(gamma-1) Int dz z^-gamma g_N(z); Ramsey integral starts at
// omega_low * t, echo at 0. Relative accuracy 1e-6.
double eta(int n, double gamma, double omega_low_t);

// 1/e dephasing rate: Gamma = [kappa A sqrt(eta_N)]^(2/(1+gamma))
double dephasing_rate_per_s(double kappa_rad_s_per_Phi0, const NoiseModel& m,
                            int n);

// Fermi golden rule: 1/T1_C = 2 |<e|I_C|g>|^2 S(omega01) / hbar^2
double t1_coupler_limit_s(double element_nA, const NoiseModel& m,
                          double omega01_rad_s);

// 1/T1 = 1/T1_C + 1/T1_Q
double t1_total_s(double t1_coupler_s, double t1_background_s);

// exp[-Gamma_other tau - (Gamma_phiC tau)^(1+gamma)]
double decay_envelope(double gamma_other_per_s, double gamma_phi_per_s,
                      double gamma, double tau_s);

// 1/e time of the combined envelope
double t2_time_s(double gamma_other_per_s, double gamma_phi_per_s, double gamma);

// Inverse of the dephasing model: from measured and background 1/e rates back
// to the noise amplitude.
double estimate_amplitude(double gamma_n_per_s, double gamma_other_per_s,
                          double kappa_rad_s_per_Phi0, double gamma, int n,
                          double omega_low_t);

// Inverse of the golden-rule model for the T1 channel.
double estimate_amplitude_from_t1(double t1_total_s, double t1_background_s,
                                  double element_nA, double omega01_rad_s,
                                  double gamma);

struct CoherenceBackgrounds {
  double t1_qubit_s = 3.5e-6;
  // 1/e dephasing backgrounds; default: T1-limited, 1/(2 T1_Q)
  std::optional<double> gamma0_other_per_s;
  std::optional<double> gamma1_other_per_s;

  double gamma0() const {
    return gamma0_other_per_s.value_or(1.0 / (2.0 * t1_qubit_s));
  }
  double gamma1() const {
    return gamma1_other_per_s.value_or(1.0 / (2.0 * t1_qubit_s));
  }
};

struct CoherencePoint {
  double f_c = 0;
  double delta_GHz = 0;
  double kappa_rad_s_per_Phi0 = 0;
  double element_nA = 0;
  double omega01_rad_s = 0;
  double t1_coupler_s = 0;  // infinity encoded as <= 0? no: +inf kept as-is
  double t1_total_s = 0;
  double t1_background_s = 0;
  double gamma0_per_s = 0;  // total Ramsey 1/e rate
  double gamma1_per_s = 0;  // total echo 1/e rate
  double gamma0_phi_per_s = 0;
  double gamma1_phi_per_s = 0;
  double t2_ramsey_s = 0;
  double t2_echo_s = 0;
};

struct CoherenceReport {
  std::vector<CoherencePoint> points;
  double eta0 = 0, eta1 = 0;
  CoherenceBackgrounds backgrounds;
};

struct CoherenceOptions {
  DeltaCurveOptions delta;
  CompositeOptions composite;
  double f_a = 0.0;  // spectator qubit bias
  int threads = 0;
};

// Full forward prediction for one qubit versus coupler bias.
CoherenceReport coherence_vs_coupler(const DeviceParams& p, QubitId which,
                                     const NoiseModel& noise,
                                     const std::vector<double>& f_c_grid,
                                     const CoherenceBackgrounds& backgrounds = {},
                                     const CoherenceOptions& opts = {});

// Sensitivity decomposition kappa = (eps keps + Delta kdel)/omega01.
double kappa_total(double eps_rad_s, double delta_rad_s, double kappa_eps,
                   double kappa_delta);

}  // namespace fluxkit
