#pragma once

#include <string>
#include <vector>

#include "fluxkit/circuits.hpp"

namespace fluxkit {

// Slope method: centered difference of E0 over flux, Richardson-extrapolated.
// Operator method: <g| I |g>.
struct CirculatingCurrent {
  double slope_nA = 0;
  double op_nA = 0;
};

struct CouplerResponsePoint {
  double f_c = 0;
  double e0_GHz = 0;
  double i_slope_nA = 0;
  double i_op_nA = 0;
  double inv_l_eff_per_pH = 0;
  std::string region;  // "AF" | "FM" | "zero-crossing"
};

struct CouplerResponse {
  std::vector<CouplerResponsePoint> points;
  std::vector<double> zero_crossings;  // bisection-refined flux locations
  std::vector<std::string> warnings;
};

struct CouplerScanOptions {
  int levels = 70;
  bool check_convergence = true;  // applied at the scan sentinels
  double h1 = 1e-4;   // first-derivative step (Phi0)
  double h2 = 5e-4;   // second-derivative step (Phi0)
  int threads = 0;    // 0 = hardware concurrency
};

double coupler_ground_energy_GHz(const DeviceParams& p, double f_c,
                                 int levels = 70, bool check = false);

CirculatingCurrent circulating_current(const DeviceParams& p, double f_c,
                                       const CouplerScanOptions& opts = {});

// 1/L_eff [1/pH] = d<I>/dPhi_C of the slope-method current.
double effective_inductance_inv_pH(const DeviceParams& p, double f_c,
                                   const CouplerScanOptions& opts = {});

// Full sampled response with AF/FM/zero-crossing labels; crossings located
// by bisection to 1e-4 Phi0 and attached to the nearest grid point.
CouplerResponse coupling_region_map(const DeviceParams& p,
                                    const std::vector<double>& flux_grid,
                                    const CouplerScanOptions& opts = {});

std::vector<double> make_grid(double start, double stop, double step);

}  // namespace fluxkit
