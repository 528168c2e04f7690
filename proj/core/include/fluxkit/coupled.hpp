#pragma once

#include <array>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "fluxkit/circuits.hpp"

namespace fluxkit {

struct CompositeOptions {
  std::array<int, 3> retained{5, 5, 5};  // qubit A, qubit B, coupler
  bool check_convergence = true;
  double tolerance_GHz = 1e-5;  // 10 kHz on the lowest transitions
  BuildOptions qubit_opts;
  BuildOptions coupler_opts;
};

// Qubit A + qubit B + coupler assembled in the product of bare eigenbases.
// interaction: M~_A I_A I_C + M~_B I_B I_C plus the geometric direct term
// (M~_A M~_B / L_C) I_A I_B from eliminating the shared-inductor network.
struct CompositeSystem {
  std::array<int, 3> retained{};
  Vector bare_a, bare_b, bare_c;  // bare energies (GHz)
  Matrix i_a, i_b, i_c;           // current ops in the truncated eigenbases (nA)
  double m_tilde_a_pH = 0, m_tilde_b_pH = 0, m_direct_pH = 0;
  HermitianOperator hamiltonian;
  FluxPoint flux;
  ConvergenceReport convergence;

  int dim() const { return retained[0] * retained[1] * retained[2]; }
  int product_index(int na, int nb, int nc) const {
    return (na * retained[1] + nb) * retained[2] + nc;
  }
};

CompositeSystem build_composite(const DeviceParams& p, const FluxPoint& flux,
                                const CompositeOptions& opts = {});

// Caches bare subsystem spectra keyed by flux so sweeps reuse them.
class CompositeBuilder {
 public:
  CompositeBuilder(DeviceParams p, CompositeOptions opts = {});
  CompositeSystem at(const FluxPoint& flux) const;
  const DeviceParams& params() const { return params_; }
  const CompositeOptions& options() const { return opts_; }

 private:
  struct Bare {
    Vector energies;
    Matrix current;
  };
  const Bare& bare(int subsystem, double f) const;  // 0=A, 1=B, 2=coupler

  DeviceParams params_;
  CompositeOptions opts_;
  mutable std::array<std::map<double, Bare>, 3> cache_;
  // truncation contract certified once per subsystem, then reused
  mutable std::array<bool, 3> bare_checked_{false, false, false};
  mutable std::mutex mutex_;
  double m_tilde_a_ = 0, m_tilde_b_ = 0, m_direct_ = 0;

  friend CompositeSystem build_composite(const DeviceParams&, const FluxPoint&,
                                         const CompositeOptions&);
};

struct TransitionPoint {
  double flux = 0;
  int branch_index = 0;
  double freq_GHz = 0;
  std::string tag;  // qubit-A-like | qubit-B-like | coupler-like | multi | hybridized
};

struct TransitionSpectrum {
  char axis = 'a';
  std::vector<double> grid;
  int n_branches = 0;
  std::vector<TransitionPoint> points;  // grid-major, branch-minor
  double freq(int point, int branch) const {
    return points[point * n_branches + branch].freq_GHz;
  }
};

struct SweepOptions {
  int n_branches = 4;
  int threads = 0;
};

// Ground-state transition frequencies along one flux axis ('a' | 'b' | 'c'),
// the other two held at `fixed`.
TransitionSpectrum spectroscopy_sweep(const CompositeBuilder& builder, char axis,
                                      const std::vector<double>& grid,
                                      FluxPoint fixed,
                                      const SweepOptions& opts = {});

struct ExtractedSplitting {
  double two_j_rad_s = 0;
  double resonance_flux = 0;
  bool resolved = true;        // false: below the grid resolution floor
  double floor_rad_s = 0;
};

// Minimum distance between the two hybridizing branches (1 and 2), refined by
// a local quadratic fit of the squared distance over the 5 nearest points.
ExtractedSplitting extract_splitting(const TransitionSpectrum& spectrum);

// Adaptive wrapper: coarse scan then refinement around the branch-distance
// minimum; returns |J| = splitting/2 in rad/s.
ExtractedSplitting splitting_at(const CompositeBuilder& builder, char axis,
                                double center, double halfwidth,
                                FluxPoint fixed, double resolution = 2e-4,
                                const SweepOptions& opts = {});

struct T1Element {
  double element_nA = 0;   // |<e| I_C |g>|
  double omega01_rad_s = 0;
  int state_index = 0;
  double overlap = 0;      // amplitude overlap with the bare B-like product state
};

// Coupler-current matrix element between the composite ground state and the
// first qubit-B-like excited state.
T1Element t1_matrix_element(const CompositeSystem& system);

}  // namespace fluxkit
