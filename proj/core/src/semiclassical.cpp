#include "fluxkit/semiclassical.hpp"

#include <cmath>

#include "fluxkit/constants.hpp"
#include "fluxkit/parallel.hpp"

namespace fluxkit {

RenormalizedInductances galvanic_to_mutual(double l_a_pH, double l_b_pH,
                                           double m_pH) {
  if (!(l_a_pH * l_b_pH > m_pH * m_pH))
    throw ValidationError(
        "galvanic_to_mutual: unphysical network, L_A L_B <= M^2");
  RenormalizedInductances r;
  r.l_tilde_a_pH = l_a_pH - m_pH * m_pH / l_b_pH;
  r.l_tilde_b_pH = l_b_pH - m_pH * m_pH / l_a_pH;
  r.m_tilde_pH = m_pH * (1.0 - m_pH * m_pH / (l_a_pH * l_b_pH));
  return r;
}

double direct_coupling_rad_s(double m_tilde_pH, double ip_a_nA, double ip_b_nA) {
  return units::mutual_GHz * m_tilde_pH * ip_a_nA * ip_b_nA *
         units::GHz_to_rad_s;
}

CouplingResult mediated_coupling(double m_tilde_pH, double inv_l_eff_per_pH,
                                 double ip_a_nA, double ip_b_nA) {
  CouplingResult r;
  r.m_tilde_pH = m_tilde_pH;
  r.inv_l_eff_per_pH = inv_l_eff_per_pH;
  r.ip_a_nA = ip_a_nA;
  r.ip_b_nA = ip_b_nA;
  r.m_eff_pH = m_tilde_pH * m_tilde_pH * inv_l_eff_per_pH;
  r.j_rad_s = units::mutual_GHz * r.m_eff_pH * ip_a_nA * ip_b_nA *
              units::GHz_to_rad_s;
  return r;
}

FluxOffset qubit_flux_offset(double m_tilde_pH, double i_circ_nA, double ip_nA) {
  FluxOffset o;
  // M~ I / Phi0, with M in pH and I in nA
  o.df_Phi0 = m_tilde_pH * 1e-12 * i_circ_nA * 1e-9 / units::flux_quantum_Wb;
  o.deps_rad_s = 2.0 * units::mutual_GHz * m_tilde_pH * ip_nA * i_circ_nA *
                 units::GHz_to_rad_s;
  return o;
}

double loaded_inductance_pH(double l_q_pH, double m_pH, double inv_l_eff_per_pH) {
  return l_q_pH - m_pH * m_pH * inv_l_eff_per_pH;
}

std::vector<DeltaCurvePoint> delta_vs_coupler(const DeviceParams& p,
                                              QubitId which,
                                              const std::vector<double>& f_c_grid,
                                              DeltaCurveOptions opts) {
  p.validate();
  const double l_q = p.qubit(which).l_q_pH;
  std::vector<DeltaCurvePoint> out(f_c_grid.size());

  // convergence sentinel: one checked qubit build at the first grid point
  {
    const double inv_l0 =
        effective_inductance_inv_pH(p, f_c_grid.front(), opts.coupler);
    BuildOptions checked = opts.qubit;
    checked.check_convergence = true;
    (void)qubit_degeneracy_point(p, which,
                                 loaded_inductance_pH(l_q, p.m_pH, inv_l0),
                                 checked);
  }

  BuildOptions fast = opts.qubit;
  fast.check_convergence = false;
  CouplerScanOptions cfast = opts.coupler;
  cfast.check_convergence = false;
  parallel_for(int(f_c_grid.size()), opts.threads, [&](int i) {
    DeltaCurvePoint pt;
    pt.f_c = f_c_grid[i];
    pt.inv_l_eff_per_pH = effective_inductance_inv_pH(p, pt.f_c, cfast);
    pt.l_loaded_pH = loaded_inductance_pH(l_q, p.m_pH, pt.inv_l_eff_per_pH);
    TwoLevelModel m = qubit_degeneracy_point(p, which, pt.l_loaded_pH, fast);
    pt.delta_GHz = m.delta_GHz;
    pt.ip_nA = m.ip_nA;
    out[i] = pt;
  });

  // kappa = d Delta / d Phi_C by centered difference on the grid
  const auto n = out.size();
  for (size_t i = 0; i < n; ++i) {
    size_t lo = i > 0 ? i - 1 : i;
    size_t hi = i + 1 < n ? i + 1 : i;
    if (hi == lo) continue;
    const double ddelta = out[hi].delta_GHz - out[lo].delta_GHz;
    const double df = out[hi].f_c - out[lo].f_c;
    out[i].kappa_rad_s_per_Phi0 = ddelta / df * units::GHz_to_rad_s;
  }
  return out;
}

}  // namespace fluxkit
