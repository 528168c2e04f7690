#include "fluxkit/coupler.hpp"

#include <algorithm>
#include <cmath>

#include "fluxkit/constants.hpp"
#include "fluxkit/parallel.hpp"

namespace fluxkit {

namespace {

double richardson(double coarse, double fine) { return (4.0 * fine - coarse) / 3.0; }

double slope_current_nA(const DeviceParams& p, double f, double h, int levels) {
  auto e0 = [&](double x) { return coupler_ground_energy_GHz(p, x, levels); };
  const double d_h = (e0(f + h) - e0(f - h)) / (2.0 * h);
  const double d_h2 = (e0(f + h / 2) - e0(f - h / 2)) / h;
  return units::current_nA_per_GHz_Phi0 * richardson(d_h, d_h2);
}

}  // namespace

double coupler_ground_energy_GHz(const DeviceParams& p, double f_c, int levels,
                                 bool check) {
  BuildOptions opts;
  opts.levels = {levels};
  opts.check_convergence = check;
  CircuitHamiltonian ch = build_coupler(p, f_c, opts);
  return eigendecompose(ch.hamiltonian, 1).energies(0);
}

CirculatingCurrent circulating_current(const DeviceParams& p, double f_c,
                                       const CouplerScanOptions& opts) {
  BuildOptions bopts;
  bopts.levels = {opts.levels};
  bopts.check_convergence = opts.check_convergence;
  CircuitHamiltonian ch = build_coupler(p, f_c, bopts);
  EigenSolution es = eigendecompose(ch.hamiltonian, 1);

  CirculatingCurrent out;
  const Matrix iexp =
      es.states.adjoint() * ch.current_op.dense_complex() * es.states;
  out.op_nA = iexp(0, 0).real();
  out.slope_nA = slope_current_nA(p, f_c, opts.h1, opts.levels);
  return out;
}

double effective_inductance_inv_pH(const DeviceParams& p, double f_c,
                                   const CouplerScanOptions& opts) {
  auto cur = [&](double f) { return slope_current_nA(p, f, opts.h1, opts.levels); };
  const double h = opts.h2;
  const double d_h = (cur(f_c + h) - cur(f_c - h)) / (2.0 * h);
  const double d_h2 = (cur(f_c + h / 2) - cur(f_c - h / 2)) / h;
  return units::inv_pH_per_nA_Phi0 * richardson(d_h, d_h2);
}

std::vector<double> make_grid(double start, double stop, double step) {
  if (!(step > 0) || !(stop >= start))
    throw ValidationError("make_grid: need stop >= start and step > 0");
  std::vector<double> g;
  const int n = int(std::floor((stop - start) / step + 0.5)) + 1;
  g.reserve(n);
  for (int i = 0; i < n; ++i) g.push_back(start + i * step);
  return g;
}

CouplerResponse coupling_region_map(const DeviceParams& p,
                                    const std::vector<double>& flux_grid,
                                    const CouplerScanOptions& opts) {
  if (flux_grid.size() < 2)
    throw ValidationError("coupling_region_map: grid needs at least 2 points");

  CouplerResponse out;
  out.points.resize(flux_grid.size());

  // convergence sentinels: ends and middle
  {
    CouplerScanOptions probe = opts;
    probe.check_convergence = true;
    for (size_t i : {size_t(0), flux_grid.size() / 2, flux_grid.size() - 1}) {
      BuildOptions bopts;
      bopts.levels = {opts.levels};
      bopts.check_convergence = true;
      (void)build_coupler(p, flux_grid[i], bopts);
    }
  }

  CouplerScanOptions fast = opts;
  fast.check_convergence = false;
  parallel_for(int(flux_grid.size()), opts.threads, [&](int i) {
    const double f = flux_grid[i];
    CouplerResponsePoint pt;
    pt.f_c = f;
    pt.e0_GHz = coupler_ground_energy_GHz(p, f, opts.levels);
    CirculatingCurrent cc = circulating_current(p, f, fast);
    pt.i_slope_nA = cc.slope_nA;
    pt.i_op_nA = cc.op_nA;
    pt.inv_l_eff_per_pH = effective_inductance_inv_pH(p, f, fast);
    out.points[i] = std::move(pt);
  });

  // locate sign changes of 1/L_eff by bisection to 1e-4 Phi0
  for (size_t i = 0; i + 1 < out.points.size(); ++i) {
    double a = out.points[i].f_c, b = out.points[i + 1].f_c;
    double va = out.points[i].inv_l_eff_per_pH,
           vb = out.points[i + 1].inv_l_eff_per_pH;
    if (va == 0) out.zero_crossings.push_back(a);
    if (va * vb >= 0) continue;
    while (b - a > 1e-4) {
      const double m = 0.5 * (a + b);
      const double vm = effective_inductance_inv_pH(p, m, fast);
      if (va * vm <= 0) {
        b = m;
        vb = vm;
      } else {
        a = m;
        va = vm;
      }
    }
    out.zero_crossings.push_back(0.5 * (a + b));
  }

  for (auto& pt : out.points)
    pt.region = pt.inv_l_eff_per_pH > 0 ? "AF" : "FM";
  for (double zc : out.zero_crossings) {
    size_t nearest = 0;
    double dmin = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < out.points.size(); ++i) {
      const double d = std::abs(out.points[i].f_c - zc);
      if (d < dmin) {
        dmin = d;
        nearest = i;
      }
    }
    out.points[nearest].region = "zero-crossing";
  }

  const double span = flux_grid.back() - flux_grid.front();
  if (span >= 1.0 &&
      out.zero_crossings.size() < size_t(std::floor(span) * 2))
    out.warnings.push_back(
        "grid may be too coarse: found " +
        std::to_string(out.zero_crossings.size()) +
        " susceptibility zero crossings over " + std::to_string(span) +
        " periods (expected 2 per period)");
  return out;
}

}  // namespace fluxkit
