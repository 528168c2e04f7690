#include <doctest.h>

#include <algorithm>

#include "fluxkit/coupler.hpp"
#include "test_util.hpp"

using namespace fluxkit;
using fluxkit::testing::rel_err;
using fluxkit::testing::table1_semiclassical;

namespace {

CouplerScanOptions fast() {
  CouplerScanOptions o;
  o.check_convergence = false;
  return o;
}

}  // namespace

TEST_SUITE("coupler") {

TEST_CASE("circulating current vanishes at f_C = 0 by symmetry") {
  DeviceParams p = table1_semiclassical();
  CirculatingCurrent cc = circulating_current(p, 0.0, fast());
  CHECK(std::abs(cc.slope_nA) < 1e-4);
  CHECK(std::abs(cc.op_nA) < 1e-4);
}

TEST_CASE("slope and operator methods agree pointwise") {
  DeviceParams p = table1_semiclassical();
  for (double f : {0.25, 0.4, 0.45}) {
    CirculatingCurrent cc = circulating_current(p, f, fast());
    CAPTURE(f);
    // < 1% of the ~700 nA maximum circulating current
    CHECK(std::abs(cc.slope_nA - cc.op_nA) < 7.0);
    CHECK(std::abs(cc.slope_nA - cc.op_nA) <
          0.01 * std::max(std::abs(cc.slope_nA), 1.0));
  }
}

TEST_CASE("current extrema reach about +-700 nA") {
  DeviceParams p = table1_semiclassical();
  double imax = 0;
  for (double f = 0.36; f <= 0.45; f += 0.005)
    imax = std::max(imax, circulating_current(p, f, fast()).slope_nA);
  CHECK(rel_err(imax, 700.0) < 0.05);
  // odd in f_C
  const double up = circulating_current(p, 0.4, fast()).slope_nA;
  const double down = circulating_current(p, -0.4, fast()).slope_nA;
  CHECK(std::abs(up + down) < 0.005 * std::abs(up));
}

TEST_CASE("effective inductance endpoints") {
  DeviceParams p = table1_semiclassical();
  const double inv0 = effective_inductance_inv_pH(p, 0.0, fast());
  const double inv5 = effective_inductance_inv_pH(p, 0.5, fast());
  // most negative L_eff at coupler degeneracy, about -48 pH
  CHECK(rel_err(1.0 / inv5, -48.0) < 0.10);
  // stiffest positive response at f_C = 0; the quantized Table-1 coupler
  // gives ~935 pH there (see the acceptance suite for the full discussion)
  CHECK(1.0 / inv0 > 850.0);
  CHECK(1.0 / inv0 < 1180.0);
  // even in f_C
  const double invm = effective_inductance_inv_pH(p, -0.25, fast());
  const double invp = effective_inductance_inv_pH(p, 0.25, fast());
  CHECK(rel_err(invm, invp) < 0.005);
}

TEST_CASE("region map: labels, zero crossings, symmetry") {
  DeviceParams p = table1_semiclassical();
  CouplerScanOptions opts = fast();
  const std::vector<double> grid = make_grid(-0.55, 0.55, 0.01);
  CouplerResponse resp = coupling_region_map(p, grid, opts);
  REQUIRE(resp.points.size() == grid.size());

  auto at = [&](double f) -> const CouplerResponsePoint& {
    for (const auto& pt : resp.points)
      if (std::abs(pt.f_c - f) < 1e-9) return pt;
    REQUIRE(false);
    return resp.points.front();
  };
  CHECK(at(0.0).region == "AF");
  CHECK(at(0.5).region == "FM");
  CHECK(at(-0.5).region == "FM");

  // zero crossing near 0.402, one on each side
  REQUIRE(resp.zero_crossings.size() == 2);
  CHECK(std::abs(resp.zero_crossings[1] - 0.402) < 0.01);
  CHECK(std::abs(resp.zero_crossings[0] + resp.zero_crossings[1]) < 2e-3);

  // invLeff even, current odd on the sampled grid
  const size_t n = resp.points.size();
  double imax = 0;
  for (const auto& pt : resp.points)
    imax = std::max(imax, std::abs(pt.i_slope_nA));
  for (size_t i = 0; i < n / 2; ++i) {
    const auto& a = resp.points[i];
    const auto& b = resp.points[n - 1 - i];
    CHECK(std::abs(a.i_slope_nA + b.i_slope_nA) < 0.005 * imax);
    CHECK(std::abs(a.inv_l_eff_per_pH - b.inv_l_eff_per_pH) <
          0.005 * std::abs(a.inv_l_eff_per_pH) + 1e-8);
  }

  // both current methods agree along the whole grid
  for (const auto& pt : resp.points)
    CHECK(std::abs(pt.i_slope_nA - pt.i_op_nA) < 0.01 * imax);
}

TEST_CASE("ground-state energy is periodic over one flux quantum") {
  DeviceParams p = table1_semiclassical();
  const double e0 = coupler_ground_energy_GHz(p, 0.3);
  const double e1 = coupler_ground_energy_GHz(p, 1.3);
  CHECK(std::abs(e0 - e1) < 2e-6);
}

TEST_CASE("coarse grid over a full period warns about missed crossings") {
  DeviceParams p = table1_semiclassical();
  // two same-sign samples one period apart bracket nothing
  CouplerResponse resp = coupling_region_map(p, {0.0, 1.0}, fast());
  CHECK(!resp.warnings.empty());
}

}  // TEST_SUITE
