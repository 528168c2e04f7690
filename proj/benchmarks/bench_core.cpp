#include <benchmark/benchmark.h>

#include "fluxkit/circuits.hpp"
#include "fluxkit/coupler.hpp"
#include "fluxkit/noise.hpp"
#include "fluxkit/operators.hpp"

using namespace fluxkit;

namespace {

DeviceParams table1() {
  DeviceParams p;
  p.j_c_uA_per_um2 = 2.78;
  p.s_c_fF_per_um2 = 50;
  p.qubit_a = {78, 206, 53, 115};
  p.qubit_b = {78, 209, 53, 115};
  p.i0_coupler_nA = 727;
  p.l_coupler_pH = 467;
  p.m_pH = 39;
  return p;
}

void bm_eigendecompose(benchmark::State& state) {
  const int n = int(state.range(0));
  RealMatrix a = RealMatrix::Random(n, n);
  HermitianOperator h(RealMatrix(a + a.transpose()));
  for (auto _ : state) {
    EigenSolution es = eigendecompose(h, std::min(n, 8));
    benchmark::DoNotOptimize(es.energies(0));
  }
}
BENCHMARK(bm_eigendecompose)->Arg(256)->Arg(512)->Arg(1056)->Unit(benchmark::kMillisecond);

void bm_coupler_build(benchmark::State& state) {
  DeviceParams p = table1();
  BuildOptions opts;
  opts.check_convergence = false;
  for (auto _ : state) {
    CircuitHamiltonian ch = build_coupler(p, 0.37, opts);
    benchmark::DoNotOptimize(ch.hamiltonian.dim());
  }
}
BENCHMARK(bm_coupler_build)->Unit(benchmark::kMillisecond);

void bm_qubit_build_and_gap(benchmark::State& state) {
  DeviceParams p = table1();
  BuildOptions opts;
  opts.check_convergence = false;
  for (auto _ : state) {
    TwoLevelModel m = qubit_degeneracy_point(p, QubitId::B, {}, opts);
    benchmark::DoNotOptimize(m.delta_GHz);
  }
}
BENCHMARK(bm_qubit_build_and_gap)->Unit(benchmark::kMillisecond);

void bm_effective_inductance(benchmark::State& state) {
  DeviceParams p = table1();
  CouplerScanOptions opts;
  opts.check_convergence = false;
  for (auto _ : state) {
    benchmark::DoNotOptimize(effective_inductance_inv_pH(p, 0.45, opts));
  }
}
BENCHMARK(bm_effective_inductance)->Unit(benchmark::kMillisecond);

void bm_eta_quadrature(benchmark::State& state) {
  const double wlt = 3.77e-9;
  for (auto _ : state) {
    benchmark::DoNotOptimize(eta(0, 0.91, wlt));
    benchmark::DoNotOptimize(eta(1, 0.91, wlt));
  }
}
BENCHMARK(bm_eta_quadrature)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
