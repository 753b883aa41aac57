#include <benchmark/benchmark.h>

#include <cmath>

#include "cavtun/grid.hpp"
#include "cavtun/observables.hpp"
#include "cavtun/sector.hpp"

namespace {

constexpr double pi = 3.14159265358979323846;

cavtun::SystemParams bench_params() {
  return cavtun::make_params(1.0, 0.0, 2.0, pi / 4, -pi / 4);
}

void BM_PropagatorAnalytic(benchmark::State& state) {
  auto p = bench_params();
  double t = 0.0;
  for (auto _ : state) {
    t += 0.1;
    benchmark::DoNotOptimize(cavtun::propagator_analytic(p, 26, t));
  }
}
BENCHMARK(BM_PropagatorAnalytic);

void BM_PropagatorOracle(benchmark::State& state) {
  auto p = bench_params();
  double t = 0.0;
  for (auto _ : state) {
    t += 0.1;
    benchmark::DoNotOptimize(cavtun::propagator_oracle(p, 26, t));
  }
}
BENCHMARK(BM_PropagatorOracle);

void BM_SectorEigenbasisEvolve(benchmark::State& state) {
  auto p = bench_params();
  auto basis = cavtun::sector_eigenbasis(p, 26);
  Eigen::Vector4cd a0(0.5, 0.5, 0.5, 0.5);
  double t = 0.0;
  for (auto _ : state) {
    t += 0.1;
    benchmark::DoNotOptimize(cavtun::evolve_in_basis(basis, t, a0));
  }
}
BENCHMARK(BM_SectorEigenbasisEvolve);

// One full coherent-field sample: evolve every populated sector and reduce.
void BM_CoherentSample(benchmark::State& state) {
  auto p = bench_params();
  cavtun::FieldSpec field;
  field.kind = cavtun::FieldSpec::Kind::coherent;
  field.alpha = 5.0;
  auto s0 = cavtun::initial_state(field, cavtun::WellState::right,
                                  cavtun::InternalState::excited);
  double t = 0.0;
  for (auto _ : state) {
    t += 0.5;
    auto st = cavtun::evolve(s0, p, t);
    benchmark::DoNotOptimize(cavtun::reduce_external(st));
  }
}
BENCHMARK(BM_CoherentSample);

void BM_SolveDoubleWell(benchmark::State& state) {
  cavtun::DoubleWellSpec spec;
  spec.points = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(cavtun::solve_double_well(spec));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SolveDoubleWell)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

// Split-operator cost per unit physical time on the production grid.
void BM_GridPropagation(benchmark::State& state) {
  cavtun::DoubleWellSpec spec;
  static auto spectral = cavtun::solve_double_well(spec);
  auto coupling = cavtun::coupling_from_angles(0.01, 0.03, pi / 4, -pi / 4, 1,
                                               spectral);
  auto psi0 = cavtun::initial_doublet_state(spectral, cavtun::WellState::right,
                                            cavtun::InternalState::excited);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        cavtun::propagate_sector(spec, spectral, coupling, psi0, 10.0, 2));
  state.SetItemsProcessed(state.iterations() * 500); // 10.0 / dt 0.02
}
BENCHMARK(BM_GridPropagation)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
