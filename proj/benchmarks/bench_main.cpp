#include <benchmark/benchmark.h>

#include <vector>

#include "magpath/families.hpp"
#include "magpath/pathint.hpp"
#include "magpath/reference.hpp"
#include "magpath/splitstep.hpp"

using namespace magpath;

namespace {

void BM_SliceApply1D(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Grid g({Axis{-10, 10, n}});
  const SliceOperator op(g, harmonic_potential(1, 1.0, {0.0}), sinusoidal_vector_potential(1, 0.5, 1.0),
                         TimeSlicing(0.5, 16));
  auto psi = GaussianPacket{{0.0}, 1.0, {0.5}}.sample(g);
  for (auto _ : state) {
    psi = op.apply(psi);
    benchmark::DoNotOptimize(psi);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(n));
}
BENCHMARK(BM_SliceApply1D)->RangeMultiplier(4)->Range(256, 16384);

void BM_SliceApply2D(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Grid g({Axis{-8, 8, n}, Axis{-8, 8, n}});
  const SliceOperator op(g, free_potential(2), symmetric_gauge_potential(0.5), TimeSlicing(0.5, 16));
  auto psi = GaussianPacket{{0.0, 0.0}, 1.0, {0.5, 0.0}}.sample(g);
  for (auto _ : state) {
    psi = op.apply(psi);
    benchmark::DoNotOptimize(psi);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(n * n));
}
BENCHMARK(BM_SliceApply2D)->Arg(32)->Arg(64)->Arg(128);

void BM_AssembleAndDiagonalize(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Grid g({Axis{-10, 10, n}});
  const auto v = harmonic_potential(1, 1.0, {0.0});
  const auto a = sinusoidal_vector_potential(1, 0.5, 1.0);
  for (auto _ : state) {
    const HamiltonianEigensystem eig(assemble_hamiltonian(g, a, v, {Stencil::fourier, 4096}));
    benchmark::DoNotOptimize(eig.energies().data());
  }
}
BENCHMARK(BM_AssembleAndDiagonalize)->Arg(128)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_ExcisedRiemannStep(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  const GaussianPacket psi{{-0.3}, 1.0, {0.8}}, phi{{0.3}, 1.0, {-0.8}};
  AmplitudeProblem p;
  p.final_state = phi.state();
  p.initial_state = psi.state();
  p.potential = harmonic_potential(1, 1.0, {0.0});
  p.vector_potential = sinusoidal_vector_potential(1, 0.5, 1.0);
  p.time = 0.5;
  p.slices = k;
  const BoxSchedule s = BoxSchedule::radii(std::vector<double>{6.0}, 1e-3);
  const double eps = p.time / static_cast<double>(k);
  const double h = validate_schedule(s, k, eps)[0];
  AmplitudeOptions o;
  o.max_work = 1e9;
  for (auto _ : state) benchmark::DoNotOptimize(excised_riemann_sum(p, s.steps[0], h, o).value);
}
BENCHMARK(BM_ExcisedRiemannStep)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
