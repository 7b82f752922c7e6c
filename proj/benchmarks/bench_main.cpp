#include <benchmark/benchmark.h>

#include <gaah/bath.hpp>
#include <gaah/dynamics.hpp>
#include <gaah/oracle.hpp>
#include <gaah/resonance.hpp>

using namespace gaah;

namespace {

lattice::ModelParams chain(double a, double Delta, int N = 21) {
  lattice::ModelParams m;
  m.a = a;
  m.Delta = Delta;
  m.N = N;
  return m;
}

ComplexVector top_state(const lattice::ModelParams& m) {
  return lattice::highest_excited_state(lattice::diagonalize(lattice::build_hamiltonian(m)));
}

void BM_SelfEnergy(benchmark::State& state) {
  const bath::BathParams b;
  const std::complex<double> E(2.95, -5e-6);
  for (auto _ : state) benchmark::DoNotOptimize(bath::self_energy(b, E));
}
BENCHMARK(BM_SelfEnergy);

void BM_Determinant(benchmark::State& state) {
  const auto m = chain(0.0, 2.5, static_cast<int>(state.range(0)));
  const bath::BathParams b;
  for (auto _ : state) benchmark::DoNotOptimize(resonance::char_determinant(m, b, {2.95, -5e-6}));
}
BENCHMARK(BM_Determinant)->Arg(21)->Arg(55)->Arg(144);

void BM_FindPoles(benchmark::State& state) {
  const auto m = chain(0.0, 2.5);
  const bath::BathParams b;
  for (auto _ : state) benchmark::DoNotOptimize(resonance::find_poles(m, b));
}
BENCHMARK(BM_FindPoles)->Unit(benchmark::kMillisecond);

// Cost is dominated by the O(steps^2) history sum.
void BM_Evolve(benchmark::State& state) {
  const auto m = chain(0.0, 2.5);
  const bath::BathParams b;
  const ComplexVector v = top_state(m);
  const dynamics::TimeGrid grid{0.02, static_cast<std::size_t>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(dynamics::evolve(m, b, {v}, grid));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Evolve)->RangeMultiplier(2)->Range(2500, 20000)->Complexity()->Unit(benchmark::kMillisecond);

void BM_KernelTable(benchmark::State& state) {
  const bath::MemoryKernel f(bath::BathParams{});
  for (auto _ : state) benchmark::DoNotOptimize(dynamics::KernelTable(f, 0.02, 20001));
}
BENCHMARK(BM_KernelTable)->Unit(benchmark::kMillisecond);

void BM_OracleEvolve(benchmark::State& state) {
  const auto m = chain(0.0, 2.5, 7);
  const auto M = static_cast<std::size_t>(state.range(0));
  const auto db = oracle::discretize_bath(bath::BathParams{}, M, 80.0);
  const oracle::FullState init{top_state(m), ComplexVector::Zero(static_cast<Eigen::Index>(M))};
  for (auto _ : state) benchmark::DoNotOptimize(oracle::evolve_full(m, db, init, {0.05, 200}));
}
BENCHMARK(BM_OracleEvolve)->Arg(250)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
