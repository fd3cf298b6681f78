// OpenMP kernels against their serial references.

#include <benchmark/benchmark.h>

#include "genset/fourier_ls.hpp"
#include "genset/korobov.hpp"
#include "genset/pointsets.hpp"
#include "genset/probabilistic.hpp"
#include "genset/search.hpp"

using namespace genset;

namespace {

struct AssemblyCase {
  NodeList nodes;
  IndexSet J;
};

AssemblyCase assembly_case(std::size_t n) {
  const int d = 3;
  const auto seq = SigmaSequence::korobov(KorobovParams::unweighted(d, 2.0));
  return {build_nodes(continuous_trial(d, 1, 0), n), take_first_m(seq, n / 4)};
}

WeightedSystem moment_system() {
  const auto seq = SigmaSequence::korobov(KorobovParams::unweighted(2, 2.0));
  return WeightedSystem::from_index_set(take_first_m(seq, 200), 20, 64);
}

CVector unit_vector(std::size_t n) {
  CVector t = CVector::Ones(static_cast<Eigen::Index>(n));
  return t / t.norm();
}

void BM_assemble(benchmark::State& state) {
  const auto c = assembly_case(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(assemble(c.nodes, c.J));
}

void BM_assemble_serial(benchmark::State& state) {
  const auto c = assembly_case(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_serial(c.nodes, c.J));
}

void BM_mc_moments(benchmark::State& state) {
  const auto sys = moment_system();
  const CVector t = unit_vector(sys.rows());
  for (auto _ : state) benchmark::DoNotOptimize(mc_moments(sys, t, 200, 3, Moment::A_star));
}

void BM_mc_moments_serial(benchmark::State& state) {
  const auto sys = moment_system();
  const CVector t = unit_vector(sys.rows());
  for (auto _ : state) benchmark::DoNotOptimize(mc_moments_serial(sys, t, 200, 3, Moment::A_star));
}

void BM_exhaustive(benchmark::State& state) {
  const auto sys = moment_system();
  const CVector t = unit_vector(sys.rows());
  for (auto _ : state) benchmark::DoNotOptimize(exhaustive_rational_moments(sys, t, 31, Moment::A_star));
}

void BM_exhaustive_serial(benchmark::State& state) {
  const auto sys = moment_system();
  const CVector t = unit_vector(sys.rows());
  for (auto _ : state) benchmark::DoNotOptimize(exhaustive_rational_moments_serial(sys, t, 31, Moment::A_star));
}

}  // namespace

BENCHMARK(BM_assemble)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_assemble_serial)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_mc_moments)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_mc_moments_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_exhaustive)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_exhaustive_serial)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
