#include <cmath>
#include <vector>

#include <benchmark/benchmark.h>

#include "rcmap/fock.hpp"
#include "rcmap/kernels.hpp"
#include "rcmap/redfield.hpp"

namespace {

using namespace rcmap;

spectral::Tabulated semicircle_table(int n) {
  std::vector<double> w(n), j(n);
  for (int i = 0; i < n; ++i) {
    w[i] = -1.0 + 2.0 * i / (n - 1);
    j[i] = 2.0 * std::sqrt(std::max(0.0, 1.0 - w[i] * w[i]));
  }
  return {w, j};
}

std::vector<double> probe_points(int m) {
  std::vector<double> p(m);
  for (int i = 0; i < m; ++i) p[i] = -0.9 + 1.8 * (i + 0.5) / m;
  return p;
}

GeneratorTerms demon_terms() {
  const auto model = fock::build_model(fock::ModelVariant::model3, {});
  const auto L = redfield::build_liouvillian(model, {});
  GeneratorTerms t = L.hamiltonian_terms();
  for (std::size_t nu = 0; nu < L.reservoirs(); ++nu) t += L.piece_terms(nu);
  return t;
}

void BM_cauchy_parallel(benchmark::State& s) {
  const auto table = semicircle_table(400);
  const auto pts = probe_points(static_cast<int>(s.range(0)));
  for (auto _ : s) benchmark::DoNotOptimize(kernels::cauchy_real(table, pts));
}

void BM_cauchy_reference(benchmark::State& s) {
  const auto table = semicircle_table(400);
  const auto pts = probe_points(static_cast<int>(s.range(0)));
  for (auto _ : s) benchmark::DoNotOptimize(kernels::cauchy_real_reference(table, pts, 1e-10));
}

void BM_superoperator_parallel(benchmark::State& s) {
  const auto t = demon_terms();
  for (auto _ : s) benchmark::DoNotOptimize(kernels::assemble_superoperator(t));
}

void BM_superoperator_reference(benchmark::State& s) {
  const auto t = demon_terms();
  for (auto _ : s) benchmark::DoNotOptimize(kernels::assemble_superoperator_reference(t));
}

}  // namespace

BENCHMARK(BM_cauchy_parallel)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_cauchy_reference)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_superoperator_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_superoperator_reference)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
