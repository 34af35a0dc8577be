#include <benchmark/benchmark.h>

#include <random>

#include "dwgeom/dedonder_weyl.hpp"
#include "dwgeom/phase_space.hpp"
#include "dwgeom/theory.hpp"

using namespace dwgeom;

namespace {

Form random_form(int dim, int degree, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Form f(dim, degree);
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << dim); ++m)
    if (std::popcount(m) == degree) f.add(m, unit(rng));
  return f;
}

void BM_wedge_dense(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const int dim = static_cast<int>(state.range(0));
  Form a = random_form(dim, 2, rng);
  Form b = random_form(dim, 2, rng);
  for (auto _ : state) benchmark::DoNotOptimize(wedge(a, b));
}
BENCHMARK(BM_wedge_dense)->Arg(8)->Arg(12);

void BM_contract_omega(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  ChartSpec spec(n, 1);
  Form omega = omega_form(spec);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<Multivector> zs;
  for (int mu = 0; mu < n; ++mu) {
    Multivector z(spec.dim(), 1);
    for (int k = 0; k < spec.dim(); ++k) z.add(std::uint64_t{1} << k, unit(rng));
    zs.push_back(std::move(z));
  }
  Multivector X = wedge_all(zs);
  for (auto _ : state) benchmark::DoNotOptimize(contract(X, omega));
}
BENCHMARK(BM_contract_omega)->Arg(1)->Arg(2)->Arg(3);

void BM_build_nvector(benchmark::State& state) {
  Theory th = state.range(0) == 1 ? make_oscillator() : make_free_scalar(1.0);
  ChartSpec spec = th.chart();
  ChartPoint pt = ChartPoint::zero(spec);
  pt.q[0] = 0.7;
  for (double& v : pt.pmom) v = 0.4;
  Gauge g = Gauge::zero(th.n, th.N);
  for (auto _ : state) benchmark::DoNotOptimize(build_hamiltonian_nvector(th.H, pt, g));
}
BENCHMARK(BM_build_nvector)->Arg(1)->Arg(2);

void BM_verify_defining_relation(benchmark::State& state) {
  Theory th = make_sine_gordon();
  ChartSpec spec = th.chart();
  ChartPoint pt = ChartPoint::zero(spec);
  pt.q[0] = 0.3;
  pt.pmom = {0.5, -0.2};
  HamiltonianMultivector X = build_hamiltonian_nvector(th.H, pt, Gauge::zero(2, 1));
  for (auto _ : state) benchmark::DoNotOptimize(verify_defining_relation(th.H, X, pt));
}
BENCHMARK(BM_verify_defining_relation);

}  // namespace

BENCHMARK_MAIN();
