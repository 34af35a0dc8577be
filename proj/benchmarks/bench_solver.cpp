#include <benchmark/benchmark.h>

#include "dwgeom/expr.hpp"
#include "dwgeom/field_solver.hpp"

using namespace dwgeom;

namespace {

void BM_field_step(benchmark::State& state) {
  Theory th = state.range(1) == 0 ? make_free_scalar(1.0) : make_sine_gordon();
  GridSpec g;
  g.Nx = static_cast<int>(state.range(0));
  g.dx = 2.0 * M_PI / g.Nx;
  g.dt = 0.25 * g.dx;
  g.T = 1.0;
  FieldState s = plane_wave_state(g, 0.5, 1, 1.0);
  for (auto _ : state) {
    s = step(th, s, g);
    benchmark::DoNotOptimize(s.phi.data());
  }
  state.SetItemsProcessed(state.iterations() * g.Nx);
}
BENCHMARK(BM_field_step)->Args({256, 0})->Args({1024, 0})->Args({256, 1});

void BM_leapfrog_oracle(benchmark::State& state) {
  Theory th = make_free_scalar(1.0);
  GridSpec g;
  g.Nx = 256;
  g.dx = 2.0 * M_PI / g.Nx;
  g.dt = 0.25 * g.dx;
  g.T = 1.0;
  FieldState s0 = plane_wave_state(g, 0.5, 1, th.mass);
  for (auto _ : state) benchmark::DoNotOptimize(euler_lagrange_oracle(th, s0, g, 64));
  state.SetItemsProcessed(state.iterations() *
                          static_cast<int>(std::llround(g.T / g.dt)) * g.Nx);
}
BENCHMARK(BM_leapfrog_oracle);

void BM_expr_eval(benchmark::State& state) {
  PotentialExpr e = PotentialExpr::parse("0.5*q1^2 + 0.1*q1^4 - cos(q1)", {"q1"});
  double at[1] = {0.37};
  for (auto _ : state) benchmark::DoNotOptimize(e.eval(at));
}
BENCHMARK(BM_expr_eval);

void BM_expr_parse(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(
        PotentialExpr::parse("0.5*q1^2 + 0.1*q1^4 - cos(q1)*exp(-q1^2/2)", {"q1"}));
}
BENCHMARK(BM_expr_parse);

}  // namespace
