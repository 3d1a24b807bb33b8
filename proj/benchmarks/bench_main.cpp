#include <benchmark/benchmark.h>

#include <random>

#include "gpe2d/minimize.hpp"
#include "gpe2d/thomasfermi.hpp"

using namespace gpe2d;

namespace {

Fields random_fields(const BasisPtr& b) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  Fields f{CoefficientField(b, 1.0), CoefficientField(b, 1.0)};
  for (auto& c : f) {
    for (int a = 0; a < b->L1(); ++a)
      for (int d = 0; d < b->L2(); ++d) c.coeffs()(a, d) = g(rng) / (1.0 + a + d);
    c = normalize(c);
  }
  return f;
}

SystemParams coupled() {
  SystemParams p;
  p.theta = {{{400.0, 100.0}, {100.0, 150.0}}};
  return p;
}

void BM_QuadratureRule(benchmark::State& st) {
  const BasisSpec spec{int(st.range(0)), 1.0};
  for (auto _ : st) benchmark::DoNotOptimize(gauss_hermite_rule(spec));
}
BENCHMARK(BM_QuadratureRule)->Arg(16)->Arg(32)->Arg(64);

void BM_EnergyAndGradient(benchmark::State& st) {
  const int L = int(st.range(0));
  const auto b = make_basis({L, 1.0}, {L, 1.0});
  const DiscreteEnergy en(b, coupled());
  const auto f = random_fields(b);
  for (auto _ : st) {
    const auto s = en.sample(f);
    benchmark::DoNotOptimize(en.evaluate(f, s));
    benchmark::DoNotOptimize(en.gradient(f, s));
  }
}
BENCHMARK(BM_EnergyAndGradient)->Arg(16)->Arg(32)->Arg(40);

void BM_NewtonStep(benchmark::State& st) {
  const int L = int(st.range(0));
  const auto b = make_basis({L, 1.0}, {L, 1.0});
  const DiscreteEnergy en(b, coupled());
  const auto f = random_fields(b);
  const auto lam = update_multiplier(en, f);
  for (auto _ : st) benchmark::DoNotOptimize(newton_step(en, f, lam, SolverConfig{}));
}
BENCHMARK(BM_NewtonStep)->Arg(16)->Arg(32);

void BM_GroundStateModerate(benchmark::State& st) {
  const auto b = make_basis({24, 1.0}, {24, 1.0});
  SystemParams p;
  p.theta = {{{100.0, 20.0}, {20.0, 50.0}}};
  for (auto _ : st) benchmark::DoNotOptimize(solve_ground(p, b, SolverConfig{}));
}
BENCHMARK(BM_GroundStateModerate)->Unit(benchmark::kMillisecond);

void BM_TfSolveMu(benchmark::State& st) {
  SystemParams p = coupled();
  p.theta[1][1] = 200.0;
  p.centers = {{{2.0, 0.0}, {-2.0, 0.0}}};
  for (auto _ : st) benchmark::DoNotOptimize(tf_solve_mu(p));
}
BENCHMARK(BM_TfSolveMu)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
