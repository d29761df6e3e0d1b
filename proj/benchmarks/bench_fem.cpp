#include "gbm/config.hpp"
#include "gbm/fem.hpp"
#include "gbm/linalg.hpp"
#include "gbm/mesh.hpp"
#include "gbm/scheme.hpp"

#include <benchmark/benchmark.h>

using namespace gbm;

namespace {

State bounds_state(const FemSpace &space) {
  return initial_state(space.mesh(), InitialConditions{}, 1.0);
}

} // namespace

static void BM_FemSpaceSetup(benchmark::State &state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto mesh = build_structured_mesh(n, n, 1.0, 1.0);
  for (auto _ : state) {
    FemSpace space(mesh);
    benchmark::DoNotOptimize(space.lumped_mass().m.data());
  }
  state.SetComplexityN(static_cast<benchmark::IterationCount>(mesh.num_nodes()));
}
BENCHMARK(BM_FemSpaceSetup)->Arg(20)->Arg(40)->Arg(80)->Complexity();

static void BM_VariableStiffness(benchmark::State &state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const FemSpace space(build_structured_mesh(n, n, 1.0, 1.0));
  const auto s = bounds_state(space);
  const auto p = bounds_params();
  for (auto _ : state) {
    const auto c = element_diffusivity(space.mesh(), s, p);
    auto a = space.stiffness(c);
    benchmark::DoNotOptimize(a.values().data());
  }
}
BENCHMARK(BM_VariableStiffness)->Arg(40)->Arg(80)->Arg(160);

static void BM_CgTumorSystem(benchmark::State &state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const FemSpace space(build_structured_mesh(n, n, 1.0, 1.0));
  const auto s = bounds_state(space);
  const Stepper stepper(space, bounds_params(), 0.01, SchemeVariant::ImexLumped);
  const auto [a, b] = stepper.tumor_system(s);
  CgOptions opt;
  opt.preconditioner = state.range(1) ? Preconditioner::Jacobi : Preconditioner::None;
  std::size_t iterations = 0;
  for (auto _ : state) {
    const auto r = cg_solve(a, b, opt);
    iterations = r.iterations;
    benchmark::DoNotOptimize(r.x.data());
  }
  state.counters["cg_iterations"] = static_cast<double>(iterations);
}
BENCHMARK(BM_CgTumorSystem)->Args({40, 0})->Args({40, 1})->Args({160, 0})->Args({160, 1});

static void BM_Step(benchmark::State &state) {
  const FemSpace space(build_structured_mesh(40, 40, 1.0, 1.0));
  const auto s = bounds_state(space);
  const auto variant = static_cast<SchemeVariant>(state.range(0));
  const Stepper stepper(space, bounds_params(), 0.01, variant);
  for (auto _ : state) {
    auto r = stepper.step(s);
    benchmark::DoNotOptimize(r.state.T.data());
  }
  state.SetLabel(std::string(to_string(variant)));
}
BENCHMARK(BM_Step)
    ->Arg(static_cast<int>(SchemeVariant::ImexLumped))
    ->Arg(static_cast<int>(SchemeVariant::ExplicitLumped))
    ->Arg(static_cast<int>(SchemeVariant::ImexConsistent));

static void BM_SpmvThreads(benchmark::State &state) {
  const FemSpace space(build_structured_mesh(200, 200, 1.0, 1.0));
  const auto &a = space.unit_stiffness();
  const DenseVector x(space.num_nodes(), 1.0);
  DenseVector y(space.num_nodes());
  const auto threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) {
    spmv(a, x, y, threads);
    benchmark::DoNotOptimize(y.data());
  }
}
BENCHMARK(BM_SpmvThreads)->Arg(1)->Arg(2)->Arg(4);
BENCHMARK_MAIN();
