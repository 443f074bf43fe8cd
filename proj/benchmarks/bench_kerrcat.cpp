#include <benchmark/benchmark.h>

#include "kerrcat/catspace.hpp"
#include "kerrcat/dynamics.hpp"
#include "kerrcat/exceptional.hpp"
#include "kerrcat/liouville.hpp"
#include "kerrcat/winding.hpp"

using namespace kerrcat;

namespace {

model::ModelParams experiment_point() { return model::params_from_experiment(6.7, 15.5, 1.0 / 15.5, 0.74, 0.1); }

void BM_CardanoEigenvalues(benchmark::State& state) {
  const auto m = model::ReducedModel::from(experiment_point());
  for (auto _ : state) benchmark::DoNotOptimize(catspace::cardano_eigenvalues(m));
}
BENCHMARK(BM_CardanoEigenvalues);

void BM_ReducedDenseEigensolve(benchmark::State& state) {
  const auto l = catspace::reduced_liouvillian(experiment_point());
  for (auto _ : state) benchmark::DoNotOptimize(catspace::numeric_eigenvalues(l));
}
BENCHMARK(BM_ReducedDenseEigensolve);

void BM_Lep3ClosedForm(benchmark::State& state) {
  const double a = experiment_point().alpha();
  for (auto _ : state) benchmark::DoNotOptimize(exceptional::lep3_closed_form(a, 1.0 / 15.5));
}
BENCHMARK(BM_Lep3ClosedForm);

void BM_BuildLiouvillian(benchmark::State& state) {
  const auto p = experiment_point();
  const int dim = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(liouville::build_liouvillian(p, dim));
}
BENCHMARK(BM_BuildLiouvillian)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_Propagator(benchmark::State& state) {
  auto p = experiment_point();
  if (state.range(1) == 0) p = p.with_drive(0.0);
  const auto l = liouville::build_liouvillian(p, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    dynamics::Propagator u(l, 0.5);
    benchmark::DoNotOptimize(u);
  }
}
BENCHMARK(BM_Propagator)->Args({20, 0})->Args({20, 1})->Unit(benchmark::kMillisecond);

void BM_WindingEnclosing(benchmark::State& state) {
  const double a = experiment_point().alpha(), kappa = 1.0 / 15.5;
  const auto cf = exceptional::lep3_closed_form(a, kappa)[0];
  const auto c = winding::Contour::scaled_circle(cf.eps, cf.delta, 0.3, cf.eps, cf.delta);
  winding::WindingOptions opts;
  opts.route = static_cast<winding::Route>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(winding::winding_number(c, a, kappa, opts));
}
BENCHMARK(BM_WindingEnclosing)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
