// Serial reference vs OpenMP kernels. Thread count follows HCL_THREADS.
#include <benchmark/benchmark.h>

#include <cmath>

#include "hcl/dirichlet.hpp"
#include "hcl/fields.hpp"

using namespace hcl;

namespace {

double wavy(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sin(3 * x[0]) * std::cos(2 * x[1]) + 0.3 * s;
}

Exec exec_of(const benchmark::State& st) { return st.range(0) ? Exec::Parallel : Exec::Serial; }

void label(benchmark::State& st) { st.SetLabel(st.range(0) ? "parallel" : "serial"); }

void BM_PshClassify(benchmark::State& st) {
  const GridShape g = GridShape::cube(3, -1, 1, static_cast<int>(st.range(1)));
  const GridField f = GridField::sample(g, wavy);
  const ConeSpec cone = ConeSpec::real_planes(3, 2, 32, 1);
  for (auto _ : st) benchmark::DoNotOptimize(psh_classify(f, cone, 0.05, kTol.membership, exec_of(st)));
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(classifiable_points(g).size()));
  label(st);
}

void BM_HullEstimate(benchmark::State& st) {
  const GridShape g = GridShape::cube(2, -1, 1, static_cast<int>(st.range(1)));
  const std::vector<Vec> k{{-0.5, -0.2}, {0.4, 0.3}, {0.1, -0.6}};
  const ConeSpec cone = ConeSpec::real_lines(2);
  for (auto _ : st) benchmark::DoNotOptimize(hull_estimate(k, cone, g, 400, exec_of(st), 3));
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(g.size()));
  label(st);
}

void BM_JacobiSweeps(benchmark::State& st) {
  const GridShape g = GridShape::cube(2, -1, 1, static_cast<int>(st.range(1)));
  const auto p = DirichletProblem::on_box(g, wavy, ConeSpec::real_lines(2, 32), StencilSet(2, 2));
  SolverConfig cfg;
  cfg.mode = SweepMode::Jacobi;
  cfg.init = Initializer::MinPhi;
  cfg.tol = 0.0;
  cfg.max_iters = 50;
  cfg.check_every = 1000;
  cfg.exec = exec_of(st);
  for (auto _ : st) benchmark::DoNotOptimize(perron_solve(p, cfg));
  st.SetItemsProcessed(st.iterations() * 50 * static_cast<std::int64_t>(p.unknowns().size()));
  label(st);
}

}  // namespace

BENCHMARK(BM_PshClassify)->ArgsProduct({{0, 1}, {21, 41}})->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_HullEstimate)->ArgsProduct({{0, 1}, {101, 201}})->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_JacobiSweeps)->ArgsProduct({{0, 1}, {65, 129}})->Unit(benchmark::kMillisecond)->UseRealTime();

int main(int argc, char** argv) {
  configure_threads();
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
