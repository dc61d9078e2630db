#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <cstring>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "hcl/dirichlet.hpp"
#include "hcl/fields.hpp"

using namespace hcl;

namespace {

const int kThreadCounts[] = {1, 2, 4};

void set_threads(int t) {
#ifdef _OPENMP
  omp_set_num_threads(t);
#else
  (void)t;
#endif
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

double wavy(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sin(3 * x[0]) * std::cos(2 * x[1]) + 0.3 * s;
}

}  // namespace

TEST_CASE("psh_classify: serial and parallel agree bitwise") {
  const GridShape g = GridShape::cube(3, -1, 1, 21);
  const GridField f = GridField::sample(g, wavy);
  const ConeSpec cone = ConeSpec::real_planes(3, 2, 24, 3);
  const PointClassification ref = psh_classify(f, cone, 0.05, kTol.membership, Exec::Serial);
  for (int t : kThreadCounts) {
    set_threads(t);
    const PointClassification par = psh_classify(f, cone, 0.05, kTol.membership, Exec::Parallel);
    CHECK(par.classes == ref.classes);
    CHECK(bitwise_equal(par.margins, ref.margins));
    CHECK(par.worst_point == ref.worst_point);
    CHECK(par.counts == ref.counts);
  }
  set_threads(1);
}

TEST_CASE("hull_estimate: serial and parallel agree") {
  const GridShape g = GridShape::cube(2, -1, 1, 81);
  const std::vector<Vec> k{{-0.5, -0.2}, {0.4, 0.3}, {0.1, -0.6}};
  const HullReport ref = hull_estimate(k, ConeSpec::real_lines(2), g, 200, Exec::Serial, 11);
  for (int t : kThreadCounts) {
    set_threads(t);
    const HullReport par = hull_estimate(k, ConeSpec::real_lines(2), g, 200, Exec::Parallel, 11);
    CHECK(par.mask == ref.mask);
    CHECK(par.kept == ref.kept);
  }
  set_threads(1);
}

TEST_CASE("Jacobi sweeps: serial and parallel agree bitwise") {
  const GridShape g = GridShape::cube(2, -1, 1, 31);
  const ScalarFn rho = [](std::span<const double> x) { return x[0] * x[0] + 2 * x[1] * x[1] - 0.8; };
  const auto p = DirichletProblem::build(g, rho, wavy, ConeSpec::real_lines(2, 16), StencilSet(2, 2));
  SolverConfig cfg;
  cfg.mode = SweepMode::Jacobi;
  cfg.tol = 1e-9;
  cfg.exec = Exec::Serial;
  const Solution ref = perron_solve(p, cfg);
  REQUIRE(ref.report.converged);
  cfg.exec = Exec::Parallel;
  for (int t : kThreadCounts) {
    set_threads(t);
    const Solution par = perron_solve(p, cfg);
    CHECK(par.report.iterations == ref.report.iterations);
    CHECK(par.report.residual == ref.report.residual);
    CHECK(bitwise_equal(par.unknowns, ref.unknowns));
  }
  set_threads(1);
}

TEST_CASE("thread cap from the environment") {
  ::setenv("HCL_THREADS", "3", 1);
  CHECK(thread_cap() == 3);
#ifdef _OPENMP
  CHECK(configure_threads() == 3);
#endif
  ::setenv("HCL_THREADS", "zero", 1);
  CHECK(thread_cap() == 0);
  ::setenv("HCL_THREADS", "-2", 1);
  CHECK(thread_cap() == 0);
  ::unsetenv("HCL_THREADS");
  CHECK(thread_cap() == 0);
}
