#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hcl/dirichlet.hpp"

using namespace hcl;

namespace {

double max_diff(const GridField& u, const ScalarFn& exact, const DirichletProblem& p) {
  double e = 0.0;
  for (std::size_t i : p.unknowns()) {
    const Vec x = p.grid().point(i);
    e = std::max(e, std::abs(u[i] - exact(x)));
  }
  return e;
}

double disk(std::span<const double> x) { return x[0] * x[0] + x[1] * x[1] - 0.64; }

}  // namespace

TEST_CASE("stencil directions") {
  const StencilSet s1(2, 1);
  REQUIRE(s1.size() == 4);
  CHECK(s1.directions()[0] == std::vector<int>{1, 0});
  CHECK(s1.directions()[1] == std::vector<int>{0, 1});
  CHECK(s1.directions()[2] == std::vector<int>{1, 1});
  CHECK(s1.directions()[3] == std::vector<int>{1, -1});
  CHECK(s1.max_angle_gap() == doctest::Approx(std::numbers::pi / 8));
  CHECK(StencilSet(2, 2).size() == 8);
  CHECK(StencilSet(3, 1).size() == 13);
  CHECK(StencilSet(2, 3).max_angle_gap() < StencilSet(2, 2).max_angle_gap());
  const double w[] = {0.1, -1.0};
  CHECK(s1.nearest(w) == 1);
  CHECK_THROWS_AS(StencilSet(4, 1), InputError);
  CHECK_THROWS_AS(StencilSet(2, 0), InputError);
}

TEST_CASE("discretize_operator examples") {
  const StencilSet s(2, 1);
  const DiscreteOperator lap = discretize_operator(SymMatrix::identity(2), s);
  double total = 0.0;
  for (auto [d, w] : lap.terms) {
    CHECK(d < 2);
    total += w;
  }
  CHECK(total == doctest::Approx(2.0));
  CHECK(lap.angle_error == doctest::Approx(0.0));

  const DiscreteOperator e1 = discretize_operator(SymMatrix::diagonal(Vec{1.0, 0.0}), s);
  REQUIRE(e1.terms.size() == 1);
  CHECK(e1.terms[0].first == 0);
  CHECK(e1.terms[0].second == doctest::Approx(1.0));

  const DiscreteOperator dg = discretize_operator(SymMatrix::from_upper(2, {0.5, 0.5, 0.5}), s);
  REQUIRE(dg.terms.size() == 1);
  CHECK(dg.terms[0].first == 2);
  CHECK(dg.terms[0].second == doctest::Approx(1.0));
  CHECK(dg.angle_error < 1e-12);

  CHECK_THROWS_AS(discretize_operator(-SymMatrix::identity(2), s), InputError);
  CHECK_THROWS_AS(discretize_operator(SymMatrix::identity(3), s), InputError);
}

TEST_CASE("harmonic and affine boundary data are reproduced") {
  const GridShape g = GridShape::cube(2, -1, 1, 21);
  const ScalarFn phi = [](std::span<const double> x) { return x[0] * x[0] - x[1] * x[1]; };
  const auto p = DirichletProblem::on_box(g, phi, ConeSpec::full_trace(2), StencilSet(2, 1));
  const Solution s = perron_solve(p, {.tol = 1e-10});
  CHECK(s.report.converged);
  CHECK(s.report.residual <= 1e-10);
  CHECK(max_diff(s.u, phi, p) < 1e-8);

  const ScalarFn aff = [](std::span<const double> x) { return 0.3 * x[0] - 2 * x[1] + 1; };
  const auto pa = DirichletProblem::on_box(g, aff, ConeSpec::real_lines(2, 16), StencilSet(2, 2));
  const Solution sa = perron_solve(pa, {.tol = 1e-10});
  CHECK(max_diff(sa.u, aff, pa) < 1e-8);

  const ScalarFn c = [](std::span<const double>) { return 2.5; };
  const auto pc = DirichletProblem::build(g, disk, c, ConeSpec::real_planes(2, 1, 8), StencilSet(2, 1));
  const Solution sc = perron_solve(pc);
  for (double v : sc.unknowns) CHECK(v == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("convex envelope of one-variable data") {
  // boundary data x0^2 on the square: the largest convex minorant is x0^2 itself
  const GridShape g = GridShape::cube(2, -1, 1, 21);
  const ScalarFn phi = [](std::span<const double> x) { return x[0] * x[0]; };
  const auto p = DirichletProblem::on_box(g, phi, ConeSpec::real_lines(2, 32), StencilSet(2, 1));
  const Solution s = perron_solve(p, {.tol = 1e-10});
  CHECK(s.report.converged);
  CHECK(max_diff(s.u, phi, p) < 1e-7);
  CHECK(residual(s.u, p) <= 1e-9);
}

TEST_CASE("residual and perron_update") {
  const GridShape g = GridShape::cube(2, -1, 1, 11);
  const ScalarFn phi = [](std::span<const double> x) { return x[0] * x[0] - x[1] * x[1]; };
  const auto p = DirichletProblem::on_box(g, phi, ConeSpec::full_trace(2), StencilSet(2, 1));
  std::vector<double> u;
  for (std::size_t i : p.unknowns()) u.push_back(phi(g.point(i)));
  CHECK(residual(p, u) < 1e-10);
  for (std::size_t k = 0; k < u.size(); ++k) CHECK(perron_update(p, k, u) == doctest::Approx(u[k]).epsilon(1e-12));
  // raising one node by d gives (Delta/2) u = -2d/h^2 there
  const std::size_t mid = u.size() / 2;
  u[mid] += 0.01;
  CHECK(residual(p, u) == doctest::Approx(2 * 0.01 / (g.h() * g.h())).epsilon(1e-9));
  CHECK_THROWS_AS(residual(p, std::vector<double>(3, 0.0)), InputError);
}

TEST_CASE("reference_harmonic and comparison with smaller cones") {
  const GridShape g = GridShape::cube(2, -1, 1, 21);
  const ScalarFn phi = [](std::span<const double> x) { return std::exp(x[0]) * std::cos(2 * x[1]) + x[0] * x[1]; };
  const StencilSet st(2, 2);
  const auto pl = DirichletProblem::build(g, disk, phi, ConeSpec::real_lines(2, 32), st);
  const auto pt = DirichletProblem::build(g, disk, phi, ConeSpec::full_trace(2), st);
  const Solution ul = perron_solve(pl, {.tol = 1e-9});
  const Solution ut = perron_solve(pt, {.tol = 1e-9});
  const Solution ref = reference_harmonic(pl, SymMatrix::identity(2), {.tol = 1e-9});
  REQUIRE(ul.report.converged);
  REQUIRE(ref.report.converged);
  for (std::size_t k = 0; k < ul.unknowns.size(); ++k) {
    CHECK(ul.unknowns[k] <= ref.unknowns[k] + 1e-7);  // convex implies subharmonic
    CHECK(std::abs(ut.unknowns[k] - ref.unknowns[k]) < 1e-6);
  }
  CHECK_THROWS_AS(reference_harmonic(pl, SymMatrix::diagonal(Vec{1.0, 0.0})), InputError);
}

TEST_CASE("cone monotonicity") {
  const GridShape g = GridShape::cube(2, -1, 1, 17);
  const ScalarFn phi = [](std::span<const double> x) { return std::sin(3 * x[0]) + x[1] * x[1]; };
  const StencilSet st(2, 1);
  const auto p0 = DirichletProblem::build(g, disk, phi, ConeSpec::real_lines(2, 16), st);
  const auto p1 = DirichletProblem::build(g, disk, phi, ConeSpec::full_trace(2), st);
  const MonotonicityReport r = cone_monotonicity_check(p0, p1, {.tol = 1e-9});
  CHECK(r.ok);
  CHECK(r.max_violation <= 1e-8);
  const MonotonicityReport same = cone_monotonicity_check(p0, p0, {.tol = 1e-9});
  CHECK(same.ok);
  CHECK(std::abs(same.max_violation) < 1e-12);
  CHECK_THROWS_AS(cone_monotonicity_check(p1, p0), InputError);
}

TEST_CASE("maximum principle and comparison of boundary data") {
  const GridShape g = GridShape::cube(2, -1, 1, 21);
  const ScalarFn phi = [](std::span<const double> x) { return std::cos(4 * x[0]) * x[1]; };
  const ScalarFn phi2 = [&](std::span<const double> x) { return phi(x) + 0.1 * (1 + x[0]); };
  for (const ConeSpec& cone : {ConeSpec::real_lines(2, 16), ConeSpec::real_planes(2, 2), ConeSpec::full_trace(2)}) {
    const auto p = DirichletProblem::build(g, disk, phi, cone, StencilSet(2, 2));
    const auto q = DirichletProblem::build(g, disk, phi2, cone, StencilSet(2, 2));
    const Solution u = perron_solve(p, {.tol = 1e-9});
    const Solution v = perron_solve(q, {.tol = 1e-9});
    for (std::size_t k = 0; k < u.unknowns.size(); ++k) {
      CHECK(u.unknowns[k] >= p.min_phi() - 1e-9);
      CHECK(u.unknowns[k] <= p.max_phi() + 1e-9);
      CHECK(u.unknowns[k] <= v.unknowns[k] + 1e-9);
    }
  }
}

TEST_CASE("convex solution is subaffine and in the cone") {
  const GridShape g = GridShape::cube(2, -1, 1, 31);
  const ScalarFn phi = [](std::span<const double> x) { return std::abs(x[0] - 0.2) + 0.5 * x[1] * x[1] * x[1]; };
  const auto p = DirichletProblem::on_box(g, phi, ConeSpec::real_lines(2, 32), StencilSet(2, 1));
  const Solution s = perron_solve(p, {.tol = 1e-10});
  REQUIRE(s.report.converged);
  CHECK(subaffine_check(s.u, 1e-6).subaffine);
}

TEST_CASE("Jacobi and Gauss-Seidel agree") {
  const GridShape g = GridShape::cube(2, -1, 1, 15);
  const ScalarFn phi = [](std::span<const double> x) { return x[0] * x[1] * x[1]; };
  const auto p = DirichletProblem::build(g, disk, phi, ConeSpec::real_lines(2, 16), StencilSet(2, 1));
  const Solution a = perron_solve(p, {.tol = 1e-10});
  const Solution b = perron_solve(p, {.tol = 1e-10, .mode = SweepMode::Jacobi});
  REQUIRE(b.report.converged);
  double d = 0.0;
  for (std::size_t k = 0; k < a.unknowns.size(); ++k) d = std::max(d, std::abs(a.unknowns[k] - b.unknowns[k]));
  // residual 1e-10 with h^2 / 4 per unit residual bounds the gap
  CHECK(d < 1e-9);
}

TEST_CASE("solver refusals and non-convergence") {
  const GridShape g = GridShape::cube(2, -1, 1, 11);
  const ScalarFn phi = [](std::span<const double> x) { return x[0]; };
  CHECK_THROWS_AS(DirichletProblem::on_box(g, phi, ConeSpec::garding(MAPolynomial::det_real(2)), StencilSet(2, 1)),
                  SemanticError);
  CHECK_THROWS_AS(DirichletProblem::on_box(g, phi, ConeSpec::real_lines(3), StencilSet(2, 1)), InputError);
  const ScalarFn big = [](std::span<const double> x) { return x[0] * x[0] + x[1] * x[1] - 4.0; };
  CHECK_THROWS_AS(DirichletProblem::build(g, big, phi, ConeSpec::real_lines(2), StencilSet(2, 1)), InputError);
  const ScalarFn wavy = [](std::span<const double> x) { return std::sin(5 * x[0]) * x[1]; };
  const auto p = DirichletProblem::on_box(g, wavy, ConeSpec::full_trace(2), StencilSet(2, 1));
  const Solution s = perron_solve(p, {.tol = 1e-30, .max_iters = 50, .init = Initializer::MinPhi});
  CHECK_FALSE(s.report.converged);
  CHECK(s.report.iterations == 50);
}

TEST_CASE("Monge-Ampere in 2-D") {
  const GridShape g = GridShape::cube(2, -1, 1, 21);
  const ScalarFn q = [](std::span<const double> x) { return x[0] * x[0] + x[1] * x[1]; };
  const Solution s4 = ma_solve_2d(g, disk, q, 4.0, 2, {.tol = 1e-10});
  REQUIRE(s4.report.converged);
  double e = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) e = std::max(e, std::abs(s4.u[i] - q(g.point(i))));
  CHECK(e < 1e-7);

  const ScalarFn half = [](std::span<const double> x) { return 0.5 * (x[0] * x[0] + x[1] * x[1]) + 0.3 * x[0]; };
  const Solution s1 = ma_solve_2d(g, disk, half, 1.0, 2, {.tol = 1e-10});
  REQUIRE(s1.report.converged);
  e = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) e = std::max(e, std::abs(s1.u[i] - half(g.point(i))));
  CHECK(e < 1e-7);

  // c = 0 is the convex envelope
  const ScalarFn phi = [](std::span<const double> x) { return std::sin(2 * x[0]) + x[1]; };
  const Solution m0 = ma_solve_2d(g, disk, phi, 0.0, 2, {.tol = 1e-10});
  const auto p = DirichletProblem::build(g, disk, phi, ConeSpec::real_lines(2, 64), StencilSet(2, 2));
  const Solution pe = perron_solve(p, {.tol = 1e-10});
  REQUIRE(m0.report.converged);
  double d = 0.0;
  for (std::size_t i : p.unknowns()) d = std::max(d, std::abs(m0.u[i] - pe.u[i]));
  CHECK(d < 3 * g.h());
  CHECK(ma_residual(p, 0.0, m0.unknowns) < 1e-8);

  CHECK_THROWS_AS(ma_solve_2d(g, disk, q, -1.0, 1), InputError);
  CHECK_THROWS_AS(ma_solve_2d(GridShape::cube(3, -1, 1, 5), disk, q, 1.0, 1), InputError);
}
