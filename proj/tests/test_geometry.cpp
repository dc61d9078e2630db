#include <doctest.h>

#include <cmath>

#include "hcl/geometry.hpp"

using namespace hcl;

namespace {

const DomainSpec kBall = DomainSpec::from_expression(2, "0.5*(x0^2+x1^2-1)");
const DomainSpec kAnnulus = DomainSpec::from_expression(2, "(x0^2+x1^2-1)*(x0^2+x1^2-4)", 0.25, {}, 3.0);
const DomainSpec kEllipsoid = DomainSpec::from_expression(3, "0.5*(x0^2+x1^2/2+x2^2/3-1)", 0.25, {}, 3.0);

double max_abs_diff(const SymMatrix& a, const SymMatrix& b) {
  double m = 0.0;
  const SymMatrix d = a - b;
  for (double v : d.upper()) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

TEST_CASE("boundary samples lie on the boundary") {
  const auto pts = kBall.boundary_samples(32, 3);
  CHECK(pts.size() == 32);
  for (const auto& x : pts) CHECK(std::abs(std::hypot(x[0], x[1]) - 1.0) < 1e-9);
  const auto ann = kAnnulus.boundary_samples(16, 3);
  CHECK(ann.size() == 16);
  int inner = 0;
  for (const auto& x : ann) {
    const double r = std::hypot(x[0], x[1]);
    CHECK((std::abs(r - 1) < 1e-9 || std::abs(r - 2) < 1e-9));
    inner += r < 1.5;
  }
  CHECK(inner == 8);
  for (const auto& x : kEllipsoid.boundary_samples(20, 1)) CHECK(std::abs(kEllipsoid.rho(x)) <= 1e-10);
}

TEST_CASE("boundary frame and degenerate gradient") {
  const double x[] = {0.6, 0.8};
  const BoundaryFrame f = boundary_frame(kAnnulus, x);  // r = 1
  CHECK(f.grad_norm == doctest::Approx(6.0));
  CHECK(f.normal[0] == doctest::Approx(-0.6));
  // Hess rho = -6 I + 8 x x^T at r = 1
  const SymMatrix want = (1.0 / 6.0) * (-6.0 * SymMatrix::identity(2) + 8.0 * SymMatrix::outer(Vec{0.6, 0.8}));
  CHECK(max_abs_diff(f.hess, want) < 1e-10);
  const DomainSpec sq = DomainSpec::from_expression(2, "x0^2+x1^2");
  const double o[] = {0.0, 0.0};
  CHECK_THROWS_AS(boundary_frame(sq, o), InputError);
}

TEST_CASE("boundary convexity against the second fundamental form") {
  const ConeSpec g1 = ConeSpec::real_lines(2);
  for (const auto& x : kBall.boundary_samples(16)) {
    const BoundaryVerdict v = boundary_convexity_check(kBall, g1, x);
    CHECK(v.strict);
    CHECK(v.margin == doctest::Approx(1.0).epsilon(1e-9));
  }
  // annulus: curvature -1 on r = 1 and 1/2 on r = 2
  for (const auto& x : kAnnulus.boundary_samples(16)) {
    const double r = std::hypot(x[0], x[1]);
    const BoundaryVerdict v = boundary_convexity_check(kAnnulus, g1, x);
    if (r < 1.5) {
      CHECK_FALSE(v.weak);
      CHECK(v.margin == doctest::Approx(-1.0).epsilon(1e-8));
      CHECK(std::abs(frob_inner(v.witness, SymMatrix::outer(Vec{x[0], x[1]}))) < 1e-8);
    } else {
      CHECK(v.strict);
      CHECK(v.margin == doctest::Approx(0.5).epsilon(1e-8));
    }
  }
  // ellipsoid at (1, 0, 0): II = diag(1/2, 1/3)
  const double e[] = {1.0, 0.0, 0.0};
  CHECK(boundary_convexity_check(kEllipsoid, ConeSpec::real_lines(3), e).margin == doctest::Approx(1.0 / 3).epsilon(1e-8));
  CHECK(boundary_convexity_check(kEllipsoid, ConeSpec::real_planes(3, 2), e).margin ==
        doctest::Approx(5.0 / 12).epsilon(1e-8));
  const double f[] = {0.0, std::sqrt(2.0), 0.0};
  CHECK(boundary_convexity_check(kEllipsoid, ConeSpec::real_lines(3), f).margin ==
        doctest::Approx(std::sqrt(2.0) / 3).epsilon(1e-8));
  // {I}: no trace-one element of P_+ = R+ I is tangential
  const double in[] = {1.0, 0.0};
  const BoundaryVerdict lap = boundary_convexity_check(kAnnulus, ConeSpec::full_trace(2), in);
  CHECK(lap.vacuous);
  CHECK(lap.strict);
}

TEST_CASE("boundary verdict does not depend on the defining function") {
  const DomainSpec twice = DomainSpec::from_expression(2, "x0^2+x1^2-1");
  const DomainSpec warped = DomainSpec::from_expression(2, "(1+x0^2+x1^2)*0.5*(x0^2+x1^2-1)");
  const DomainSpec valued = DomainSpec::from_function(
      2, [](std::span<const double> x) { return std::exp(x[0]) * (x[0] * x[0] + x[1] * x[1] - 1); }, "exp-weighted");
  for (const auto& x : kBall.boundary_samples(12, 2)) {
    const ConeSpec g1 = ConeSpec::real_lines(2);
    const double m = boundary_convexity_check(kBall, g1, x).margin;
    CHECK(boundary_convexity_check(twice, g1, x).margin == doctest::Approx(m).epsilon(1e-8));
    CHECK(boundary_convexity_check(warped, g1, x).margin == doctest::Approx(m).epsilon(1e-8));
    CHECK(boundary_convexity_check(valued, g1, x).margin == doctest::Approx(m).epsilon(1e-5));
  }
  const DomainSpec e2 = DomainSpec::from_expression(3, "exp(x2)*(x0^2+x1^2/2+x2^2/3-1)", 0.25, {}, 3.0);
  for (const ConeSpec& cone : {ConeSpec::real_lines(3), ConeSpec::real_planes(3, 2)})
    for (const auto& x : kEllipsoid.boundary_samples(12, 5)) {
      const double m = boundary_convexity_check(kEllipsoid, cone, x).margin;
      CHECK(boundary_convexity_check(e2, cone, x).margin == doctest::Approx(m).epsilon(1e-8));
    }
}

TEST_CASE("strict constant C") {
  const SymMatrix h = SymMatrix::diagonal(Vec{1.0, -3.0});
  const Vec g{0.0, 1.0};
  const ConstantSearch s = strict_constant_C(h, g, ConeSpec::real_lines(2));
  REQUIRE(s.found);
  CHECK(s.c == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(s.c > 3.0);
  CHECK(s.verdict.interior());
  const ConstantSearch t = strict_constant_C(h, g, ConeSpec::full_trace(2));
  REQUIRE(t.found);
  CHECK(t.c == doctest::Approx(2.0).epsilon(1e-6));  // trace 1 + (C - 3) > 0
  const double x[] = {0.0, 1.0};
  const ConstantSearch b = strict_constant_C(kBall, ConeSpec::real_lines(2), x);
  CHECK(b.found);
  CHECK(b.c == 0.0);
  // a tangential negative direction is not fixed by any C
  const ConstantSearch n = strict_constant_C(SymMatrix::diagonal(Vec{-1.0, 0.0}), g, ConeSpec::real_lines(2), 1e3);
  CHECK_FALSE(n.found);
}

TEST_CASE("global defining function") {
  DefiningBudget budget;
  budget.boundary_samples = 32;
  budget.grid_points = 41;
  const DefiningReport r = global_defining_function(kBall, ConeSpec::real_lines(2), budget);
  CHECK(r.ok);
  CHECK_FALSE(r.refused);
  CHECK(r.sign_agrees);
  CHECK(r.min_margin > 0);
  REQUIRE(r.rho_hat.has_value());
  const double o[] = {0.0, 0.0};
  CHECK(r.rho_hat->value(o) < 0);

  const DefiningReport t = global_defining_function(kBall, ConeSpec::full_trace(2), budget);
  CHECK(t.ok);
  CHECK(t.constants.c >= 0);

  budget.grid_points = 21;
  const DefiningReport e = global_defining_function(kEllipsoid, ConeSpec::real_planes(3, 2), budget);
  CHECK(e.ok);
  CHECK(e.sign_agrees);

  const DefiningReport a = global_defining_function(kAnnulus, ConeSpec::real_lines(2), budget);
  CHECK_FALSE(a.ok);
  CHECK(a.refused);
  REQUIRE(a.refusal_point.has_value());
  CHECK(std::hypot((*a.refusal_point)[0], (*a.refusal_point)[1]) == doctest::Approx(1.0));
}

TEST_CASE("exhaustion -log(-rho)") {
  const GridShape g = GridShape::cube(2, -1.2, 1.2, 49);
  for (const auto& cone : {ConeSpec::real_lines(2), ConeSpec::full_trace(2), ConeSpec::real_lines(2, 16, 4)}) {
    const ExhaustionReport r = exhaustion_check(kBall, cone, g);
    CHECK(r.pass);
    CHECK(r.points > 0);
    CHECK(r.excluded > 0);
    CHECK(r.min_margin > 0);
  }
  const GridShape ga = GridShape::cube(2, -2.4, 2.4, 81);
  const ExhaustionReport a = exhaustion_check(kAnnulus, ConeSpec::real_lines(2), ga);
  CHECK_FALSE(a.pass);
  CHECK(a.min_margin < 0);
  const double r = std::hypot(a.worst_point[0], a.worst_point[1]);
  CHECK(r < 1.6);
}

TEST_CASE("submanifold distances") {
  const SubmanifoldSpec line = SubmanifoldSpec::line(Vec{0, 0, 0}, Vec{2, 0, 0});
  const double p[] = {5.0, 3.0, 4.0};
  CHECK(line.dist(p) == doctest::Approx(5.0));
  const SubmanifoldSpec seg = SubmanifoldSpec::segment(Vec{-1, 0}, Vec{1, 0});
  const double q[] = {4.0, 4.0};
  CHECK(seg.dist(q) == doctest::Approx(5.0));
  const SubmanifoldSpec circ = SubmanifoldSpec::circle(3, Vec{0, 0}, 2.0);
  const double c[] = {3.0, 0.0, 1.0};
  CHECK(circ.dist(c) == doctest::Approx(std::sqrt(2.0)));
  const SubmanifoldSpec curve = SubmanifoldSpec::curve({Expr::parse("2*cos(t)", std::vector<std::string>{"t"}),
                                                        Expr::parse("2*sin(t)", std::vector<std::string>{"t"}),
                                                        Expr::parse("0", std::vector<std::string>{"t"})},
                                                       -1.0, 1.0);
  const double cc[] = {2.5, 0.3, 0.4};
  CHECK(curve.dist(cc) == doctest::Approx(circ.dist(cc)).epsilon(1e-8));
}

TEST_CASE("Hessian of half squared distance is P_N on M") {
  const SubmanifoldSpec line = SubmanifoldSpec::line(Vec{0, 0, 0}, Vec{1, 1, 0});
  const double x[] = {0.3, 0.3, 0.0};
  const DistSqReport l = dist_sq_hessian_check(line, ConeSpec::real_planes(3, 2), x);
  CHECK(l.matches);
  CHECK(l.free);
  CHECK_FALSE(dist_sq_hessian_check(line, ConeSpec::real_lines(3), x).free);

  const SubmanifoldSpec circ = SubmanifoldSpec::circle(2, Vec{0, 0}, 1.0);
  const double y[] = {0.0, 1.0};
  const DistSqReport c = dist_sq_hessian_check(circ, ConeSpec::real_lines(2), y);
  CHECK(c.matches);
  CHECK_FALSE(c.free);
  CHECK(c.projection(1, 1) == doctest::Approx(1.0));

  const SubmanifoldSpec pt = SubmanifoldSpec::point(Vec{0.5, -0.5});
  const double z[] = {0.5, -0.5};
  const DistSqReport d = dist_sq_hessian_check(pt, ConeSpec::real_lines(2), z);
  CHECK(d.matches);
  CHECK(d.free);
  const double off[] = {0.6, -0.5};
  CHECK_THROWS_AS(dist_sq_hessian_check(pt, ConeSpec::real_lines(2), off), InputError);
}

TEST_CASE("squared distance to a circle off the circle") {
  // f = (s - R)^2 / 2: Hess = nu nu^T + (1 - R/s) (I - nu nu^T)
  const SubmanifoldSpec circ = SubmanifoldSpec::circle(2, Vec{0, 0}, 1.0);
  for (double s : {0.6, 0.9, 1.3}) {
    const double x[] = {s * 0.8, s * 0.6};
    const SymMatrix nn = SymMatrix::outer(Vec{0.8, 0.6});
    const SymMatrix want = nn + (1.0 - 1.0 / s) * (SymMatrix::identity(2) - nn);
    CHECK(max_abs_diff(dist_sq_hessian_fd(circ, x, 1e-4), want) < 1e-6);
  }
}

TEST_CASE("tubes") {
  const ConeSpec planes = ConeSpec::real_planes(3, 2);
  const GridShape g3({-1.0, -0.5, -0.5}, 0.05, {41, 21, 21});
  const TubeReport seg = tube_report(SubmanifoldSpec::segment(Vec{-0.5, 0, 0}, Vec{0.5, 0, 0}), planes, 0.3, g3);
  CHECK_FALSE(seg.refused);
  CHECK(seg.strict);
  CHECK(seg.points > 0);
  CHECK(seg.perturbed_strict);
  CHECK(seg.admissible_eps > 0);

  const GridShape g2 = GridShape::cube(2, -1, 1, 41);
  const TubeReport pt = tube_report(SubmanifoldSpec::point(Vec{0.1, 0.0}), ConeSpec::real_lines(2), 0.5, g2);
  CHECK(pt.strict);
  CHECK(pt.min_margin > 0);
  CHECK(pt.zero_point == Vec{0.1, 0.0});

  const TubeReport axis =
      tube_report(SubmanifoldSpec::line(Vec{0, 0, 0}, Vec{1, 0, 0}), ConeSpec::real_lines(3), 0.3, g3);
  CHECK(axis.refused);
  REQUIRE(axis.failing_sample.has_value());
  CHECK_THROWS_AS(tube_report(SubmanifoldSpec::point(Vec{0.0, 0.0}), ConeSpec::real_lines(2), -1.0, g2), InputError);
}
