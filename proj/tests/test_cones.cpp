#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hcl/cones.hpp"
#include "hcl/garding.hpp"

using namespace hcl;

namespace {

SymMatrix diag(std::initializer_list<double> d) { return SymMatrix::diagonal(Vec(d)); }

MembershipClass cls(const SymMatrix& a, const ConeSpec& c) { return psplus_membership(a, c).cls; }

std::vector<ConeSpec> elliptic_cones() {
  return {ConeSpec::real_lines(2),      ConeSpec::real_lines(3),       ConeSpec::full_trace(3),
          ConeSpec::real_planes(3, 2),  ConeSpec::real_planes(4, 3),   ConeSpec::complex_lines(2),
          ConeSpec::lagrangian(2, 64),  ConeSpec::garding(MAPolynomial::sigma(3, 2)),
          ConeSpec::garding(MAPolynomial::det_real(3))};
}

SymMatrix random_psd(int n, CounterRng& rng, int rank) {
  SymMatrix a(n);
  for (int r = 0; r < rank; ++r) a += rng.uniform(0.1, 2.0) * SymMatrix::outer(rng.unit_vector(n));
  return a;
}

}  // namespace

TEST_CASE("psplus_membership examples") {
  const ConeSpec g1 = ConeSpec::real_lines(2);
  CHECK(cls(SymMatrix::identity(2), g1) == MembershipClass::Interior);
  CHECK(cls(diag({1, 0}), g1) == MembershipClass::Boundary);
  CHECK(cls(diag({1, -1}), g1) == MembershipClass::Outside);
  CHECK(cls(diag({5, -5}), ConeSpec::full_trace(2)) == MembershipClass::Boundary);
}

TEST_CASE("membership witness attains the margin") {
  CounterRng rng(21);
  const ConeSpec c = ConeSpec::real_planes(4, 2);
  for (int t = 0; t < 20; ++t) {
    const SymMatrix a = SymMatrix::random(4, rng);
    const MembershipVerdict v = psplus_membership(a, c);
    CHECK(frob_inner(a, v.witness) / a.norm() == doctest::Approx(v.margin).epsilon(1e-9));
    CHECK(v.witness.trace() == doctest::Approx(1.0));
    CHECK(v.cls == classify_margin(v.margin, kTol.membership));
  }
}

TEST_CASE("dual_membership examples") {
  const ConeSpec g1 = ConeSpec::real_lines(2);
  CHECK(dual_membership(diag({1, -5}), g1).in_cone());
  CHECK_FALSE(dual_membership(-SymMatrix::identity(2), g1).in_cone());
  CounterRng rng(22);
  const ConeSpec tr = ConeSpec::full_trace(3);
  for (int t = 0; t < 100; ++t) {
    const SymMatrix b = SymMatrix::random(3, rng);
    CHECK(dual_membership(b, tr).in_cone() == (b.trace() >= 0));
  }
}

TEST_CASE("ellipticity_check examples") {
  const EllipticityReport g = ellipticity_check(ConeSpec::real_lines(2, 16));
  CHECK(g.positivity);
  CHECK(g.completeness);
  CHECK(g.span_dim == 3);
  const EllipticityReport ax = ellipticity_check(ConeSpec::fixed_axis(2));
  CHECK(ax.positivity);
  CHECK_FALSE(ax.completeness);
  CHECK(ax.sum_min_eigenvalue == doctest::Approx(0.0));
  const EllipticityReport bad = ellipticity_check(ConeSpec::generated(2, {diag({1, -0.1}), SymMatrix::identity(2)}));
  CHECK_FALSE(bad.positivity);
  CHECK_THROWS_AS(ConeSpec::generated(2, {}), InputError);
}

TEST_CASE("completeness agrees with a sphere-sampled degenerate-direction test") {
  CounterRng rng(23);
  int complete = 0, incomplete = 0;
  for (int t = 0; t < 60; ++t) {
    std::vector<SymMatrix> gens;
    const bool degenerate = t % 2 == 0;
    const int count = 1 + static_cast<int>(rng.next() % 3);
    for (int i = 0; i < count; ++i) {
      // directions on the same angular grid as the sphere test, so a degenerate
      // direction of the generators is one of the sampled ones
      const double th = degenerate ? 0.0 : std::numbers::pi * static_cast<double>(rng.next() % 500) / 500.0;
      const Vec v{std::cos(th), std::sin(th)};
      gens.push_back(rng.uniform(0.2, 2.0) * SymMatrix::outer(v));
    }
    // inf over directions of max_i A_i(e,e); zero exactly when some e is degenerate for all
    double inf_max = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 500; ++k) {
      const double th = std::numbers::pi * k / 500.0;
      const Vec e{std::cos(th), std::sin(th)};
      double m = 0.0;
      for (const auto& g : gens) m = std::max(m, g.quadratic_form(e));
      inf_max = std::min(inf_max, m);
    }
    const bool sphere = inf_max > 1e-12;
    const bool report = ellipticity_check(ConeSpec::generated(2, gens)).completeness;
    CHECK(sphere == report);
    (report ? complete : incomplete)++;
  }
  CHECK(complete > 0);
  CHECK(incomplete > 0);
}

TEST_CASE("polar_check") {
  CounterRng rng(24);
  const ConeSpec ray = ConeSpec::generated(2, {SymMatrix::identity(2)});
  CHECK(cls(diag({1, -0.5}), ray) == MembershipClass::Interior);
  CHECK(cls(diag({1, -1}), ray) == MembershipClass::Boundary);
  const PolarCheckReport r = polar_check(ray, 50, rng);
  CHECK(r.bipolar_ok);
  CHECK(r.certificates_ok);

  std::vector<SymMatrix> gens;
  for (int i = 0; i < 12; ++i) gens.push_back(SymMatrix::outer(rng.unit_vector(3)));
  const PolarCheckReport g = polar_check(ConeSpec::generated(3, gens), 100, rng);
  CHECK(g.bipolar_ok);
  CHECK(g.certificates_ok);
  CHECK(g.worst_pairing >= -1e-12);

  // the PSD cone is self-polar
  const ConeSpec psd = ConeSpec::real_lines(3);
  for (int t = 0; t < 50; ++t) {
    const SymMatrix a = random_psd(3, rng, 1 + t % 3);
    CHECK(psplus_membership(a, psd).in_cone());
    CHECK(polar_contains(a, psd));
  }
  CHECK_FALSE(polar_contains(diag({1, -0.1, 1}), psd));
}

TEST_CASE("family samplers stay in their families") {
  for (const auto& p : ConeSpec::complex_lines(2, 40, 3).sample_planes()) {
    const SymMatrix pr = plane_projection(p);
    for (const auto& v : p.basis()) {
      const Vec jv = apply_complex_structure(v);
      const Vec back = pr.apply(jv);
      for (std::size_t i = 0; i < jv.size(); ++i) CHECK(std::abs(back[i] - jv[i]) < 1e-12);
    }
  }
  for (const auto& p : ConeSpec::lagrangian(3, 40, 5).sample_planes())
    for (const auto& u : p.basis())
      for (const auto& v : p.basis()) CHECK(std::abs(dot(u, apply_complex_structure(v))) < 1e-12);
}

TEST_CASE("free_subspace_check examples") {
  const int e0[] = {0}, e2[] = {2}, e01[] = {0, 1};
  CHECK_FALSE(free_subspace_check(Plane::coordinate(2, e0), ConeSpec::real_lines(2)).free);
  CounterRng rng(25);
  for (int t = 0; t < 10; ++t) CHECK(free_subspace_check(Plane::random(4, 3, rng), ConeSpec::full_trace(4)).free);
  CHECK(free_subspace_check(Plane::coordinate(3, e2), ConeSpec::garding(MAPolynomial::sigma(3, 2))).free);
  CHECK(free_subspace_check(Plane::coordinate(2, e01), ConeSpec::real_lines(2)).degenerate);
}

TEST_CASE("free_dim_verify examples") {
  CounterRng rng(26);
  const auto ok = [&](const ConeSpec& c, int d) {
    const FreeDimReport r = free_dim_verify(c, d, 200, rng);
    return r.lower_ok && r.upper_ok && r.upper_trials == 200;
  };
  CHECK(ok(ConeSpec::real_planes(4, 2), 1));
  CHECK(ok(ConeSpec::complex_lines(2), 2));
  CHECK(ok(ConeSpec::garding(MAPolynomial::sigma(5, 2)), 3));
  // a wrong claim is refuted in one direction or the other
  CHECK_FALSE(ok(ConeSpec::real_planes(4, 2), 2));
  CHECK_FALSE(ok(ConeSpec::real_planes(4, 2), 0));
  CHECK_THROWS_AS(free_dim_verify(ConeSpec::real_lines(3), 3, 10, rng), InputError);
}

TEST_CASE("ray cones and convex elliptic sets") {
  const auto f = ConvexEllipticSet::det_floor(2, 1.0);
  CHECK(ray_cone_membership(SymMatrix::identity(2), f, 50.0, 200));
  CHECK_FALSE(ray_cone_membership(diag({1, -1}), f, 50.0, 200));
  CHECK(ray_cone_membership(SymMatrix(2), f, 50.0, 200));
  CHECK(convex_elliptic_membership(f.basepoint(), f).in_cone());

  CHECK(convex_elliptic_membership(diag({2, 2}), f).cls == MembershipClass::Interior);
  const auto s = ConvexEllipticSet::slag_branch(3, 1);
  CHECK(convex_elliptic_membership(SymMatrix::identity(3), s).cls == MembershipClass::Outside);
  const MembershipVerdict b = convex_elliptic_membership(std::sqrt(3.0) * SymMatrix::identity(3), s);
  CHECK(b.cls == MembershipClass::Boundary);
  CHECK(std::abs(b.margin) <= 1e-9);
  CHECK(convex_elliptic_membership(s.basepoint(), s).in_cone());
  CHECK_THROWS_AS(ConvexEllipticSet::slag_branch(5, 1), InputError);
  CHECK_THROWS_AS(ConvexEllipticSet::det_floor(2, -1.0), InputError);
}

TEST_CASE("positivity: PSD matrices are never outside an elliptic cone") {
  CounterRng rng(27);
  for (const auto& c : elliptic_cones())
    for (int t = 0; t < 40; ++t) CHECK(psplus_membership(random_psd(c.dim(), rng, 1 + t % c.dim()), c).in_cone());
}

TEST_CASE("scaling invariance of the verdict") {
  CounterRng rng(28);
  for (const auto& c : elliptic_cones())
    for (int t = 0; t < 20; ++t) {
      const SymMatrix a = SymMatrix::random(c.dim(), rng);
      const double s = std::exp(rng.uniform(-4, 4));
      CHECK(cls(a, c) == cls(s * a, c));
    }
}

TEST_CASE("boundary = in the cone and minus it in the dual") {
  CounterRng rng(29);
  const ConeSpec c = ConeSpec::real_lines(3);
  for (int t = 0; t < 200; ++t) {
    SymMatrix a = SymMatrix::random(3, rng);
    if (t % 2 == 0) a = random_psd(3, rng, 2);  // lands on the boundary
    const bool boundary = cls(a, c) == MembershipClass::Boundary;
    const bool both = psplus_membership(a, c).in_cone() && dual_membership(-a, c).in_cone();
    CHECK(boundary == both);
  }
}

TEST_CASE("dual membership matches subaffinity of A + B over the cone") {
  CounterRng rng(30);
  const auto lambda_max = [](const SymMatrix& m) { return eig_sym(m).max(); };
  for (const ConeSpec& c : {ConeSpec::full_trace(3), ConeSpec::real_lines(3)}) {
    const bool trace_cone = c.family() == Family::FullTrace;
    for (int t = 0; t < 100; ++t) {
      const SymMatrix b = SymMatrix::random(3, rng);
      const bool in_dual = dual_membership(b, c).in_cone();
      const double key = trace_cone ? b.trace() / 3.0 : lambda_max(b);
      if (in_dual) {
        // every sampled A in P+ keeps A + B subaffine
        for (int s = 0; s < 20; ++s) {
          SymMatrix a = SymMatrix::random(3, rng);
          if (trace_cone) a += (std::max(0.0, -a.trace()) / 3.0 + 1e-3) * SymMatrix::identity(3);
          else a = random_psd(3, rng, 1 + s % 3);
          CHECK(psplus_membership(a, c).in_cone());
          CHECK(lambda_max(a + b) >= -1e-9 * (1 + (a + b).norm()));
        }
      } else {
        // A = -B + (key/2) I lies in P+ and A + B is negative definite
        const SymMatrix a = -b + (trace_cone ? key : key / 2) * SymMatrix::identity(3);
        CHECK(psplus_membership(a, c).in_cone());
        CHECK(lambda_max(a + b) < 0);
      }
    }
  }
}

TEST_CASE("cone JSON-level validation errors") {
  CHECK_THROWS_AS(psplus_membership(SymMatrix::identity(3), ConeSpec::real_lines(2)), InputError);
}
