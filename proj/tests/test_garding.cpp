#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "hcl/cones.hpp"
#include "hcl/garding.hpp"

using namespace hcl;

namespace {

SymMatrix diag(std::initializer_list<double> d) { return SymMatrix::diagonal(Vec(d)); }

std::vector<double> real_parts(std::vector<std::complex<double>> r) {
  std::vector<double> out;
  for (auto z : r) out.push_back(z.real());
  std::sort(out.begin(), out.end());
  return out;
}

SymMatrix rotate(const SymMatrix& a, CounterRng& rng) {
  const int n = a.dim();
  const Plane q = Plane::random(n, n, rng);
  return SymMatrix::extend_from(a, q.basis(), n);
}

SymMatrix random_pd(int n, CounterRng& rng) {
  SymMatrix a = 0.1 * SymMatrix::identity(n);
  for (int i = 0; i < n; ++i) a += SymMatrix::outer(rng.normal_vector(n));
  return a;
}

}  // namespace

TEST_CASE("eval_ma examples") {
  CHECK(MAPolynomial::det_real(3)(SymMatrix::identity(3)) == doctest::Approx(1.0));
  CHECK(eval_ma(MAPolynomial::sigma(3, 2), diag({1, 2, 3})) == doctest::Approx(11.0));
  CHECK(MAPolynomial::slag_im(2)(SymMatrix::identity(2)) == doctest::Approx(2.0));
  CHECK_FALSE(MAPolynomial::slag_im(2).normalized());
  CHECK_FALSE(MAPolynomial::sigma(3, 2).normalized());
  CHECK(MAPolynomial::sigma(3, 3).normalized());
  CHECK_THROWS_AS(eval_ma(MAPolynomial::det_real(3), SymMatrix::identity(2)), InputError);
}

TEST_CASE("homogeneity and conjugation invariance") {
  CounterRng rng(31);
  const MAPolynomial polys[] = {MAPolynomial::det_real(3), MAPolynomial::sigma(4, 2), MAPolynomial::sigma(4, 3),
                                MAPolynomial::det_complex(2)};
  for (const auto& m : polys)
    for (int t = 0; t < 10; ++t) {
      const SymMatrix a = SymMatrix::random(m.dim(), rng);
      const double s = rng.uniform(0.2, 3.0);
      CHECK(m(s * a) == doctest::Approx(std::pow(s, m.degree()) * m(a)).epsilon(1e-10));
      if (m.kind() != PolyKind::DetComplex) CHECK(m(rotate(a, rng)) == doctest::Approx(m(a)).epsilon(1e-9));
    }
  const MAPolynomial slag = MAPolynomial::slag_im(3);
  const SymMatrix a = SymMatrix::random(3, rng);
  CHECK(slag(rotate(a, rng)) == doctest::Approx(slag(a)).epsilon(1e-9));
}

TEST_CASE("roots_of_pA examples") {
  const auto r12 = real_parts(roots_of_pA(MAPolynomial::det_real(2), diag({1, 2})));
  REQUIRE(r12.size() == 2);
  CHECK(r12[0] == doctest::Approx(-2.0));
  CHECK(r12[1] == doctest::Approx(-1.0));
  CounterRng rng(32);
  for (int t = 0; t < 20; ++t) {
    const int n = 2 + t % 4;
    const SymMatrix a = SymMatrix::random(n, rng);
    const auto r = roots_of_pA(MAPolynomial::sigma(n, 1), a);
    REQUIRE(r.size() == 1);
    CHECK(r[0].real() == doctest::Approx(-a.trace() / n).epsilon(1e-10));
    const auto d = real_parts(roots_of_pA(MAPolynomial::det_real(n), a));
    const EigenSystem e = eig_sym(a);
    for (int i = 0; i < n; ++i)
      CHECK(std::abs(d[static_cast<std::size_t>(i)] + e.values[static_cast<std::size_t>(n - 1 - i)]) < 1e-8);
  }
  for (const auto& m : {MAPolynomial::det_real(4), MAPolynomial::sigma(4, 2), MAPolynomial::det_complex(2)})
    for (auto z : roots_of_pA(m, SymMatrix::identity(m.dim()))) CHECK(std::abs(z + 1.0) < 1e-9);
}

TEST_CASE("hyperbolicity_test") {
  CounterRng rng(33);
  CHECK(hyperbolicity_test(MAPolynomial::det_real(4), 50, kTol.hyperbolic, rng).hyperbolic);
  CHECK(hyperbolicity_test(MAPolynomial::sigma(5, 3), 50, kTol.hyperbolic, rng).hyperbolic);
  const MAPolynomial q = MAPolynomial::custom(
      2, 2, [](const SymMatrix& a) { return a(0, 0) * a(0, 0) + a(0, 1) * a(0, 1); }, "a11^2+a12^2");
  const HyperbolicityReport h = hyperbolicity_test(q, 50, kTol.hyperbolic, rng);
  CHECK_FALSE(h.hyperbolic);
  // closed form: roots -a11 +- i a12
  const auto r = roots_of_pA(q, h.worst_matrix);
  REQUIRE(r.size() == 2);
  for (auto z : r) {
    CHECK(z.real() == doctest::Approx(-h.worst_matrix(0, 0)).epsilon(1e-8));
    CHECK(std::abs(z.imag()) == doctest::Approx(std::abs(h.worst_matrix(0, 1))).epsilon(1e-8));
  }
  CHECK_THROWS_AS(garding_membership(SymMatrix::from_upper(2, {1, 1, 0}), q), SemanticError);
}

TEST_CASE("garding_membership examples") {
  const MAPolynomial det2 = MAPolynomial::det_real(2);
  CHECK(garding_membership(diag({1, 2}), det2).cls == MembershipClass::Interior);
  CHECK(garding_membership(-SymMatrix::identity(2), det2).cls == MembershipClass::Outside);
  const MembershipVerdict b = garding_membership(diag({1, 1, -0.5}), MAPolynomial::sigma(3, 2));
  CHECK(b.cls == MembershipClass::Boundary);
  for (int k = 1; k <= 4; ++k)
    CHECK(garding_membership(SymMatrix::identity(4), MAPolynomial::sigma(4, k)).cls == MembershipClass::Interior);
}

TEST_CASE("det cone equals the PSD cone") {
  CounterRng rng(34);
  const ConeSpec g1 = ConeSpec::real_lines(3);
  const MAPolynomial det3 = MAPolynomial::det_real(3);
  for (int t = 0; t < 500; ++t) {
    const SymMatrix a = SymMatrix::random(3, rng);
    CHECK(psplus_membership(a, ConeSpec::garding(det3)).cls == psplus_membership(a, g1).cls);
  }
}

TEST_CASE("linearization") {
  const SymMatrix l = linearization(MAPolynomial::det_real(2), SymMatrix::identity(2));
  CHECK(l(0, 0) == doctest::Approx(1.0));
  CHECK(l(1, 1) == doctest::Approx(1.0));
  CHECK(std::abs(l(0, 1)) < 1e-9);
  const SymMatrix d = linearization(MAPolynomial::det_real(2), diag({3, 5}));
  CHECK(d(0, 0) == doctest::Approx(5.0));
  CHECK(d(1, 1) == doctest::Approx(3.0));
  CounterRng rng(35);
  for (int t = 0; t < 10; ++t) {
    const SymMatrix a = SymMatrix::random(3, rng);
    const SymMatrix s1 = linearization(MAPolynomial::sigma(3, 1), a);
    CHECK(std::abs(s1(0, 0) - 1) + std::abs(s1(1, 1) - 1) + std::abs(s1(0, 1)) < 1e-8);
    // sigma_2: A~ = sigma_1(A) I - A
    const SymMatrix s2 = linearization(MAPolynomial::sigma(3, 2), a);
    const SymMatrix want = a.trace() * SymMatrix::identity(3) - a;
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) CHECK(std::abs(s2(i, j) - want(i, j)) < 1e-8 * (1 + a.norm()));
  }
}

TEST_CASE("cone_ellipticity_E2") {
  CounterRng rng(36);
  CHECK(cone_ellipticity_E2(MAPolynomial::det_real(3), 32, rng).elliptic);
  for (int k = 1; k <= 4; ++k) CHECK(cone_ellipticity_E2(MAPolynomial::sigma(4, k), 32, rng).elliptic);
  const E2Report f = cone_ellipticity_E2(MAPolynomial::leading_minor(3, 2), 32, rng);
  CHECK_FALSE(f.elliptic);
  CHECK_FALSE(f.nonconstant);
  REQUIRE(f.failing_direction.size() == 3);
  CHECK(std::abs(f.failing_direction[2]) == doctest::Approx(1.0));
}

TEST_CASE("theorem_E3_check") {
  CounterRng rng(37);
  const E3Report d = theorem_E3_check(MAPolynomial::det_real(3), 100, rng);
  CHECK(d.ok);
  CHECK(d.min_eigenvalue > 0);
  const E3Report s1 = theorem_E3_check(MAPolynomial::sigma(3, 1), 20, rng);
  CHECK(s1.min_eigenvalue == doctest::Approx(1.0));
  const E3Report s2 = theorem_E3_check(MAPolynomial::sigma(3, 2), 100, rng);
  CHECK(s2.ok);
  CHECK(s2.min_eigenvalue > 0);
}

TEST_CASE("derived polynomials") {
  CounterRng rng(38);
  const MAPolynomial det4 = MAPolynomial::det_real(4);
  for (int t = 0; t < 50; ++t) {
    const int k = 1 + t % 4;
    const SymMatrix a = SymMatrix::random(4, rng);
    const double want = MAPolynomial::sigma(4, k)(a) / binomial(4, k);
    CHECK(std::abs(derived_poly(det4, k)(a) - want) < 1e-10 * std::max(1.0, std::abs(want)));
  }
  const SymMatrix a = SymMatrix::random(4, rng);
  CHECK(derived_poly(det4, 4)(a) == doctest::Approx(det4(a)).epsilon(1e-10));
  CHECK(derived_poly(det4, 0)(a) == doctest::Approx(1.0));
  CHECK(derived_poly(det4, 2).degree() == 2);
  CHECK_THROWS_AS(derived_poly(det4, 5), InputError);
}

TEST_CASE("Garding concavity of M^(1/m) and convexity of Gamma") {
  CounterRng rng(39);
  for (const auto& m : {MAPolynomial::det_real(3), MAPolynomial::sigma(3, 2), MAPolynomial::sigma(4, 3)}) {
    const int n = m.dim();
    for (int t = 0; t < 20; ++t) {
      const SymMatrix a = random_pd(n, rng), b = random_pd(n, rng);
      const double step = 0.05;
      auto g = [&](double s) { return std::pow(m(a + s * b), 1.0 / m.degree()); };
      for (int i = 1; i < 20; ++i) {
        const double s = i * step;
        CHECK(g(s + step) - 2 * g(s) + g(s - step) <= 1e-9 * (1 + g(s)));
      }
      const double w = rng.uniform();
      CHECK(garding_membership(w * a + (1 - w) * b, m).in_cone());
    }
  }
}
