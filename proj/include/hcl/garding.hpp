#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "hcl/linalg.hpp"
#include "hcl/verdict.hpp"

namespace hcl {

enum class PolyKind { DetReal, DetComplex, Sigma, SLagIm, Derived, LeadingMinor, Custom };

/// A polynomial M on Sym^2(R^n), intended to be hyperbolic in the direction I.
/// Immutable; Derived polynomials hold their base through a shared pointer.
class MAPolynomial {
 public:
  /// det A.
  static MAPolynomial det_real(int n);
  /// Complex determinant of the Hermitian part of A on R^{2m} = C^m.
  static MAPolynomial det_complex(int m);
  /// sigma_k(A) = e_k(eigenvalues).
  static MAPolynomial sigma(int n, int k);
  /// Im det(I + iA); not homogeneous and not normalized.
  static MAPolynomial slag_im(int n);
  /// det of the top-left r x r block.
  static MAPolynomial leading_minor(int n, int r);
  static MAPolynomial custom(int n, int degree, std::function<double(const SymMatrix&)> fn, std::string name);

  int dim() const { return n_; }
  int degree() const { return degree_; }
  PolyKind kind() const { return kind_; }
  int k() const { return k_; }
  /// M(I) = 1 holds.
  bool normalized() const { return normalized_; }
  bool homogeneous() const { return homogeneous_; }
  /// Value depends only on the eigenvalues.
  bool spectral() const;
  const MAPolynomial* base() const { return base_.get(); }
  std::string name() const;

  double operator()(const SymMatrix& a) const;

 private:
  friend MAPolynomial derived_poly(const MAPolynomial& m, int k);
  MAPolynomial(int n, PolyKind kind, int degree, int k) : n_(n), degree_(degree), k_(k), kind_(kind) {}

  int n_;
  int degree_;
  int k_;
  PolyKind kind_;
  bool normalized_ = true;
  bool homogeneous_ = true;
  std::shared_ptr<const MAPolynomial> base_;
  std::function<double(const SymMatrix&)> custom_;
  std::string custom_name_;
};

/// Monomial coefficients c_0..c_m of the degree-m polynomial q, recovered by
/// interpolation on m+1 Chebyshev nodes in [-radius, radius].
std::vector<double> taylor_coefficients(const std::function<double(double)>& q, int m, double radius);

double eval_ma(const MAPolynomial& m, const SymMatrix& a);

/// Roots of t -> M(tI + A), sorted by real part ascending.
std::vector<std::complex<double>> roots_of_pA(const MAPolynomial& m, const SymMatrix& a);

/// Largest real part among the roots of p_A.
double max_real_root(const MAPolynomial& m, const SymMatrix& a);

struct HyperbolicityReport {
  bool hyperbolic = true;
  double worst_imag = 0.0;  // max |Im r| / (1 + |r|) seen
  SymMatrix worst_matrix;
  int trials = 0;
};

HyperbolicityReport hyperbolicity_test(const MAPolynomial& m, int trials, double tau, CounterRng& rng);

/// Throws SemanticError when p_A has a non-real root.
MembershipVerdict garding_membership(const SymMatrix& a, const MAPolynomial& m, double tau = kTol.membership);

/// The matrix A~ with d/dt M(A + tH)|_0 = <H, A~>, by central differences.
SymMatrix linearization(const MAPolynomial& m, const SymMatrix& a);

struct E2Report {
  bool elliptic = true;
  bool nonconstant = true;  // condition a)
  bool positive = true;     // condition b)
  Vec failing_direction;
  int directions_tested = 0;
};

/// Tests s -> M(I + s P_e) over the coordinate axes plus `directions` random unit e.
E2Report cone_ellipticity_E2(const MAPolynomial& m, int directions, CounterRng& rng, double s_max = 4.0);

struct E3Report {
  bool ok = true;
  double min_eigenvalue = 0.0;           // smallest eigenvalue of A~ seen
  double min_relative_eigenvalue = 0.0;  // smallest lambda_min / lambda_max of A~
  int trials = 0;
};

/// Samples interior points of Gamma(M) and checks that A~ is positive definite there.
E3Report theorem_E3_check(const MAPolynomial& m, int trials, CounterRng& rng);

/// M^(k)(A): the k-th Taylor coefficient of t -> M(I + tA) over binomial(m, k).
MAPolynomial derived_poly(const MAPolynomial& m, int k);

}  // namespace hcl
