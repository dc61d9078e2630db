#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hcl/config.hpp"
#include "hcl/rng.hpp"

namespace hcl {

using Vec = std::vector<double>;

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

/// Real symmetric n x n matrix. Only the upper triangle is stored, row-major:
/// (0,0) (0,1) ... (0,n-1) (1,1) ... (n-1,n-1).
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(int n);

  static SymMatrix identity(int n);
  static SymMatrix diagonal(std::span<const double> d);
  /// v o v = v v^T.
  static SymMatrix outer(std::span<const double> v);
  /// Symmetrized product (a b^T + b a^T) / 2.
  static SymMatrix sym_outer(std::span<const double> a, std::span<const double> b);
  /// Validates length n(n+1)/2 and finiteness.
  static SymMatrix from_upper(int n, std::vector<double> upper);
  /// Uses the upper triangle of a dense row-major n x n array.
  static SymMatrix from_dense(int n, std::span<const double> dense);
  static SymMatrix random(int n, CounterRng& rng, double scale = 1.0);

  int dim() const { return n_; }
  static constexpr std::size_t packed_size(int n) {
    return static_cast<std::size_t>(n) * static_cast<std::size_t>(n + 1) / 2;
  }
  static std::size_t packed_index(int n, int i, int j);

  double operator()(int i, int j) const { return a_[packed_index(n_, i, j)]; }
  double& at(int i, int j) { return a_[packed_index(n_, i, j)]; }
  const std::vector<double>& upper() const { return a_; }

  std::vector<double> dense() const;
  Vec apply(std::span<const double> v) const;
  double quadratic_form(std::span<const double> v) const;
  double trace() const;
  /// Frobenius norm sqrt(tr A^2).
  double norm() const;
  bool is_finite() const;

  SymMatrix& operator+=(const SymMatrix& o);
  SymMatrix& operator-=(const SymMatrix& o);
  SymMatrix& operator*=(double s);
  friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
  friend SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
  friend SymMatrix operator*(double s, SymMatrix a) { return a *= s; }
  friend SymMatrix operator*(SymMatrix a, double s) { return a *= s; }
  SymMatrix operator-() const { return -1.0 * *this; }

  /// Q^T A Q for Q with orthonormal columns given as a list of vectors;
  /// result is k x k with k = number of columns.
  SymMatrix restrict_to(const std::vector<Vec>& columns) const;
  /// Q B Q^T: embeds a k x k form back into R^n.
  static SymMatrix extend_from(const SymMatrix& b, const std::vector<Vec>& columns, int n);

  /// Coordinates in an orthonormal basis of Sym^2 (off-diagonals scaled by sqrt 2),
  /// so the Euclidean inner product of two such vectors is tr(AB).
  Vec isometric_coordinates() const;

  std::string to_string() const;

 private:
  int n_ = 0;
  std::vector<double> a_;
};

/// tr(AB).
double frob_inner(const SymMatrix& a, const SymMatrix& b);

/// A p-plane in R^n with an orthonormal basis. p = 0 denotes the zero subspace.
class Plane {
 public:
  Plane() = default;
  /// Validates that the basis is orthonormal to `tol`.
  Plane(int n, std::vector<Vec> basis, double tol = kTol.orthonormal);

  /// Orthonormalizes (twice-iterated modified Gram-Schmidt); drops
  /// vectors that are dependent to 1e-10.
  static Plane span_of(int n, const std::vector<Vec>& vectors);
  static Plane coordinate(int n, std::span<const int> axes);
  static Plane random(int n, int p, CounterRng& rng);

  int ambient_dim() const { return n_; }
  int dim() const { return static_cast<int>(basis_.size()); }
  const std::vector<Vec>& basis() const { return basis_; }

  Plane orthogonal_complement() const;

 private:
  int n_ = 0;
  std::vector<Vec> basis_;
};

/// Eigenvalues ascending, eigenvectors[i] paired with eigenvalues[i].
struct EigenSystem {
  Vec values;
  std::vector<Vec> vectors;

  double min() const { return values.front(); }
  double max() const { return values.back(); }
  SymMatrix reconstruct() const;
};

/// Cyclic Jacobi rotations; stops when the off-diagonal Frobenius norm drops
/// below kTol.jacobi * ||A||. Deterministic.
EigenSystem eig_sym(const SymMatrix& a);

/// P_xi = sum_j v_j v_j^T.
SymMatrix plane_projection(const Plane& xi);

/// tr_xi A = <A, P_xi> evaluated as sum_j v_j^T A v_j.
double trace_on_plane(const SymMatrix& a, const Plane& xi);

/// Standard complex structure on R^{2m} = C^m with coordinates
/// (x_1..x_m, y_1..y_m): J(x, y) = (-y, x).
Vec apply_complex_structure(std::span<const double> v);
/// J^T A J.
SymMatrix conjugate_by_complex_structure(const SymMatrix& a);

/// Elementary symmetric polynomial e_k of the given values (e_0 = 1).
double elementary_symmetric(std::span<const double> values, int k);

double binomial(int n, int k);

}  // namespace hcl
