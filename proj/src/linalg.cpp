#include "hcl/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace hcl {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

SymMatrix::SymMatrix(int n) : n_(n), a_(packed_size(n), 0.0) {
  if (n < 1) throw InputError("SymMatrix: dimension must be >= 1");
}

std::size_t SymMatrix::packed_index(int n, int i, int j) {
  if (i > j) std::swap(i, j);
  const auto si = static_cast<std::size_t>(i);
  return si * static_cast<std::size_t>(n) - si * (si - 1) / 2 + static_cast<std::size_t>(j - i);
}

SymMatrix SymMatrix::identity(int n) {
  SymMatrix m(n);
  for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
  return m;
}

SymMatrix SymMatrix::diagonal(std::span<const double> d) {
  SymMatrix m(static_cast<int>(d.size()));
  for (int i = 0; i < m.n_; ++i) m.at(i, i) = d[static_cast<std::size_t>(i)];
  return m;
}

SymMatrix SymMatrix::outer(std::span<const double> v) {
  SymMatrix m(static_cast<int>(v.size()));
  for (int i = 0; i < m.n_; ++i)
    for (int j = i; j < m.n_; ++j) m.at(i, j) = v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(j)];
  return m;
}

SymMatrix SymMatrix::sym_outer(std::span<const double> a, std::span<const double> b) {
  SymMatrix m(static_cast<int>(a.size()));
  for (int i = 0; i < m.n_; ++i)
    for (int j = i; j < m.n_; ++j) {
      const auto si = static_cast<std::size_t>(i), sj = static_cast<std::size_t>(j);
      m.at(i, j) = 0.5 * (a[si] * b[sj] + b[si] * a[sj]);
    }
  return m;
}

SymMatrix SymMatrix::from_upper(int n, std::vector<double> upper) {
  if (n < 1) throw InputError("SymMatrix: dimension must be >= 1");
  if (upper.size() != packed_size(n))
    throw InputError("SymMatrix: expected " + std::to_string(packed_size(n)) + " upper-triangle entries, got " +
                     std::to_string(upper.size()));
  SymMatrix m;
  m.n_ = n;
  m.a_ = std::move(upper);
  if (!m.is_finite()) throw InputError("SymMatrix: non-finite entry");
  return m;
}

SymMatrix SymMatrix::from_dense(int n, std::span<const double> dense) {
  SymMatrix m(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) m.at(i, j) = dense[static_cast<std::size_t>(i * n + j)];
  if (!m.is_finite()) throw InputError("SymMatrix: non-finite entry");
  return m;
}

SymMatrix SymMatrix::random(int n, CounterRng& rng, double scale) {
  SymMatrix m(n);
  for (auto& x : m.a_) x = scale * rng.normal();
  return m;
}

std::vector<double> SymMatrix::dense() const {
  std::vector<double> d(static_cast<std::size_t>(n_ * n_));
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) d[static_cast<std::size_t>(i * n_ + j)] = (*this)(i, j);
  return d;
}

Vec SymMatrix::apply(std::span<const double> v) const {
  Vec r(static_cast<std::size_t>(n_), 0.0);
  for (int i = 0; i < n_; ++i) {
    double s = 0;
    for (int j = 0; j < n_; ++j) s += (*this)(i, j) * v[static_cast<std::size_t>(j)];
    r[static_cast<std::size_t>(i)] = s;
  }
  return r;
}

double SymMatrix::quadratic_form(std::span<const double> v) const { return dot(v, apply(v)); }

double SymMatrix::trace() const {
  double t = 0;
  for (int i = 0; i < n_; ++i) t += (*this)(i, i);
  return t;
}

double SymMatrix::norm() const { return std::sqrt(frob_inner(*this, *this)); }

bool SymMatrix::is_finite() const {
  return std::all_of(a_.begin(), a_.end(), [](double x) { return std::isfinite(x); });
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& o) {
  if (o.n_ != n_) throw InputError("SymMatrix: dimension mismatch in +");
  for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
  return *this;
}

SymMatrix& SymMatrix::operator-=(const SymMatrix& o) {
  if (o.n_ != n_) throw InputError("SymMatrix: dimension mismatch in -");
  for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
  return *this;
}

SymMatrix& SymMatrix::operator*=(double s) {
  for (auto& x : a_) x *= s;
  return *this;
}

SymMatrix SymMatrix::restrict_to(const std::vector<Vec>& columns) const {
  const int k = static_cast<int>(columns.size());
  SymMatrix r(std::max(k, 1));
  if (k == 0) return r;
  std::vector<Vec> aq;
  aq.reserve(columns.size());
  for (const auto& c : columns) aq.push_back(apply(c));
  for (int i = 0; i < k; ++i)
    for (int j = i; j < k; ++j) r.at(i, j) = dot(columns[static_cast<std::size_t>(i)], aq[static_cast<std::size_t>(j)]);
  return r;
}

SymMatrix SymMatrix::extend_from(const SymMatrix& b, const std::vector<Vec>& columns, int n) {
  SymMatrix r(n);
  const int k = static_cast<int>(columns.size());
  for (int a = 0; a < k; ++a)
    for (int c = 0; c < k; ++c) {
      const double w = b(a, c);
      if (w == 0.0) continue;
      const auto& qa = columns[static_cast<std::size_t>(a)];
      const auto& qc = columns[static_cast<std::size_t>(c)];
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) r.at(i, j) += w * qa[static_cast<std::size_t>(i)] * qc[static_cast<std::size_t>(j)];
    }
  return r;
}

Vec SymMatrix::isometric_coordinates() const {
  Vec v;
  v.reserve(a_.size());
  for (int i = 0; i < n_; ++i)
    for (int j = i; j < n_; ++j) v.push_back(i == j ? (*this)(i, j) : std::sqrt(2.0) * (*this)(i, j));
  return v;
}

std::string SymMatrix::to_string() const {
  std::ostringstream os;
  os << "[";
  for (int i = 0; i < n_; ++i) {
    os << (i ? "; " : "");
    for (int j = 0; j < n_; ++j) os << (j ? " " : "") << (*this)(i, j);
  }
  os << "]";
  return os.str();
}

double frob_inner(const SymMatrix& a, const SymMatrix& b) {
  if (a.dim() != b.dim()) throw InputError("frob_inner: dimension mismatch");
  const int n = a.dim();
  double s = 0;
  for (int i = 0; i < n; ++i) {
    s += a(i, i) * b(i, i);
    for (int j = i + 1; j < n; ++j) s += 2.0 * a(i, j) * b(i, j);
  }
  return s;
}

Plane::Plane(int n, std::vector<Vec> basis, double tol) : n_(n), basis_(std::move(basis)) {
  if (n < 1) throw InputError("Plane: ambient dimension must be >= 1");
  if (static_cast<int>(basis_.size()) > n) throw InputError("Plane: more basis vectors than the ambient dimension");
  for (std::size_t i = 0; i < basis_.size(); ++i) {
    if (static_cast<int>(basis_[i].size()) != n) throw InputError("Plane: basis vector has wrong length");
    for (std::size_t j = i; j < basis_.size(); ++j) {
      const double expect = i == j ? 1.0 : 0.0;
      if (std::abs(dot(basis_[i], basis_[j]) - expect) > tol) throw InputError("Plane: basis is not orthonormal");
    }
  }
}

Plane Plane::span_of(int n, const std::vector<Vec>& vectors) {
  std::vector<Vec> q;
  for (const auto& v0 : vectors) {
    Vec v = v0;
    const double n0 = norm2(v);
    if (n0 == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& u : q) {
        const double c = dot(u, v);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * u[i];
      }
    const double nv = norm2(v);
    if (nv <= 1e-10 * n0) continue;
    for (auto& x : v) x /= nv;
    q.push_back(std::move(v));
  }
  return Plane(n, std::move(q));
}

Plane Plane::coordinate(int n, std::span<const int> axes) {
  std::vector<Vec> b;
  for (int ax : axes) {
    if (ax < 0 || ax >= n) throw InputError("Plane::coordinate: axis out of range");
    Vec e(static_cast<std::size_t>(n), 0.0);
    e[static_cast<std::size_t>(ax)] = 1.0;
    b.push_back(std::move(e));
  }
  return Plane(n, std::move(b));
}

Plane Plane::random(int n, int p, CounterRng& rng) {
  for (;;) {
    std::vector<Vec> vs;
    for (int i = 0; i < p; ++i) vs.push_back(rng.normal_vector(n));
    Plane pl = span_of(n, vs);
    if (pl.dim() == p) return pl;
  }
}

Plane Plane::orthogonal_complement() const {
  std::vector<Vec> all = basis_;
  for (int i = 0; i < n_; ++i) {
    Vec e(static_cast<std::size_t>(n_), 0.0);
    e[static_cast<std::size_t>(i)] = 1.0;
    all.push_back(std::move(e));
  }
  Plane full = span_of(n_, all);
  std::vector<Vec> rest(full.basis_.begin() + static_cast<std::ptrdiff_t>(basis_.size()), full.basis_.end());
  return Plane(n_, std::move(rest), 1e-10);
}

SymMatrix EigenSystem::reconstruct() const {
  const int n = static_cast<int>(values.size());
  SymMatrix r(n);
  for (int k = 0; k < n; ++k) r += values[static_cast<std::size_t>(k)] * SymMatrix::outer(vectors[static_cast<std::size_t>(k)]);
  return r;
}

EigenSystem eig_sym(const SymMatrix& a) {
  if (!a.is_finite()) throw InputError("eig_sym: non-finite entries");
  const int n = a.dim();
  auto m = a.dense();
  std::vector<double> v(static_cast<std::size_t>(n * n), 0.0);
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i * n + i)] = 1.0;
  auto at = [n](std::vector<double>& x, int i, int j) -> double& { return x[static_cast<std::size_t>(i * n + j)]; };

  const double scale = a.norm();
  const double threshold = kTol.jacobi * scale;
  for (int sweep = 0; sweep < 100 && scale > 0; ++sweep) {
    double off = 0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += 2.0 * at(m, p, q) * at(m, p, q);
    if (std::sqrt(off) <= threshold) break;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        const double apq = at(m, p, q);
        if (apq == 0.0) continue;
        const double theta = (at(m, q, q) - at(m, p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double mkp = at(m, k, p), mkq = at(m, k, q);
          at(m, k, p) = c * mkp - s * mkq;
          at(m, k, q) = s * mkp + c * mkq;
        }
        for (int k = 0; k < n; ++k) {
          const double mpk = at(m, p, k), mqk = at(m, q, k);
          at(m, p, k) = c * mpk - s * mqk;
          at(m, q, k) = s * mpk + c * mqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = at(v, k, p), vkq = at(v, k, q);
          at(v, k, p) = c * vkp - s * vkq;
          at(v, k, q) = s * vkp + c * vkq;
        }
      }
  }

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return at(m, x, x) < at(m, y, y); });
  EigenSystem es;
  for (int idx : order) {
    es.values.push_back(at(m, idx, idx));
    Vec col(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) col[static_cast<std::size_t>(k)] = at(v, k, idx);
    es.vectors.push_back(std::move(col));
  }
  return es;
}

SymMatrix plane_projection(const Plane& xi) {
  SymMatrix p(xi.ambient_dim());
  for (const auto& v : xi.basis()) p += SymMatrix::outer(v);
  return p;
}

double trace_on_plane(const SymMatrix& a, const Plane& xi) {
  if (a.dim() != xi.ambient_dim()) throw InputError("trace_on_plane: dimension mismatch");
  double t = 0;
  for (const auto& v : xi.basis()) t += a.quadratic_form(v);
  return t;
}

Vec apply_complex_structure(std::span<const double> v) {
  const std::size_t n = v.size();
  if (n % 2 != 0) throw InputError("complex structure needs an even dimension");
  const std::size_t m = n / 2;
  Vec r(n);
  for (std::size_t i = 0; i < m; ++i) {
    r[i] = -v[m + i];
    r[m + i] = v[i];
  }
  return r;
}

SymMatrix conjugate_by_complex_structure(const SymMatrix& a) {
  const int n = a.dim();
  if (n % 2 != 0) throw InputError("complex structure needs an even dimension");
  // (J^T A J)_{ij} = (J e_i)^T A (J e_j)
  std::vector<Vec> je;
  for (int i = 0; i < n; ++i) {
    Vec e(static_cast<std::size_t>(n), 0.0);
    e[static_cast<std::size_t>(i)] = 1.0;
    je.push_back(apply_complex_structure(e));
  }
  return a.restrict_to(je);
}

double elementary_symmetric(std::span<const double> values, int k) {
  if (k < 0 || k > static_cast<int>(values.size())) return 0.0;
  std::vector<double> e(static_cast<std::size_t>(k + 1), 0.0);
  e[0] = 1.0;
  for (double x : values)
    for (int j = k; j >= 1; --j) e[static_cast<std::size_t>(j)] += x * e[static_cast<std::size_t>(j - 1)];
  return e[static_cast<std::size_t>(k)];
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace hcl
