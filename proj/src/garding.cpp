#include "hcl/garding.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace hcl {

std::string_view to_string(MembershipClass c) {
  switch (c) {
    case MembershipClass::Interior: return "Interior";
    case MembershipClass::Boundary: return "Boundary";
    case MembershipClass::Outside: return "Outside";
  }
  return "?";
}

namespace {

double small_det(std::vector<double> m, int r) {
  // Gaussian elimination with partial pivoting on an r x r row-major array.
  double det = 1.0;
  auto at = [&](int i, int j) -> double& { return m[static_cast<std::size_t>(i * r + j)]; };
  for (int c = 0; c < r; ++c) {
    int piv = c;
    for (int i = c + 1; i < r; ++i)
      if (std::abs(at(i, c)) > std::abs(at(piv, c))) piv = i;
    if (at(piv, c) == 0.0) return 0.0;
    if (piv != c) {
      for (int j = 0; j < r; ++j) std::swap(at(piv, j), at(c, j));
      det = -det;
    }
    det *= at(c, c);
    for (int i = c + 1; i < r; ++i) {
      const double f = at(i, c) / at(c, c);
      for (int j = c; j < r; ++j) at(i, j) -= f * at(c, j);
    }
  }
  return det;
}

void check_dim(const MAPolynomial& m, const SymMatrix& a) {
  if (a.dim() != m.dim()) throw InputError("MA polynomial: dimension mismatch");
}

}  // namespace

MAPolynomial MAPolynomial::det_real(int n) {
  if (n < 1) throw InputError("det_real: n >= 1 required");
  return MAPolynomial(n, PolyKind::DetReal, n, n);
}

MAPolynomial MAPolynomial::det_complex(int m) {
  if (m < 1) throw InputError("det_complex: m >= 1 required");
  return MAPolynomial(2 * m, PolyKind::DetComplex, m, m);
}

MAPolynomial MAPolynomial::sigma(int n, int k) {
  if (n < 1 || k < 1 || k > n) throw InputError("sigma: need 1 <= k <= n");
  MAPolynomial p(n, PolyKind::Sigma, k, k);
  p.normalized_ = k == n;  // sigma_k(I) = binomial(n, k)
  return p;
}

MAPolynomial MAPolynomial::slag_im(int n) {
  if (n < 2) throw InputError("slag_im: n >= 2 required");
  // Im prod(1 + i(t + lambda_j)) has degree n in t for odd n and n-1 for even n.
  MAPolynomial p(n, PolyKind::SLagIm, n % 2 == 1 ? n : n - 1, 0);
  p.normalized_ = false;
  p.homogeneous_ = false;
  return p;
}

MAPolynomial MAPolynomial::leading_minor(int n, int r) {
  if (r < 1 || r > n) throw InputError("leading_minor: need 1 <= r <= n");
  return MAPolynomial(n, PolyKind::LeadingMinor, r, r);
}

MAPolynomial MAPolynomial::custom(int n, int degree, std::function<double(const SymMatrix&)> fn, std::string name) {
  if (n < 1 || degree < 1) throw InputError("custom polynomial: bad dimension or degree");
  MAPolynomial p(n, PolyKind::Custom, degree, 0);
  p.custom_ = std::move(fn);
  p.custom_name_ = std::move(name);
  p.normalized_ = std::abs(p.custom_(SymMatrix::identity(n)) - 1.0) < 1e-12;
  return p;
}

bool MAPolynomial::spectral() const {
  return kind_ == PolyKind::DetReal || kind_ == PolyKind::Sigma || kind_ == PolyKind::SLagIm ||
         (kind_ == PolyKind::Derived && base_->spectral());
}

std::string MAPolynomial::name() const {
  switch (kind_) {
    case PolyKind::DetReal: return "det";
    case PolyKind::DetComplex: return "det_complex(" + std::to_string(n_ / 2) + ")";
    case PolyKind::Sigma: return "sigma_" + std::to_string(k_);
    case PolyKind::SLagIm: return "slag_im";
    case PolyKind::LeadingMinor: return "leading_minor(" + std::to_string(k_) + ")";
    case PolyKind::Derived: return "derived(" + base_->name() + "," + std::to_string(k_) + ")";
    case PolyKind::Custom: return custom_name_;
  }
  return "?";
}

double MAPolynomial::operator()(const SymMatrix& a) const {
  check_dim(*this, a);
  switch (kind_) {
    case PolyKind::DetReal: {
      double p = 1.0;
      for (double l : eig_sym(a).values) p *= l;
      return p;
    }
    case PolyKind::Sigma: return elementary_symmetric(eig_sym(a).values, k_);
    case PolyKind::SLagIm: {
      std::complex<double> z(1.0, 0.0);
      for (double l : eig_sym(a).values) z *= std::complex<double>(1.0, l);
      return z.imag();
    }
    case PolyKind::DetComplex: {
      // The Hermitian part is J-invariant, so each complex eigenvalue appears twice.
      const SymMatrix herm = 0.5 * (a + conjugate_by_complex_structure(a));
      const auto ev = eig_sym(herm).values;
      double p = 1.0;
      for (std::size_t i = 0; i < ev.size(); i += 2) p *= 0.5 * (ev[i] + ev[i + 1]);
      return p;
    }
    case PolyKind::LeadingMinor: {
      std::vector<double> block(static_cast<std::size_t>(k_ * k_));
      for (int i = 0; i < k_; ++i)
        for (int j = 0; j < k_; ++j) block[static_cast<std::size_t>(i * k_ + j)] = a(i, j);
      return small_det(std::move(block), k_);
    }
    case PolyKind::Derived: {
      const int mb = base_->degree();
      const auto id = SymMatrix::identity(n_);
      // t ~ 1/|lambda| balances the conditioning of low and high coefficients.
      const double radius = std::clamp(std::sqrt(static_cast<double>(mb)) / std::max(a.norm(), 1e-300), 1e-3, 1e3);
      const auto c = taylor_coefficients([&](double t) { return (*base_)(id + t * a); }, mb, radius);
      return c[static_cast<std::size_t>(k_)] / binomial(mb, k_);
    }
    case PolyKind::Custom: return custom_(a);
  }
  return 0.0;
}

std::vector<double> taylor_coefficients(const std::function<double(double)>& q, int m, double radius) {
  if (m < 0) throw InputError("taylor_coefficients: negative degree");
  const int np = m + 1;
  std::vector<double> f(static_cast<std::size_t>(np));
  for (int j = 0; j < np; ++j) {
    const double s = std::cos(std::numbers::pi * (j + 0.5) / np);
    f[static_cast<std::size_t>(j)] = q(radius * s);
  }
  // Chebyshev coefficients a_k.
  std::vector<double> cheb(static_cast<std::size_t>(np), 0.0);
  for (int k = 0; k < np; ++k) {
    double s = 0;
    for (int j = 0; j < np; ++j) s += f[static_cast<std::size_t>(j)] * std::cos(std::numbers::pi * k * (j + 0.5) / np);
    cheb[static_cast<std::size_t>(k)] = (k == 0 ? 1.0 : 2.0) * s / np;
  }
  // sum a_k T_k(s) -> monomials in s, via T_{k+1} = 2 s T_k - T_{k-1}.
  std::vector<double> mono(static_cast<std::size_t>(np), 0.0);
  std::vector<double> tkm1(static_cast<std::size_t>(np), 0.0), tk(static_cast<std::size_t>(np), 0.0);
  tkm1[0] = 1.0;
  if (np > 1) tk[1] = 1.0;
  mono[0] += cheb[0];
  for (int k = 1; k < np; ++k) {
    for (int i = 0; i < np; ++i) mono[static_cast<std::size_t>(i)] += cheb[static_cast<std::size_t>(k)] * tk[static_cast<std::size_t>(i)];
    std::vector<double> next(static_cast<std::size_t>(np), 0.0);
    for (int i = 0; i + 1 < np; ++i) next[static_cast<std::size_t>(i + 1)] = 2.0 * tk[static_cast<std::size_t>(i)];
    for (int i = 0; i < np; ++i) next[static_cast<std::size_t>(i)] -= tkm1[static_cast<std::size_t>(i)];
    tkm1 = std::move(tk);
    tk = std::move(next);
  }
  double scale = 1.0;
  for (int i = 0; i < np; ++i) {
    mono[static_cast<std::size_t>(i)] /= scale;
    scale *= radius;
  }
  return mono;
}

double eval_ma(const MAPolynomial& m, const SymMatrix& a) { return m(a); }

namespace {

std::complex<double> horner(const std::vector<double>& c, std::complex<double> z, std::complex<double>* deriv) {
  std::complex<double> p = 0.0, dp = 0.0;
  for (std::size_t i = c.size(); i-- > 0;) {
    dp = dp * z + p;
    p = p * z + c[i];
  }
  if (deriv) *deriv = dp;
  return p;
}

}  // namespace

std::vector<std::complex<double>> roots_of_pA(const MAPolynomial& m, const SymMatrix& a) {
  check_dim(m, a);
  const int deg = m.degree();
  const auto id = SymMatrix::identity(m.dim());
  const double radius = 1.0 + a.norm();
  // Coefficients in the scaled variable s = t / radius keep the roots O(1).
  const auto c = taylor_coefficients([&](double s) { return m(radius * s * id + a); }, deg, 1.0);
  double cmax = 0;
  for (double x : c) cmax = std::max(cmax, std::abs(x));
  const double lead = c.back();
  if (!(std::abs(lead) > 1e-12 * cmax))
    throw NumericalError("roots_of_pA: degenerate leading coefficient for " + m.name());

  std::vector<std::complex<double>> roots;
  if (deg == 1) {
    roots.emplace_back(-c[0] / c[1], 0.0);
  } else {
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(deg, deg);
    for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -c[static_cast<std::size_t>(i)] / lead;
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
    if (es.info() != Eigen::Success) throw NumericalError("roots_of_pA: companion eigenvalue solver failed");
    for (int i = 0; i < deg; ++i) roots.push_back(es.eigenvalues()(i));
  }

  auto polish = [&](std::complex<double> z) {
    for (int it = 0; it < 3; ++it) {
      std::complex<double> dp;
      const auto p = horner(c, z, &dp);
      if (std::abs(dp) == 0.0) break;
      const auto cand = z - p / dp;
      if (std::abs(horner(c, cand, nullptr)) < std::abs(p)) z = cand;
      else break;
    }
    return z;
  };

  // A k-fold root is split by rounding into a ring of radius ~ eps^(1/k);
  // such clusters are replaced by their mean.
  std::sort(roots.begin(), roots.end(), [](auto x, auto y) { return x.real() < y.real(); });
  std::vector<std::complex<double>> merged;
  std::size_t i = 0;
  while (i < roots.size()) {
    std::size_t j = i + 1;
    std::size_t best_end = i + 1;
    while (j < roots.size() && std::abs(roots[j] - roots[j - 1]) < 0.05) ++j;
    // try the largest prefix [i, e) that qualifies as a single multiple root
    for (std::size_t e = j; e > i + 1; --e) {
      std::complex<double> mean = 0.0;
      for (std::size_t q = i; q < e; ++q) mean += roots[q];
      mean /= static_cast<double>(e - i);
      double spread = 0;
      for (std::size_t q = i; q < e; ++q) spread = std::max(spread, std::abs(roots[q] - mean));
      const double k = static_cast<double>(e - i);
      if (spread <= 10.0 * std::pow(1e-14, 1.0 / k) * (1.0 + std::abs(mean))) {
        best_end = e;
        break;
      }
    }
    if (best_end > i + 1) {
      std::complex<double> mean = 0.0;
      for (std::size_t q = i; q < best_end; ++q) mean += roots[q];
      mean /= static_cast<double>(best_end - i);
      for (std::size_t q = i; q < best_end; ++q) merged.push_back(mean);
    } else {
      merged.push_back(polish(roots[i]));
    }
    i = best_end;
  }
  for (auto& z : merged) {
    z *= radius;
    if (std::abs(z.imag()) <= 1e-13 * (1.0 + std::abs(z))) z = {z.real(), 0.0};
  }
  std::sort(merged.begin(), merged.end(), [](auto x, auto y) {
    return x.real() < y.real() || (x.real() == y.real() && x.imag() < y.imag());
  });
  return merged;
}

double max_real_root(const MAPolynomial& m, const SymMatrix& a) {
  const auto roots = roots_of_pA(m, a);
  double r = -std::numeric_limits<double>::infinity();
  for (const auto& z : roots) r = std::max(r, z.real());
  return r;
}

HyperbolicityReport hyperbolicity_test(const MAPolynomial& m, int trials, double tau, CounterRng& rng) {
  if (trials < 1) throw InputError("hyperbolicity_test: trials >= 1 required");
  HyperbolicityReport rep;
  rep.worst_matrix = SymMatrix(m.dim());
  for (int t = 0; t < trials; ++t) {
    const SymMatrix a = SymMatrix::random(m.dim(), rng);
    for (const auto& z : roots_of_pA(m, a)) {
      const double im = std::abs(z.imag()) / (1.0 + std::abs(z));
      if (im > rep.worst_imag) {
        rep.worst_imag = im;
        rep.worst_matrix = a;
      }
    }
    ++rep.trials;
  }
  rep.hyperbolic = rep.worst_imag <= tau;
  return rep;
}

MembershipVerdict garding_membership(const SymMatrix& a, const MAPolynomial& m, double tau) {
  const auto roots = roots_of_pA(m, a);
  double r = -std::numeric_limits<double>::infinity();
  for (const auto& z : roots) {
    if (std::abs(z.imag()) > kTol.hyperbolic * (1.0 + std::abs(z)))
      throw SemanticError("garding_membership: " + m.name() + " is not hyperbolic at this matrix");
    r = std::max(r, z.real());
  }
  MembershipVerdict v;
  v.margin = -r;
  v.cls = classify_margin(v.margin, tau);
  // The supporting normal at the boundary point A + rI lies in the polar cone.
  SymMatrix w = linearization(m, a + r * SymMatrix::identity(m.dim()));
  const double tr = w.trace();
  v.witness = tr > 0 ? (1.0 / tr) * w : SymMatrix::identity(m.dim()) * (1.0 / m.dim());
  return v;
}

SymMatrix linearization(const MAPolynomial& m, const SymMatrix& a) {
  check_dim(m, a);
  const int n = m.dim();
  const double h = 1e-5 * (1.0 + a.norm());
  SymMatrix out(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      SymMatrix e(n);
      e.at(i, j) = 1.0;  // for i < j this is E_ij + E_ji in the packed form
      const double d = (m(a + h * e) - m(a - h * e)) / (2.0 * h);
      out.at(i, j) = i == j ? d : 0.5 * d;
    }
  return out;
}

E2Report cone_ellipticity_E2(const MAPolynomial& m, int directions, CounterRng& rng, double s_max) {
  const int n = m.dim();
  const auto id = SymMatrix::identity(n);
  E2Report rep;
  auto test = [&](const Vec& e) {
    const auto pe = SymMatrix::outer(e);
    bool varies = false, positive = true;
    constexpr int kSteps = 16;
    for (int k = 1; k <= kSteps; ++k) {
      const double s = s_max * k / kSteps;
      const double v = m(id + s * pe);
      if (std::abs(v - 1.0) > 1e-9) varies = true;
      if (!(v > 0.0)) positive = false;
    }
    ++rep.directions_tested;
    if ((!varies || !positive) && rep.elliptic) {
      rep.elliptic = false;
      rep.nonconstant = varies;
      rep.positive = positive;
      rep.failing_direction = e;
    }
  };
  for (int i = 0; i < n; ++i) {
    Vec e(static_cast<std::size_t>(n), 0.0);
    e[static_cast<std::size_t>(i)] = 1.0;
    test(e);
  }
  for (int t = 0; t < directions; ++t) test(rng.unit_vector(n));
  return rep;
}

E3Report theorem_E3_check(const MAPolynomial& m, int trials, CounterRng& rng) {
  const int n = m.dim();
  const auto id = SymMatrix::identity(n);
  E3Report rep;
  rep.min_eigenvalue = std::numeric_limits<double>::infinity();
  rep.min_relative_eigenvalue = std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    const SymMatrix r = SymMatrix::random(n, rng);
    // shifting by s moves every root of p_R left by s
    const double top = max_real_root(m, r);
    const SymMatrix a = r + (top + rng.uniform(0.1, 1.1)) * id;
    if (!garding_membership(a, m).interior()) continue;
    const auto es = eig_sym(linearization(m, a));
    rep.min_eigenvalue = std::min(rep.min_eigenvalue, es.min());
    if (es.max() > 0) rep.min_relative_eigenvalue = std::min(rep.min_relative_eigenvalue, es.min() / es.max());
    if (!(es.min() > 0)) rep.ok = false;
    ++rep.trials;
  }
  if (rep.trials == 0) rep.ok = false;
  return rep;
}

MAPolynomial derived_poly(const MAPolynomial& m, int k) {
  if (k < 0 || k > m.degree()) throw InputError("derived_poly: k out of range");
  MAPolynomial d(m.dim(), PolyKind::Derived, k, k);
  d.base_ = std::make_shared<const MAPolynomial>(m);
  d.normalized_ = m.normalized();
  d.homogeneous_ = m.homogeneous();
  return d;
}

}  // namespace hcl
