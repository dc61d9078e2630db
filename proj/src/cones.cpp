#include "hcl/cones.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

namespace hcl {

std::string_view to_string(Family f) {
  switch (f) {
    case Family::RealLines: return "real-lines";
    case Family::RealPlanes: return "real-planes";
    case Family::FullTrace: return "full-trace";
    case Family::ComplexLines: return "complex-lines";
    case Family::Lagrangian: return "lagrangian";
    case Family::FixedAxis: return "fixed-axis";
  }
  return "?";
}

std::string_view to_string(ConeKind k) {
  switch (k) {
    case ConeKind::Generated: return "Generated";
    case ConeKind::GrassmannFamily: return "GrassmannFamily";
    case ConeKind::GardingCone: return "GardingCone";
  }
  return "?";
}

namespace {

// Primitive vectors of {-1,0,1}^n with first nonzero entry positive, sorted by support size.
std::vector<Vec> unit_lattice_directions(int n) {
  std::vector<Vec> out;
  std::vector<int> digits(static_cast<std::size_t>(n), -1);
  for (;;) {
    int first = 0;
    for (int d : digits)
      if (d != 0) {
        first = d;
        break;
      }
    if (first > 0) {
      Vec v(digits.begin(), digits.end());
      out.push_back(v);
    }
    int i = n - 1;
    while (i >= 0 && digits[static_cast<std::size_t>(i)] == 1) digits[static_cast<std::size_t>(i--)] = -1;
    if (i < 0) break;
    ++digits[static_cast<std::size_t>(i)];
  }
  auto support = [](const Vec& v) { return std::count_if(v.begin(), v.end(), [](double x) { return x != 0; }); };
  std::stable_sort(out.begin(), out.end(), [&](const Vec& a, const Vec& b) { return support(a) < support(b); });
  for (auto& v : out) {
    const double s = norm2(v);
    for (auto& x : v) x /= s;
  }
  return out;
}

void for_each_subset(int n, int k, const std::function<bool(const std::vector<int>&)>& fn) {
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  for (;;) {
    if (!fn(idx)) return;
    int i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) return;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
}

// Columns of a Haar-ish random unitary in C^m, returned as real vectors (Re, Im) in R^{2m}.
std::vector<Vec> random_lagrangian_basis(int m, CounterRng& rng) {
  using C = std::complex<double>;
  std::vector<std::vector<C>> cols;
  for (int j = 0; j < m; ++j) {
    std::vector<C> v(static_cast<std::size_t>(m));
    for (auto& z : v) z = C(rng.normal(), rng.normal());
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& u : cols) {
        C proj = 0;
        for (int i = 0; i < m; ++i) proj += std::conj(u[static_cast<std::size_t>(i)]) * v[static_cast<std::size_t>(i)];
        for (int i = 0; i < m; ++i) v[static_cast<std::size_t>(i)] -= proj * u[static_cast<std::size_t>(i)];
      }
    double s = 0;
    for (const auto& z : v) s += std::norm(z);
    s = std::sqrt(s);
    for (auto& z : v) z /= s;
    cols.push_back(std::move(v));
  }
  std::vector<Vec> out;
  for (const auto& u : cols) {
    Vec r(static_cast<std::size_t>(2 * m));
    for (int i = 0; i < m; ++i) {
      r[static_cast<std::size_t>(i)] = u[static_cast<std::size_t>(i)].real();
      r[static_cast<std::size_t>(m + i)] = u[static_cast<std::size_t>(i)].imag();
    }
    out.push_back(std::move(r));
  }
  return out;
}

SymMatrix trace_normalized(const SymMatrix& g) {
  const double tr = g.trace();
  if (tr > kTol.zero_floor * g.norm()) return (1.0 / tr) * g;
  return (1.0 / g.norm()) * g;
}

void check_dims(const SymMatrix& a, const ConeSpec& cone) {
  if (a.dim() != cone.dim()) throw InputError("cone: dimension mismatch");
}

}  // namespace

ConeSpec ConeSpec::generated(int n, std::vector<SymMatrix> generators) {
  if (n < 1) throw InputError("cone: n >= 1 required");
  if (generators.empty()) throw InputError("cone: empty generator list");
  for (const auto& g : generators) {
    if (g.dim() != n) throw InputError("cone: generator dimension mismatch");
    if (!g.is_finite()) throw InputError("cone: non-finite generator");
    if (g.norm() <= kTol.zero_floor) throw InputError("cone: zero generator");
  }
  ConeSpec c(n, ConeKind::Generated);
  c.generators_ = std::move(generators);
  c.density_ = static_cast<int>(c.generators_.size());
  return c;
}

ConeSpec ConeSpec::family(Family f, int n, int p, int density, std::uint64_t seed) {
  if (n < 1) throw InputError("cone: n >= 1 required");
  if (density < 1) throw InputError("cone: density >= 1 required");
  ConeSpec c(n, ConeKind::GrassmannFamily);
  c.family_ = f;
  c.density_ = density;
  c.seed_ = seed;
  switch (f) {
    case Family::RealLines: c.p_ = 1; break;
    case Family::RealPlanes:
      if (p < 1 || p > n) throw InputError("cone: real-planes needs 1 <= p <= n");
      c.p_ = p;
      break;
    case Family::FullTrace:
      c.p_ = n;
      c.density_ = 1;
      break;
    case Family::ComplexLines:
      if (n % 2 != 0) throw InputError("cone: complex-lines needs even n");
      c.p_ = 2;
      break;
    case Family::Lagrangian:
      if (n % 2 != 0) throw InputError("cone: lagrangian needs even n");
      c.p_ = n / 2;
      break;
    case Family::FixedAxis:
      c.p_ = 1;
      c.density_ = 1;
      break;
  }
  for (const auto& xi : c.sample_planes()) c.generators_.push_back(plane_projection(xi));
  return c;
}

ConeSpec ConeSpec::real_lines(int n, int density, std::uint64_t seed) {
  return family(Family::RealLines, n, 1, density, seed);
}
ConeSpec ConeSpec::real_planes(int n, int p, int density, std::uint64_t seed) {
  return family(Family::RealPlanes, n, p, density, seed);
}
ConeSpec ConeSpec::full_trace(int n) { return family(Family::FullTrace, n, n, 1, 0); }
ConeSpec ConeSpec::complex_lines(int m, int density, std::uint64_t seed) {
  return family(Family::ComplexLines, 2 * m, 2, density, seed);
}
ConeSpec ConeSpec::lagrangian(int m, int density, std::uint64_t seed) {
  return family(Family::Lagrangian, 2 * m, m, density, seed);
}
ConeSpec ConeSpec::fixed_axis(int n) { return family(Family::FixedAxis, n, 1, 1, 0); }

ConeSpec ConeSpec::garding(MAPolynomial m) {
  ConeSpec c(m.dim(), ConeKind::GardingCone);
  c.poly_ = std::make_shared<const MAPolynomial>(std::move(m));
  return c;
}

const MAPolynomial& ConeSpec::polynomial() const {
  if (!poly_) throw InputError("cone: not a Garding cone");
  return *poly_;
}

std::string ConeSpec::name() const {
  switch (kind_) {
    case ConeKind::Generated: return "generated(" + std::to_string(generators_.size()) + ")";
    case ConeKind::GardingCone: return "garding(" + poly_->name() + ")";
    case ConeKind::GrassmannFamily: break;
  }
  std::string s(to_string(family_));
  if (family_ == Family::RealPlanes) s += "(p=" + std::to_string(p_) + ")";
  return s + " in R^" + std::to_string(n_);
}

std::vector<Plane> ConeSpec::sample_planes() const {
  if (kind_ != ConeKind::GrassmannFamily) throw InputError("cone: sample_planes needs a Grassmann family");
  CounterRng rng(seed_, static_cast<std::uint64_t>(family_) + 1);
  std::vector<Plane> out;
  const auto want = static_cast<std::size_t>(density_);
  switch (family_) {
    case Family::RealLines:
      if (n_ == 2) {
        for (int k = 0; k < density_; ++k) {
          const double th = std::numbers::pi * k / density_;
          out.emplace_back(2, std::vector<Vec>{{std::cos(th), std::sin(th)}});
        }
      } else {
        for (const auto& v : unit_lattice_directions(n_)) {
          if (out.size() == want) break;
          out.emplace_back(n_, std::vector<Vec>{v});
        }
        while (out.size() < want) out.emplace_back(n_, std::vector<Vec>{rng.unit_vector(n_)});
      }
      break;
    case Family::RealPlanes:
      for_each_subset(n_, p_, [&](const std::vector<int>& axes) {
        out.push_back(Plane::coordinate(n_, axes));
        return out.size() < want;
      });
      while (out.size() < want) out.push_back(Plane::random(n_, p_, rng));
      break;
    case Family::FullTrace: {
      std::vector<int> all(static_cast<std::size_t>(n_));
      for (int i = 0; i < n_; ++i) all[static_cast<std::size_t>(i)] = i;
      out.push_back(Plane::coordinate(n_, all));
      break;
    }
    case Family::ComplexLines: {
      const int m = n_ / 2;
      for (int j = 0; j < m && out.size() < want; ++j) {
        const std::vector<int> axes{j, m + j};
        out.push_back(Plane::coordinate(n_, axes));
      }
      while (out.size() < want) {
        const Vec v = rng.unit_vector(n_);
        out.emplace_back(n_, std::vector<Vec>{v, apply_complex_structure(v)});
      }
      break;
    }
    case Family::Lagrangian: {
      const int m = n_ / 2;
      std::vector<int> re(static_cast<std::size_t>(m)), im(static_cast<std::size_t>(m));
      for (int i = 0; i < m; ++i) {
        re[static_cast<std::size_t>(i)] = i;
        im[static_cast<std::size_t>(i)] = m + i;
      }
      out.push_back(Plane::coordinate(n_, re));
      if (out.size() < want) out.push_back(Plane::coordinate(n_, im));
      while (out.size() < want) out.push_back(Plane::span_of(n_, random_lagrangian_basis(m, rng)));
      break;
    }
    case Family::FixedAxis: {
      const std::vector<int> axes{0};
      out.push_back(Plane::coordinate(n_, axes));
      break;
    }
  }
  return out;
}

std::vector<SymMatrix> ConeSpec::polar_samples() const {
  if (kind_ == ConeKind::GardingCone) throw SemanticError("cone: Garding cones carry no polar sample");
  std::vector<SymMatrix> out;
  out.reserve(generators_.size());
  for (const auto& g : generators_) out.push_back(trace_normalized(g));
  return out;
}

double min_pairing(const SymMatrix& a, const ConeSpec& cone, SymMatrix* witness) {
  check_dims(a, cone);
  const int n = cone.dim();
  if (cone.kind() == ConeKind::GardingCone) throw SemanticError("min_pairing: not defined for Garding cones");
  if (cone.kind() == ConeKind::GrassmannFamily) {
    switch (cone.family()) {
      case Family::RealLines: {
        const auto es = eig_sym(a);
        if (witness) *witness = SymMatrix::outer(es.vectors[0]);
        return es.values[0];
      }
      case Family::RealPlanes: {
        // Ky Fan: the minimum of tr_xi A over p-planes is the sum of the p smallest eigenvalues.
        const auto es = eig_sym(a);
        const int p = cone.plane_dim();
        double s = 0;
        SymMatrix w(n);
        for (int i = 0; i < p; ++i) {
          s += es.values[static_cast<std::size_t>(i)];
          w += SymMatrix::outer(es.vectors[static_cast<std::size_t>(i)]);
        }
        if (witness) *witness = (1.0 / p) * w;
        return s / p;
      }
      case Family::FullTrace:
        if (witness) *witness = (1.0 / n) * SymMatrix::identity(n);
        return a.trace() / n;
      case Family::FixedAxis:
        if (witness) {
          Vec e(static_cast<std::size_t>(n), 0.0);
          e[0] = 1.0;
          *witness = SymMatrix::outer(e);
        }
        return a(0, 0);
      case Family::ComplexLines: {
        const auto es = eig_sym(0.5 * (a + conjugate_by_complex_structure(a)));
        if (witness) {
          const Vec& v = es.vectors[0];
          *witness = 0.5 * (SymMatrix::outer(v) + SymMatrix::outer(apply_complex_structure(v)));
        }
        return es.values[0];
      }
      case Family::Lagrangian: break;
    }
  }
  double best = std::numeric_limits<double>::infinity();
  std::size_t arg = 0;
  const auto& gens = cone.generators();
  for (std::size_t i = 0; i < gens.size(); ++i) {
    const SymMatrix b = trace_normalized(gens[i]);
    const double v = frob_inner(a, b);
    if (v < best) {
      best = v;
      arg = i;
    }
  }
  if (witness) *witness = trace_normalized(gens[arg]);
  return best;
}

double boundary_shift(const SymMatrix& r, const ConeSpec& cone) {
  if (cone.kind() == ConeKind::GardingCone) return max_real_root(cone.polynomial(), r);
  return -min_pairing(r, cone);
}

MembershipVerdict psplus_membership(const SymMatrix& a, const ConeSpec& cone, double tau) {
  check_dims(a, cone);
  const double scale = std::max(a.norm(), kTol.zero_floor);
  MembershipVerdict v;
  if (cone.kind() == ConeKind::GardingCone) {
    v = garding_membership(a, cone.polynomial(), tau);
    v.margin /= scale;
  } else {
    v.margin = min_pairing(a, cone, &v.witness) / scale;
  }
  if (a.norm() <= kTol.zero_floor) v.margin = 0.0;
  v.cls = classify_margin(v.margin, tau);
  return v;
}

MembershipVerdict dual_membership(const SymMatrix& b, const ConeSpec& cone, double tau) {
  MembershipVerdict v = psplus_membership(-b, cone, tau);
  v.margin = -v.margin;
  v.cls = classify_margin(v.margin, tau);
  return v;
}

EllipticityReport ellipticity_check(const ConeSpec& cone, double tau) {
  if (cone.kind() == ConeKind::GardingCone)
    throw InputError("ellipticity_check: Garding cones use cone_ellipticity_E2");
  const auto samples = cone.polar_samples();
  if (samples.empty()) throw InputError("ellipticity_check: empty generator list");
  const int n = cone.dim();
  EllipticityReport rep;
  rep.generators = static_cast<int>(samples.size());
  rep.positivity = true;
  rep.min_generator_eigenvalue = std::numeric_limits<double>::infinity();
  SymMatrix sum(n);
  const auto dim = static_cast<int>(SymMatrix::packed_size(n));
  SymMatrix gram(dim);
  for (const auto& b : samples) {
    const double lmin = eig_sym(b).min();
    rep.min_generator_eigenvalue = std::min(rep.min_generator_eigenvalue, lmin / b.norm());
    if (lmin < -tau * b.norm()) rep.positivity = false;
    sum += b;
    gram += SymMatrix::outer(b.isometric_coordinates());
  }
  const auto es = eig_sym(sum);
  rep.sum_min_eigenvalue = es.min();
  rep.completeness = es.min() > tau * std::max(es.max(), kTol.zero_floor);
  const auto gs = eig_sym(gram);
  for (double l : gs.values)
    if (l > 1e-10 * gs.max()) ++rep.span_dim;
  return rep;
}

PolarCheckReport polar_check(const ConeSpec& cone, int trials, CounterRng& rng, double tau) {
  if (cone.kind() == ConeKind::GardingCone) throw InputError("polar_check: needs a generated cone");
  if (trials < 1) throw InputError("polar_check: trials >= 1 required");
  const int n = cone.dim();
  const auto& gens = cone.generators();
  std::vector<bool> certified(gens.size(), false);
  PolarCheckReport rep;
  rep.worst_pairing = std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    const SymMatrix r = SymMatrix::random(n, rng);
    const SymMatrix a = r + (boundary_shift(r, cone) + rng.uniform(0.05, 1.0)) * SymMatrix::identity(n);
    if (!psplus_membership(a, cone, tau).interior()) continue;
    ++rep.trials;
    for (std::size_t i = 0; i < gens.size(); ++i) {
      const double p = frob_inner(a, gens[i]) / (a.norm() * gens[i].norm());
      rep.worst_pairing = std::min(rep.worst_pairing, p);
      if (p < -tau) rep.bipolar_ok = false;
      if (p > tau) certified[i] = true;
    }
  }
  rep.generators_without_certificate = static_cast<int>(std::count(certified.begin(), certified.end(), false));
  rep.certificates_ok = rep.generators_without_certificate == 0;
  if (rep.trials == 0) rep.bipolar_ok = rep.certificates_ok = false;
  return rep;
}

FreeSubspaceResult free_subspace_check(const Plane& w, const ConeSpec& cone, double tau) {
  if (w.ambient_dim() != cone.dim()) throw InputError("free_subspace_check: dimension mismatch");
  const Plane nplane = w.orthogonal_complement();
  FreeSubspaceResult res;
  res.degenerate = nplane.dim() == 0;
  const SymMatrix pn = res.degenerate ? SymMatrix(cone.dim()) : plane_projection(nplane);
  res.certificate = psplus_membership(pn, cone, tau);
  res.free = res.certificate.interior();
  return res;
}

FreeDimReport free_dim_verify(const ConeSpec& cone, int claimed, int trials, CounterRng& rng, double tau) {
  const int n = cone.dim();
  if (claimed < 0 || claimed > n - 1) throw InputError("free_dim_verify: claimed dimension outside [0, n-1]");
  if (trials < 1) throw InputError("free_dim_verify: trials >= 1 required");
  FreeDimReport rep;
  rep.claimed = claimed;

  auto try_lower = [&](const Plane& w) {
    ++rep.lower_candidates_tried;
    if (free_subspace_check(w, cone, tau).free) {
      rep.lower_ok = true;
      rep.lower_witness = w;
    }
    return !rep.lower_ok;
  };
  for_each_subset(n, claimed, [&](const std::vector<int>& axes) { return try_lower(Plane::coordinate(n, axes)); });
  for (int t = 0; t < trials && !rep.lower_ok; ++t) try_lower(Plane::random(n, claimed, rng));

  rep.upper_trials = trials;
  for (int t = 0; t < trials; ++t) {
    const Plane w = Plane::random(n, claimed + 1, rng);
    if (free_subspace_check(w, cone, tau).free) {
      ++rep.upper_counterexamples;
      if (!rep.upper_counterexample) rep.upper_counterexample = w;
    }
  }
  rep.upper_ok = rep.upper_counterexamples == 0;
  return rep;
}

Vec nnls(const std::vector<Vec>& columns, const Vec& b, double* residual) {
  const auto m = static_cast<Eigen::Index>(b.size());
  const auto k = static_cast<Eigen::Index>(columns.size());
  Eigen::MatrixXd a(m, k);
  for (Eigen::Index j = 0; j < k; ++j)
    for (Eigen::Index i = 0; i < m; ++i) a(i, j) = columns[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
  const Eigen::VectorXd bv = Eigen::Map<const Eigen::VectorXd>(b.data(), m);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(k);
  std::vector<bool> passive(static_cast<std::size_t>(k), false);
  const double tol = 1e-12 * std::max(1.0, a.cwiseAbs().maxCoeff()) * std::max(1.0, bv.norm());

  auto solve_passive = [&]() {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index j = 0; j < k; ++j)
      if (passive[static_cast<std::size_t>(j)]) idx.push_back(j);
    Eigen::MatrixXd ap(m, static_cast<Eigen::Index>(idx.size()));
    for (std::size_t j = 0; j < idx.size(); ++j) ap.col(static_cast<Eigen::Index>(j)) = a.col(idx[j]);
    const Eigen::VectorXd zp = ap.colPivHouseholderQr().solve(bv);
    Eigen::VectorXd z = Eigen::VectorXd::Zero(k);
    for (std::size_t j = 0; j < idx.size(); ++j) z(idx[j]) = zp(static_cast<Eigen::Index>(j));
    return z;
  };

  for (int outer = 0; outer < 3 * k + 10; ++outer) {
    const Eigen::VectorXd w = a.transpose() * (bv - a * x);
    Eigen::Index best = -1;
    double wmax = tol;
    for (Eigen::Index j = 0; j < k; ++j)
      if (!passive[static_cast<std::size_t>(j)] && w(j) > wmax) {
        wmax = w(j);
        best = j;
      }
    if (best < 0) break;
    passive[static_cast<std::size_t>(best)] = true;
    for (int inner = 0; inner < 3 * k + 10; ++inner) {
      const Eigen::VectorXd z = solve_passive();
      bool feasible = true;
      for (Eigen::Index j = 0; j < k; ++j)
        if (passive[static_cast<std::size_t>(j)] && z(j) <= 0) feasible = false;
      if (feasible) {
        x = z;
        break;
      }
      double alpha = 1.0;
      for (Eigen::Index j = 0; j < k; ++j)
        if (passive[static_cast<std::size_t>(j)] && z(j) <= 0) alpha = std::min(alpha, x(j) / (x(j) - z(j)));
      x += alpha * (z - x);
      for (Eigen::Index j = 0; j < k; ++j)
        if (passive[static_cast<std::size_t>(j)] && x(j) <= tol) {
          passive[static_cast<std::size_t>(j)] = false;
          x(j) = 0.0;
        }
    }
  }
  if (residual) *residual = (a * x - bv).norm();
  return Vec(x.data(), x.data() + k);
}

bool polar_contains(const SymMatrix& b, const ConeSpec& cone, double tol) {
  check_dims(b, cone);
  const double nb = b.norm();
  if (nb <= kTol.zero_floor) return true;
  const int n = cone.dim();
  if (cone.kind() == ConeKind::GardingCone) throw SemanticError("polar_contains: not available for Garding cones");
  if (cone.kind() == ConeKind::GrassmannFamily) {
    switch (cone.family()) {
      case Family::RealLines: return eig_sym(b).min() >= -tol * nb;
      case Family::RealPlanes: {
        const auto es = eig_sym(b);
        return es.min() >= -tol * nb && es.max() <= b.trace() / cone.plane_dim() + tol * nb;
      }
      case Family::FullTrace:
        return (b - (b.trace() / n) * SymMatrix::identity(n)).norm() <= tol * nb && b.trace() >= 0;
      case Family::ComplexLines:
        return eig_sym(b).min() >= -tol * nb && (b - conjugate_by_complex_structure(b)).norm() <= tol * nb;
      case Family::FixedAxis: {
        SymMatrix rest = b;
        rest.at(0, 0) = 0.0;
        return b(0, 0) >= -tol * nb && rest.norm() <= tol * nb;
      }
      case Family::Lagrangian: break;
    }
  }
  std::vector<Vec> cols;
  for (const auto& g : cone.polar_samples()) cols.push_back(g.isometric_coordinates());
  double res = 0;
  nnls(cols, b.isometric_coordinates(), &res);
  return res <= tol * nb;
}

ConvexEllipticSet ConvexEllipticSet::det_floor(int n, double c) {
  if (n < 1) throw InputError("det_floor: n >= 1 required");
  if (!(c >= 0) || !std::isfinite(c)) throw InputError("det_floor: c >= 0 required");
  ConvexEllipticSet f(n, EllipticSetKind::DetFloor);
  f.c_ = c;
  f.base_ = (std::pow(c, 1.0 / n) + 1.0) * SymMatrix::identity(n);
  return f;
}

ConvexEllipticSet ConvexEllipticSet::slag_branch(int n, int k) {
  if (k < 0 || (n != 2 * k + 1 && n != 2 * k + 2)) throw InputError("slag_branch: need n = 2k+1 or 2k+2");
  ConvexEllipticSet f(n, EllipticSetKind::SLagBranch);
  f.k_ = k;
  // n arctan(t) = n theta lies strictly between k pi and n pi / 2.
  const double theta = 0.5 * (k * std::numbers::pi / n + 0.5 * std::numbers::pi);
  f.base_ = std::tan(theta) * SymMatrix::identity(n);
  return f;
}

MembershipVerdict convex_elliptic_membership(const SymMatrix& a, const ConvexEllipticSet& f, double tau) {
  if (a.dim() != f.dim()) throw InputError("convex_elliptic_membership: dimension mismatch");
  const auto es = eig_sym(a);
  const int n = a.dim();
  MembershipVerdict v;
  v.witness = SymMatrix(n);
  if (f.kind() == EllipticSetKind::DetFloor) {
    double det = 1.0;
    for (double l : es.values) det *= l;
    const double m_det = det - f.c();
    if (es.min() <= m_det) {
      v.margin = es.min();
      v.witness = SymMatrix::outer(es.vectors[0]);
    } else {
      v.margin = m_det;
      // gradient of det: the adjugate
      for (int i = 0; i < n; ++i) {
        double cof = 1.0;
        for (int j = 0; j < n; ++j)
          if (j != i) cof *= es.values[static_cast<std::size_t>(j)];
        v.witness += cof * SymMatrix::outer(es.vectors[static_cast<std::size_t>(i)]);
      }
    }
  } else {
    double s = 0;
    SymMatrix grad(n);
    for (int i = 0; i < n; ++i) {
      const double l = es.values[static_cast<std::size_t>(i)];
      s += std::atan(l);
      grad += (1.0 / (1.0 + l * l)) * SymMatrix::outer(es.vectors[static_cast<std::size_t>(i)]);
    }
    const double m_arc = s - f.k() * std::numbers::pi;
    if (es.min() <= m_arc) {
      v.margin = es.min();
      v.witness = SymMatrix::outer(es.vectors[0]);
    } else {
      v.margin = m_arc;
      v.witness = grad;
    }
  }
  v.cls = classify_margin(v.margin, tau);
  return v;
}

bool ray_cone_membership(const SymMatrix& v, const ConvexEllipticSet& f, double t_max, int steps) {
  if (v.dim() != f.dim()) throw InputError("ray_cone_membership: dimension mismatch");
  if (steps < 1 || !(t_max > 0)) throw InputError("ray_cone_membership: need steps >= 1 and T > 0");
  for (int j = 1; j <= steps; ++j) {
    const double t = t_max * j / steps;
    if (!convex_elliptic_membership(f.basepoint() + t * v, f).in_cone()) return false;
  }
  return true;
}

}  // namespace hcl
