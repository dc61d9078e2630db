#include "hcl/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace hcl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Jet fd_jet(const std::function<double(std::span<const double>)>& f, std::span<const double> x0, double h) {
  const int n = static_cast<int>(x0.size());
  Vec x(x0.begin(), x0.end());
  Jet j{f(x), Vec(static_cast<std::size_t>(n)), SymMatrix(n)};
  auto at = [&](int i, double si, int k, double sk) {
    Vec y = x;
    y[static_cast<std::size_t>(i)] += si * h;
    if (k >= 0) y[static_cast<std::size_t>(k)] += sk * h;
    return f(y);
  };
  for (int i = 0; i < n; ++i) {
    const double fp = at(i, 1, -1, 0), fm = at(i, -1, -1, 0);
    j.grad[static_cast<std::size_t>(i)] = (fp - fm) / (2 * h);
    j.hess.at(i, i) = (fp - 2 * j.value + fm) / (h * h);
    for (int k = i + 1; k < n; ++k) {
      j.hess.at(i, k) = (at(i, 1, k, 1) - at(i, 1, k, -1) - at(i, -1, k, 1) + at(i, -1, k, -1)) / (4 * h * h);
    }
  }
  return j;
}

Vec sub(std::span<const double> a, std::span<const double> b) {
  Vec r(a.begin(), a.end());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  return r;
}

Vec axpy(std::span<const double> x, double s, std::span<const double> d) {
  Vec r(x.begin(), x.end());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += s * d[i];
  return r;
}

void check_point(std::span<const double> x, int n, const char* who) {
  if (static_cast<int>(x.size()) != n) throw InputError(std::string(who) + ": point has the wrong dimension");
}

// Minimum of <H, A> over trace-one A = P_xi / p with xi a p-plane inside span(basis).
double ky_fan_on(const SymMatrix& h, const std::vector<Vec>& basis, int p, int n, SymMatrix& witness) {
  const auto es = eig_sym(h.restrict_to(basis));
  double s = 0.0;
  witness = SymMatrix(n);
  for (int i = 0; i < p; ++i) {
    const Vec& v = es.vectors[static_cast<std::size_t>(i)];
    Vec w(static_cast<std::size_t>(n), 0.0);
    for (std::size_t k = 0; k < basis.size(); ++k)
      for (int c = 0; c < n; ++c) w[static_cast<std::size_t>(c)] += v[k] * basis[k][static_cast<std::size_t>(c)];
    witness += SymMatrix::outer(w);
    s += es.values[static_cast<std::size_t>(i)];
  }
  witness *= 1.0 / p;
  return s / p;
}

}  // namespace

// ---------------------------------------------------------------- DomainSpec

DomainSpec DomainSpec::from_expression(int n, std::string_view rho, double collar, Vec center, double radius) {
  DomainSpec d = from_function(
      n, [](std::span<const double>) { return 0.0; }, std::string(rho), collar, std::move(center), radius);
  d.expr_ = Expr::parse(rho, n);
  const Expr e = *d.expr_;
  d.fn_ = [e](std::span<const double> x) { return e.value(x); };
  return d;
}

DomainSpec DomainSpec::from_function(int n, std::function<double(std::span<const double>)> rho, std::string label,
                                     double collar, Vec center, double radius) {
  if (n < 1 || n > 8) throw InputError("domain: n must be in 1..8");
  if (!(collar > 0) || !(radius > 0)) throw InputError("domain: collar and radius must be positive");
  if (center.empty()) center.assign(static_cast<std::size_t>(n), 0.0);
  if (static_cast<int>(center.size()) != n) throw InputError("domain: center has the wrong dimension");
  DomainSpec d;
  d.n_ = n;
  d.label_ = std::move(label);
  d.fn_ = std::move(rho);
  d.collar_ = collar;
  d.center_ = std::move(center);
  d.radius_ = radius;
  return d;
}

double DomainSpec::rho(std::span<const double> x) const {
  check_point(x, n_, "domain");
  return fn_(x);
}

Jet DomainSpec::jet(std::span<const double> x) const {
  check_point(x, n_, "domain");
  if (expr_) return expr_->jet(x);
  return fd_jet(fn_, x, 1e-5);
}

std::vector<Vec> DomainSpec::boundary_samples(int count, std::uint64_t seed) const {
  if (count < 1) throw InputError("domain: sample count must be positive");
  constexpr int kMarch = 512;
  CounterRng rng(seed, 0xB0);
  const double offset = rng.uniform();
  std::vector<Vec> out;
  const int max_rays = 64 * count;
  for (int ray = 0; ray < max_rays && static_cast<int>(out.size()) < count; ++ray) {
    Vec u;
    if (n_ == 1) {
      u = {ray % 2 == 0 ? 1.0 : -1.0};
    } else if (n_ == 2) {
      const double th = 2.0 * std::numbers::pi * (offset + ray * (std::numbers::phi - 1.0));
      u = {std::cos(th), std::sin(th)};
    } else {
      u = rng.unit_vector(n_);
    }
    double t_prev = 0.0;
    double f_prev = rho(center_);
    for (int k = 1; k <= kMarch && static_cast<int>(out.size()) < count; ++k) {
      const double t = radius_ * k / kMarch;
      const double f = rho(axpy(center_, t, u));
      if ((f_prev < 0) != (f < 0)) {
        double lo = t_prev, hi = t, flo = f_prev;
        Vec best;
        double fbest = kInf;
        for (int it = 0; it < 200; ++it) {
          const double mid = 0.5 * (lo + hi);
          Vec y = axpy(center_, mid, u);
          const double fm = rho(y);
          if (std::abs(fm) < fbest) {
            fbest = std::abs(fm);
            best = std::move(y);
          }
          if (fbest <= 1e-12 || hi - lo <= 1e-16 * (1.0 + t)) break;
          if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
          } else {
            hi = mid;
          }
        }
        if (fbest <= 1e-10) out.push_back(std::move(best));
      }
      t_prev = t;
      f_prev = f;
    }
  }
  if (out.empty()) throw InputError("domain: no boundary crossing found within the sampling radius");
  return out;
}

BoundaryFrame boundary_frame(const DomainSpec& d, std::span<const double> x) {
  const Jet j = d.jet(x);
  const double g = norm2(j.grad);
  if (!(g > 1e-8)) throw InputError("degenerate boundary: |grad rho| = " + std::to_string(g));
  BoundaryFrame f;
  f.grad_norm = g;
  f.normal = j.grad;
  for (auto& v : f.normal) v /= g;
  f.hess = (1.0 / g) * j.hess;
  return f;
}

// ---------------------------------------------------------- boundary checks

ConstantSearch strict_constant_C(const SymMatrix& hess, std::span<const double> grad, const ConeSpec& cone,
                                 double c_max, double tau) {
  if (hess.dim() != cone.dim() || static_cast<int>(grad.size()) != cone.dim())
    throw InputError("strict_constant_C: dimension mismatch");
  const SymMatrix gg = SymMatrix::outer(grad);
  auto test = [&](double c) { return psplus_membership(hess + c * gg, cone, tau); };
  ConstantSearch r;
  r.verdict = test(0.0);
  if (r.verdict.interior()) {
    r.found = true;
    return r;
  }
  double lo = 0.0, hi = 1.0;
  for (;;) {
    if (hi >= c_max) {
      hi = c_max;
      r.verdict = test(hi);
      if (!r.verdict.interior()) {
        r.c = c_max;
        return r;
      }
      break;
    }
    if (test(hi).interior()) break;
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (test(mid).interior()) hi = mid;
    else lo = mid;
  }
  r.found = true;
  r.c = hi;
  r.verdict = test(hi);
  return r;
}

ConstantSearch strict_constant_C(const DomainSpec& d, const ConeSpec& cone, std::span<const double> x, double c_max,
                                 double tau) {
  (void)boundary_frame(d, x);
  const Jet j = d.jet(x);
  return strict_constant_C(j.hess, j.grad, cone, c_max, tau);
}

BoundaryVerdict boundary_convexity_check(const DomainSpec& d, const ConeSpec& cone, std::span<const double> x,
                                         double tau, double delta_t, double c_max) {
  if (d.dim() != cone.dim()) throw InputError("boundary_convexity_check: dimension mismatch");
  const int n = d.dim();
  const BoundaryFrame f = boundary_frame(d, x);
  BoundaryVerdict v;
  v.margin = kInf;

  auto finish = [&]() {
    v.vacuous = !std::isfinite(v.margin);
    v.strict = v.margin > tau;
    v.weak = v.margin >= -tau;
    return v;
  };

  if (cone.kind() == ConeKind::GardingCone) {
    const ConstantSearch s = strict_constant_C(f.hess, f.normal, cone, c_max, tau);
    const SymMatrix top = f.hess + c_max * SymMatrix::outer(f.normal);
    const MembershipVerdict m = psplus_membership(top, cone, tau);
    v.margin = m.margin;
    v.witness = m.witness;
    v.tangential = -1;
    v.strict = s.found;
    v.weak = m.margin >= -tau;
    return v;
  }

  if (cone.kind() == ConeKind::GrassmannFamily) {
    const Family fam = cone.family();
    if (fam == Family::RealLines || fam == Family::RealPlanes || fam == Family::FullTrace) {
      v.tangential = -1;
      const int p = cone.plane_dim();
      if (p <= n - 1) {
        const Plane t = Plane::span_of(n, {f.normal}).orthogonal_complement();
        v.margin = ky_fan_on(f.hess, t.basis(), p, n, v.witness);
      }
      return finish();
    }
    if (fam == Family::ComplexLines) {
      v.tangential = -1;
      if (n >= 4) {
        const Plane s = Plane::span_of(n, {f.normal, apply_complex_structure(f.normal)}).orthogonal_complement();
        const SymMatrix avg = 0.5 * (f.hess + conjugate_by_complex_structure(f.hess));
        SymMatrix line;
        v.margin = ky_fan_on(avg, s.basis(), 1, n, line);
        const auto es = eig_sym(line);
        const Vec& w = es.vectors.back();
        v.witness = 0.5 * (SymMatrix::outer(w) + SymMatrix::outer(apply_complex_structure(w)));
      }
      return finish();
    }
  }

  const SymMatrix nn = SymMatrix::outer(f.normal);
  for (const auto& a : cone.polar_samples()) {
    if (frob_inner(nn, a) >= delta_t) continue;
    ++v.tangential;
    const double p = frob_inner(f.hess, a);
    if (p < v.margin) {
      v.margin = p;
      v.witness = a;
    }
  }
  return finish();
}

// ------------------------------------------------------ defining function

DefiningFunction::DefiningFunction(DomainSpec d, DefiningConstants k)
    : d_(std::move(d)), k_(k), smax_(k.eps_used) {}

Jet DefiningFunction::extended(std::span<const double> x) const {
  Jet j = d_.jet(x);
  const double r = j.value, c = k_.c;
  if (c == 0.0) return j;
  j.hess = (1.0 + c * r) * j.hess + c * SymMatrix::outer(j.grad);
  for (auto& g : j.grad) g *= 1.0 + c * r;
  j.value = r + 0.5 * c * r * r;
  return j;
}

double DefiningFunction::value(std::span<const double> x) const {
  const double r = d_.rho(x);
  const Vec dx = sub(x, d_.center());
  const double q = k_.a * dot(dx, dx) - k_.t;
  return smax_(r + 0.5 * k_.c * r * r, q);
}

Jet DefiningFunction::jet(std::span<const double> x) const {
  const int n = d_.dim();
  const Jet e = extended(x);
  const Vec dx = sub(x, d_.center());
  const double q = k_.a * dot(dx, dx) - k_.t;
  Vec gq = dx;
  for (auto& g : gq) g *= 2.0 * k_.a;
  const SymMatrix hq = (2.0 * k_.a) * SymMatrix::identity(n);
  const SmoothMax::Jet m = smax_.jet(e.value, q);
  Jet r;
  r.value = m.value;
  r.grad.resize(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < r.grad.size(); ++i) r.grad[i] = m.d1 * e.grad[i] + m.d2 * gq[i];
  r.hess = m.d1 * e.hess + m.d2 * hq;
  if (m.d11 != 0.0) {
    r.hess += m.d11 * SymMatrix::outer(e.grad);
    r.hess += (2.0 * m.d12) * SymMatrix::sym_outer(e.grad, gq);
    r.hess += m.d22 * SymMatrix::outer(gq);
  }
  return r;
}

namespace {

GridShape closure_grid(const std::vector<Vec>& pts, int n, int points) {
  Vec lo(static_cast<std::size_t>(n), kInf), hi(static_cast<std::size_t>(n), -kInf);
  for (const auto& p : pts)
    for (int i = 0; i < n; ++i) {
      lo[static_cast<std::size_t>(i)] = std::min(lo[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(i)]);
      hi[static_cast<std::size_t>(i)] = std::max(hi[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(i)]);
    }
  double ext = 0.0;
  for (int i = 0; i < n; ++i) ext = std::max(ext, hi[static_cast<std::size_t>(i)] - lo[static_cast<std::size_t>(i)]);
  const double pad = 0.05 * ext;
  const double h = (ext + 2 * pad) / (points - 1);
  std::vector<int> counts;
  for (int i = 0; i < n; ++i) {
    auto& l = lo[static_cast<std::size_t>(i)];
    const double w = hi[static_cast<std::size_t>(i)] - l + 2 * pad;
    const int c = std::max(5, static_cast<int>(std::ceil(w / h - 1e-9)) + 1);
    l -= pad + 0.5 * ((c - 1) * h - w);
    counts.push_back(c);
  }
  return GridShape(lo, h, counts);
}

}  // namespace

DefiningReport global_defining_function(const DomainSpec& d, const ConeSpec& cone, const DefiningBudget& budget) {
  if (d.dim() != cone.dim()) throw InputError("global_defining_function: dimension mismatch");
  if (d.dim() > 3) throw InputError("global_defining_function: grid verification supports n <= 3");
  const int n = d.dim();
  DefiningReport rep;
  const auto pts = d.boundary_samples(budget.boundary_samples, budget.seed);
  rep.boundary_points = static_cast<int>(pts.size());

  std::vector<BoundaryVerdict> verdicts;
  for (const auto& x : pts) {
    verdicts.push_back(boundary_convexity_check(d, cone, x, kTol.membership, budget.delta_t));
    if (!verdicts.back().strict) {
      rep.refused = true;
      rep.refusal_point = x;
      rep.refusal = verdicts.back();
      return rep;
    }
  }

  DefiningConstants k;
  std::vector<Jet> jets;
  for (const auto& x : pts) jets.push_back(d.jet(x));

  if (cone.kind() == ConeKind::GardingCone) {
    k.sampled = false;
    for (const auto& j : jets) {
      const ConstantSearch s = strict_constant_C(j.hess, j.grad, cone);
      k.c = std::max(k.c, 2.0 * s.c);
    }
  } else {
    const auto polar = cone.polar_samples();
    double eps = kInf;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (!verdicts[i].vacuous) eps = std::min(eps, 0.5 * verdicts[i].margin * norm2(jets[i].grad));
    }
    if (!std::isfinite(eps)) eps = 0.0;
    double delta = kInf, min_pair = kInf;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const SymMatrix gg = SymMatrix::outer(jets[i].grad);
      auto visit = [&](const SymMatrix& a) {
        ++rep.pairings_sampled;
        const double p = frob_inner(jets[i].hess, a);
        min_pair = std::min(min_pair, p);
        if (p <= eps) delta = std::min(delta, frob_inner(gg, a));
      };
      for (const auto& a : polar) visit(a);
      if (!verdicts[i].vacuous) visit(verdicts[i].witness);
    }
    k.eps = eps;
    k.m = -min_pair;
    k.delta = std::isfinite(delta) ? delta : 0.0;
    k.c = (std::isfinite(delta) && k.m > 0) ? 2.0 * k.m / delta : 0.0;
  }
  // sampling can miss the worst A; raise C until every boundary Hessian is interior
  for (int round = 0;; ++round) {
    bool all = true;
    for (const auto& j : jets) {
      if (!psplus_membership(j.hess + k.c * SymMatrix::outer(j.grad), cone).interior()) {
        all = false;
        break;
      }
    }
    if (all) break;
    if (round == 60) throw NumericalError("global_defining_function: no admissible C");
    k.c = std::max(2.0 * k.c, 1.0);
  }

  const GridShape grid = closure_grid(pts, n, budget.grid_points);
  DefiningConstants k0 = k;
  k0.eps_used = 1.0;
  const DefiningFunction ext(d, k0);
  std::vector<Jet> gj(grid.size());
  std::vector<Vec> gx(grid.size());
  double t = d.collar();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    gx[i] = grid.point(i);
    gj[i] = ext.extended(gx[i]);
    if (!psplus_membership(gj[i].hess, cone).interior()) t = std::min(t, 0.45 * std::abs(gj[i].value));
  }
  if (!(t > 0)) throw NumericalError("global_defining_function: strict collar is empty");
  double a = kInf;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (gj[i].value <= -0.5 * t) continue;
    const Vec dx = sub(gx[i], d.center());
    const double r2 = dot(dx, dx);
    if (r2 > 0) a = std::min(a, 0.5 * (gj[i].value + t) / r2);
  }
  if (!std::isfinite(a)) a = 1.0;
  k.t = t;
  k.a = a;
  k.eps_max = 0.25 * t;
  k.eps_used = 0.125 * t;
  rep.constants = k;
  const DefiningFunction hat(d, k);

  std::vector<Vec> sample;
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (d.rho(gx[i]) <= 0) sample.push_back(gx[i]);
  for (const auto& p : pts) sample.push_back(p);
  rep.closure_points = static_cast<int>(sample.size());
  rep.min_margin = kInf;
  for (const auto& x : sample) {
    const double m = psplus_membership(hat.jet(x).hess, cone).margin;
    if (m < rep.min_margin) {
      rep.min_margin = m;
      rep.worst_point = x;
    }
  }
  rep.sign_agrees = true;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double r = d.rho(gx[i]);
    if (std::abs(r) >= t || r == 0.0) continue;
    if ((hat.value(gx[i]) < 0) != (r < 0)) rep.sign_agrees = false;
  }
  rep.ok = rep.min_margin > kTol.membership && rep.sign_agrees;
  rep.rho_hat = hat;
  return rep;
}

ExhaustionReport exhaustion_check(const DomainSpec& d, const ConeSpec& cone, const GridShape& grid,
                                  const DefiningFunction* rho_hat, double tau) {
  if (d.dim() != cone.dim() || grid.dim() != d.dim()) throw InputError("exhaustion_check: dimension mismatch");
  ExhaustionReport rep;
  rep.min_margin = kInf;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vec x = grid.point(i);
    const Jet j = rho_hat ? rho_hat->jet(x) : d.jet(x);
    if (!(j.value < 0)) continue;
    const double delta = -j.value;
    const double g = norm2(j.grad);
    if (g > 0 && delta / g < 2.0 * grid.h()) {
      ++rep.excluded;
      continue;
    }
    ++rep.points;
    const SymMatrix h = (1.0 / delta) * j.hess + (1.0 / (delta * delta)) * SymMatrix::outer(j.grad);
    const MembershipVerdict v = psplus_membership(h, cone, tau);
    if (v.margin < rep.min_margin) {
      rep.min_margin = v.margin;
      rep.worst_point = x;
      rep.witness = v.witness;
    }
  }
  rep.pass = rep.points > 0 && rep.min_margin > tau;
  return rep;
}

// ------------------------------------------------------------ submanifolds

SubmanifoldSpec SubmanifoldSpec::point(Vec p) {
  if (p.empty()) throw InputError("submanifold: empty point");
  SubmanifoldSpec m;
  m.n_ = static_cast<int>(p.size());
  m.kind_ = SubmanifoldKind::Point;
  m.p_ = std::move(p);
  return m;
}

SubmanifoldSpec SubmanifoldSpec::line(Vec p, Vec dir) {
  if (p.empty() || p.size() != dir.size()) throw InputError("submanifold: line needs matching point and direction");
  const double s = norm2(dir);
  if (!(s > 0)) throw InputError("submanifold: zero direction");
  for (auto& v : dir) v /= s;
  SubmanifoldSpec m;
  m.n_ = static_cast<int>(p.size());
  m.kind_ = SubmanifoldKind::Line;
  m.p_ = std::move(p);
  m.q_ = std::move(dir);
  return m;
}

SubmanifoldSpec SubmanifoldSpec::segment(Vec a, Vec b) {
  if (a.empty() || a.size() != b.size()) throw InputError("submanifold: segment ends must match");
  if (!(norm2(sub(b, a)) > 0)) throw InputError("submanifold: degenerate segment");
  SubmanifoldSpec m;
  m.n_ = static_cast<int>(a.size());
  m.kind_ = SubmanifoldKind::Segment;
  m.p_ = std::move(a);
  m.q_ = std::move(b);
  return m;
}

SubmanifoldSpec SubmanifoldSpec::circle(int n, Vec center2, double radius) {
  if (n < 2 || center2.size() != 2 || !(radius > 0)) throw InputError("submanifold: bad circle");
  SubmanifoldSpec m;
  m.n_ = n;
  m.kind_ = SubmanifoldKind::Circle;
  m.p_ = std::move(center2);
  m.r_ = radius;
  return m;
}

SubmanifoldSpec SubmanifoldSpec::curve(std::vector<Expr> coords, double t0, double t1) {
  if (coords.empty() || !(t1 > t0)) throw InputError("submanifold: bad curve");
  for (const auto& c : coords)
    if (c.arity() != 1) throw InputError("submanifold: curve coordinates take one parameter");
  SubmanifoldSpec m;
  m.n_ = static_cast<int>(coords.size());
  m.kind_ = SubmanifoldKind::Curve;
  m.coords_ = std::move(coords);
  m.t0_ = t0;
  m.t1_ = t1;
  return m;
}

std::string SubmanifoldSpec::name() const {
  switch (kind_) {
    case SubmanifoldKind::Point: return "point";
    case SubmanifoldKind::Line: return "line";
    case SubmanifoldKind::Segment: return "segment";
    case SubmanifoldKind::Circle: return "circle";
    case SubmanifoldKind::Curve: return "curve";
  }
  return "?";
}

Vec SubmanifoldSpec::curve_at(double t) const {
  Vec x;
  const double a[1] = {t};
  for (const auto& c : coords_) x.push_back(c.value(a));
  return x;
}

Vec SubmanifoldSpec::curve_velocity(double t) const {
  Vec v;
  const double a[1] = {t};
  for (const auto& c : coords_) v.push_back(c.jet(a).grad[0]);
  return v;
}

double SubmanifoldSpec::curve_param(std::span<const double> x) const {
  constexpr int kScan = 256;
  double best = t0_, bd = kInf;
  for (int i = 0; i <= kScan; ++i) {
    const double t = t0_ + (t1_ - t0_) * i / kScan;
    const Vec d = sub(x, curve_at(t));
    const double v = dot(d, d);
    if (v < bd) {
      bd = v;
      best = t;
    }
  }
  double t = best;
  for (int it = 0; it < 60; ++it) {
    double g = 0.0, h = 0.0;
    const double tt[1] = {t};
    for (std::size_t i = 0; i < coords_.size(); ++i) {
      const Jet j = coords_[i].jet(tt);
      const double r = x[i] - j.value;
      g -= r * j.grad[0];
      h += j.grad[0] * j.grad[0] - r * j.hess(0, 0);
    }
    if (std::abs(g) <= 1e-14 * (1.0 + std::abs(t))) return t;
    if (!(h > 0)) break;
    const double next = std::clamp(t - g / h, t0_, t1_);
    if (next == t) return t;  // pinned at an end
    t = next;
  }
  throw NumericalError("submanifold: curve projection did not converge");
}

std::vector<Vec> SubmanifoldSpec::samples(int count) const {
  if (count < 1) throw InputError("submanifold: sample count must be positive");
  std::vector<Vec> out;
  for (int j = 0; j < count; ++j) {
    const double s = (j + 0.5) / count;
    switch (kind_) {
      case SubmanifoldKind::Point: return {p_};
      case SubmanifoldKind::Line: out.push_back(axpy(p_, 2.0 * s - 1.0, q_)); break;
      case SubmanifoldKind::Segment: {
        const double u = 0.1 + 0.8 * s;
        out.push_back(axpy(p_, u, sub(q_, p_)));
        break;
      }
      case SubmanifoldKind::Circle: {
        Vec x(static_cast<std::size_t>(n_), 0.0);
        const double th = 2.0 * std::numbers::pi * j / count;
        x[0] = p_[0] + r_ * std::cos(th);
        x[1] = p_[1] + r_ * std::sin(th);
        out.push_back(std::move(x));
        break;
      }
      case SubmanifoldKind::Curve: out.push_back(curve_at(t0_ + (t1_ - t0_) * (0.1 + 0.8 * s))); break;
    }
  }
  return out;
}

Vec SubmanifoldSpec::project(std::span<const double> x) const {
  check_point(x, n_, "submanifold");
  switch (kind_) {
    case SubmanifoldKind::Point: return p_;
    case SubmanifoldKind::Line: return axpy(p_, dot(sub(x, p_), q_), q_);
    case SubmanifoldKind::Segment: {
      const Vec d = sub(q_, p_);
      const double u = std::clamp(dot(sub(x, p_), d) / dot(d, d), 0.0, 1.0);
      return axpy(p_, u, d);
    }
    case SubmanifoldKind::Circle: {
      const double dx = x[0] - p_[0], dy = x[1] - p_[1];
      const double s = std::hypot(dx, dy);
      if (!(s > 1e-12)) throw NumericalError("submanifold: projection onto the circle is not unique at its center");
      Vec y(static_cast<std::size_t>(n_), 0.0);
      y[0] = p_[0] + r_ * dx / s;
      y[1] = p_[1] + r_ * dy / s;
      return y;
    }
    case SubmanifoldKind::Curve: return curve_at(curve_param(x));
  }
  return {};
}

double SubmanifoldSpec::dist(std::span<const double> x) const {
  const Vec d = sub(x, project(x));
  return norm2(d);
}

Plane SubmanifoldSpec::tangent(std::span<const double> x) const {
  check_point(x, n_, "submanifold");
  switch (kind_) {
    case SubmanifoldKind::Point: return Plane(n_, {});
    case SubmanifoldKind::Line: return Plane::span_of(n_, {q_});
    case SubmanifoldKind::Segment: return Plane::span_of(n_, {sub(q_, p_)});
    case SubmanifoldKind::Circle: {
      Vec t(static_cast<std::size_t>(n_), 0.0);
      t[0] = -(x[1] - p_[1]);
      t[1] = x[0] - p_[0];
      return Plane::span_of(n_, {t});
    }
    case SubmanifoldKind::Curve: return Plane::span_of(n_, {curve_velocity(curve_param(x))});
  }
  return {};
}

Plane SubmanifoldSpec::normal(std::span<const double> x) const {
  const Plane t = tangent(x);
  if (t.dim() == 0) {
    std::vector<Vec> e;
    for (int i = 0; i < n_; ++i) {
      Vec v(static_cast<std::size_t>(n_), 0.0);
      v[static_cast<std::size_t>(i)] = 1.0;
      e.push_back(std::move(v));
    }
    return Plane(n_, std::move(e));
  }
  return t.orthogonal_complement();
}

SymMatrix dist_sq_hessian_fd(const SubmanifoldSpec& m, std::span<const double> x, double h) {
  return fd_jet(
             [&m](std::span<const double> y) {
               const double d = m.dist(y);
               return 0.5 * d * d;
             },
             x, h)
      .hess;
}

DistSqReport dist_sq_hessian_check(const SubmanifoldSpec& m, const ConeSpec& cone, std::span<const double> x0,
                                   double h, double tol) {
  if (m.dim() != cone.dim()) throw InputError("dist_sq_hessian_check: dimension mismatch");
  if (m.dist(x0) > 1e-9) throw InputError("dist_sq_hessian_check: x0 is not on M");
  DistSqReport rep;
  rep.hessian = dist_sq_hessian_fd(m, x0, h);
  rep.projection = plane_projection(m.normal(x0));
  const SymMatrix diff = rep.hessian - rep.projection;
  for (double v : diff.upper()) rep.max_error = std::max(rep.max_error, std::abs(v));
  rep.matches = rep.max_error <= tol;
  rep.verdict = psplus_membership(rep.projection, cone);
  rep.free = rep.verdict.interior();
  return rep;
}

TubeReport tube_report(const SubmanifoldSpec& m, const ConeSpec& cone, double r, const GridShape& grid, double tau) {
  if (m.dim() != cone.dim() || grid.dim() != m.dim()) throw InputError("tube_report: dimension mismatch");
  if (!(r > 0)) throw InputError("tube_report: radius must be positive");
  TubeReport rep;
  const auto samples = m.samples(16);
  for (const auto& x : samples) {
    if (!psplus_membership(plane_projection(m.normal(x)), cone, tau).interior()) {
      rep.refused = true;
      rep.failing_sample = x;
      return rep;
    }
    ++rep.free_samples;
  }
  rep.zero_point = samples.front();

  std::vector<SymMatrix> hf, hpsi;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vec x = grid.point(i);
    double d;
    try {
      d = m.dist(x);
    } catch (const NumericalError&) {
      ++rep.excluded;
      continue;
    }
    if (d >= r) continue;
    if (d > r - 2.0 * grid.h()) {
      ++rep.excluded;
      continue;
    }
    try {
      hf.push_back(dist_sq_hessian_fd(m, x, 1e-4));
    } catch (const NumericalError&) {
      ++rep.excluded;
      continue;
    }
    const Vec dz = sub(x, rep.zero_point);
    const double e = std::exp(-0.5 * dot(dz, dz));
    hpsi.push_back(e * (SymMatrix::identity(m.dim()) - SymMatrix::outer(dz)));
  }
  rep.points = static_cast<int>(hf.size());
  rep.min_margin = kInf;
  for (const auto& h : hf) rep.min_margin = std::min(rep.min_margin, psplus_membership(h, cone, tau).margin);
  rep.strict = rep.points > 0 && rep.min_margin > tau;
  if (!rep.strict) return rep;
  for (double eps = 1.0; eps > 1e-12; eps *= 0.5) {
    bool ok = true;
    for (std::size_t i = 0; i < hf.size() && ok; ++i)
      ok = psplus_membership(hf[i] + eps * hpsi[i], cone, tau).interior();
    if (ok) {
      rep.admissible_eps = eps;
      rep.perturbed_strict = true;
      break;
    }
  }
  return rep;
}

}  // namespace hcl
