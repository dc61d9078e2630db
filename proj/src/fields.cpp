#include "hcl/fields.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace hcl {

GridShape::GridShape(Vec lo, double h, std::vector<int> counts) : lo_(std::move(lo)), h_(h), counts_(std::move(counts)) {
  const int n = static_cast<int>(lo_.size());
  if (n < 1 || n > 3) throw InputError("grid: dimension must be 1, 2 or 3");
  if (counts_.size() != lo_.size()) throw InputError("grid: counts and lo differ in length");
  if (!(h_ > 0) || !std::isfinite(h_)) throw InputError("grid: spacing must be positive");
  for (int c : counts_)
    if (c < 5) throw InputError("grid: at least 5 points per axis required");
  for (double x : lo_)
    if (!std::isfinite(x)) throw InputError("grid: non-finite box");
  std::ptrdiff_t s = 1;
  for (int i = n - 1; i >= 0; --i) {
    strides_[static_cast<std::size_t>(i)] = s;
    s *= counts_[static_cast<std::size_t>(i)];
  }
  size_ = static_cast<std::size_t>(s);
}

GridShape GridShape::cube(int n, double lo, double hi, int points) {
  if (points < 2 || !(hi > lo)) throw InputError("grid: bad cube");
  return GridShape(Vec(static_cast<std::size_t>(n), lo), (hi - lo) / (points - 1),
                   std::vector<int>(static_cast<std::size_t>(n), points));
}

Vec GridShape::hi() const {
  Vec out(lo_.size());
  for (std::size_t i = 0; i < lo_.size(); ++i) out[i] = lo_[i] + h_ * (counts_[i] - 1);
  return out;
}

std::array<int, 3> GridShape::multi(std::size_t idx) const {
  std::array<int, 3> m{};
  for (int i = 0; i < dim(); ++i) {
    const auto s = static_cast<std::size_t>(strides_[static_cast<std::size_t>(i)]);
    m[static_cast<std::size_t>(i)] = static_cast<int>(idx / s);
    idx %= s;
  }
  return m;
}

std::size_t GridShape::flat(std::span<const int> m) const {
  std::ptrdiff_t idx = 0;
  for (int i = 0; i < dim(); ++i) idx += m[static_cast<std::size_t>(i)] * strides_[static_cast<std::size_t>(i)];
  return static_cast<std::size_t>(idx);
}

Vec GridShape::point(std::size_t idx) const {
  const auto m = multi(idx);
  Vec x(lo_.size());
  for (std::size_t i = 0; i < lo_.size(); ++i) x[i] = lo_[i] + h_ * m[i];
  return x;
}

int GridShape::depth(std::size_t idx) const {
  const auto m = multi(idx);
  int d = std::numeric_limits<int>::max();
  for (std::size_t i = 0; i < lo_.size(); ++i) d = std::min({d, m[i], counts_[i] - 1 - m[i]});
  return d;
}

GridField::GridField(GridShape shape, std::vector<double> values, std::string source)
    : shape_(std::move(shape)), values_(std::move(values)), source_(std::move(source)) {
  if (values_.size() != shape_.size()) throw InputError("grid field: value count does not match the grid");
  for (double v : values_)
    if (!std::isfinite(v)) throw InputError("grid field: non-finite value");
}

GridField GridField::sample(const GridShape& shape, const std::function<double(std::span<const double>)>& fn,
                            std::string source) {
  std::vector<double> v(shape.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(shape.point(i));
  return GridField(shape, std::move(v), std::move(source));
}

SymMatrix hessian_fd(const GridField& f, std::size_t idx) {
  const auto& g = f.shape();
  if (idx >= g.size() || g.depth(idx) < 2) throw std::out_of_range("hessian_fd: point within 2 cells of the grid boundary");
  const int n = g.dim();
  const double h2 = g.h() * g.h();
  const auto& v = f.values();
  const auto c = static_cast<std::ptrdiff_t>(idx);
  auto at = [&](std::ptrdiff_t off) { return v[static_cast<std::size_t>(c + off)]; };
  SymMatrix out(n);
  for (int i = 0; i < n; ++i) {
    const auto si = g.stride(i);
    out.at(i, i) = (at(si) - 2.0 * at(0) + at(-si)) / h2;
    for (int j = i + 1; j < n; ++j) {
      const auto sj = g.stride(j);
      out.at(i, j) = (at(si + sj) - at(si - sj) - at(-si + sj) + at(-si - sj)) / (4.0 * h2);
    }
  }
  return out;
}

Vec gradient_fd(const GridField& f, std::size_t idx) {
  const auto& g = f.shape();
  if (idx >= g.size() || g.depth(idx) < 1) throw std::out_of_range("gradient_fd: boundary point");
  Vec out(static_cast<std::size_t>(g.dim()));
  for (int i = 0; i < g.dim(); ++i) {
    const auto s = static_cast<std::size_t>(g.stride(i));
    out[static_cast<std::size_t>(i)] = (f[idx + s] - f[idx - s]) / (2.0 * g.h());
  }
  return out;
}

std::vector<std::size_t> classifiable_points(const GridShape& shape) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < shape.size(); ++i)
    if (shape.depth(i) >= 2) out.push_back(i);
  return out;
}

std::string_view to_string(PointClass c) {
  switch (c) {
    case PointClass::NotPSH: return "NotPSH";
    case PointClass::PartiallyPluriharmonic: return "PartiallyPluriharmonic";
    case PointClass::PSH: return "PSH";
    case PointClass::StrictPSH: return "StrictPSH";
  }
  return "?";
}

namespace {

PointClass classify_hessian(const SymMatrix& h, const ConeSpec& cone, double eps, double tau, double& margin) {
  const auto v = psplus_membership(h, cone, tau);
  margin = v.margin;
  if (eps > 0 && v.interior() && psplus_membership(h - 2.0 * eps * SymMatrix::identity(h.dim()), cone, tau).in_cone())
    return PointClass::StrictPSH;
  switch (v.cls) {
    case MembershipClass::Interior: return PointClass::PSH;
    case MembershipClass::Boundary: return PointClass::PartiallyPluriharmonic;
    case MembershipClass::Outside: return PointClass::NotPSH;
  }
  return PointClass::NotPSH;
}

}  // namespace

PointClassification psh_classify(const GridField& f, const ConeSpec& cone, double eps, double tau, Exec exec) {
  if (f.shape().dim() != cone.dim()) throw InputError("psh_classify: field and cone dimensions differ");
  PointClassification out;
  out.points = classifiable_points(f.shape());
  const auto np = static_cast<std::ptrdiff_t>(out.points.size());
  out.classes.assign(out.points.size(), PointClass::NotPSH);
  out.margins.assign(out.points.size(), 0.0);
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < np; ++i) {
      const auto u = static_cast<std::size_t>(i);
      out.classes[u] = classify_hessian(hessian_fd(f, out.points[u]), cone, eps, tau, out.margins[u]);
    }
  } else {
    for (std::ptrdiff_t i = 0; i < np; ++i) {
      const auto u = static_cast<std::size_t>(i);
      out.classes[u] = classify_hessian(hessian_fd(f, out.points[u]), cone, eps, tau, out.margins[u]);
    }
  }
  out.min_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < out.points.size(); ++i) {
    out.summary = std::min(out.summary, out.classes[i]);
    ++out.counts[static_cast<std::size_t>(out.classes[i])];
    if (out.margins[i] < out.min_margin) {
      out.min_margin = out.margins[i];
      out.worst_point = out.points[i];
    }
  }
  return out;
}

SubaffineReport subaffine_check(const GridField& f, double tau) {
  SubaffineReport rep;
  rep.points = classifiable_points(f.shape());
  rep.min_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t p : rep.points) {
    const SymMatrix h = hessian_fd(f, p);
    const double nh = h.norm();
    const double ratio = nh <= kTol.zero_floor ? 0.0 : eig_sym(h).max() / nh;
    const bool ok = ratio >= -tau;
    rep.pass.push_back(ok ? 1 : 0);
    rep.subaffine = rep.subaffine && ok;
    rep.min_ratio = std::min(rep.min_ratio, ratio);
  }
  return rep;
}

namespace {

struct GaussLegendre {
  std::vector<double> x, w;
  explicit GaussLegendre(int n) {
    for (int i = 0; i < n; ++i) {
      double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      double dp = 0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = z;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (z * p1 - p0) / (z * z - 1.0);
        const double dz = p1 / dp;
        z -= dz;
        if (std::abs(dz) < 1e-16) break;
      }
      x.push_back(z);
      w.push_back(2.0 / ((1.0 - z * z) * dp * dp));
    }
  }
};

const GaussLegendre& gl() {
  static const GaussLegendre rule(16);
  return rule;
}

double raw_bump(double s) {
  const double q = 1.0 - s * s;
  return q <= 0 ? 0.0 : std::exp(-1.0 / q);
}

// int_{-1}^{x} g(s) raw_bump(s) ds on 8 panels.
template <class G>
double bump_integral(double x, G g) {
  x = std::clamp(x, -1.0, 1.0);
  constexpr int kPanels = 8;
  const double w = (x + 1.0) / kPanels;
  double total = 0;
  const auto& r = gl();
  for (int p = 0; p < kPanels; ++p) {
    const double a = -1.0 + p * w;
    for (std::size_t i = 0; i < r.x.size(); ++i) {
      const double s = a + 0.5 * w * (r.x[i] + 1.0);
      total += 0.5 * w * r.w[i] * g(s) * raw_bump(s);
    }
  }
  return total;
}

double bump_mass() {
  static const double z = bump_integral(1.0, [](double) { return 1.0; });
  return z;
}

}  // namespace

double SmoothMax::psi(double s) { return raw_bump(s) / bump_mass(); }
double SmoothMax::cdf(double x) {
  if (x <= -1.0) return 0.0;
  if (x >= 1.0) return 1.0;
  // symmetric bump: evaluate the shorter tail for accuracy
  if (x > 0) return 1.0 - cdf(-x);
  return bump_integral(x, [](double) { return 1.0; }) / bump_mass();
}
double SmoothMax::first_moment(double x) {
  if (x <= -1.0 || x >= 1.0) return 0.0;
  if (x > 0) return first_moment(-x);  // s psi(s) is odd and integrates to 0
  return bump_integral(x, [](double s) { return s; }) / bump_mass();
}

SmoothMax::SmoothMax(double eps) : eps_(eps) {
  if (!(eps > 0) || !std::isfinite(eps)) throw InputError("smooth_max: eps must be positive");
}

void SmoothMax::h_derivs(double d, double& h, double& dh, double& ddh) const {
  if (std::abs(d) >= eps_) {
    h = std::abs(d);
    dh = d > 0 ? 1.0 : -1.0;
    ddh = 0.0;
    return;
  }
  const double x = d / eps_;
  const double f = cdf(x);
  h = eps_ * (x * (2.0 * f - 1.0) - 2.0 * first_moment(x));
  dh = 2.0 * f - 1.0;
  ddh = 2.0 * psi(x) / eps_;
}

double SmoothMax::operator()(double t1, double t2) const {
  double h, dh, ddh;
  h_derivs(t1 - t2, h, dh, ddh);
  return 0.5 * (t1 + t2) + 0.5 * h;
}

double SmoothMax::operator()(std::span<const double> t) const {
  if (t.empty()) throw InputError("smooth_max: no arguments");
  if (t.size() == 1) return t[0];
  if (t.size() == 2) return (*this)(t[0], t[1]);
  const SmoothMax level(eps_ / static_cast<double>(t.size() - 1));
  double acc = t[0];
  for (std::size_t i = 1; i < t.size(); ++i) acc = level(acc, t[i]);
  return acc;
}

SmoothMax::Jet SmoothMax::jet(double t1, double t2) const {
  double h, dh, ddh;
  h_derivs(t1 - t2, h, dh, ddh);
  return {0.5 * (t1 + t2) + 0.5 * h, 0.5 + 0.5 * dh, 0.5 - 0.5 * dh, 0.5 * ddh, -0.5 * ddh, 0.5 * ddh};
}

GridField smooth_max_field(std::span<const GridField> fields, double eps) {
  if (fields.empty()) throw InputError("smooth_max_field: no fields");
  const SmoothMax sm(eps);
  const auto& shape = fields[0].shape();
  for (const auto& f : fields)
    if (!(f.shape() == shape)) throw InputError("smooth_max_field: grids differ");
  std::vector<double> out(shape.size());
  std::vector<double> t(fields.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (std::size_t k = 0; k < fields.size(); ++k) t[k] = fields[k][i];
    out[i] = sm(t);
  }
  return GridField(shape, std::move(out));
}

ComposeReport convex_compose_check(const GridField& f, const std::function<double(double)>& psi, const ConeSpec& cone,
                                   double tau) {
  ComposeReport rep;
  const auto cf = psh_classify(f, cone, 0.0, tau);
  rep.f_summary = cf.summary;
  std::vector<double> g(f.values().size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = psi(f[i]);
  const auto cg = psh_classify(GridField(f.shape(), std::move(g)), cone, 0.0, tau);
  rep.g_summary = cg.summary;
  rep.g_min_margin = cg.min_margin;
  rep.ok = cf.summary == PointClass::NotPSH || cg.summary != PointClass::NotPSH;
  return rep;
}

namespace {

struct TestFunction {
  SymMatrix q;  // zero for affine tests
  Vec b;
  bool quadratic = false;
};

double eval_test(const TestFunction& t, std::span<const double> x) {
  double v = dot(t.b, x);
  if (t.quadratic) v += 0.5 * t.q.quadratic_form(x);
  return v;
}

std::vector<TestFunction> hull_tests(const ConeSpec& cone, int n, int budget, std::uint64_t seed) {
  std::vector<TestFunction> out;
  CounterRng dirs(seed, 101), quads(seed, 102);
  int affine_index = 0;
  auto next_direction = [&]() {
    Vec b(static_cast<std::size_t>(n), 0.0);
    const int j = affine_index++;
    if (j < 2 * n) {
      b[static_cast<std::size_t>(j / 2)] = j % 2 == 0 ? 1.0 : -1.0;
    } else if (n == 2) {
      const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
      const double th = golden * (j - 2 * n);
      b = {std::cos(th), std::sin(th)};
    } else {
      b = dirs.unit_vector(n);
    }
    return b;
  };
  for (int j = 0; j < budget; ++j) {
    TestFunction t;
    if (j % 4 == 3) {
      const SymMatrix r = SymMatrix::random(n, quads);
      const double s = boundary_shift(r, cone);
      t.q = r + (s + 1e-12 * (1.0 + std::abs(s))) * SymMatrix::identity(n);
      t.b = quads.normal_vector(n);
      t.quadratic = true;
    } else {
      t.q = SymMatrix(n);
      t.b = next_direction();
    }
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace

HullReport hull_estimate(const std::vector<Vec>& k, const ConeSpec& cone, const GridShape& grid, int budget, Exec exec,
                         std::uint64_t seed) {
  if (k.empty()) throw InputError("hull_estimate: K is empty");
  const int n = grid.dim();
  if (cone.dim() != n) throw InputError("hull_estimate: cone and grid dimensions differ");
  for (const auto& x : k)
    if (static_cast<int>(x.size()) != n) throw InputError("hull_estimate: K point of wrong dimension");
  if (budget < 0) throw InputError("hull_estimate: negative budget");
  const auto tests = hull_tests(cone, n, budget, seed);
  std::vector<double> sup_k(tests.size(), -std::numeric_limits<double>::infinity());
  for (std::size_t t = 0; t < tests.size(); ++t)
    for (const auto& x : k) sup_k[t] = std::max(sup_k[t], eval_test(tests[t], x));

  HullReport rep;
  rep.test_functions = budget;
  rep.mask.assign(grid.size(), 1);
  const auto np = static_cast<std::ptrdiff_t>(grid.size());
  auto kernel = [&](std::ptrdiff_t i) {
    const Vec y = grid.point(static_cast<std::size_t>(i));
    for (std::size_t t = 0; t < tests.size(); ++t) {
      if (eval_test(tests[t], y) > sup_k[t] + 1e-10 * (1.0 + std::abs(sup_k[t]))) {
        rep.mask[static_cast<std::size_t>(i)] = 0;
        return;
      }
    }
  };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < np; ++i) kernel(i);
  } else {
    for (std::ptrdiff_t i = 0; i < np; ++i) kernel(i);
  }
  rep.kept = static_cast<std::size_t>(std::count(rep.mask.begin(), rep.mask.end(), 1));
  return rep;
}

}  // namespace hcl
