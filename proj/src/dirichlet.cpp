#include "hcl/dirichlet.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace hcl {

namespace {

constexpr double kInside = -1e-10;  // rho below this marks an unknown

int igcd(int a, int b) { return std::gcd(std::abs(a), std::abs(b)); }

Vec unit_of(const std::vector<int>& v) {
  Vec out(v.begin(), v.end());
  const double s = norm2(out);
  for (auto& x : out) x /= s;
  return out;
}

// Unsigned angle between unit lines, accurate near zero.
double line_angle(const Vec& u, const Vec& w) {
  const double sgn = dot(u, w) < 0 ? -1.0 : 1.0;
  double dm = 0.0, dp = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dm += (u[i] - sgn * w[i]) * (u[i] - sgn * w[i]);
    dp += (u[i] + sgn * w[i]) * (u[i] + sgn * w[i]);
  }
  return 2.0 * std::atan2(std::sqrt(dm), std::sqrt(dp));
}

}  // namespace

StencilSet::StencilSet(int n, int width) : n_(n), width_(width) {
  if (n < 1 || n > 3) throw InputError("stencil: dimension must be 1, 2 or 3");
  if (width < 1) throw InputError("stencil: width >= 1 required");
  std::vector<int> v(static_cast<std::size_t>(n), -width);
  for (;;) {
    int g = 0, first = 0;
    for (int x : v) {
      g = igcd(g, x);
      if (first == 0) first = x;
    }
    if (g == 1 && first > 0) dirs_.push_back(v);
    int i = n - 1;
    while (i >= 0 && v[static_cast<std::size_t>(i)] == width) v[static_cast<std::size_t>(i--)] = -width;
    if (i < 0) break;
    ++v[static_cast<std::size_t>(i)];
  }
  auto key = [](const std::vector<int>& d) {
    int inf = 0, support = 0;
    for (int x : d) {
      inf = std::max(inf, std::abs(x));
      support += x != 0;
    }
    return std::make_pair(inf, support);
  };
  std::stable_sort(dirs_.begin(), dirs_.end(), [&](const auto& a, const auto& b) {
    const auto ka = key(a), kb = key(b);
    if (ka != kb) return ka < kb;
    return a > b;
  });
}

std::size_t StencilSet::nearest(std::span<const double> w) const {
  std::size_t best = 0;
  double best_cos = -1.0;
  const double nw = norm2(w);
  for (std::size_t d = 0; d < dirs_.size(); ++d) {
    const Vec u = unit_of(dirs_[d]);
    const double c = std::abs(dot(u, w)) / nw;
    if (c > best_cos + 1e-14) {
      best_cos = c;
      best = d;
    }
  }
  return best;
}

double StencilSet::max_angle_gap() const {
  if (n_ == 1) return 0.0;
  if (n_ == 2) {
    std::vector<double> ang;
    for (const auto& d : dirs_) {
      double a = std::atan2(d[1], d[0]);
      if (a < 0) a += std::numbers::pi;
      ang.push_back(a);
    }
    std::sort(ang.begin(), ang.end());
    double gap = ang.front() + std::numbers::pi - ang.back();
    for (std::size_t i = 1; i < ang.size(); ++i) gap = std::max(gap, ang[i] - ang[i - 1]);
    return 0.5 * gap;
  }
  CounterRng rng(0x5eed, 7);
  double worst = 0;
  for (int t = 0; t < 4000; ++t) {
    const Vec w = rng.unit_vector(n_);
    const Vec u = unit_of(dirs_[nearest(w)]);
    worst = std::max(worst, line_angle(u, w));
  }
  return worst;
}

DiscreteOperator discretize_operator(const SymMatrix& a, const StencilSet& stencil, double tau) {
  if (a.dim() != stencil.dim()) throw InputError("discretize_operator: dimension mismatch");
  const auto es = eig_sym(a);
  if (es.min() < -tau * std::max(a.norm(), kTol.zero_floor))
    throw InputError("discretize_operator: operator has a negative eigenvalue");
  DiscreteOperator op;
  for (std::size_t j = 0; j < es.values.size(); ++j) {
    const double lam = es.values[j];
    if (lam <= 1e-14 * std::max(es.max(), kTol.zero_floor)) continue;
    const std::size_t d = stencil.nearest(es.vectors[j]);
    const Vec u = unit_of(stencil.directions()[d]);
    op.angle_error = std::max(op.angle_error, line_angle(u, es.vectors[j]));
    auto it = std::find_if(op.terms.begin(), op.terms.end(), [&](const auto& t) { return t.first == d; });
    if (it == op.terms.end()) op.terms.emplace_back(d, lam);
    else it->second += lam;
  }
  std::sort(op.terms.begin(), op.terms.end());
  return op;
}

DirichletProblem DirichletProblem::build(const GridShape& grid, ScalarFn rho, ScalarFn phi, const ConeSpec& cone,
                                         const StencilSet& stencil) {
  if (grid.dim() != stencil.dim() || grid.dim() != cone.dim())
    throw InputError("dirichlet: grid, stencil and cone dimensions differ");
  if (cone.kind() == ConeKind::GardingCone)
    throw SemanticError("dirichlet: Garding cones are not supported by the solver (no polar sample)");
  if (!ellipticity_check(cone).elliptic()) throw SemanticError("dirichlet: cone is not elliptic; refusing to solve");

  DirichletProblem p(grid, stencil);
  p.cone_ = std::make_shared<const ConeSpec>(cone);
  p.phi_ = std::move(phi);
  const int n = grid.dim();
  p.unknown_of_.assign(grid.size(), -1);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (rho(grid.point(i)) < kInside) {
      if (grid.depth(i) == 0) throw InputError("dirichlet: domain is not contained in the grid");
      p.unknown_of_[i] = static_cast<std::int32_t>(p.unknowns_.size());
      p.unknowns_.push_back(i);
    }
  }
  if (p.unknowns_.empty()) throw InputError("dirichlet: domain contains no grid points");

  p.min_phi_ = std::numeric_limits<double>::infinity();
  p.max_phi_ = -std::numeric_limits<double>::infinity();
  const double h = grid.h();
  p.arms_.resize(p.unknowns_.size() * stencil.size() * 2);
  for (std::size_t u = 0; u < p.unknowns_.size(); ++u) {
    const std::size_t node = p.unknowns_[u];
    const Vec x = grid.point(node);
    const auto m = grid.multi(node);
    for (std::size_t d = 0; d < stencil.size(); ++d) {
      const auto& v = stencil.directions()[d];
      const double len = h * norm2(Vec(v.begin(), v.end()));
      for (int side = 0; side < 2; ++side) {
        const int sgn = side == 0 ? 1 : -1;
        std::array<int, 3> mm{};
        bool in_grid = true;
        for (int k = 0; k < n; ++k) {
          mm[static_cast<std::size_t>(k)] = m[static_cast<std::size_t>(k)] + sgn * v[static_cast<std::size_t>(k)];
          if (mm[static_cast<std::size_t>(k)] < 0 || mm[static_cast<std::size_t>(k)] >= grid.counts()[static_cast<std::size_t>(k)])
            in_grid = false;
        }
        Arm arm{-1, 0.0, len};
        if (in_grid && p.unknown_of_[grid.flat(mm)] >= 0) {
          arm.target = p.unknown_of_[grid.flat(mm)];
        } else {
          auto at = [&](double t) {
            Vec y = x;
            for (int k = 0; k < n; ++k) y[static_cast<std::size_t>(k)] += t * sgn * h * v[static_cast<std::size_t>(k)];
            return y;
          };
          constexpr int kSub = 8;
          double lo = 0.0, hi = 1.0;
          for (int k = 1; k <= kSub; ++k) {
            const double t = static_cast<double>(k) / kSub;
            if (rho(at(t)) >= kInside) {
              hi = t;
              break;
            }
            lo = t;
          }
          if (lo == 1.0) throw InputError("dirichlet: domain is not contained in the grid");
          if (!(hi == 1.0 && std::abs(rho(at(1.0))) <= -kInside)) {
            for (int it = 0; it < 60; ++it) {
              const double mid = 0.5 * (lo + hi);
              (rho(at(mid)) < 0.0 ? lo : hi) = mid;
            }
          }
          arm.length = hi * len;
          arm.value = p.phi_(at(hi));
          if (!std::isfinite(arm.value)) throw InputError("dirichlet: boundary data is not finite");
          p.min_phi_ = std::min(p.min_phi_, arm.value);
          p.max_phi_ = std::max(p.max_phi_, arm.value);
        }
        p.arms_[(u * stencil.size() + d) * 2 + static_cast<std::size_t>(side)] = arm;
      }
    }
  }

  p.operators_ = cone.polar_samples();
  for (const auto& a : p.operators_) {
    const DiscreteOperator op = discretize_operator(a, stencil);
    p.angle_error_ = std::max(p.angle_error_, op.angle_error);
    p.schemes_.push_back(p.scheme_for(a));
  }
  return p;
}

DirichletProblem DirichletProblem::on_box(const GridShape& grid, ScalarFn phi, const ConeSpec& cone,
                                          const StencilSet& stencil) {
  const Vec lo = grid.lo(), hi = grid.hi();
  // exact zero on the outer grid faces
  auto rho = [lo, hi](std::span<const double> x) {
    double r = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < lo.size(); ++i) r = std::max({r, lo[i] - x[i], x[i] - hi[i]});
    return r;
  };
  return build(grid, rho, std::move(phi), cone, stencil);
}

LinearScheme DirichletProblem::scheme_for(const SymMatrix& a) const {
  const DiscreteOperator op = discretize_operator(a, stencil_);
  LinearScheme s;
  s.nodes.resize(unknowns_.size());
  for (std::size_t u = 0; u < unknowns_.size(); ++u) {
    NodeUpdate nu;
    nu.begin = static_cast<std::uint32_t>(s.terms.size());
    for (const auto& [d, lam] : op.terms) {
      const Arm& f = arm(u, d, 0);
      const Arm& b = arm(u, d, 1);
      const double sum = f.length + b.length;
      const double cf = lam * 2.0 / (f.length * sum);
      const double cb = lam * 2.0 / (b.length * sum);
      for (const auto& [a_arm, c] : {std::pair{&f, cf}, std::pair{&b, cb}}) {
        if (a_arm->target >= 0) s.terms.push_back({a_arm->target, c});
        else nu.c += c * a_arm->value;
        nu.den += c;
      }
    }
    nu.end = static_cast<std::uint32_t>(s.terms.size());
    s.nodes[u] = nu;
  }
  return s;
}

GridField DirichletProblem::to_field(const std::vector<double>& u) const {
  std::vector<double> v(grid_.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto k = unknown_of_[i];
    v[i] = k >= 0 ? u[static_cast<std::size_t>(k)] : phi_(grid_.point(i));
  }
  return GridField(grid_, std::move(v));
}

namespace {

inline double scheme_value(const LinearScheme& s, std::size_t i, std::span<const double> u) {
  const NodeUpdate& nu = s.nodes[i];
  double num = nu.c;
  for (std::uint32_t k = nu.begin; k < nu.end; ++k) num += s.terms[k].w * u[static_cast<std::size_t>(s.terms[k].target)];
  return num / nu.den;
}

inline double scheme_apply(const LinearScheme& s, std::size_t i, std::span<const double> u) {
  const NodeUpdate& nu = s.nodes[i];
  double num = nu.c;
  for (std::uint32_t k = nu.begin; k < nu.end; ++k) num += s.terms[k].w * u[static_cast<std::size_t>(s.terms[k].target)];
  return num - nu.den * u[i];
}

double min_update(const std::vector<LinearScheme>& schemes, std::size_t i, std::span<const double> u) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : schemes) {
    const double v = scheme_value(s, i, u);
    if (v < best) best = v;
  }
  return best;
}

double schemes_residual(const std::vector<LinearScheme>& schemes, std::span<const double> u) {
  double r = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& s : schemes) m = std::min(m, scheme_apply(s, i, u));
    r = std::max(r, std::abs(m));
  }
  return r;
}

// Iterates u <- min over schemes of the scheme update until the residual drops below tol.
SolveReport iterate(const std::vector<LinearScheme>& schemes, std::vector<double>& u, const SolverConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  SolveReport rep;
  const auto nu = static_cast<std::ptrdiff_t>(u.size());
  std::vector<double> next(u.size());
  const int every = std::max(1, cfg.check_every);
  rep.residual = schemes_residual(schemes, u);
  if (rep.residual <= cfg.tol) rep.converged = true;
  for (int it = 1; it <= cfg.max_iters && !rep.converged; ++it) {
    if (cfg.mode == SweepMode::GaussSeidel) {
      if (it % 2 == 1) {
        for (std::ptrdiff_t i = 0; i < nu; ++i) u[static_cast<std::size_t>(i)] = min_update(schemes, static_cast<std::size_t>(i), u);
      } else {
        for (std::ptrdiff_t i = nu - 1; i >= 0; --i) u[static_cast<std::size_t>(i)] = min_update(schemes, static_cast<std::size_t>(i), u);
      }
    } else if (cfg.exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
      for (std::ptrdiff_t i = 0; i < nu; ++i) next[static_cast<std::size_t>(i)] = min_update(schemes, static_cast<std::size_t>(i), u);
      u.swap(next);
    } else {
      for (std::ptrdiff_t i = 0; i < nu; ++i) next[static_cast<std::size_t>(i)] = min_update(schemes, static_cast<std::size_t>(i), u);
      u.swap(next);
    }
    rep.iterations = it;
    if (it % every == 0 || it == cfg.max_iters) {
      rep.residual = schemes_residual(schemes, u);
      if (rep.residual <= cfg.tol) rep.converged = true;
    }
  }
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace

double perron_update(const DirichletProblem& p, std::size_t i, std::span<const double> u) {
  return min_update(p.schemes(), i, u);
}

double residual(const DirichletProblem& p, std::span<const double> u) {
  if (u.size() != p.unknowns().size()) throw InputError("residual: state size mismatch");
  return schemes_residual(p.schemes(), u);
}

double residual(const GridField& u, const DirichletProblem& p) {
  if (!(u.shape() == p.grid())) throw InputError("residual: field grid differs from the problem grid");
  std::vector<double> x;
  for (std::size_t node : p.unknowns()) x.push_back(u[node]);
  return residual(p, x);
}

Solution reference_harmonic(const DirichletProblem& p, const SymMatrix& a, const SolverConfig& cfg) {
  const auto es = eig_sym(a);
  if (!(es.min() > kTol.membership * std::max(a.norm(), kTol.zero_floor)))
    throw InputError("reference_harmonic: operator must be positive definite");
  const std::vector<LinearScheme> one{p.scheme_for((1.0 / a.trace()) * a)};
  std::vector<double> u(p.unknowns().size(), 0.5 * (p.min_phi() + p.max_phi()));
  SolverConfig c = cfg;
  if (c.mode == SweepMode::Jacobi) c.mode = SweepMode::GaussSeidel;
  Solution s;
  s.report = iterate(one, u, c);
  s.u = p.to_field(u);
  s.unknowns = std::move(u);
  return s;
}

Solution perron_solve(const DirichletProblem& p, const SolverConfig& cfg) {
  if (p.schemes().empty()) throw InputError("perron_solve: empty operator sample");
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<double> u;
  int init_iters = 0;
  if (cfg.init == Initializer::Harmonic) {
    const Solution h = reference_harmonic(p, SymMatrix::identity(p.grid().dim()), cfg);
    u = h.unknowns;
    init_iters = h.report.iterations;
  } else {
    u.assign(p.unknowns().size(), p.min_phi());
  }
  Solution s;
  s.report = iterate(p.schemes(), u, cfg);
  s.report.iterations += init_iters;
  s.report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  s.u = p.to_field(u);
  s.unknowns = std::move(u);
  return s;
}

MonotonicityReport cone_monotonicity_check(const DirichletProblem& p0, const DirichletProblem& p1,
                                           const SolverConfig& cfg, double tol) {
  if (!(p0.grid() == p1.grid()) || p0.unknowns() != p1.unknowns())
    throw InputError("cone_monotonicity_check: problems differ in grid or domain");
  for (const auto& b : p1.operators())
    if (!polar_contains(b, p0.cone())) throw InputError("cone_monotonicity_check: operator samples are not nested");
  MonotonicityReport rep;
  rep.u0 = perron_solve(p0, cfg);
  rep.u1 = perron_solve(p1, cfg);
  rep.max_violation = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < rep.u0.unknowns.size(); ++i)
    rep.max_violation = std::max(rep.max_violation, rep.u0.unknowns[i] - rep.u1.unknowns[i]);
  rep.ok = rep.max_violation <= tol && rep.u0.report.converged && rep.u1.report.converged;
  return rep;
}

namespace {

struct MaPairs {
  std::vector<LinearScheme> dir;                         // one per stencil direction, lambda = 1
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // orthogonal direction pairs
};

MaPairs ma_pairs(const DirichletProblem& p) {
  MaPairs m;
  const auto& dirs = p.stencil().directions();
  for (const auto& v : dirs) m.dir.push_back(p.scheme_for(SymMatrix::outer(unit_of(v))));
  for (std::size_t a = 0; a < dirs.size(); ++a) {
    std::vector<int> perp{-dirs[a][1], dirs[a][0]};
    if (perp[0] < 0 || (perp[0] == 0 && perp[1] < 0)) perp = {-perp[0], -perp[1]};
    const auto it = std::find(dirs.begin(), dirs.end(), perp);
    const auto b = static_cast<std::size_t>(it - dirs.begin());
    if (it != dirs.end() && a < b) m.pairs.emplace_back(a, b);
  }
  return m;
}

double ma_update(const MaPairs& m, double c, std::size_t i, std::span<const double> u) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [a, b] : m.pairs) {
    const double r1 = scheme_value(m.dir[a], i, u), r2 = scheme_value(m.dir[b], i, u);
    const double k = c / (m.dir[a].nodes[i].den * m.dir[b].nodes[i].den);
    const double up = 0.5 * ((r1 + r2) - std::sqrt((r1 - r2) * (r1 - r2) + 4.0 * k));
    best = std::min(best, up);
  }
  return best;
}

double ma_res(const MaPairs& m, double c, std::span<const double> u) {
  double r = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    double det = std::numeric_limits<double>::infinity();
    for (const auto& [a, b] : m.pairs) {
      const double d1 = std::max(0.0, scheme_apply(m.dir[a], i, u));
      const double d2 = std::max(0.0, scheme_apply(m.dir[b], i, u));
      det = std::min(det, d1 * d2);
    }
    r = std::max(r, std::abs(det - c));
  }
  return r;
}

}  // namespace

double ma_residual(const DirichletProblem& p, double c, std::span<const double> u) {
  return ma_res(ma_pairs(p), c, u);
}

Solution ma_solve_2d(const GridShape& grid, ScalarFn rho, ScalarFn phi, double c, int stencil_width,
                     const SolverConfig& cfg) {
  if (grid.dim() != 2) throw InputError("ma_solve_2d: n = 2 required");
  if (!(c >= 0) || !std::isfinite(c)) throw InputError("ma_solve_2d: c >= 0 required");
  const auto t0 = std::chrono::steady_clock::now();
  const auto p = DirichletProblem::build(grid, std::move(rho), std::move(phi), ConeSpec::real_lines(2, 4),
                                         StencilSet(2, stencil_width));
  const MaPairs m = ma_pairs(p);
  std::vector<double> u;
  Solution s;
  if (cfg.init == Initializer::Harmonic) {
    Solution h = reference_harmonic(p, SymMatrix::identity(2), cfg);
    u = std::move(h.unknowns);
    s.report.iterations = h.report.iterations;
  } else {
    u.assign(p.unknowns().size(), p.min_phi());
  }
  const int every = std::max(1, cfg.check_every);
  const auto nu = static_cast<std::ptrdiff_t>(u.size());
  s.report.residual = ma_res(m, c, u);
  s.report.converged = s.report.residual <= cfg.tol;
  for (int it = 1; it <= cfg.max_iters && !s.report.converged; ++it) {
    if (it % 2 == 1) {
      for (std::ptrdiff_t i = 0; i < nu; ++i) u[static_cast<std::size_t>(i)] = ma_update(m, c, static_cast<std::size_t>(i), u);
    } else {
      for (std::ptrdiff_t i = nu - 1; i >= 0; --i) u[static_cast<std::size_t>(i)] = ma_update(m, c, static_cast<std::size_t>(i), u);
    }
    for (double x : u)
      if (!std::isfinite(x)) throw NumericalError("ma_solve_2d: pointwise root is not finite");
    ++s.report.iterations;
    if (it % every == 0 || it == cfg.max_iters) {
      s.report.residual = ma_res(m, c, u);
      s.report.converged = s.report.residual <= cfg.tol;
    }
  }
  s.report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  s.u = p.to_field(u);
  s.unknowns = std::move(u);
  return s;
}

}  // namespace hcl
