#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hcl/cones.hpp"
#include "hcl/expr.hpp"
#include "hcl/fields.hpp"
#include "hcl/linalg.hpp"

namespace hcl {

/// Omega = {rho < 0} inside the ball of radius `radius` about `center`.
class DomainSpec {
 public:
  static DomainSpec from_expression(int n, std::string_view rho, double collar = 0.25, Vec center = {},
                                    double radius = 4.0);
  /// Value-only rho; derivatives by central differences with step 1e-5.
  static DomainSpec from_function(int n, std::function<double(std::span<const double>)> rho, std::string label,
                                  double collar = 0.25, Vec center = {}, double radius = 4.0);

  int dim() const { return n_; }
  const std::string& label() const { return label_; }
  bool analytic() const { return expr_.has_value(); }
  double collar() const { return collar_; }
  const Vec& center() const { return center_; }
  double radius() const { return radius_; }

  double rho(std::span<const double> x) const;
  Jet jet(std::span<const double> x) const;

  /// `count` crossings of rho along rays from the center, bisected to |rho| <= 1e-10.
  /// In 2-D the rays advance by the golden angle from a seeded offset. Every
  /// crossing on a ray is kept, so the annulus yields inner and outer points.
  std::vector<Vec> boundary_samples(int count, std::uint64_t seed = 0) const;

 private:
  int n_ = 0;
  std::string label_;
  std::optional<Expr> expr_;
  std::function<double(std::span<const double>)> fn_;
  double collar_ = 0.25;
  Vec center_;
  double radius_ = 4.0;
};

/// Unit normal and Hessian divided by |grad rho|. Throws InputError when
/// |grad rho| <= 1e-8 (degenerate boundary).
struct BoundaryFrame {
  Vec normal;
  SymMatrix hess;       // Hess rho / |grad rho|
  double grad_norm = 0.0;
};
BoundaryFrame boundary_frame(const DomainSpec& d, std::span<const double> x);

struct BoundaryVerdict {
  bool strict = false;
  bool weak = false;
  double margin = 0.0;        // min pairing over tangential A; +inf when none exist
  SymMatrix witness;          // attaining A (trace one)
  int tangential = 0;         // sampled A passing the filter; -1 when exact
  bool vacuous = false;       // no tangential elements
};

/// <Hess rho / |grad rho|, A> over trace-one tangential A in P_+.
/// Lines, planes, {I} and complex lines are minimized exactly over the
/// tangent space. Other families keep polar samples with <nu nu, A> < delta_t.
/// Garding cones use the margin of Hess rho + C_max grad rho grad rho^T.
BoundaryVerdict boundary_convexity_check(const DomainSpec& d, const ConeSpec& cone, std::span<const double> x,
                                         double tau = kTol.membership, double delta_t = 0.05, double c_max = 1e6);

struct ConstantSearch {
  bool found = false;
  double c = 0.0;
  MembershipVerdict verdict;  // at c, or at c_max on failure
};

/// Smallest C in [0, c_max] with hess + C g g^T Interior (doubling then 60 bisections).
ConstantSearch strict_constant_C(const SymMatrix& hess, std::span<const double> grad, const ConeSpec& cone,
                                 double c_max = 1e6, double tau = kTol.membership);
ConstantSearch strict_constant_C(const DomainSpec& d, const ConeSpec& cone, std::span<const double> x,
                                 double c_max = 1e6, double tau = kTol.membership);

struct DefiningConstants {
  double eps = 0.0;    // pairing floor near tangency
  double delta = 0.0;  // tangency window
  double m = 0.0;      // -min sampled pairing
  double c = 0.0;      // C > M / delta, doubled
  double a = 0.0;      // patch slope: a|x-c|^2 - t
  double t = 0.0;      // collar level
  double eps_max = 0.0;  // smooth-max width admitted by the collar
  double eps_used = 0.0;
  bool sampled = true;   // false for Garding cones (C from the constant search)
};

/// rho_hat = M_eps{rho + C rho^2 / 2, a|x - center|^2 - t} with exact jets.
class DefiningFunction {
 public:
  DefiningFunction(DomainSpec d, DefiningConstants k);
  const DefiningConstants& constants() const { return k_; }
  const DomainSpec& domain() const { return d_; }
  double value(std::span<const double> x) const;
  Jet jet(std::span<const double> x) const;
  /// rho + C rho^2 / 2.
  Jet extended(std::span<const double> x) const;

 private:
  DomainSpec d_;
  DefiningConstants k_;
  SmoothMax smax_;
};

struct DefiningBudget {
  int boundary_samples = 64;
  int grid_points = 61;  // per axis
  double delta_t = 0.05;
  std::uint64_t seed = 0;
};

struct DefiningReport {
  bool ok = false;              // strict boundary and strict rho_hat on the closure sample
  bool refused = false;         // some boundary sample is not strictly convex
  std::optional<Vec> refusal_point;
  BoundaryVerdict refusal;
  DefiningConstants constants;
  int boundary_points = 0;
  int pairings_sampled = 0;
  int closure_points = 0;
  double min_margin = 0.0;      // over the closure sample
  Vec worst_point;
  bool sign_agrees = false;     // rho_hat and rho share signs on the collar sample
  std::optional<DefiningFunction> rho_hat;
};

DefiningReport global_defining_function(const DomainSpec& d, const ConeSpec& cone, const DefiningBudget& budget = {});

struct ExhaustionReport {
  bool pass = false;
  int points = 0;
  int excluded = 0;  // distance estimate below 2h
  double min_margin = 0.0;
  Vec worst_point;
  SymMatrix witness;
};

/// -log(-rho) on interior grid points, Hess = Hess rho / delta + grad rho grad rho^T / delta^2.
/// Uses `rho_hat` when given, else the domain's own rho.
ExhaustionReport exhaustion_check(const DomainSpec& d, const ConeSpec& cone, const GridShape& grid,
                                  const DefiningFunction* rho_hat = nullptr, double tau = kTol.membership);

enum class SubmanifoldKind { Point, Line, Segment, Circle, Curve };

/// Closed submanifold M of R^n with closed-form or optimized distance.
class SubmanifoldSpec {
 public:
  static SubmanifoldSpec point(Vec p);
  static SubmanifoldSpec line(Vec p, Vec dir);
  static SubmanifoldSpec segment(Vec a, Vec b);
  /// Circle in the (x0, x1) plane of R^n.
  static SubmanifoldSpec circle(int n, Vec center2, double radius);
  /// t -> (x_0(t), ..., x_{n-1}(t)) on [t0, t1].
  static SubmanifoldSpec curve(std::vector<Expr> coords, double t0, double t1);

  int dim() const { return n_; }
  int manifold_dim() const { return kind_ == SubmanifoldKind::Point ? 0 : 1; }
  SubmanifoldKind kind() const { return kind_; }
  std::string name() const;

  /// Points of M; interior parameters only for segments and curves.
  std::vector<Vec> samples(int count) const;
  Plane tangent(std::span<const double> x) const;
  Plane normal(std::span<const double> x) const;
  /// Nearest point of M. Throws NumericalError if the curve projection does not converge.
  Vec project(std::span<const double> x) const;
  double dist(std::span<const double> x) const;

 private:
  int n_ = 0;
  SubmanifoldKind kind_ = SubmanifoldKind::Point;
  Vec p_, q_;  // point / line base and direction / segment ends / circle center
  double r_ = 0.0;
  std::vector<Expr> coords_;
  double t0_ = 0.0, t1_ = 1.0;

  Vec curve_at(double t) const;
  Vec curve_velocity(double t) const;
  double curve_param(std::span<const double> x) const;
};

/// Centered differences of f = dist^2 / 2 with step h.
SymMatrix dist_sq_hessian_fd(const SubmanifoldSpec& m, std::span<const double> x, double h);

struct DistSqReport {
  SymMatrix hessian;
  SymMatrix projection;  // P_N
  double max_error = 0.0;
  bool matches = false;
  bool free = false;
  MembershipVerdict verdict;  // of P_N
};

DistSqReport dist_sq_hessian_check(const SubmanifoldSpec& m, const ConeSpec& cone, std::span<const double> x0,
                                   double h = 1e-3, double tol = 1e-4);

struct TubeReport {
  bool refused = false;
  std::optional<Vec> failing_sample;
  int free_samples = 0;
  bool strict = false;           // f_M on the tube
  int points = 0;
  int excluded = 0;
  double min_margin = 0.0;
  double admissible_eps = 0.0;   // f_M + eps psi strict on the tube
  bool perturbed_strict = false;
  Vec zero_point;                // Z = {zero_point}
};

/// psi(x) = 1 - exp(-|x - z|^2 / 2) with z the first sample of M; the
/// admissible eps is found by halving from 1.
TubeReport tube_report(const SubmanifoldSpec& m, const ConeSpec& cone, double r, const GridShape& grid,
                       double tau = kTol.membership);

}  // namespace hcl
