#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hcl/cones.hpp"
#include "hcl/linalg.hpp"
#include "hcl/parallel.hpp"

namespace hcl {

/// Uniform rectangular grid in R^n, n = 1..3, spacing h, row-major with axis 0 slowest.
class GridShape {
 public:
  GridShape() = default;
  GridShape(Vec lo, double h, std::vector<int> counts);
  /// [lo, hi]^n with `points` per axis.
  static GridShape cube(int n, double lo, double hi, int points);

  int dim() const { return static_cast<int>(lo_.size()); }
  double h() const { return h_; }
  const Vec& lo() const { return lo_; }
  Vec hi() const;
  const std::vector<int>& counts() const { return counts_; }
  std::size_t size() const { return size_; }
  std::ptrdiff_t stride(int axis) const { return strides_[static_cast<std::size_t>(axis)]; }

  std::array<int, 3> multi(std::size_t idx) const;
  std::size_t flat(std::span<const int> m) const;
  Vec point(std::size_t idx) const;
  /// Distance in cells to the nearest grid face.
  int depth(std::size_t idx) const;

  bool operator==(const GridShape& o) const = default;

 private:
  Vec lo_;
  double h_ = 0.0;
  std::vector<int> counts_;
  std::array<std::ptrdiff_t, 3> strides_{};
  std::size_t size_ = 0;
};

/// Scalar samples on a GridShape. Values are immutable once built.
class GridField {
 public:
  GridField() = default;
  GridField(GridShape shape, std::vector<double> values, std::string source = {});
  static GridField sample(const GridShape& shape, const std::function<double(std::span<const double>)>& fn,
                          std::string source = {});

  const GridShape& shape() const { return shape_; }
  const std::vector<double>& values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  const std::string& source() const { return source_; }

 private:
  GridShape shape_;
  std::vector<double> values_;
  std::string source_;
};

/// Centered second differences; the off-diagonal uses the four-point formula.
/// Exact on quadratics. Throws std::out_of_range closer than 2 cells to the boundary.
SymMatrix hessian_fd(const GridField& f, std::size_t idx);

/// Central first differences.
Vec gradient_fd(const GridField& f, std::size_t idx);

/// Points at depth >= 2, in increasing flat order.
std::vector<std::size_t> classifiable_points(const GridShape& shape);

/// Ordered from weakest to strongest.
enum class PointClass { NotPSH, PartiallyPluriharmonic, PSH, StrictPSH };

std::string_view to_string(PointClass c);

struct PointClassification {
  std::vector<std::size_t> points;
  std::vector<PointClass> classes;
  std::vector<double> margins;  // membership margins of the Hessian, relative to its norm
  PointClass summary = PointClass::StrictPSH;
  double min_margin = 0.0;
  std::size_t worst_point = 0;
  std::array<int, 4> counts{};  // indexed by PointClass
};

/// Per point: StrictPSH if Hess - 2 eps I is in P+ (eps > 0), else PSH for margin > tau,
/// PartiallyPluriharmonic for |margin| <= tau, NotPSH otherwise.
PointClassification psh_classify(const GridField& f, const ConeSpec& cone, double eps, double tau = kTol.membership,
                                 Exec exec = Exec::Parallel);

struct SubaffineReport {
  std::vector<std::size_t> points;
  std::vector<std::uint8_t> pass;
  bool subaffine = true;
  double min_ratio = 0.0;  // min over points of lambda_max / |H|
};

/// lambda_max(Hess) >= -tau |Hess| at every classifiable point.
SubaffineReport subaffine_check(const GridField& f, double tau = kTol.membership);

/// Two-argument smooth maximum M_eps = max * phi_eps, with a product bump in
/// (mean, difference) coordinates. With d = t1 - t2:
///   M_eps = (t1 + t2)/2 + H(d)/2,  H(d) = E|d - D|,
/// where D has density psi(x/eps)/eps, psi(s) ~ exp(-1/(1 - s^2)) on [-1, 1].
class SmoothMax {
 public:
  explicit SmoothMax(double eps);

  double eps() const { return eps_; }
  double operator()(double t1, double t2) const;
  /// m >= 3 arguments by left-to-right pairing with eps/(m-1) per level.
  double operator()(std::span<const double> t) const;

  struct Jet {
    double value;
    double d1, d2;           // partial derivatives in t1, t2
    double d11, d12, d22;    // second partials
  };
  Jet jet(double t1, double t2) const;

  /// H and its first two derivatives at d.
  void h_derivs(double d, double& h, double& dh, double& ddh) const;

  /// Normalized bump and its antiderivatives on [-1, 1].
  static double psi(double s);
  static double cdf(double x);         // F(x) = int_{-1}^x psi
  static double first_moment(double x);  // G(x) = int_{-1}^x s psi(s) ds

 private:
  double eps_;
};

GridField smooth_max_field(std::span<const GridField> fields, double eps);

struct ComposeReport {
  bool ok = false;
  PointClass f_summary = PointClass::NotPSH;
  PointClass g_summary = PointClass::NotPSH;
  double g_min_margin = 0.0;
};

/// psi(f) classifies in P+ whenever f does (psi convex, nondecreasing).
ComposeReport convex_compose_check(const GridField& f, const std::function<double(double)>& psi, const ConeSpec& cone,
                                   double tau = kTol.membership);

struct HullReport {
  std::vector<std::uint8_t> mask;  // 1 = not excluded
  int test_functions = 0;
  std::size_t kept = 0;
};

/// Outer approximation of the P+-hull of K on the grid. The test family is a
/// fixed sequence (affine directions interleaved with boundary quadratics
/// R + s* I); `budget` takes a prefix, so the mask shrinks monotonically in budget.
HullReport hull_estimate(const std::vector<Vec>& k, const ConeSpec& cone, const GridShape& grid, int budget,
                         Exec exec = Exec::Parallel, std::uint64_t seed = 0);

}  // namespace hcl
