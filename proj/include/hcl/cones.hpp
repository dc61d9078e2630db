#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hcl/garding.hpp"
#include "hcl/linalg.hpp"
#include "hcl/verdict.hpp"

namespace hcl {

enum class ConeKind { Generated, GrassmannFamily, GardingCone };

enum class Family {
  RealLines,     // G(1, R^n): P+ is the positive semidefinite cone
  RealPlanes,    // G(p, R^n)
  FullTrace,     // {I}: the subharmonic cone
  ComplexLines,  // complex lines in C^m = R^{2m}
  Lagrangian,    // Lagrangian planes in C^m
  FixedAxis,     // the single line spanned by e_1
};

std::string_view to_string(Family f);
std::string_view to_string(ConeKind k);

/// A closed convex cone P+ in Sym^2(R^n), described through its polar P_+.
class ConeSpec {
 public:
  static ConeSpec generated(int n, std::vector<SymMatrix> generators);
  static ConeSpec real_lines(int n, int density = 64, std::uint64_t seed = 0);
  static ConeSpec real_planes(int n, int p, int density = 64, std::uint64_t seed = 0);
  static ConeSpec full_trace(int n);
  static ConeSpec complex_lines(int m, int density = 64, std::uint64_t seed = 0);
  static ConeSpec lagrangian(int m, int density = 64, std::uint64_t seed = 0);
  static ConeSpec fixed_axis(int n);
  static ConeSpec garding(MAPolynomial m);
  /// Family lookup by name: "real-lines", "real-planes", "full-trace",
  /// "complex-lines", "lagrangian", "fixed-axis".
  static ConeSpec family(Family f, int n, int p, int density, std::uint64_t seed);

  int dim() const { return n_; }
  ConeKind kind() const { return kind_; }
  Family family() const { return family_; }
  /// Plane dimension of the family (1 for lines, n for {I}, 2 for complex lines, m for Lagrangian).
  int plane_dim() const { return p_; }
  int density() const { return density_; }
  std::uint64_t seed() const { return seed_; }
  const std::vector<SymMatrix>& generators() const { return generators_; }
  const MAPolynomial& polynomial() const;
  std::string name() const;

  /// Seeded family sample; standard planes first, then random ones, `density` in total.
  std::vector<Plane> sample_planes() const;
  /// Trace-normalized elements of P_+: P_xi / p for families, generators / tr for Generated.
  /// Throws SemanticError for Garding cones, whose polar is not sampled.
  std::vector<SymMatrix> polar_samples() const;

 private:
  ConeSpec(int n, ConeKind kind) : n_(n), kind_(kind) {}

  int n_ = 0;
  ConeKind kind_ = ConeKind::Generated;
  Family family_ = Family::RealLines;
  int p_ = 1;
  int density_ = 64;
  std::uint64_t seed_ = 0;
  std::vector<SymMatrix> generators_;
  std::shared_ptr<const MAPolynomial> poly_;
};

/// min <A, B> over trace-normalized B in P_+, with the attaining B in `witness`.
/// Exact for RealLines, RealPlanes, FullTrace, ComplexLines and FixedAxis;
/// over polar_samples() otherwise. Not available for Garding cones.
double min_pairing(const SymMatrix& a, const ConeSpec& cone, SymMatrix* witness = nullptr);

/// Smallest s with R + sI in P+.
double boundary_shift(const SymMatrix& r, const ConeSpec& cone);

MembershipVerdict psplus_membership(const SymMatrix& a, const ConeSpec& cone, double tau = kTol.membership);

/// Membership in the Dirichlet dual: B is in the dual iff -B is not in Int P+.
MembershipVerdict dual_membership(const SymMatrix& b, const ConeSpec& cone, double tau = kTol.membership);

struct EllipticityReport {
  bool positivity = false;
  bool completeness = false;
  int span_dim = 0;
  int generators = 0;
  double min_generator_eigenvalue = 0.0;
  double sum_min_eigenvalue = 0.0;

  bool elliptic() const { return positivity && completeness; }
};

EllipticityReport ellipticity_check(const ConeSpec& cone, double tau = kTol.membership);

struct PolarCheckReport {
  bool bipolar_ok = true;
  bool certificates_ok = true;
  int trials = 0;
  double worst_pairing = 0.0;  // min <A,B> / (|A||B|) over interior samples A and generators B
  int generators_without_certificate = 0;
};

PolarCheckReport polar_check(const ConeSpec& cone, int trials, CounterRng& rng, double tau = kTol.membership);

struct FreeSubspaceResult {
  bool free = false;
  bool degenerate = false;  // W = R^n, so N = {0}
  MembershipVerdict certificate;
};

FreeSubspaceResult free_subspace_check(const Plane& w, const ConeSpec& cone, double tau = kTol.membership);

struct FreeDimReport {
  int claimed = 0;
  bool lower_ok = false;
  bool upper_ok = false;
  int lower_candidates_tried = 0;
  int upper_trials = 0;
  int upper_counterexamples = 0;
  std::optional<Plane> lower_witness;
  std::optional<Plane> upper_counterexample;
};

/// Probabilistic certificate for fd = claimed: a free subspace of dimension
/// `claimed` (coordinate subspaces, then `trials` random ones) and `trials`
/// random (claimed+1)-subspaces that are all not free.
FreeDimReport free_dim_verify(const ConeSpec& cone, int claimed, int trials, CounterRng& rng,
                              double tau = kTol.membership);

/// Is B in the closed convex cone P_+? Closed form for families, nonnegative
/// least squares over the generators for Generated and Lagrangian.
bool polar_contains(const SymMatrix& b, const ConeSpec& cone, double tol = 1e-8);

/// Active-set NNLS: min |Ax - b| subject to x >= 0. A is given column-wise.
Vec nnls(const std::vector<Vec>& columns, const Vec& b, double* residual = nullptr);

enum class EllipticSetKind { DetFloor, SLagBranch };

class ConvexEllipticSet {
 public:
  /// {A >= 0, det A >= c}.
  static ConvexEllipticSet det_floor(int n, double c);
  /// {A >= 0, sum arctan(lambda_i) >= k pi}, n = 2k+1 or 2k+2.
  static ConvexEllipticSet slag_branch(int n, int k);

  int dim() const { return n_; }
  EllipticSetKind kind() const { return kind_; }
  double c() const { return c_; }
  int k() const { return k_; }
  const SymMatrix& basepoint() const { return base_; }

 private:
  ConvexEllipticSet(int n, EllipticSetKind kind) : n_(n), kind_(kind) {}
  int n_;
  EllipticSetKind kind_;
  double c_ = 0.0;
  int k_ = 0;
  SymMatrix base_;
};

/// Margin is min(lambda_min, det A - c) for DetFloor and
/// min(lambda_min, sum arctan(lambda) - k pi) for SLagBranch.
MembershipVerdict convex_elliptic_membership(const SymMatrix& a, const ConvexEllipticSet& f,
                                             double tau = kTol.membership);

/// basepoint + t v in F for t = T j / steps, j = 1..steps.
bool ray_cone_membership(const SymMatrix& v, const ConvexEllipticSet& f, double t_max, int steps);

}  // namespace hcl
