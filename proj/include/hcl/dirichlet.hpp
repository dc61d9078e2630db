#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "hcl/cones.hpp"
#include "hcl/fields.hpp"
#include "hcl/parallel.hpp"

namespace hcl {

using ScalarFn = std::function<double(std::span<const double>)>;

/// Primitive integer directions v with |v|_inf <= width, first nonzero entry
/// positive, ordered by |v|_inf then lexicographically (axes first).
class StencilSet {
 public:
  StencilSet(int n, int width);

  int dim() const { return n_; }
  int width() const { return width_; }
  const std::vector<std::vector<int>>& directions() const { return dirs_; }
  std::size_t size() const { return dirs_.size(); }
  /// Index of the direction closest in angle to w (unsigned).
  std::size_t nearest(std::span<const double> w) const;
  /// Largest angle between a unit vector and its nearest stencil direction
  /// (exact in 2-D, sampled in 3-D).
  double max_angle_gap() const;

 private:
  int n_;
  int width_;
  std::vector<std::vector<int>> dirs_;
};

/// Delta_A u ~ sum_j lambda_j D^2_{v_j} u, where v_j is the stencil direction
/// nearest to the eigenvector w_j and D^2_v is the second derivative along v/|v|.
struct DiscreteOperator {
  std::vector<std::pair<std::size_t, double>> terms;  // (direction index, weight)
  double angle_error = 0.0;                           // largest angle between w_j and v_j
};

/// Throws InputError if A has an eigenvalue below -tau |A|.
DiscreteOperator discretize_operator(const SymMatrix& a, const StencilSet& stencil, double tau = kTol.membership);

/// Per-node linear update for one operator: u = (c + sum w_k u[target_k]) / den.
struct NodeUpdate {
  std::uint32_t begin = 0, end = 0;
  double c = 0.0;
  double den = 0.0;
};
struct UpdateTerm {
  std::int32_t target;
  double w;
};
struct LinearScheme {
  std::vector<NodeUpdate> nodes;  // one per unknown
  std::vector<UpdateTerm> terms;
};

/// Domain {rho < 0} cut from a grid, with boundary data phi evaluated at the
/// points where stencil arms leave the domain.
class DirichletProblem {
 public:
  static DirichletProblem build(const GridShape& grid, ScalarFn rho, ScalarFn phi, const ConeSpec& cone,
                                const StencilSet& stencil);
  /// Box domain equal to the whole grid.
  static DirichletProblem on_box(const GridShape& grid, ScalarFn phi, const ConeSpec& cone, const StencilSet& stencil);

  const GridShape& grid() const { return grid_; }
  const ConeSpec& cone() const { return *cone_; }
  const StencilSet& stencil() const { return stencil_; }
  const ScalarFn& phi() const { return phi_; }
  /// Flat grid indices of the unknowns.
  const std::vector<std::size_t>& unknowns() const { return unknowns_; }
  /// Unknown index for a grid node, or -1.
  std::int32_t unknown_of(std::size_t node) const { return unknown_of_[node]; }
  const std::vector<SymMatrix>& operators() const { return operators_; }
  const std::vector<LinearScheme>& schemes() const { return schemes_; }
  double max_angle_error() const { return angle_error_; }

  /// Linear scheme for an arbitrary A >= 0 on this problem's arms.
  LinearScheme scheme_for(const SymMatrix& a) const;

  /// Full-grid field: u on unknowns, phi elsewhere.
  GridField to_field(const std::vector<double>& u) const;
  double min_phi() const { return min_phi_; }
  double max_phi() const { return max_phi_; }

  /// Arm geometry per (unknown, direction, side): neighbor unknown (or -1),
  /// boundary value, physical length.
  struct Arm {
    std::int32_t target;
    double value;
    double length;
  };
  const Arm& arm(std::size_t unknown, std::size_t dir, int side) const {
    return arms_[(unknown * stencil_.size() + dir) * 2 + static_cast<std::size_t>(side)];
  }

 private:
  DirichletProblem(GridShape g, StencilSet s) : grid_(std::move(g)), stencil_(std::move(s)) {}
  GridShape grid_;
  StencilSet stencil_;
  std::shared_ptr<const ConeSpec> cone_;
  ScalarFn phi_;
  std::vector<std::size_t> unknowns_;
  std::vector<std::int32_t> unknown_of_;
  std::vector<Arm> arms_;
  std::vector<SymMatrix> operators_;
  std::vector<LinearScheme> schemes_;
  double angle_error_ = 0.0;
  double min_phi_ = 0.0, max_phi_ = 0.0;
};

enum class SweepMode { GaussSeidel, Jacobi };
enum class Initializer { Harmonic, MinPhi };

struct SolverConfig {
  double tol = 1e-8;  // on the residual max |min_A Delta_A u|
  int max_iters = 200000;
  SweepMode mode = SweepMode::GaussSeidel;
  Initializer init = Initializer::Harmonic;
  Exec exec = Exec::Parallel;  // Jacobi only
  int check_every = 20;
};

struct SolveReport {
  int iterations = 0;  // including the harmonic initializer
  double residual = 0.0;
  double wall_seconds = 0.0;
  bool converged = false;
};

struct Solution {
  GridField u;
  std::vector<double> unknowns;
  SolveReport report;
};

/// One update value min_A rho_A at unknown i given the state u (smallest index wins ties).
double perron_update(const DirichletProblem& p, std::size_t i, std::span<const double> u);

/// max over unknowns of |min_A Delta_A u|, operators normalized to unit trace.
double residual(const DirichletProblem& p, std::span<const double> u);
double residual(const GridField& u, const DirichletProblem& p);

Solution perron_solve(const DirichletProblem& p, const SolverConfig& cfg = {});

/// Linear Delta_A u = 0 with the same boundary data; A must be positive definite.
Solution reference_harmonic(const DirichletProblem& p, const SymMatrix& a, const SolverConfig& cfg = {});

struct MonotonicityReport {
  bool ok = false;
  double max_violation = 0.0;  // max of u0 - u1
  Solution u0, u1;
};

/// Requires every operator sample of p1 to lie in the polar cone of p0's cone.
MonotonicityReport cone_monotonicity_check(const DirichletProblem& p0, const DirichletProblem& p1,
                                           const SolverConfig& cfg = {}, double tol = 1e-8);

/// det(D^2 u) = c in 2-D: u = min over orthogonal stencil pairs of the root of
/// (D^2_v u)(D^2_{v perp} u) = c below both directional averages.
Solution ma_solve_2d(const GridShape& grid, ScalarFn rho, ScalarFn phi, double c, int stencil_width,
                     const SolverConfig& cfg = {});

double ma_residual(const DirichletProblem& p, double c, std::span<const double> u);

}  // namespace hcl
