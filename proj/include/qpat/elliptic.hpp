#pragma once

#include <memory>

#include <Eigen/Sparse>

#include "qpat/grid.hpp"

namespace qpat {

enum class SolveMethod { sparse_direct, conjugate_residual };

struct LinearSolveOptions {
  SolveMethod method = SolveMethod::sparse_direct;
  double tol = 1e-10;
  int max_iter = 0;  // 0 selects the node count
  // Refuse when the condition estimate exceeds this bound.
  double cond_limit = 1e12;
};

/// Dirichlet problem for -div(D grad u) + sigma_a u = 0 (diffusion) or
/// (Laplacian + q) u = 0 (Schroedinger) with one value per boundary point.
struct DirichletProblem {
  enum class Kind { diffusion, schroedinger };

  Kind kind = Kind::schroedinger;
  ScalarField D;
  ScalarField sigma_a;
  ScalarField q;
  Eigen::VectorXcd boundary_values;

  static DirichletProblem diffusion(ScalarField D, ScalarField sigma_a,
                                    Eigen::VectorXcd boundary_values);
  static DirichletProblem schroedinger(ScalarField q, Eigen::VectorXcd boundary_values);
  const GridPtr& grid() const { return kind == Kind::diffusion ? D.grid() : q.grid(); }
};

/// Shortley-Weller discretization of -div(D grad u) + c u on the nodes of
/// `mask`. Arms ending on interior nodes outside the mask or on boundary
/// points couple to known values, giving A u = f + B k where k stacks node
/// values followed by boundary values.
struct EllipticOperator {
  GridPtr grid;
  Mask mask;
  std::vector<int> unknown_of_node;
  std::vector<int> node_of_unknown;
  Eigen::SparseMatrix<double> A;
  Eigen::SparseMatrix<double> B;
};

/// `D` may be empty for the unit coefficient.
EllipticOperator assemble_operator(const GridPtr& grid, const Mask& mask, const ScalarField* D,
                                   const ScalarField& c);

/// Factorized operator with the zero-eigenvalue guard applied once.
class EllipticSolver {
 public:
  EllipticSolver(EllipticOperator op, const LinearSolveOptions& opts = {});
  ~EllipticSolver();
  EllipticSolver(EllipticSolver&&) noexcept;

  const EllipticOperator& op() const { return op_; }
  double condition_estimate() const { return cond_; }

  /// Solves with known values from `known` (node values outside the mask and
  /// boundary values) and source `f` on masked nodes. The result carries the
  /// known values outside the mask.
  template <typename T>
  Field<T> solve(const Field<T>& known, const Field<T>* f = nullptr) const;

 private:
  struct Impl;
  EllipticOperator op_;
  LinearSolveOptions opts_;
  std::unique_ptr<Impl> impl_;
  double cond_ = 0.0;
};

ComplexField solve_dirichlet(const DirichletProblem& prob, const LinearSolveOptions& opts = {});

/// Solves (Laplacian + q) w = rhs on `mask` (all interior nodes when null).
/// `dirichlet` supplies boundary values and node values outside the mask.
ScalarField solve_inhomogeneous(const ScalarField& q, const ScalarField& rhs,
                                const ScalarField& dirichlet,
                                const LinearSolveOptions& opts = {}, const Mask* mask = nullptr);

/// 5-point Shortley-Weller Laplacian on `mask` (all interior nodes when
/// null). Cut arms read the field's boundary values.
template <typename T>
Field<T> apply_laplacian(const Field<T>& f, const Mask* mask = nullptr);

/// Gradient and Laplacian for measured data: fourth-order central
/// differences where two full arms exist on each side, otherwise weights
/// fitted to the five nearest finite samples on the axis (boundary values at
/// cut arms included). Needs at least one sample on each side.
template <typename T>
VectorField<T> gradient(const Field<T>& f, const Mask& mask);
template <typename T>
Field<T> laplacian(const Field<T>& f, const Mask& mask);

}  // namespace qpat
