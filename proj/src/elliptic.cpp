#include "qpat/elliptic.hpp"

#include <cmath>

#include <Eigen/SparseLU>
#include <unsupported/Eigen/IterativeSolvers>

namespace qpat {
namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

double face_value(double a, double b) { return 2.0 * a * b / (a + b); }

// Value of f at the far end of the arm of node k in direction d.
template <typename T>
bool arm_end(const Field<T>& f, int k, Dir d, T& value, double& length) {
  const Grid& g = *f.grid();
  const Arm& arm = g.arms(k)[d];
  length = arm.theta * g.spacing(d);
  value = arm.cut() ? (f.boundary().size() ? f.boundary()[arm.bpoint] : nan_value<T>())
                    : f[g.neighbor(k, d)];
  return is_finite(value);
}

// Node value two steps along `d` through full arms, or false.
template <typename T>
bool node_along(const Field<T>& f, int k, Dir d, int steps, T& value) {
  const Grid& g = *f.grid();
  int cur = k;
  for (int s = 0; s < steps; ++s) {
    if (!g.is_interior(cur) || g.arms(cur)[d].cut()) return false;
    cur = g.neighbor(cur, d);
  }
  if (!g.is_interior(cur)) return false;
  value = f[cur];
  return is_finite(value);
}

// Samples along `d` from node k: offsets (signed by `sign`) and values of up
// to `max_steps` full-arm nodes, ending at a cut boundary point.
template <typename T>
void line_samples(const Field<T>& f, int k, Dir d, double sign, int max_steps, bool use_boundary,
                  std::vector<double>& off, std::vector<T>& val) {
  const Grid& g = *f.grid();
  const double h = g.spacing(d);
  int cur = k;
  for (int s = 0; s < max_steps; ++s) {
    const Arm& arm = g.arms(cur)[d];
    if (arm.cut()) {
      const T v = f.boundary().size() ? f.boundary()[arm.bpoint] : nan_value<T>();
      if (use_boundary && is_finite(v)) {
        off.push_back(sign * (s + arm.theta) * h);
        val.push_back(v);
      }
      return;
    }
    cur = g.neighbor(cur, d);
    if (!g.is_interior(cur) || !is_finite(f[cur])) return;
    off.push_back(sign * (s + 1) * h);
    val.push_back(f[cur]);
  }
}

// Finite-difference weights at 0 for derivative orders 0..m on the points x.
Eigen::MatrixXd fd_weights(const std::vector<double>& x, int m) {
  const int n = int(x.size());
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, m + 1);
  double c1 = 1.0;
  double c4 = x[0];
  c(0, 0) = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i];
    for (int j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int l = mn; l >= 1; --l) c(i, l) = c1 * (l * c(i - 1, l - 1) - c5 * c(i - 1, l)) / c2;
        c(i, 0) = -c1 * c5 * c(i - 1, 0) / c2;
      }
      for (int l = mn; l >= 1; --l) c(j, l) = (c4 * c(j, l) - l * c(j, l - 1)) / c3;
      c(j, 0) = c4 * c(j, 0) / c3;
    }
    c1 = c2;
  }
  return c;
}

// Derivative of order `order` along the axis of `plus` at node k: the
// standard fourth-order formula with two full arms on each side, otherwise
// weights fitted to the five nearest samples (boundary points included).
template <typename T>
T axis_derivative(const Field<T>& f, int k, Dir plus, int order) {
  const Grid& g = *f.grid();
  const double h = g.spacing(plus);
  T p1, p2, m1, m2;
  const Dir minus = opposite(plus);
  const T fk = f[k];
  if (node_along(f, k, plus, 1, p1) && node_along(f, k, plus, 2, p2) &&
      node_along(f, k, minus, 1, m1) && node_along(f, k, minus, 2, m2)) {
    return order == 1 ? (-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * h)
                      : (-p2 + 16.0 * p1 - 30.0 * fk + 16.0 * m1 - m2) / (12.0 * h * h);
  }
  std::vector<double> offp, offm;
  std::vector<T> valp, valm;
  line_samples(f, k, plus, 1.0, 4, false, offp, valp);
  line_samples(f, k, minus, -1.0, 4, false, offm, valm);
  if (offp.size() + offm.size() < 4) {
    offp.clear(), offm.clear(), valp.clear(), valm.clear();
    line_samples(f, k, plus, 1.0, 4, true, offp, valp);
    line_samples(f, k, minus, -1.0, 4, true, offm, valm);
  }
  require(offp.size() + offm.size() >= 1 + size_t(order), ErrorKind::stencil,
          "node has insufficient neighbors for the derivative stencil");
  // Nearest samples first, keeping at least one per side.
  std::vector<double> x{0.0};
  std::vector<T> v{fk};
  size_t ip = 0, im = 0;
  while (x.size() < 5 && (ip < offp.size() || im < offm.size())) {
    const bool take_plus =
        im >= offm.size() || (ip < offp.size() && std::fabs(offp[ip]) <= std::fabs(offm[im]));
    if (take_plus) {
      x.push_back(offp[ip]);
      v.push_back(valp[ip++]);
    } else {
      x.push_back(offm[im]);
      v.push_back(valm[im++]);
    }
  }
  const Eigen::MatrixXd w = fd_weights(x, order);
  T acc = T(0);
  for (size_t i = 0; i < x.size(); ++i) acc += w(Eigen::Index(i), order) * v[i];
  return acc;
}

}  // namespace

DirichletProblem DirichletProblem::diffusion(ScalarField D, ScalarField sigma_a,
                                             Eigen::VectorXcd boundary_values) {
  DirichletProblem p;
  p.kind = Kind::diffusion;
  p.D = std::move(D);
  p.sigma_a = std::move(sigma_a);
  p.boundary_values = std::move(boundary_values);
  return p;
}

DirichletProblem DirichletProblem::schroedinger(ScalarField q, Eigen::VectorXcd boundary_values) {
  DirichletProblem p;
  p.kind = Kind::schroedinger;
  p.q = std::move(q);
  p.boundary_values = std::move(boundary_values);
  return p;
}

EllipticOperator assemble_operator(const GridPtr& grid, const Mask& mask, const ScalarField* D,
                                   const ScalarField& c) {
  const Grid& g = *grid;
  EllipticOperator op;
  op.grid = grid;
  op.mask = mask;
  op.unknown_of_node.assign(g.size(), -1);
  for (int k : g.interior_nodes()) {
    if (!mask[k]) continue;
    op.unknown_of_node[k] = int(op.node_of_unknown.size());
    op.node_of_unknown.push_back(k);
  }
  const int n = int(op.node_of_unknown.size());
  require(n > 0, ErrorKind::empty_region, "elliptic operator has no unknowns");

  std::vector<Triplet> a_trip;
  std::vector<Triplet> b_trip;
  a_trip.reserve(5 * size_t(n));
  for (int row = 0; row < n; ++row) {
    const int k = op.node_of_unknown[row];
    require(std::isfinite(c[k]), ErrorKind::precondition, "zeroth-order coefficient not finite");
    const double dk = D ? (*D)[k] : 1.0;
    double diag = c[k];
    for (int axis = 0; axis < 2; ++axis) {
      const Dir plus = axis == 0 ? east : north;
      const Dir minus = opposite(plus);
      const double h = g.spacing(plus);
      const double hp = g.arms(k)[plus].theta * h;
      const double hm = g.arms(k)[minus].theta * h;
      for (Dir d : {plus, minus}) {
        const Arm& arm = g.arms(k)[d];
        const int nb = g.neighbor(k, d);
        double face = 1.0;
        if (D) {
          double end = arm.cut() ? (D->boundary().size() ? D->boundary()[arm.bpoint] : dk)
                                 : (*D)[nb];
          if (!std::isfinite(end) || end <= 0.0) end = dk;
          face = face_value(dk, end);
        }
        const double arm_len = d == plus ? hp : hm;
        const double coef = 2.0 * face / (arm_len * (hp + hm));
        diag += coef;
        if (arm.cut()) {
          b_trip.emplace_back(row, g.size() + arm.bpoint, coef);
        } else if (mask[nb]) {
          a_trip.emplace_back(row, op.unknown_of_node[nb], -coef);
        } else {
          b_trip.emplace_back(row, nb, coef);
        }
      }
    }
    a_trip.emplace_back(row, row, diag);
  }
  op.A.resize(n, n);
  op.A.setFromTriplets(a_trip.begin(), a_trip.end());
  op.A.makeCompressed();
  op.B.resize(n, g.size() + g.boundary_size());
  op.B.setFromTriplets(b_trip.begin(), b_trip.end());
  return op;
}

struct EllipticSolver::Impl {
  Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
  Eigen::GMRES<SpMat, Eigen::DiagonalPreconditioner<double>> gmres;

  Eigen::VectorXd solve(SolveMethod method, const Eigen::VectorXd& b) {
    if (method == SolveMethod::sparse_direct) return lu.solve(b);
    Eigen::VectorXd x = gmres.solve(b);
    require(gmres.info() == Eigen::Success, ErrorKind::solver,
            "iterative solve did not reach the tolerance");
    return x;
  }
};

EllipticSolver::EllipticSolver(EllipticOperator op, const LinearSolveOptions& opts)
    : op_(std::move(op)), opts_(opts), impl_(std::make_unique<Impl>()) {
  require(opts_.tol > 0.0 && opts_.tol <= 1e-4, ErrorKind::config,
          "solver tolerance must lie in (0, 1e-4]");
  const int n = int(op_.A.rows());
  if (opts_.method == SolveMethod::sparse_direct) {
    impl_->lu.compute(op_.A);
    require(impl_->lu.info() == Eigen::Success, ErrorKind::zero_eigenvalue,
            "discrete operator is singular");
    // Inverse iteration estimates the norm of A^{-1}.
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = 1.0 + 0.1 * std::sin(double(i));
    v.normalize();
    double est = 0.0;
    for (int it = 0; it < 30; ++it) {
      Eigen::VectorXd w = impl_->lu.solve(v);
      const double nw = w.norm();
      require(std::isfinite(nw), ErrorKind::zero_eigenvalue, "discrete operator is singular");
      const bool done = std::fabs(nw - est) <= 1e-3 * nw;
      est = nw;
      v = w / nw;
      if (done) break;
    }
    Eigen::VectorXd row_sums = Eigen::VectorXd::Zero(n);
    for (int col = 0; col < n; ++col)
      for (SpMat::InnerIterator it(op_.A, col); it; ++it) row_sums[it.row()] += std::fabs(it.value());
    cond_ = row_sums.maxCoeff() * est;
    require(cond_ <= opts_.cond_limit, ErrorKind::zero_eigenvalue,
            "condition estimate " + std::to_string(cond_) +
                " exceeds the limit: zero lies (numerically) in the spectrum");
  } else {
    impl_->gmres.setTolerance(opts_.tol);
    impl_->gmres.setMaxIterations(opts_.max_iter > 0 ? opts_.max_iter : n);
    impl_->gmres.set_restart(60);
    impl_->gmres.compute(op_.A);
    cond_ = std::numeric_limits<double>::quiet_NaN();
  }
}

EllipticSolver::~EllipticSolver() = default;
EllipticSolver::EllipticSolver(EllipticSolver&&) noexcept = default;

template <typename T>
Field<T> EllipticSolver::solve(const Field<T>& known, const Field<T>* f) const {
  const Grid& g = *op_.grid;
  const int n = int(op_.A.rows());
  Eigen::Matrix<T, Eigen::Dynamic, 1> k(g.size() + g.boundary_size());
  k.head(g.size()) = known.nodes();
  if (g.boundary_size() > 0) {
    require(known.boundary().size() == g.boundary_size(), ErrorKind::precondition,
            "boundary value count mismatch");
    k.tail(g.boundary_size()) = known.boundary();
  }
  // Only referenced known values enter the product; NaN elsewhere is harmless.
  Eigen::Matrix<T, Eigen::Dynamic, 1> b = Eigen::Matrix<T, Eigen::Dynamic, 1>::Zero(n);
  for (int col = 0; col < op_.B.outerSize(); ++col)
    for (SpMat::InnerIterator it(op_.B, col); it; ++it) b[it.row()] += it.value() * k[col];
  if (f)
    for (int r = 0; r < n; ++r) b[r] += (*f)[op_.node_of_unknown[r]];
  require(b.unaryExpr([](T v) { return is_finite(v); }).all(), ErrorKind::stencil,
          "missing Dirichlet or source data next to the solve region");

  Eigen::Matrix<T, Eigen::Dynamic, 1> x(n);
  if constexpr (std::is_same_v<T, complexd>) {
    const Eigen::VectorXd xr = impl_->solve(opts_.method, b.real());
    const Eigen::VectorXd xi = impl_->solve(opts_.method, b.imag());
    x.real() = xr;
    x.imag() = xi;
  } else {
    x = impl_->solve(opts_.method, b);
  }
  const double bn = b.norm();
  const double rn = (op_.A.template cast<T>() * x - b).norm();
  require(std::isfinite(rn) && rn <= std::max(opts_.tol * bn, 1e-300), ErrorKind::solver,
          "linear solve residual above tolerance");

  Field<T> out = known;
  for (int r = 0; r < n; ++r) out[op_.node_of_unknown[r]] = x[r];
  return out;
}

template ScalarField EllipticSolver::solve(const ScalarField&, const ScalarField*) const;
template ComplexField EllipticSolver::solve(const ComplexField&, const ComplexField*) const;

ComplexField solve_dirichlet(const DirichletProblem& prob, const LinearSolveOptions& opts) {
  const GridPtr& grid = prob.grid();
  require(bool(grid), ErrorKind::precondition, "problem has no grid");
  require(prob.boundary_values.size() == grid->boundary_size(), ErrorKind::precondition,
          "boundary value count mismatch");
  require(prob.boundary_values.unaryExpr([](complexd v) { return is_finite(v); }).all(),
          ErrorKind::precondition, "boundary values must be finite");
  const Mask& mask = grid->interior();
  ComplexField known(grid);
  known.boundary() = prob.boundary_values;
  if (prob.kind == DirichletProblem::Kind::diffusion) {
    prob.D.check_same(prob.sigma_a);
    for (int k : grid->interior_nodes()) {
      require(std::isfinite(prob.D[k]) && prob.D[k] > 0.0, ErrorKind::nonpositive_coefficient,
              "diffusion coefficient must be positive");
      require(std::isfinite(prob.sigma_a[k]) && prob.sigma_a[k] >= 0.0,
              ErrorKind::nonpositive_coefficient, "absorption must be non-negative");
    }
    EllipticSolver solver(assemble_operator(grid, mask, &prob.D, prob.sigma_a), opts);
    return solver.solve(known);
  }
  const ScalarField c = prob.q * -1.0;
  EllipticSolver solver(assemble_operator(grid, mask, nullptr, c), opts);
  return solver.solve(known);
}

ScalarField solve_inhomogeneous(const ScalarField& q, const ScalarField& rhs,
                                const ScalarField& dirichlet, const LinearSolveOptions& opts,
                                const Mask* mask) {
  q.check_same(rhs);
  q.check_same(dirichlet);
  const GridPtr& grid = q.grid();
  const Mask& m = mask ? *mask : grid->interior();
  EllipticSolver solver(assemble_operator(grid, m, nullptr, q * -1.0), opts);
  const ScalarField f = rhs * -1.0;
  return solver.solve(dirichlet, &f);
}

template <typename T>
Field<T> apply_laplacian(const Field<T>& f, const Mask* mask) {
  const Grid& g = *f.grid();
  Field<T> out(f.grid());
  for (int k : g.interior_nodes()) {
    if (mask && !(*mask)[k]) continue;
    const T fk = f[k];
    require(is_finite(fk), ErrorKind::stencil, "field undefined at a stencil center");
    T acc = T(0);
    for (Dir plus : {east, north}) {
      T vp, vm;
      double hp, hm;
      require(arm_end(f, k, plus, vp, hp) && arm_end(f, k, opposite(plus), vm, hm),
              ErrorKind::stencil, "node has insufficient neighbors for the 5-point stencil");
      acc += 2.0 * ((vp - fk) / hp - (fk - vm) / hm) / (hp + hm);
    }
    out[k] = acc;
  }
  return out;
}

template <typename T>
VectorField<T> gradient(const Field<T>& f, const Mask& mask) {
  const Grid& g = *f.grid();
  VectorField<T> out{Field<T>(f.grid()), Field<T>(f.grid())};
  for (int k : g.interior_nodes()) {
    if (!mask[k]) continue;
    require(is_finite(f[k]), ErrorKind::stencil, "field undefined at a stencil center");
    out.x[k] = axis_derivative(f, k, east, 1);
    out.y[k] = axis_derivative(f, k, north, 1);
  }
  return out;
}

template <typename T>
Field<T> laplacian(const Field<T>& f, const Mask& mask) {
  const Grid& g = *f.grid();
  Field<T> out(f.grid());
  for (int k : g.interior_nodes()) {
    if (!mask[k]) continue;
    require(is_finite(f[k]), ErrorKind::stencil, "field undefined at a stencil center");
    out[k] = axis_derivative(f, k, east, 2) + axis_derivative(f, k, north, 2);
  }
  return out;
}

template ScalarField apply_laplacian(const ScalarField&, const Mask*);
template ComplexField apply_laplacian(const ComplexField&, const Mask*);
template VectorField<double> gradient(const ScalarField&, const Mask&);
template VectorField<complexd> gradient(const ComplexField&, const Mask&);
template ScalarField laplacian(const ScalarField&, const Mask&);
template ComplexField laplacian(const ComplexField&, const Mask&);

}  // namespace qpat
