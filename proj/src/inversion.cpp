#include "qpat/inversion.hpp"

#include <cmath>

namespace qpat {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Fills NaN interior nodes by repeated averaging of defined 4-neighbors.
void fill_nearest(ScalarField& f) {
  const Grid& g = *f.grid();
  for (;;) {
    std::vector<std::pair<int, double>> updates;
    bool missing = false;
    for (int k : g.interior_nodes()) {
      if (std::isfinite(f[k])) continue;
      missing = true;
      double acc = 0.0;
      int n = 0;
      for (int d = 0; d < 4; ++d) {
        const int nb = g.neighbor(k, Dir(d));
        if (nb >= 0 && g.is_interior(nb) && std::isfinite(f[nb])) {
          acc += f[nb];
          ++n;
        }
      }
      if (n > 0) updates.emplace_back(k, acc / n);
    }
    if (!missing) return;
    require(!updates.empty(), ErrorKind::precondition, "field has no values to extend");
    for (const auto& [k, v] : updates) f[k] = v;
  }
}

}  // namespace

ScalarField recover_q(const ScalarField& mu, const InternalDataSet& data, const Mask& region,
                      double floor) {
  require(!data.d.empty() && data.d.size() == data.illum.g.size(), ErrorKind::precondition,
          "data and illuminations must be index-aligned");
  const GridPtr& grid = mu.grid();
  const Grid& g = *grid;
  for (int k : g.interior_nodes())
    if (region[k])
      require(std::isfinite(mu[k]) && mu[k] > 0.0, ErrorKind::nonpositive_coefficient,
              "mu must be positive on the region");

  ScalarField num = ScalarField::constant(grid, 0.0);
  ScalarField den = ScalarField::constant(grid, 0.0);
  for (size_t j = 0; j < data.d.size(); ++j) {
    data.d[j].check_same(to_complex(mu));
    ComplexField u(grid);
    for (int k : g.interior_nodes())
      if (std::isfinite(mu[k]) && mu[k] > 0.0) u[k] = data.d[j][k] / mu[k];
    u.boundary() = data.illum.g[j];
    const ComplexField lap = laplacian(u, region);
    for (int k : g.interior_nodes()) {
      if (!region[k]) continue;
      num[k] += (std::conj(u[k]) * lap[k]).real();
      den[k] += std::norm(u[k]);
    }
  }
  const double dmax = max_abs(den, region);
  ScalarField q(grid);
  for (int k : g.interior_nodes()) {
    if (!region[k]) continue;
    require(den[k] > floor * dmax && den[k] > 0.0, ErrorKind::unresolvable_node,
            "all solutions nearly vanish at a node");
    q[k] = -num[k] / den[k];
  }
  return q;
}

std::string_view to_string(SqrtDMode m) { return m == SqrtDMode::strict ? "strict" : "exact"; }

SqrtDMode parse_sqrtD_mode(std::string_view s) {
  if (s == "strict") return SqrtDMode::strict;
  if (s == "exact") return SqrtDMode::exact;
  throw Error(ErrorKind::config, "mode must be 'strict' or 'exact'");
}

ScalarField recover_sqrtD(const ScalarField& q, const ScalarField& mu, const SqrtDClosure& closure,
                          SqrtDMode mode, const Mask& region, const LinearSolveOptions& opts) {
  q.check_same(mu);
  const GridPtr& grid = q.grid();
  const Grid& g = *grid;
  require(closure.boundary.size() == g.boundary_size() && closure.boundary.allFinite(),
          ErrorKind::config, "sqrt(D) boundary values are required at every boundary point");
  for (int k : g.interior_nodes())
    if (region[k])
      require(std::isfinite(q[k]) && std::isfinite(mu[k]), ErrorKind::precondition,
              "q and mu must be defined on the region");

  ScalarField w;
  if (mode == SqrtDMode::strict) {
    ScalarField known(grid);
    known.boundary() = closure.boundary;
    for (int k : g.interior_nodes()) {
      if (!region[k]) continue;
      for (int d = 0; d < 4; ++d) {
        if (g.arms(k)[d].cut()) continue;
        const int nb = g.neighbor(k, Dir(d));
        if (region[nb]) continue;
        const double v = closure.cut ? (*closure.cut)[nb] : kNaN;
        require(std::isfinite(v), ErrorKind::config,
                "strict mode needs sqrt(D) on the interior cut of the region");
        known[nb] = v;
      }
    }
    const ScalarField rhs = mu * -1.0;
    w = solve_inhomogeneous(q, rhs, known, opts, &region);
  } else {
    ScalarField qe(grid), me(grid);
    for (int k : g.interior_nodes()) {
      if (region[k]) {
        qe[k] = q[k];
        me[k] = mu[k];
      } else {
        if (closure.q_ext) qe[k] = (*closure.q_ext)[k];
        if (closure.mu_ext) me[k] = (*closure.mu_ext)[k];
      }
    }
    fill_nearest(qe);
    fill_nearest(me);
    ScalarField known(grid);
    known.boundary() = closure.boundary;
    const ScalarField rhs = me * -1.0;
    w = solve_inhomogeneous(qe, rhs, known, opts);
  }
  for (int k : g.interior_nodes())
    if (region[k])
      require(w[k] > 0.0, ErrorKind::positivity, "recovered sqrt(D) is not positive");
  return w;
}

GroundTruth ground_truth(const CoefficientModel& model, const GridPtr& grid) {
  auto sample = [&](auto fn) { return ScalarField::sample(grid, fn); };
  return {sample([&](const Point& x) { return model.mu(x); }),
          sample([&](const Point& x) { return model.q(x); }),
          sample([&](const Point& x) { return model.sqrt_D(x); }),
          sample([&](const Point& x) { return model.sigma_a.value(x); })};
}

ErrorNorms error_norms(const ScalarField& value, const ScalarField& truth, const Mask& region) {
  const Grid& g = *value.grid();
  ErrorNorms e;
  double scale = 0.0;
  double grad = 0.0;
  for (int k : g.interior_nodes()) {
    if (!region[k]) continue;
    const double ek = value[k] - truth[k];
    e.abs_sup = std::max(e.abs_sup, std::fabs(ek));
    scale = std::max(scale, std::fabs(truth[k]));
    for (Dir d : {east, north}) {
      if (g.arms(k)[d].cut()) continue;
      const int nb = g.neighbor(k, d);
      if (!region[nb]) continue;
      grad = std::max(grad, std::fabs(value[nb] - truth[nb] - ek) / g.spacing(d));
    }
  }
  if (!std::isfinite(e.abs_sup)) e.abs_sup = std::numeric_limits<double>::infinity();
  e.sup = scale > 0.0 ? e.abs_sup / scale : e.abs_sup;
  e.c1 = std::max(e.sup, scale > 0.0 ? grad / scale : grad);
  return e;
}

ReconstructionReport assemble_report(const ScalarField& mu, const ScalarField& q,
                                     const ScalarField& sqrtD, const Mask& region,
                                     const InternalDataSet& data, const GroundTruth* truth) {
  const GridPtr& grid = mu.grid();
  const Grid& g = *grid;
  ReconstructionReport r;
  r.region = region;
  r.mu = restrict_to(mu, region);
  r.q = restrict_to(q, region);
  r.sqrtD = restrict_to(sqrtD, region);
  r.sigma_a = ScalarField(grid);
  r.min_mu = r.min_sqrtD = r.min_sigma_a = std::numeric_limits<double>::infinity();
  for (int k : g.interior_nodes()) {
    if (!region[k]) continue;
    r.sigma_a[k] = mu[k] * sqrtD[k];
    r.min_mu = std::min(r.min_mu, mu[k]);
    r.min_sqrtD = std::min(r.min_sqrtD, sqrtD[k]);
    r.min_sigma_a = std::min(r.min_sigma_a, r.sigma_a[k]);
  }

  const ScalarField lw = apply_laplacian(sqrtD, &region);
  double lr = 0.0;
  for (int k : g.interior_nodes())
    if (region[k]) lr = std::max(lr, std::fabs(lw[k] + q[k] * sqrtD[k] + mu[k]));
  r.liouville_residual = lr / std::max(max_abs(mu, region), 1e-300);

  double sr = 0.0;
  for (size_t j = 0; j < data.d.size() && j < data.illum.g.size(); ++j) {
    ComplexField u(grid);
    for (int k : g.interior_nodes())
      if (std::isfinite(mu[k]) && mu[k] > 0.0) u[k] = data.d[j][k] / mu[k];
    u.boundary() = data.illum.g[j];
    const ComplexField lap = laplacian(u, region);
    double num = 0.0, den = 0.0;
    for (int k : g.interior_nodes()) {
      if (!region[k]) continue;
      num = std::max(num, std::abs(lap[k] + q[k] * u[k]));
      den = std::max(den, std::abs(lap[k]));
    }
    sr = std::max(sr, den > 0.0 ? num / den : num);
  }
  r.schroedinger_residual = sr;

  if (truth) {
    r.mu_error = error_norms(mu, truth->mu, region);
    r.q_error = error_norms(q, truth->q, region);
    r.sqrtD_error = error_norms(sqrtD, truth->sqrtD, region);
    r.sigma_a_error = error_norms(r.sigma_a, truth->sigma_a, region);
  }
  return r;
}

}  // namespace qpat
