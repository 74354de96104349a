#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qpat/boundary.hpp"
#include "qpat/cgo.hpp"
#include "qpat/forward.hpp"
#include "qpat/grid.hpp"

namespace qpat {

enum class Branch { real_part, imag_part };

/// Weight chi and normalization kappa of the vector field. Defaults come
/// from the CGO pair; both can be overridden for experiments.
struct TransportSettings {
  std::function<complexd(const Point&)> chi;
  double kappa = 1.0;
  std::string chi_description;
  // Select the branch automatically (largest minimal inward component).
  bool auto_branch = true;
  Branch branch = Branch::real_part;
  // Branch field is degenerate where |b| <= degenerate_tol * term scale.
  double degenerate_tol = 1e-8;

  static TransportSettings from_pair(const CGOPair& pair);
};

/// Normalized field beta = kappa chi (d1 grad d2 - d2 grad d1) and
/// gamma = -kappa chi (d1 lap d2 - d2 lap d1) / 2 on the work mask (trusted
/// region plus two rings). The selected real branch (b, g) drives the flow
/// dtheta/dt = b(theta) along which d mu/dt = -g mu.
///
/// The lattice copies bx, by, g keep the nodes with centered fourth-order
/// stencils and are extended outward by polynomial extrapolation; traces
/// read them by bicubic interpolation.
struct TransportField {
  GridPtr grid;
  Point x0;
  Mask region;
  Mask work;
  VectorField<complexd> beta;
  ComplexField gamma;
  std::string chi_used;
  Branch branch = Branch::real_part;
  double min_branch_modulus = 0.0;  // in lattice units
  double min_inward = 0.0;
  // Sup over the region of the angle between b and (x0 - x), radians.
  double flatness = 0.0;
  // Sup of |Re beta - mu^2 (x0 - x)/|x0 - x|^2| over sup |mu^2/|x0 - x||,
  // filled only when the true mu is supplied.
  double flatness_truth = std::numeric_limits<double>::quiet_NaN();

  // Branch components on the lattice, ghost-extended past the boundary.
  // Fields built from data are divided by the sup of |b| on the region.
  Eigen::VectorXd bx, by, g;
  // Optional analytic branch field, used instead of interpolation.
  std::function<void(const Point&, Vec2&, double&)> analytic;

  /// Branch field at a point; false when no data is available there.
  bool eval(const Point& x, Vec2& b, double& gamma_branch) const;
  /// True when the lattice node nearest to `x` belongs to the work mask.
  bool accepts(const Point& x) const;
};

/// Builds the field from the first two data sets. `mu_truth`, when given,
/// fills `flatness_truth`.
TransportField build_transport_field(const InternalDataSet& data, const TransportSettings& settings,
                                     const TrustedRegion& trusted,
                                     const ScalarField* mu_truth = nullptr);
inline TransportField build_transport_field(const InternalDataSet& data, const CGOPair& pair,
                                            const TrustedRegion& trusted,
                                            const ScalarField* mu_truth = nullptr) {
  return build_transport_field(data, TransportSettings::from_pair(pair), trusted, mu_truth);
}

/// Field given by analytic functions, defined on every interior node. The
/// work mask and region are `region`.
TransportField synthetic_transport_field(const GridPtr& grid, const Mask& region, const Point& x0,
                                         std::function<Vec2(const Point&)> beta,
                                         std::function<double(const Point&)> gamma,
                                         bool analytic = true);

/// Fills NaN lattice values by `rings` passes; each pass averages the
/// highest-order (up to cubic) extrapolations along defined axis runs.
void extend_ghost(const Grid& grid, Eigen::VectorXd& values, int rings);

enum class TraceStatus { exited_front, exited_elsewhere, max_time };
std::string_view to_string(TraceStatus s);

struct TraceOptions {
  double tol = 1e-9;          // local error per step, position and integral
  double max_step_cells = 1;  // spatial step cap in grid spacings
  double exit_tol = 1e-10;    // exit point bisection tolerance
  double safety = 4.0;        // max_time = safety * diameter / min |b|
  bool keep_path = false;
  bool require_exit = true;   // raise a non-exiting-trace error on max_time
};

struct FlowTrace {
  Point start;
  Point x_plus;
  double t_plus = 0.0;
  double exit_arc = 0.0;
  double gamma_integral = 0.0;
  std::vector<Point> path;
  TraceStatus status = TraceStatus::max_time;
  int steps = 0;
};

/// Integrates dtheta/dt = b(theta) together with int g dt by adaptive RK4
/// (step doubling) until the curve leaves the domain.
FlowTrace trace_characteristic(const TransportField& field, const Point& start,
                               const BoundarySegmentation& seg, const TraceOptions& opts = {});

/// Largest flow time allowed for a trace.
double max_flow_time(const TransportField& field, const TraceOptions& opts);

struct MuResult {
  ScalarField mu;
  // mu0 at grid boundary points (NaN where no illumination is usable).
  Eigen::VectorXd mu0_boundary;
  double coverage = 0.0;
  std::vector<int> uncovered;
  ScalarField exit_time;
  ScalarField exit_arc;
  ScalarField gamma_integral;
  // Relative transport residual of the unused branch on the region.
  double other_branch_residual = std::numeric_limits<double>::quiet_NaN();
  // Gradient-system diagnostics.
  double max_curl = std::numeric_limits<double>::quiet_NaN();
  bool curl_flag = false;
  int anchors = 0;
};

/// Coverage failure carrying the uncovered nodes.
class CoverageError : public Error {
 public:
  CoverageError(std::vector<int> nodes, const std::string& what)
      : Error(ErrorKind::partial_coverage, what), nodes_(std::move(nodes)) {}
  const std::vector<int>& nodes() const { return nodes_; }

 private:
  std::vector<int> nodes_;
};

/// mu0 = Re sum conj(g_j) d_j / sum |g_j|^2 at boundary points where some
/// |g_j| exceeds `threshold` times its maximum; NaN elsewhere.
Eigen::VectorXd boundary_mu0(const InternalDataSet& data, double threshold = 1e-3);

/// mu0 at an arbitrary boundary arc position by linear interpolation
/// between boundary points; NaN when a neighbor has no usable value.
double interpolate_boundary(const Grid& grid, const Eigen::VectorXd& values, double arc);

/// mu(x) = mu0(x+) exp(int_0^{t+} g) for every work-mask node.
MuResult reconstruct_mu(const TransportField& field, const InternalDataSet& data,
                        const BoundarySegmentation& seg, const TraceOptions& opts = {});

/// Lambda = B^{-1} (g^1, g^2) with rows b^j of the per-pole branch fields,
/// on the intersection of the per-pole work masks.
struct GradientSystem {
  GridPtr grid;
  Mask trusted;  // intersection of the trusted regions; det checks apply here
  Mask region;   // intersection of the work masks
  VectorField<double> lambda;
  double min_det = 0.0;
  double min_normalized_det = 0.0;
};

GradientSystem build_gradient_system(const std::vector<TransportField>& fields,
                                     double det_tol = 1e-3);

/// Least-squares log mu from grad log mu = -Lambda over region edges, with
/// anchor edges to boundary points carrying mu0. Curl above `curl_tol` sets
/// the diagnostic flag.
MuResult reconstruct_mu_gradient(const GradientSystem& system, const Eigen::VectorXd& mu0_boundary,
                                 double curl_tol = 1e-2);

}  // namespace qpat
