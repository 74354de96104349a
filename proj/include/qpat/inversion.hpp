#pragma once

#include <optional>

#include "qpat/elliptic.hpp"
#include "qpat/forward.hpp"
#include "qpat/transport.hpp"

namespace qpat {

/// q = -sum_j Re(conj(u_j) lap u_j) / sum_j |u_j|^2 on `region`, with
/// u_j = d_j / mu on the nodes where mu is defined and u_j = g_j on the
/// boundary. Nodes where sum_j |u_j|^2 falls below `floor` times its
/// maximum raise an unresolvable-node error.
ScalarField recover_q(const ScalarField& mu, const InternalDataSet& data, const Mask& region,
                      double floor = 1e-10);

enum class SqrtDMode { strict, exact };
std::string_view to_string(SqrtDMode m);
SqrtDMode parse_sqrtD_mode(std::string_view s);

/// Data closing the sqrt(D) solve. `boundary` holds sqrt(D) at every grid
/// boundary point. `cut` holds node values (NaN where unknown) used for the
/// nodes just outside the region in strict mode and, in exact mode,
/// `q_ext` and `mu_ext` extend q and mu outside the region (nearest values
/// inside the region are used where they are NaN).
struct SqrtDClosure {
  Eigen::VectorXd boundary;
  std::optional<ScalarField> cut;
  std::optional<ScalarField> q_ext;
  std::optional<ScalarField> mu_ext;
};

/// Solves (Laplacian + q) w = -mu. Strict mode solves on `region` and needs
/// `cut` values on every outside neighbor (config error otherwise); exact
/// mode solves on all interior nodes after extending q and mu. Raises a
/// positivity error when w <= 0 on `region`.
ScalarField recover_sqrtD(const ScalarField& q, const ScalarField& mu, const SqrtDClosure& closure,
                          SqrtDMode mode, const Mask& region, const LinearSolveOptions& opts = {});

struct GroundTruth {
  ScalarField mu, q, sqrtD, sigma_a;
};

/// Analytic truth sampled at the nodes and boundary points of `grid`.
GroundTruth ground_truth(const CoefficientModel& model, const GridPtr& grid);

/// Relative error norms of one quantity on the region.
struct ErrorNorms {
  double sup = 0.0;     // sup |x - x*| / sup |x*|
  double c1 = 0.0;      // max of sup and sup |grad(x - x*)| / sup |x*|
  double abs_sup = 0.0; // sup |x - x*|
};

struct ReconstructionReport {
  Mask region;
  ScalarField mu, q, sqrtD, sigma_a;
  double schroedinger_residual = 0.0;
  double liouville_residual = 0.0;
  double min_mu = 0.0, min_sqrtD = 0.0, min_sigma_a = 0.0;
  std::optional<ErrorNorms> mu_error, q_error, sqrtD_error, sigma_a_error;
};

/// sigma_a = mu sqrt(D), residuals and, with truth, error norms.
/// Schroedinger residual: max_j sup |lap u_j + q u_j| / sup |lap u_j|.
/// Liouville residual: sup |(lap_h + q) w + mu| / sup |mu| with the operator
/// of the solve.
ReconstructionReport assemble_report(const ScalarField& mu, const ScalarField& q,
                                     const ScalarField& sqrtD, const Mask& region,
                                     const InternalDataSet& data,
                                     const GroundTruth* truth = nullptr);

ErrorNorms error_norms(const ScalarField& value, const ScalarField& truth, const Mask& region);

}  // namespace qpat
