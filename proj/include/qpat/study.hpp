#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "qpat/config.hpp"
#include "qpat/pipeline.hpp"

namespace qpat {

/// Ordinary least squares y = intercept + slope x with the standard error
/// of the slope and its two-sided 95% Student-t interval.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  int points = 0;
};

/// Fewer than two points, or constant x: config error.
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);
/// Fit of log y against log x; every value must be positive.
LinearFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);
/// 0.975 quantile of Student's t with `dof` degrees of freedom.
double t_quantile_975(int dof);

/// Rows of doubles under named columns.
struct StudyTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::vector<double> column(const std::string& name) const;
  /// Header row then one line per row, values printed with %.12g.
  std::string csv() const;
};

struct StudyResult {
  StudyKind kind = StudyKind::refinement;
  StudyTable table;
  nlohmann::json summary;
};

/// Runs one sweep. Every sweep needs at least three points (config error
/// otherwise):
///   refinement      grid sizes; observed orders of the mu, q, sqrtD and
///                   sigma_a errors against dx
///   h_sweep         h values; slope of the flatness against h
///   stability       positive noise levels times seeds; slope of
///                   |mu - mu~| + |q - q~| against delta
///   exit_stability  noise levels used as perturbation amplitudes of a
///                   synthetic radial field; slope of the exit-map change
///   multisource     grid sizes; single-pair and gradient-system errors
/// Rows run in parallel; the table depends only on the configuration.
StudyResult run_study(const ExperimentConfig& cfg, StudyKind kind);

/// Writes `<kind>.csv` and `<kind>_summary.json`.
void write_study(const std::filesystem::path& dir, const StudyResult& result);

/// Change of the exit map under a perturbation of a synthetic field
/// b = (x0 - x)/|x0 - x|^2 with gamma = 0.3, perturbed by eps p(x) for a
/// fixed smooth p.
struct ExitPerturbation {
  double field_distance = 0.0;  // sup |b - b~| over the domain nodes
  double exit_distance = 0.0;   // max over starts of |x+ - x+~| + |t+ - t+~|
  int starts = 0;
};

ExitPerturbation exit_map_perturbation(const GridPtr& grid, const BoundarySegmentation& seg,
                                       const Mask& starts, double eps, const TraceOptions& opts = {});

/// Gradient-system reconstruction against each single-pair one, with every
/// error measured on the common trusted region.
struct MultiSourceComparison {
  std::vector<double> single_error;
  double multi_error = 0.0;
  std::vector<double> single_vs_multi;  // sup |mu_j - mu_multi| / sup |mu*|
  double min_det = 0.0;
  double min_normalized_det = 0.0;
  double max_curl = 0.0;
  int region_nodes = 0;
};

/// Needs a dataset with truth and at least two sources.
MultiSourceComparison compare_multisource(const Dataset& ds, const ExperimentConfig& cfg);

}  // namespace qpat
