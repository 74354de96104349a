#pragma once

#include <optional>
#include <vector>

#include "qpat/config.hpp"
#include "qpat/inversion.hpp"
#include "qpat/transport.hpp"

namespace qpat {

/// Geometry attached to one pole: its CGO pair, boundary partition and
/// trusted region.
struct SourceSetup {
  Point x0;
  CGOPair pair;
  BoundarySegmentation seg;
  TrustedRegion trusted;
};

CGOPair make_pair(PairKind kind, const Point& x0, const Vec2& omega, double h, double cutoff_width);

SourceSetup make_source(const ExperimentConfig& cfg, const Grid& grid, const Point& x0,
                        const CGOPair& pair);

/// Sources of one run: the single pole in two-source mode, every pole in
/// multi-source mode.
std::vector<SourceSetup> make_sources(const ExperimentConfig& cfg, const Grid& grid, double h);

/// Coefficients of a run: an analytic scenario or sampled files.
struct Medium {
  std::optional<CoefficientModel> model;
  std::optional<CoefficientPair> sampled;
  std::string label;
};

/// Files are read on `grid` (their header must match it); boundary values
/// come from the node values extended past the boundary by extrapolation.
/// Scenarios are looked up by name.
Medium load_medium(const ExperimentConfig& cfg, const GridPtr& grid);
GroundTruth medium_truth(const Medium& medium, const GridPtr& grid);

/// Data of one pole, with the Grueneisen factor already divided out.
struct SourceData {
  Point x0;
  CGOPair pair;
  InternalDataSet data;
};

/// Everything the reconstruction consumes. `sqrtD_cut` and `truth` are
/// only present for synthetic data.
struct Dataset {
  GridPtr grid;
  std::vector<SourceData> sources;
  Eigen::VectorXd sqrtD_boundary;
  std::optional<ScalarField> sqrtD_cut;
  std::optional<GroundTruth> truth;
  std::string medium;
};

/// Simulates clean data for every source and adds noise of level `delta`
/// (seed + source index per source).
Dataset simulate_dataset(const ExperimentConfig& cfg, const Medium& medium, const GridPtr& grid,
                         const std::vector<SourceSetup>& sources, double delta, std::uint64_t seed);

/// Multiplies every data set and illumination by `factor`.
Dataset scale_data(const Dataset& ds, double factor);

/// Boundary mu0 of the first source, completed by later sources where it
/// is undefined.
Eigen::VectorXd merged_boundary_mu0(const Dataset& ds);

/// Reconstruction products and diagnostics.
struct ReconstructionRun {
  ReconstructionReport report;
  MuResult mu;
  std::vector<double> flatness;
  std::vector<double> min_branch_modulus;
  std::vector<double> eta;
  std::optional<double> min_det;
  std::optional<double> min_normalized_det;
};

/// Recovers mu (single pair or gradient system), q, sqrt(D) and sigma_a.
/// Error norms are filled when the dataset carries the truth.
ReconstructionRun reconstruct(const Dataset& ds, const ExperimentConfig& cfg);

}  // namespace qpat
