#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qpat/boundary.hpp"
#include "qpat/cgo.hpp"
#include "qpat/elliptic.hpp"
#include "qpat/grid.hpp"

namespace qpat {

/// Grid-sampled coefficients: diffusion D, absorption sigma_a and the known
/// Grueneisen factor G. `M` is an optional bound on their smoothness norm.
struct CoefficientPair {
  ScalarField D;
  ScalarField sigma_a;
  ScalarField G;
  double M = std::numeric_limits<double>::quiet_NaN();
};

/// base + sum_i amp_i exp(-k_i |x - c_i|^2) with analytic derivatives.
struct GaussianSum {
  struct Bump {
    double amp;
    double k;
    Point center;
  };
  double base = 1.0;
  std::vector<Bump> bumps;

  double value(const Point& x) const;
  Vec2 grad(const Point& x) const;
  double laplacian(const Point& x) const;
};

/// Analytic coefficient model; the ground truth of synthetic studies.
struct CoefficientModel {
  std::string name;
  GaussianSum D;
  GaussianSum sigma_a;
  GaussianSum G{1.0, {}};

  double sqrt_D(const Point& x) const;
  double laplacian_sqrt_D(const Point& x) const;
  /// q = -lap(sqrt D)/sqrt D - sigma_a/D.
  double q(const Point& x) const;
  /// mu = sigma_a / sqrt D.
  double mu(const Point& x) const;

  CoefficientPair sample(const GridPtr& grid) const;
};

/// Built-in scenarios: "constant", "gaussian-bump", "two-inclusion".
CoefficientModel scenario(const std::string& name);
std::vector<std::string> scenario_names();

struct LiouvilleFields {
  ScalarField q;
  ScalarField mu;
  double mu_min = 0.0;
  double mu_max = 0.0;
};

/// q = -lap_h(sqrt D)/sqrt D - sigma_a/D and mu = sigma_a/sqrt D with the
/// 5-point Laplacian. D needs boundary values.
LiouvilleFields liouville_forward(const CoefficientPair& coeffs);

/// Complex internal data d_j = G sigma_a u_j and the illuminations used.
struct InternalDataSet {
  std::vector<ComplexField> d;
  IlluminationSet illum;
  double noise_level = 0.0;
  std::uint64_t seed = 0;
  double achieved_ratio = 0.0;
};

/// Illuminations are Schroedinger-side traces g_j; the diffusion problem is
/// solved with u_j = g_j / sqrt(D) on the boundary. Both the real and the
/// imaginary part are solved with one factorization.
InternalDataSet simulate_data(const CoefficientPair& coeffs, const IlluminationSet& illum,
                              const LinearSolveOptions& opts = {});

struct SimulationOptions {
  int refine = 4;
  LinearSolveOptions solver;
};

/// Simulates on a grid `refine` times finer than `target`, samples the
/// result at the coincident nodes and sets boundary data analytically.
InternalDataSet simulate_data(const CoefficientModel& model, const IlluminationSet& illum,
                              const BoundarySegmentation& seg, const GridPtr& target,
                              const SimulationOptions& opts = {});

/// Divides a known G out of the data.
InternalDataSet remove_grueneisen(const InternalDataSet& data, const ScalarField& G);

enum class NoiseKind { smooth, white };

/// Adds a deterministic pseudo-random perturbation to every d_j (nodes and
/// boundary values). Smooth noise is a sum of low-order cosine modes scaled
/// so that max(|p|_inf, l |grad p|_inf) = delta |d_j|_inf with l the box
/// size over (pi * highest mode); white noise is uniform per value with
/// |p|_inf = delta |d_j|_inf. `achieved_ratio` reports max_j |p|_inf/|d_j|_inf.
InternalDataSet add_noise(const InternalDataSet& data, double delta, std::uint64_t seed,
                          NoiseKind kind = NoiseKind::smooth);

/// Uniform deviate in [-1, 1] from the raw 64-bit output of the engine.
double uniform_pm1(std::uint64_t raw);

}  // namespace qpat
