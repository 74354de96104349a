#pragma once

#include <string>
#include <vector>

#include "qpat/boundary.hpp"
#include "qpat/grid.hpp"

namespace qpat {

enum class PhaseSign { plus_phi, minus_phi };

inline double sign_value(PhaseSign s) { return s == PhaseSign::plus_phi ? 1.0 : -1.0; }

/// Parameters of one CGO field exp((s phi + i psi) / h) a.
struct CGOConfig {
  Point x0 = Point(2.0, 0.0);
  Vec2 omega = Vec2(0.0, 1.0);
  double h = 0.25;
  PhaseSign sign = PhaseSign::minus_phi;
  double cutoff_width = 0.2;
};

/// Checks |omega| = 1, h in (0, 1), x0 outside the hull and a positive
/// cutoff width.
void validate(const CGOConfig& cfg, const DomainSpec& domain);

/// phi = log|x - x0|.
double phase_phi(const Point& x0, const Point& x);
/// psi = angle between (x - x0)/|x - x0| and omega, in [0, pi].
double phase_psi(const Point& x0, const Vec2& omega, const Point& x);
Vec2 grad_phi(const Point& x0, const Point& x);
Vec2 grad_psi(const Point& x0, const Vec2& omega, const Point& x);

/// Unit direction perpendicular to (center - x0), rotated clockwise from it.
Vec2 default_omega(const DomainSpec& domain, const Point& x0);

/// Smallest h keeping max exp(phi/h) / min exp(phi/h) over the closed
/// domain below `ratio`.
double min_h_for_dynamic_range(const DomainSpec& domain, const Point& x0, double ratio = 1e3);

struct CGOPhasePair {
  ScalarField phi;
  ScalarField psi;
  VectorField<double> grad_phi;
  VectorField<double> grad_psi;
};

/// Samples the phases and their analytic gradients at interior nodes and
/// boundary points. Raises a singular-phase error when a node coincides with
/// x0 or when psi is not smooth on the domain (the line x0 + t omega meets it).
CGOPhasePair build_phases(const CGOConfig& cfg, const GridPtr& grid);

struct CGOAmplitude {
  ComplexField a;
  double transport_residual = 0.0;
  double min_modulus = 0.0;
};

/// sup |2 (grad psi + i grad phi) . grad a + (lap psi + i lap phi) a| over
/// interior nodes, with the (vanishing) phase Laplacians taken analytically
/// and grad a by finite differences.
double transport_residual(const CGOPhasePair& phases, const ComplexField& a);

/// Amplitude a = 1 (or `a` when supplied), checked against `tol`.
CGOAmplitude build_amplitude(const CGOPhasePair& phases, const ComplexField* a = nullptr,
                             double tol = 1e-8);

/// Leading-order CGO value exp((s phi + i psi)/h) at one point (a = 1).
complexd cgo_value(const CGOConfig& cfg, const Point& x);

/// exp((s phi + i psi)/h) a at nodes and boundary points.
ComplexField cgo_field(const CGOConfig& cfg, const CGOPhasePair& phases, const CGOAmplitude& amp);

/// sup |h^2 (lap_h + q) u| / |u| over interior nodes with four full arms,
/// using the 5-point Laplacian. For a CGO u with a = 1 this is h^2 |q| plus
/// the discretization error of lap_h.
double semiclassical_residual(const CGOConfig& cfg, const ComplexField& u, const ScalarField& q);

/// Two CGO configurations sharing x0 and omega, with the leading-order
/// weight chi = 1/(u1 u2) and normalization kappa = -1/(s2/h2 - s1/h1) used
/// by the transport vector field.
struct CGOPair {
  CGOConfig first;
  CGOConfig second;

  /// (plus_phi at h, minus_phi at h): chi = exp(-2 i psi/h), kappa = h/2.
  static CGOPair growing_decaying(const Point& x0, const Vec2& omega, double h,
                                  double cutoff_width);
  /// (minus_phi at h, minus_phi at h/2): kappa = h.
  static CGOPair decaying(const Point& x0, const Vec2& omega, double h, double cutoff_width);

  complexd chi(const Point& x) const;
  /// grad chi / chi, from the analytic phase gradients.
  Eigen::Vector2cd grad_log_chi(const Point& x) const;
  double kappa() const;
  std::string chi_description() const;
};

/// Quintic smoothstep cutoff in arc distance: 1 at distance 0, 0 beyond
/// `width`, C2 in between.
double cutoff_profile(double arc_distance, double width);

/// Boundary traces g_j, one value per grid boundary point. Each complex g_j
/// stands for the two real illuminations Re g_j and Im g_j.
struct IlluminationSet {
  std::vector<CGOConfig> cgo;
  std::vector<Eigen::VectorXcd> g;
  double epsilon = 0.0;
  double epsilon_hat = 0.0;
  // Sup of |trace(u_j)| over the boundary, scaling the perturbation.
  std::vector<double> trace_scale;

  int real_illuminations() const { return 2 * int(g.size()); }
  /// g_j at an arbitrary boundary point (used on refined grids).
  complexd value(int j, const Point& y, const BoundarySegmentation& seg) const;
  /// g_j at every boundary point of `grid`.
  Eigen::VectorXcd trace(int j, const Grid& grid, const BoundarySegmentation& seg) const;
};

/// g_j = chi_Gamma (trace(u_j) + epsilon |trace(u_j)|_inf p_j) with a smooth
/// deterministic perturbation p_j. Requires cutoff_width < gamma margin.
IlluminationSet make_illuminations(const std::vector<CGOConfig>& cfgs, const Grid& grid,
                                   const BoundarySegmentation& seg, double epsilon = 0.0);
inline IlluminationSet make_illuminations(const CGOPair& pair, const Grid& grid,
                                          const BoundarySegmentation& seg,
                                          double epsilon = 0.0) {
  return make_illuminations(std::vector<CGOConfig>{pair.first, pair.second}, grid, seg, epsilon);
}

/// Cutoff weight at every grid boundary point: 1 on the front and up to
/// arc distance (gamma margin - width) from it, then a quintic ramp that
/// reaches 0 at the end of Gamma.
Eigen::VectorXd cutoff_weights(const Grid& grid, const BoundarySegmentation& seg, double width);

}  // namespace qpat
