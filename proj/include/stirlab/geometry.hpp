#pragma once

#include "stirlab/types.hpp"

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace stirlab {

// ============================================================================
// Chart domains and surface jets
// ============================================================================

struct ChartDomain {
  double u0 = 0.0, u1 = 1.0;
  double v0 = 0.0, v1 = 1.0;
  bool periodic_u = false;
  bool periodic_v = false;

  double extent_u() const { return u1 - u0; }
  double extent_v() const { return v1 - v0; }
  bool contains(double u, double v, double slack = 0.0) const;
};

/// Embedding value and derivatives through second order at one chart point.
struct SurfaceJet {
  Vec3 p, pu, pv, puu, puv, pvv;
};

/// First fundamental form and oriented unit normal at a chart point.
struct MetricSample {
  Mat2 g;
  double det_g = 0.0;
  Mat2 g_inv;
  Vec3 normal;  // unit, along pu x pv
};

/// Shape operator data with respect to the oriented normal.  The offset
/// map determinant below is det(I - s * weingarten).
struct CurvatureSample {
  Mat2 weingarten;  // g^{-1} <normal, d2p>
  double kappa1 = 0.0, kappa2 = 0.0;
};

// ============================================================================
// Embedded surfaces
// ============================================================================

/// A two-dimensional surface embedded in Euclidean 3-space through a single
/// parametric chart.  Built-in kinds carry analytic derivatives and an
/// analytic nearest-point projection; custom charts fall back to central
/// differences with a caller-chosen step.
class EmbeddedSurface {
public:
  static EmbeddedSurface torus(double major_radius, double minor_radius);
  static EmbeddedSurface flat_strip(double width, double height);
  static EmbeddedSurface flat_annulus(double r0, double r1);
  static EmbeddedSurface sphere(double radius);
  static EmbeddedSurface custom(ChartDomain domain,
                                std::function<Vec3(double, double)> embed,
                                double kappa_max_hint, double fd_step);

  const ChartDomain& domain() const { return domain_; }
  const std::string& describe() const { return description_; }
  bool analytic_jets() const { return kind_ != Kind::custom; }
  bool has_projection() const { return kind_ != Kind::custom; }

  /// Largest principal curvature magnitude over the chart.
  double kappa_max() const { return kappa_max_; }

  /// Default finite-difference step for this chart: 1e-5 of the larger
  /// chart extent.  Used wherever a step is not supplied explicitly.
  double fd_step() const;

  Vec3 embed(double u, double v) const;
  SurfaceJet jet(double u, double v) const;

  /// Second-order jet from central differences of the embedding with step h.
  /// Serves as the independent cross-check of the analytic derivatives.
  SurfaceJet jet_finite_difference(double u, double v, double h) const;

  /// Reduces periodic coordinates to the fundamental domain.
  std::pair<double, double> wrap(double u, double v) const;

  struct Projection {
    double u = 0.0, v = 0.0, s = 0.0;
    bool ok = false;  // footpoint inside the chart and |s| <= max_normal_dist
  };

  /// Nearest-point decomposition x = footpoint + s * normal for the built-in
  /// kinds.  ok is false when x is farther than max_normal_dist from the
  /// surface or the footpoint falls outside the chart domain.
  Projection project(const Vec3& x, double max_normal_dist) const;

private:
  enum class Kind { torus, flat_strip, flat_annulus, sphere, custom };

  EmbeddedSurface() = default;

  Kind kind_ = Kind::custom;
  ChartDomain domain_;
  std::string description_;
  double pa_ = 0.0, pb_ = 0.0;  // kind parameters (radii or extents)
  double kappa_max_ = 0.0;
  double fd_step_custom_ = 1e-5;
  std::function<Vec3(double, double)> embed_fn_;
};

/// First fundamental form, inverse, determinant and unit normal at (u, v).
/// Throws CheckFailure identifying the node when the parametrization is not
/// an immersion there (det g <= 0).
MetricSample metric_at(const EmbeddedSurface& surface, double u, double v);

/// Shape operator at (u, v) with respect to the oriented normal.
CurvatureSample curvature_at(const EmbeddedSurface& surface, double u, double v);

// ============================================================================
// Tubular chart
// ============================================================================

/// Normal-offset chart Phi(u, v, s) = p(u, v) + s * normal(u, v) of the tube
/// of half-width delta.  The admissibility bound delta <= 0.1 / kappa_max
/// keeps the offset map injective with a wide margin (reach = 1 / kappa_max).
class TubularChart {
public:
  TubularChart(const EmbeddedSurface& surface, double delta);

  const EmbeddedSurface& surface() const { return *surface_; }
  double delta() const { return delta_; }

  Vec3 map(double u, double v, double s) const;

  /// Columns Phi_u, Phi_v, normal at (u, v, s).
  Mat3 frame(double u, double v, double s) const;

  /// Dimensionless offset-volume distortion det(I - s W); equals the ratio
  /// of det D Phi to sqrt(det g) and is exactly 1 at s = 0.
  double jacobian(double u, double v, double s) const;

private:
  const EmbeddedSurface* surface_;
  double delta_;
};

/// Validates delta against the admissibility bound and builds the chart.
TubularChart tubular_chart(const EmbeddedSurface& surface, double delta);

// ============================================================================
// Quadrature
// ============================================================================

/// Tensor-product surface quadrature.  Periodic directions use the uniform
/// (trapezoidal) rule, which is spectrally accurate for smooth periodic
/// integrands; non-periodic directions use the composite midpoint rule of
/// order 2.  Weights include the Riemannian area element.
struct QuadratureMesh {
  int nu = 0, nv = 0;
  int declared_order = 2;
  std::vector<double> nodes_u, nodes_v;  // per-direction node coordinates
  std::vector<double> step_u_weight, step_v_weight;
  std::vector<double> weights;  // nu*nv area weights, row-major in (iu, iv)

  // Optional normal-direction rule for tube integrals: composite
  // Gauss-Legendre aligned to the cutoff junctions at +-delta/2, +-3delta/4,
  // exact for the piecewise-polynomial cutoff factors.
  std::vector<double> s_nodes, s_weights;

  std::size_t size() const { return weights.size(); }
  double node_u(std::size_t i) const { return nodes_u[i / nodes_v.size()]; }
  double node_v(std::size_t i) const { return nodes_v[i % nodes_v.size()]; }
  double total_weight() const;
};

/// Builds the surface rule.  Periodic directions require at least 8 nodes.
QuadratureMesh build_quadrature(const EmbeddedSurface& surface, int nu, int nv);

/// Attaches the normal-direction rule covering [-3delta/4, 3delta/4] with
/// points_per_piece Gauss-Legendre nodes on each smooth piece of the cutoff.
void attach_normal_rule(QuadratureMesh& mesh, double delta, int points_per_piece = 8);

}  // namespace stirlab
