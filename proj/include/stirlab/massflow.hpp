#pragma once

#include "stirlab/fields.hpp"

namespace stirlab {

/// Circle-valued test map given as a chart angle in radians, with the
/// declared winding number along the periodic v loop.  The declaration is
/// checked against a sampled continuous lift around the loop.
class CircleMap {
public:
  CircleMap(const EmbeddedSurface& surface, ScalarJetFn angle_jet, int winding_v);

  /// The angular chart coordinate itself: f(u, v) = v, winding 1.
  static CircleMap angular(const EmbeddedSurface& surface);

  const EmbeddedSurface& surface() const { return *surface_; }
  double angle(double u, double v) const;
  Vec2 gradient(double u, double v) const;  // (df/du, df/dv)
  int declared_winding() const { return winding_v_; }

  /// Winding from unwrapping f along the closed v loop at height u.
  int measured_winding(double u, int samples = 512) const;

  /// Throws CheckFailure when the measured winding disagrees with the
  /// declaration or the lift fails to close up to an integer multiple.
  void verify_winding(double u, int samples = 512) const;

private:
  const EmbeddedSurface* surface_;
  ScalarJetFn jet_;
  int winding_v_;
};

/// Mass transport of the unit-time map against one circle map: the terminal
/// continuous lift of f along each orbit, integrated over the surface area.
struct MassFlowValue {
  double value = 0.0;           // raw area-measure integral of the lift
  double basis_constant = 0.0;  // 1 / sqrt(Vol * |df|_{L2}^2)
  int turns = 0;                // turn count of the generating field

  /// Fixed-basis norm surrogate: value * basis_constant.  With this
  /// normalization the energy bound below reads J >= (Vol/2) * norm^2.
  double norm() const { return value * basis_constant; }
};

/// Integrates the flow of the field over [0, time] with the given step
/// count, unwraps f continuously along every quadrature-node orbit
/// (per-step jumps must stay below pi), and integrates the terminal lift.
/// Throws CheckFailure demanding a finer grid when a jump reaches pi.
MassFlowValue mass_flow(const TangentField& field, const CircleMap& f,
                        const QuadratureMesh& mesh, double time, int steps);

/// Static pairing time * integral of df(V) over the area measure: the flux
/// dual of the mass transport for autonomous fields.
double flux_pairing(const TangentField& field, const CircleMap& f,
                    const QuadratureMesh& mesh, double time = 1.0);

/// Integral of |df|_g^2 over the surface.
double gradient_norm_squared(const CircleMap& f, const QuadratureMesh& mesh);

/// 1 / sqrt(volume * df_norm_squared).
double basis_constant(double volume, double df_norm_squared);

/// Energy lower bound from mass transport: the chain
///   J = (1/2) |V|^2  >=  theta_raw^2 / (2 |df|^2)  =  (Vol/2) * norm^2
/// (Cauchy-Schwarz on the pairing, then the fixed-basis normalization).
struct JensenChain {
  double action = 0.0;       // J: surface kinetic energy of the isotopy
  double theta_norm = 0.0;   // normalized mass transport
  double volume = 0.0;
  double lower_bound = 0.0;  // (volume / 2) * theta_norm^2
  double slack = 1.0;        // action / lower_bound; 1 when both vanish
  bool pass = false;
};

JensenChain jensen_chain(double surface_action, double theta_norm, double volume);

}  // namespace stirlab
