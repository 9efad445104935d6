#pragma once

#include "stirlab/fields.hpp"

#include <functional>
#include <string>

namespace stirlab {

/// How kinetic energy rescales under a homothety of ratio lambda in
/// dimension n (the stirring protocol is traversed in the same unit time,
/// so speeds scale with length).
///
///   kinematic        : exponent n + 2, from |v|^2 ~ lambda^2 over a domain
///                      of volume lambda^n; the default.
///   jacobian_squared : exponent 2n, the alternative bookkeeping that
///                      attaches both volume factors to the squared map
///                      Jacobian.  Kept selectable so the two conventions
///                      can be compared; they agree only in dimension 2.
enum class ScalingMode { kinematic, jacobian_squared };

double scaling_exponent(ScalingMode mode, int dimension);
const char* to_string(ScalingMode mode);
ScalingMode scaling_mode_from_string(const std::string& name);

/// (1/2) integral of |V|^2 over the surface.
double kinetic_energy(const TangentField& field, const QuadratureMesh& mesh);

/// Kinetic energy with provenance: the same quadrature at the requested
/// resolution plus a refinement error estimate from the half-resolution rule.
struct EnergyReport {
  double value = 0.0;
  std::string domain;
  int resolution_u = 0;
  int resolution_v = 0;
  double refinement_error = 0.0;  // |J(n) - J(n/2)|
};

EnergyReport kinetic_energy_report(const TangentField& field, int nu, int nv);

/// Integral of |V|^2 over the surface (twice the kinetic energy; the
/// autonomous-field action over unit time).
double l2_norm_squared(const TangentField& field, const QuadratureMesh& mesh);

/// (1/2) integral of |Vtilde|^2 over the tube.  Requires the normal rule
/// (attach_normal_rule) on the mesh.
double tube_energy(const AmbientField& field, const QuadratureMesh& mesh);

/// Time-grid average of the instantaneous tube energy of a time-dependent
/// control (midpoint rule in time, so piecewise-constant protocols are
/// integrated exactly): the action per unit time.  For negative controls
/// such as the forward-then-reversed protocol this stays equal to the
/// autonomous tube energy even though the net displacement cancels.
using TimeDependentVelocity = std::function<Vec3(const Vec3&, double)>;

double average_tube_energy(const TimeDependentVelocity& rhs, const TubularChart& chart,
                           const QuadratureMesh& mesh, double t0, double t1,
                           int time_samples);

/// Tube energy against its surface counterpart.  On flat surfaces the exact
/// ratio is the squared-cutoff integral; on curved surfaces it deviates by
/// at most curvature_margin (a documented O(delta * kappa_max) envelope).
struct TubularComparison {
  double tube_energy = 0.0;
  double surface_energy = 0.0;
  double ratio = 0.0;             // tube / surface
  double flat_ratio = 0.0;        // closed-form squared-cutoff integral
  double curvature_margin = 0.0;  // admissible |ratio / flat_ratio - 1|
};

TubularComparison tubular_energy_check(const AmbientField& field,
                                       const QuadratureMesh& mesh);

/// base_energy rescaled by the homothety ratio: base * lambda^exponent.
double scaled_energy(double base_energy, double lambda, int dimension,
                     ScalingMode mode);

}  // namespace stirlab
