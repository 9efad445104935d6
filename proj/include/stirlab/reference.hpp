#pragma once

// Closed-form flat-annulus oracle backing the other modules' tests.  This
// header deliberately depends on nothing else in the project: the values
// below come from one-dimensional formulas and a self-contained adaptive
// integrator, so agreement with the main quadrature and flow code is a
// genuine cross-check rather than the same arithmetic twice.

#include <stdexcept>

namespace stirlab::reference {

/// Angular-speed profile omega(r) on the annulus r0 <= r <= r1.
///   rigid : omega = amplitude everywhere.
///   bump  : amplitude times a C2 plateau bump vanishing at both radii
///           (quintic ramps over (1 - plateau_fraction) of each half-width).
struct AnnulusProfile {
  enum class Kind { rigid, bump };
  Kind kind = Kind::rigid;
  double amplitude = 1.0;
  double plateau_fraction = 0.5;  // bump only

  double omega(double r, double r0, double r1) const;
};

struct AnnulusValues {
  double area = 0.0;       // pi (r1^2 - r0^2)
  double action = 0.0;     // (1/2) int omega^2 r^2 dA = pi int omega^2 r^3 dr
  double mass_flow = 0.0;  // int omega dA = 2 pi int omega r dr   (unit time)
};

/// Closed forms for the rigid profile; adaptive Simpson at 1e-10 for bumps.
AnnulusValues annulus_values(double r0, double r1, const AnnulusProfile& profile);

/// Integral of |d theta|^2 over the annulus: 2 pi ln(r1 / r0).
double annulus_angle_gradient_norm_squared(double r0, double r1);

/// Slack of the energy lower bound for the rigid profile, in closed form:
/// (r1^2 + r0^2) ln(r1 / r0) / (r1^2 - r0^2); equals (5/3) ln 2 on [1, 2].
double annulus_rigid_slack(double r0, double r1);

/// Orbit of the profile flow: radius is constant, the angle advances by
/// omega(r) * t.
double annulus_orbit_angle(double r, double t, double r0, double r1,
                           const AnnulusProfile& profile);

/// Self-contained adaptive Simpson integrator (exposed for the tests of the
/// oracle itself).
double integrate(double (*f)(double, const void*), const void* ctx, double a, double b,
                 double tol);

}  // namespace stirlab::reference
