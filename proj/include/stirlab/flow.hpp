#pragma once

#include "stirlab/fields.hpp"

#include <functional>
#include <span>

namespace stirlab {

/// Velocity right-hand side for ambient integration, evaluated at (x, t).
using AmbientRhs = std::function<Vec3(const Vec3&, double)>;

/// Steps floor for resolving a stirred flow: 64 steps per turn count and
/// unit of time.  Coarser grids cannot track the winding unambiguously.
int minimum_steps(const TangentField& field, double time);

/// Classical fixed-step RK4 for the autonomous chart system
/// (u', v') = (V^u, V^v).  Coordinates are never reduced to the fundamental
/// domain, so for periodic directions the result carries the continuous
/// lift: v(T) - v(0) is the total unwrapped advance.
Vec2 flow_chart(const TangentField& field, const Vec2& start, double time, int steps);

struct AmbientFlowOptions {
  double t0 = 0.0;
  double t1 = 1.0;
  int steps = 256;
  /// Propagate the variational system Y' = DV(x, t) Y alongside the state
  /// and record det Y, the pointwise volume distortion of the flow map.
  bool track_jacobian = false;
  /// Step for the central-difference DV; 0 selects 1e-6 of unit length.
  double jacobian_fd_step = 0.0;
};

struct AmbientFlowResult {
  Vec3 state = Vec3::Zero();
  double det_jacobian = 1.0;   // det Y at t1 (1.0 when not tracked)
  double max_det_drift = 0.0;  // max |det Y - 1| over all accepted steps
};

AmbientFlowResult flow_ambient(const AmbientRhs& rhs, const Vec3& start,
                               const AmbientFlowOptions& opts);

/// Convenience overload: autonomous field, default FD step from the field.
AmbientFlowResult flow_ambient(const AmbientField& field, const Vec3& start,
                               const AmbientFlowOptions& opts);

/// Time-dependent control that runs the field forward on [0, period/2) and
/// exactly reversed on [period/2, period]: the continuous period map is the
/// identity.  The switch instant belongs to the second half.  Note that a
/// one-step scheme whose final stage lands exactly on the switch samples the
/// reversed field there, so integrating the whole period through this single
/// callback closes the round trip only to first order in the step size; for
/// full one-step accuracy integrate each half as its own flow_ambient call.
AmbientRhs reversing_protocol(const AmbientField& field, double period);

/// Integrated particle family: the discrete record of one flow map.
struct Isotopy {
  double t0 = 0.0;
  double t1 = 1.0;
  int steps = 0;
  std::vector<Vec3> start;
  std::vector<Vec3> finish;
  std::vector<double> det_jacobian;  // per particle at t1; empty if untracked
  double max_det_drift = 0.0;        // max over particles and steps |det Y - 1|
};

/// Flows every particle with the same RK4 grid; enforces the steps floor so
/// the winding stays resolved.  Jacobian tracking propagates the variational
/// system per particle.
Isotopy integrate_isotopy(const AmbientField& field, std::span<const Vec3> particles,
                          double time, int steps, bool track_jacobian = true);

/// Max over particles and times of |det Dflow - 1|.
double volume_defect(const Isotopy& isotopy);

/// Convenience wrapper: integrate the seeds with tracking and return the
/// defect directly.
double volume_defect(const AmbientField& field, double time, int steps,
                     std::span<const Vec3> seeds);

/// Certificate that the stirred band genuinely keeps moving: positive speed
/// on the plateau and strictly monotone angular lift for every tracer at
/// every step.
struct MotionCertificate {
  bool moving = false;
  double max_plateau_speed = 0.0;  // sampled sup of |V| on the plateau
  double min_lift_rate = 0.0;      // min over tracers and steps of dv/dt
  int tracers = 0;
  int steps = 0;
};

MotionCertificate never_stops(const AmbientField& field, double time, int steps,
                              int tracers);

/// Time-dependent variant for ambient controls (e.g. the reversing
/// protocol): integrates ambient tracers seeded on the surface and unwraps
/// the angular footpoint coordinate through the tube projection.  The
/// geometry argument supplies the surface, band and tube width.
MotionCertificate never_stops(const AmbientRhs& rhs, const AmbientField& geometry,
                              double time, int steps, int tracers);

/// Observed convergence order from step doubling: runs coarse_steps, 2x and
/// 4x, returns log2 of the ratio of successive endpoint differences
/// (about 4 for smooth fields).
double measured_order(const AmbientRhs& rhs, const Vec3& start, double t0, double t1,
                      int coarse_steps);

}  // namespace stirlab
