#include "stirlab/flow.hpp"

#include "stirlab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace stirlab {

int minimum_steps(const TangentField& field, double time) {
  const double turns = std::max(1, std::abs(field.turns()));
  return static_cast<int>(std::ceil(64.0 * turns * std::max(1.0, std::abs(time))));
}

Vec2 flow_chart(const TangentField& field, const Vec2& start, double time, int steps) {
  if (steps < 1) throw PreconditionError("flow_chart: need at least one step");
  const double h = time / steps;
  Vec2 y = start;
  for (int i = 0; i < steps; ++i) {
    const Vec2 k1 = field.chart_components(y.x(), y.y());
    const Vec2 y2 = y + 0.5 * h * k1;
    const Vec2 k2 = field.chart_components(y2.x(), y2.y());
    const Vec2 y3 = y + 0.5 * h * k2;
    const Vec2 k3 = field.chart_components(y3.x(), y3.y());
    const Vec2 y4 = y + h * k3;
    const Vec2 k4 = field.chart_components(y4.x(), y4.y());
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return y;
}

namespace {

Mat3 rhs_jacobian(const AmbientRhs& rhs, const Vec3& x, double t, double h) {
  Mat3 out;
  for (int axis = 0; axis < 3; ++axis) {
    Vec3 xp = x, xm = x;
    xp[axis] += h;
    xm[axis] -= h;
    out.col(axis) = (rhs(xp, t) - rhs(xm, t)) / (2.0 * h);
  }
  return out;
}

}  // namespace

AmbientFlowResult flow_ambient(const AmbientRhs& rhs, const Vec3& start,
                               const AmbientFlowOptions& opts) {
  if (opts.steps < 1) throw PreconditionError("flow_ambient: need at least one step");
  const double h = (opts.t1 - opts.t0) / opts.steps;
  const double jh = opts.jacobian_fd_step > 0.0 ? opts.jacobian_fd_step : 1e-6;

  AmbientFlowResult result;
  Vec3 x = start;
  Mat3 y = Mat3::Identity();

  for (int i = 0; i < opts.steps; ++i) {
    const double t = opts.t0 + i * h;
    if (!opts.track_jacobian) {
      const Vec3 k1 = rhs(x, t);
      const Vec3 k2 = rhs(x + 0.5 * h * k1, t + 0.5 * h);
      const Vec3 k3 = rhs(x + 0.5 * h * k2, t + 0.5 * h);
      const Vec3 k4 = rhs(x + h * k3, t + h);
      x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      continue;
    }
    // Coupled state-plus-variational step: the same RK4 stages advance x and
    // the linearization Y' = DV(x(t), t) Y, so det Y tracks the volume
    // distortion of the discrete flow map itself.
    const Vec3 k1 = rhs(x, t);
    const Mat3 m1 = rhs_jacobian(rhs, x, t, jh) * y;
    const Vec3 x2 = x + 0.5 * h * k1;
    const Mat3 y2 = y + 0.5 * h * m1;
    const Vec3 k2 = rhs(x2, t + 0.5 * h);
    const Mat3 m2 = rhs_jacobian(rhs, x2, t + 0.5 * h, jh) * y2;
    const Vec3 x3 = x + 0.5 * h * k2;
    const Mat3 y3 = y + 0.5 * h * m2;
    const Vec3 k3 = rhs(x3, t + 0.5 * h);
    const Mat3 m3 = rhs_jacobian(rhs, x3, t + 0.5 * h, jh) * y3;
    const Vec3 x4 = x + h * k3;
    const Mat3 y4 = y + h * m3;
    const Vec3 k4 = rhs(x4, t + h);
    const Mat3 m4 = rhs_jacobian(rhs, x4, t + h, jh) * y4;
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    y += (h / 6.0) * (m1 + 2.0 * m2 + 2.0 * m3 + m4);
    result.max_det_drift =
        std::max(result.max_det_drift, std::abs(y.determinant() - 1.0));
  }

  result.state = x;
  result.det_jacobian = opts.track_jacobian ? y.determinant() : 1.0;
  return result;
}

AmbientFlowResult flow_ambient(const AmbientField& field, const Vec3& start,
                               const AmbientFlowOptions& opts) {
  AmbientFlowOptions local = opts;
  if (local.jacobian_fd_step <= 0.0) local.jacobian_fd_step = field.fd_step();
  const AmbientRhs rhs = [&field](const Vec3& x, double) { return field.value(x); };
  return flow_ambient(rhs, start, local);
}

AmbientRhs reversing_protocol(const AmbientField& field, double period) {
  if (period <= 0.0) throw PreconditionError("reversing_protocol: period must be positive");
  const double half = 0.5 * period;
  return [&field, half](const Vec3& x, double t) -> Vec3 {
    return t < half ? field.value(x) : (-field.value(x)).eval();
  };
}

Isotopy integrate_isotopy(const AmbientField& field, std::span<const Vec3> particles,
                          double time, int steps, bool track_jacobian) {
  if (particles.empty())
    throw PreconditionError("integrate_isotopy: need at least one particle");
  const int floor_steps = minimum_steps(field.tangent(), time);
  if (steps < floor_steps)
    throw PreconditionError("integrate_isotopy: " + std::to_string(steps) +
                            " steps is below the resolution floor " +
                            std::to_string(floor_steps));

  AmbientFlowOptions opts;
  opts.t1 = time;
  opts.steps = steps;
  opts.track_jacobian = track_jacobian;
  opts.jacobian_fd_step = field.fd_step();

  Isotopy iso;
  iso.t0 = 0.0;
  iso.t1 = time;
  iso.steps = steps;
  iso.start.assign(particles.begin(), particles.end());
  iso.finish.resize(particles.size());
  if (track_jacobian) iso.det_jacobian.resize(particles.size());

  std::vector<double> drift(particles.size(), 0.0);
  parallel_for(particles.size(), [&](std::size_t i) {
    const AmbientFlowResult r = flow_ambient(field, particles[i], opts);
    iso.finish[i] = r.state;
    if (track_jacobian) iso.det_jacobian[i] = r.det_jacobian;
    drift[i] = r.max_det_drift;
  });
  for (double d : drift) iso.max_det_drift = std::max(iso.max_det_drift, d);
  return iso;
}

double volume_defect(const Isotopy& isotopy) {
  if (isotopy.det_jacobian.empty())
    throw PreconditionError("volume_defect: isotopy was integrated without Jacobian tracking");
  return isotopy.max_det_drift;
}

double volume_defect(const AmbientField& field, double time, int steps,
                     std::span<const Vec3> seeds) {
  return volume_defect(integrate_isotopy(field, seeds, time, steps, true));
}

MotionCertificate never_stops(const AmbientField& field, double time, int steps,
                              int tracers) {
  const TangentField& tangent = field.tangent();
  if (tracers < 1) throw PreconditionError("never_stops: need at least one tracer");
  const int floor_steps = minimum_steps(tangent, time);
  if (steps < floor_steps)
    throw PreconditionError("never_stops: " + std::to_string(steps) +
                            " steps is below the resolution floor " +
                            std::to_string(floor_steps));

  // Tracers live on the band plateau when there is one; fields without a
  // band (negative controls) get tracers across the chart interior and are
  // expected to fail the monotonicity clause.
  const ChartDomain& dom = tangent.surface().domain();
  double p_lo = dom.u0 + 0.1 * dom.extent_u();
  double p_hi = dom.u1 - 0.1 * dom.extent_u();
  if (tangent.band()) {
    p_lo = tangent.band()->plateau_lo();
    p_hi = tangent.band()->plateau_hi();
  }

  MotionCertificate cert;
  cert.tracers = tracers;
  cert.steps = steps;
  cert.min_lift_rate = std::numeric_limits<double>::infinity();

  // Sampled sup of the ambient speed across the plateau.
  for (int i = 0; i <= 32; ++i) {
    const double u = p_lo + (p_hi - p_lo) * i / 32.0;
    for (int j = 0; j < 16; ++j) {
      const double v = dom.v0 + dom.extent_v() * j / 16.0;
      cert.max_plateau_speed =
          std::max(cert.max_plateau_speed, tangent.ambient(u, v).norm());
    }
  }

  const double h = time / steps;
  bool monotone = true;
  for (int k = 0; k < tracers; ++k) {
    const double u0 = p_lo + (p_hi - p_lo) * (k + 0.5) / tracers;
    const double v0 = dom.v0 + dom.extent_v() * (0.37 * k - std::floor(0.37 * k));
    Vec2 y(u0, v0);
    for (int i = 0; i < steps; ++i) {
      const Vec2 next = flow_chart(tangent, y, h, 1);
      const double rate = (next.y() - y.y()) / h;
      cert.min_lift_rate = std::min(cert.min_lift_rate, rate);
      if (next.y() <= y.y()) monotone = false;
      y = next;
    }
  }

  cert.moving = monotone && cert.max_plateau_speed > 0.0 && cert.min_lift_rate > 0.0;
  return cert;
}

MotionCertificate never_stops(const AmbientRhs& rhs, const AmbientField& geometry,
                              double time, int steps, int tracers) {
  const TangentField& tangent = geometry.tangent();
  if (tracers < 1) throw PreconditionError("never_stops: need at least one tracer");
  if (steps < 1) throw PreconditionError("never_stops: need at least one step");
  const EmbeddedSurface& surface = tangent.surface();
  const ChartDomain& dom = surface.domain();
  double p_lo = dom.u0 + 0.1 * dom.extent_u();
  double p_hi = dom.u1 - 0.1 * dom.extent_u();
  if (tangent.band()) {
    p_lo = tangent.band()->plateau_lo();
    p_hi = tangent.band()->plateau_hi();
  }

  MotionCertificate cert;
  cert.tracers = tracers;
  cert.steps = steps;
  cert.min_lift_rate = std::numeric_limits<double>::infinity();

  const double h = time / steps;
  const double angle_slack = 2.0 * geometry.eta().delta;
  bool monotone = true;
  for (int k = 0; k < tracers; ++k) {
    const double u0 = p_lo + (p_hi - p_lo) * (k + 0.5) / tracers;
    const double v0 = dom.v0 + dom.extent_v() * (0.37 * k - std::floor(0.37 * k));
    Vec3 x = surface.embed(u0, v0);
    cert.max_plateau_speed = std::max(cert.max_plateau_speed, rhs(x, 0.0).norm());
    double prev_v = v0;
    AmbientFlowOptions opts;
    opts.steps = 1;
    for (int i = 0; i < steps; ++i) {
      opts.t0 = i * h;
      opts.t1 = (i + 1) * h;
      x = flow_ambient(rhs, x, opts).state;
      const EmbeddedSurface::Projection p = surface.project(x, angle_slack);
      if (!p.ok)
        throw CheckFailure("never_stops: tracer left the tube - the control is "
                           "not tangent to the surface");
      // Principal-value jump of the angular footpoint coordinate.
      double jump = p.v - prev_v;
      const double period = dom.extent_v();
      jump -= period * std::round(jump / period);
      const double rate = jump / h;
      cert.min_lift_rate = std::min(cert.min_lift_rate, rate);
      if (jump <= 0.0) monotone = false;
      prev_v = p.v;
    }
  }

  cert.moving = monotone && cert.max_plateau_speed > 0.0 && cert.min_lift_rate > 0.0;
  return cert;
}

double measured_order(const AmbientRhs& rhs, const Vec3& start, double t0, double t1,
                      int coarse_steps) {
  AmbientFlowOptions opts;
  opts.t0 = t0;
  opts.t1 = t1;

  opts.steps = coarse_steps;
  const Vec3 a = flow_ambient(rhs, start, opts).state;
  opts.steps = 2 * coarse_steps;
  const Vec3 b = flow_ambient(rhs, start, opts).state;
  opts.steps = 4 * coarse_steps;
  const Vec3 c = flow_ambient(rhs, start, opts).state;

  const double e1 = (a - b).norm();
  const double e2 = (b - c).norm();
  if (e2 <= 0.0 || e1 <= 0.0)
    throw CheckFailure("measured_order: endpoint differences vanished; "
                       "refine from a coarser grid");
  return std::log2(e1 / e2);
}

}  // namespace stirlab
