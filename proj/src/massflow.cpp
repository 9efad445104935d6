#include "stirlab/massflow.hpp"

#include "stirlab/flow.hpp"
#include "stirlab/parallel.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

namespace stirlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Principal-value difference of two angles, in (-pi, pi].
double angle_jump(double to, double from) {
  double d = std::fmod(to - from, kTwoPi);
  if (d <= -std::numbers::pi) d += kTwoPi;
  if (d > std::numbers::pi) d -= kTwoPi;
  return d;
}

}  // namespace

CircleMap::CircleMap(const EmbeddedSurface& surface, ScalarJetFn angle_jet, int winding_v)
    : surface_(&surface), jet_(std::move(angle_jet)), winding_v_(winding_v) {}

CircleMap CircleMap::angular(const EmbeddedSurface& surface) {
  return CircleMap(
      surface, [](double, double v) { return std::array<double, 3>{v, 0.0, 1.0}; }, 1);
}

double CircleMap::angle(double u, double v) const {
  const auto [wu, wv] = surface_->wrap(u, v);
  return jet_(wu, wv)[0];
}

Vec2 CircleMap::gradient(double u, double v) const {
  const auto [wu, wv] = surface_->wrap(u, v);
  const std::array<double, 3> j = jet_(wu, wv);
  return Vec2(j[1], j[2]);
}

int CircleMap::measured_winding(double u, int samples) const {
  if (!surface_->domain().periodic_v)
    throw PreconditionError("CircleMap: winding needs a periodic v direction");
  if (samples < 16) throw PreconditionError("CircleMap: winding needs >= 16 samples");
  const ChartDomain& dom = surface_->domain();
  const double h = dom.extent_v() / samples;
  double lift = 0.0;
  double prev = angle(u, dom.v0);
  for (int k = 1; k <= samples; ++k) {
    const double cur = angle(u, dom.v0 + k * h);
    lift += angle_jump(cur, prev);
    prev = cur;
  }
  const double turns = lift / kTwoPi;
  const double nearest = std::round(turns);
  if (std::abs(turns - nearest) > 1e-6)
    throw CheckFailure("CircleMap: lift along the v loop closes to " +
                       std::to_string(turns) + " turns, not an integer");
  return static_cast<int>(nearest);
}

void CircleMap::verify_winding(double u, int samples) const {
  const int measured = measured_winding(u, samples);
  if (measured != winding_v_)
    throw CheckFailure("CircleMap: declared winding " + std::to_string(winding_v_) +
                       " but measured " + std::to_string(measured));
}

MassFlowValue mass_flow(const TangentField& field, const CircleMap& f,
                        const QuadratureMesh& mesh, double time, int steps) {
  if (&field.surface() != &f.surface())
    throw PreconditionError("mass_flow: field and test map on different surfaces");
  if (steps < 1) throw PreconditionError("mass_flow: need at least one step");

  const double h = time / steps;
  std::vector<double> terms(mesh.size(), 0.0);
  std::vector<double> worst_jump(mesh.size(), 0.0);

  parallel_for(mesh.size(), [&](std::size_t i) {
    Vec2 y(mesh.node_u(i), mesh.node_v(i));
    double lift = 0.0;
    double prev = f.angle(y.x(), y.y());
    double worst = 0.0;
    for (int k = 0; k < steps; ++k) {
      y = flow_chart(field, y, h, 1);
      const double cur = f.angle(y.x(), y.y());
      const double jump = angle_jump(cur, prev);
      worst = std::max(worst, std::abs(jump));
      lift += jump;
      prev = cur;
    }
    terms[i] = mesh.weights[i] * lift;
    worst_jump[i] = worst;
  });

  double worst = 0.0;
  for (const double w : worst_jump) worst = std::max(worst, w);
  if (worst >= std::numbers::pi * (1.0 - 1e-9)) {
    std::ostringstream msg;
    msg << "mass_flow: per-step angle jump " << worst
        << " reaches pi; the lift is ambiguous at " << steps
        << " steps - refine the time grid";
    throw CheckFailure(msg.str());
  }

  MassFlowValue out;
  out.value = ordered_sum(terms);
  out.turns = field.turns();
  const double vol = mesh.total_weight();
  out.basis_constant = basis_constant(vol, gradient_norm_squared(f, mesh));
  return out;
}

double flux_pairing(const TangentField& field, const CircleMap& f,
                    const QuadratureMesh& mesh, double time) {
  if (&field.surface() != &f.surface())
    throw PreconditionError("flux_pairing: field and test map on different surfaces");
  std::vector<double> terms(mesh.size(), 0.0);
  parallel_for(mesh.size(), [&](std::size_t i) {
    const double u = mesh.node_u(i);
    const double v = mesh.node_v(i);
    const Vec2 df = f.gradient(u, v);
    const Vec2 comps = field.chart_components(u, v);
    terms[i] = mesh.weights[i] * (df.x() * comps.x() + df.y() * comps.y());
  });
  return time * ordered_sum(terms);
}

double gradient_norm_squared(const CircleMap& f, const QuadratureMesh& mesh) {
  const EmbeddedSurface& surface = f.surface();
  std::vector<double> terms(mesh.size(), 0.0);
  parallel_for(mesh.size(), [&](std::size_t i) {
    const double u = mesh.node_u(i);
    const double v = mesh.node_v(i);
    const MetricSample m = metric_at(surface, u, v);
    const Vec2 df = f.gradient(u, v);
    terms[i] = mesh.weights[i] * df.dot(m.g_inv * df);
  });
  return ordered_sum(terms);
}

double basis_constant(double volume, double df_norm_squared) {
  if (volume <= 0.0 || df_norm_squared <= 0.0)
    throw PreconditionError("basis_constant: volume and |df|^2 must be positive");
  return 1.0 / std::sqrt(volume * df_norm_squared);
}

JensenChain jensen_chain(double surface_action, double theta_norm, double volume) {
  if (volume <= 0.0) throw PreconditionError("jensen_chain: volume must be positive");
  JensenChain out;
  out.action = surface_action;
  out.theta_norm = theta_norm;
  out.volume = volume;
  out.lower_bound = 0.5 * volume * theta_norm * theta_norm;
  if (out.lower_bound == 0.0) {
    out.slack = surface_action == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    out.pass = surface_action >= 0.0;
    return out;
  }
  out.slack = surface_action / out.lower_bound;
  out.pass = surface_action >= out.lower_bound * (1.0 - 1e-12);
  return out;
}

}  // namespace stirlab
