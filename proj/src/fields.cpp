#include "stirlab/fields.hpp"

#include "stirlab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

namespace stirlab {

// ============================================================================
// Scalar profiles
// ============================================================================

double smoothstep_quintic(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return x * x * x * (10.0 + x * (-15.0 + 6.0 * x));
}

double smoothstep_quintic_derivative(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return x * x * (30.0 + x * (-60.0 + 30.0 * x));
}

double BandProfile::value(double c) const {
  if (c <= lo || c >= hi) return 0.0;
  const double w = ramp_width();
  if (w <= 0.0) return 1.0;  // degenerate: plateau fills the band
  if (c < plateau_lo()) return smoothstep_quintic((c - lo) / w);
  if (c > plateau_hi()) return smoothstep_quintic((hi - c) / w);
  return 1.0;
}

double BandProfile::derivative(double c) const {
  if (c <= lo || c >= hi) return 0.0;
  const double w = ramp_width();
  if (w <= 0.0) return 0.0;
  if (c < plateau_lo()) return smoothstep_quintic_derivative((c - lo) / w) / w;
  if (c > plateau_hi()) return -smoothstep_quintic_derivative((hi - c) / w) / w;
  return 0.0;
}

double CutoffProfile::value(double s) const {
  const double t = std::abs(s);
  if (t <= 0.5 * delta) return 1.0;
  if (t >= 0.75 * delta) return 0.0;
  return 1.0 - smoothstep_quintic((t - 0.5 * delta) / (0.25 * delta));
}

double CutoffProfile::derivative(double s) const {
  const double t = std::abs(s);
  if (t <= 0.5 * delta || t >= 0.75 * delta) return 0.0;
  const double ramp = 0.25 * delta;
  const double slope = -smoothstep_quintic_derivative((t - 0.5 * delta) / ramp) / ramp;
  return s < 0.0 ? -slope : slope;
}

double cutoff(double s, double delta) { return CutoffProfile{delta}.value(s); }

// ============================================================================
// Tangent fields
// ============================================================================

TangentField TangentField::zero(const EmbeddedSurface& surface) {
  TangentField f;
  f.surface_ = &surface;
  f.kind_ = Kind::zero;
  f.eval_ = [](double, double) { return Vec2::Zero().eval(); };
  return f;
}

TangentField TangentField::band_stirrer(const EmbeddedSurface& surface, BandProfile band,
                                        int turns, double base_speed) {
  if (turns < 0) throw PreconditionError("band_stirrer: turn count must be nonnegative");
  const ChartDomain& dom = surface.domain();
  if (band.lo >= band.hi)
    throw PreconditionError("band_stirrer: empty band [" + std::to_string(band.lo) + ", " +
                            std::to_string(band.hi) + "]");
  // The closed band must sit strictly inside the u-range so the field has a
  // smooth compactly supported closure; a band touching the chart edge is a
  // construction error even when the values there would vanish.
  if (!(band.lo > dom.u0 && band.hi < dom.u1))
    throw PreconditionError("band_stirrer: band [" + std::to_string(band.lo) + ", " +
                            std::to_string(band.hi) +
                            "] must lie strictly inside the chart u-range (" +
                            std::to_string(dom.u0) + ", " + std::to_string(dom.u1) + ")");

  TangentField f;
  f.surface_ = &surface;
  f.kind_ = Kind::band_stirrer;
  f.turns_ = turns;
  f.base_speed_ = base_speed;
  f.band_ = band;
  const double amplitude = static_cast<double>(turns) * base_speed;
  f.eval_ = [band, amplitude](double u, double) {
    return Vec2(0.0, amplitude * band.value(u));
  };
  return f;
}

TangentField TangentField::hamiltonian(const EmbeddedSurface& surface, ScalarJetFn psi) {
  TangentField f;
  f.surface_ = &surface;
  f.kind_ = Kind::hamiltonian;
  f.eval_ = [&surface, psi = std::move(psi)](double u, double v) {
    const MetricSample m = metric_at(surface, u, v);
    const std::array<double, 3> j = psi(u, v);
    const double root = std::sqrt(m.det_g);
    return Vec2(j[2] / root, -j[1] / root);
  };
  return f;
}

TangentField TangentField::gradient(const EmbeddedSurface& surface, ScalarJetFn psi) {
  TangentField f;
  f.surface_ = &surface;
  f.kind_ = Kind::gradient;
  f.eval_ = [&surface, psi = std::move(psi)](double u, double v) {
    const MetricSample m = metric_at(surface, u, v);
    const std::array<double, 3> j = psi(u, v);
    return (m.g_inv * Vec2(j[1], j[2])).eval();
  };
  return f;
}

Vec2 TangentField::chart_components(double u, double v) const {
  const auto [wu, wv] = surface_->wrap(u, v);
  return eval_(wu, wv);
}

Vec3 TangentField::ambient(double u, double v) const {
  const auto [wu, wv] = surface_->wrap(u, v);
  const Vec2 c = eval_(wu, wv);
  const SurfaceJet jet = surface_->jet(wu, wv);
  return c.x() * jet.pu + c.y() * jet.pv;
}

double TangentField::plateau_speed() const {
  return static_cast<double>(turns_) * base_speed_;
}

double TangentField::max_ambient_speed(int resolution) const {
  const ChartDomain& dom = surface_->domain();
  const int n = std::max(resolution, 2);
  double best = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double u = dom.u0 + dom.extent_u() * (i + 0.5) / (n + 1);
    for (int j = 0; j <= n; ++j) {
      const double v = dom.v0 + dom.extent_v() * (j + 0.5) / (n + 1);
      best = std::max(best, ambient(u, v).norm());
    }
  }
  // Also probe the band plateau mid-line, where stirrers peak.
  if (band_) {
    const double uc = band_->center();
    for (int j = 0; j <= n; ++j) {
      const double v = dom.v0 + dom.extent_v() * (j + 0.5) / (n + 1);
      best = std::max(best, ambient(uc, v).norm());
      best = std::max(best, ambient(0.0, v).norm());
    }
  }
  return best;
}

TangentField stirring_field(const EmbeddedSurface& surface, BandProfile band, int turns,
                            double base_speed) {
  if (turns == 0) return TangentField::zero(surface);
  return TangentField::band_stirrer(surface, band, turns, base_speed);
}

double intrinsic_divergence(const TangentField& field, double u, double v, double h) {
  const EmbeddedSurface& surface = field.surface();
  if (h <= 0.0) h = surface.fd_step();
  const auto density_flux = [&](double uu, double vv) {
    const MetricSample m = metric_at(surface, uu, vv);
    const Vec2 c = field.chart_components(uu, vv);
    const double root = std::sqrt(m.det_g);
    return Vec2(root * c.x(), root * c.y());
  };
  const double du = (density_flux(u + h, v).x() - density_flux(u - h, v).x()) / (2.0 * h);
  const double dv = (density_flux(u, v + h).y() - density_flux(u, v - h).y()) / (2.0 * h);
  const MetricSample m = metric_at(surface, u, v);
  return (du + dv) / std::sqrt(m.det_g);
}

// ----------------------------------------------------------------------------
// Stream function of a band stirrer
// ----------------------------------------------------------------------------

double StreamFunction::derivative(double u) const {
  const EmbeddedSurface& surface = field->surface();
  const double v_ref = 0.5 * (surface.domain().v0 + surface.domain().v1);
  const MetricSample m = metric_at(surface, u, v_ref);
  return -std::sqrt(m.det_g) * field->chart_components(u, v_ref).y();
}

double StreamFunction::value(double u) const {
  const BandProfile& band = *field->band();
  if (u <= band.lo) return 0.0;
  const double hi = std::min(u, band.hi);
  // Composite Simpson over [band.lo, hi]; the integrand is C2, so this
  // converges at fourth order and 256 panels are far below 1e-12 error.
  const int panels = 256;
  const double h = (hi - band.lo) / panels;
  double acc = derivative(band.lo) + derivative(hi);
  for (int i = 1; i < panels; ++i)
    acc += (i % 2 == 1 ? 4.0 : 2.0) * derivative(band.lo + i * h);
  return acc * h / 3.0;
}

StreamFunction stream_function(const TangentField& field) {
  if (field.kind() != TangentField::Kind::band_stirrer || !field.band())
    throw PreconditionError(
        "stream_function: only band stirrers carry a one-dimensional potential");
  return StreamFunction{&field};
}

// ============================================================================
// Tubular extension
// ============================================================================

const char* to_string(ExtensionMode mode) {
  return mode == ExtensionMode::product ? "product" : "jacobian_corrected";
}

AmbientField::AmbientField(TangentField tangent, TubularChart chart, CutoffProfile eta,
                           ExtensionMode mode)
    : tangent_(std::move(tangent)), chart_(chart), eta_(eta), mode_(mode) {
  if (&tangent_.surface() != &chart_.surface())
    throw PreconditionError("AmbientField: field and tube belong to different surfaces");
  if (std::abs(eta_.delta - chart_.delta()) > 1e-15 * chart_.delta())
    throw PreconditionError("AmbientField: cutoff width differs from tube half-width");
}

TubeSample AmbientField::sample_chart(double u, double v, double s) const {
  const EmbeddedSurface& surface = chart_.surface();
  const auto [wu, wv] = surface.wrap(u, v);

  TubeSample out;
  const double eta = eta_.value(s);
  const Vec2 comps = eta == 0.0 ? Vec2::Zero().eval() : tangent_.chart_components(wu, wv);

  const SurfaceJet jet = surface.jet(wu, wv);
  const MetricSample m = metric_at(surface, wu, wv);
  out.area_density = std::sqrt(m.det_g);

  if (mode_ == ExtensionMode::product) {
    out.jacobian = chart_.jacobian(wu, wv, s);
    out.velocity = eta == 0.0 ? Vec3::Zero().eval()
                              : (eta * (comps.x() * jet.pu + comps.y() * jet.pv)).eval();
    return out;
  }

  const CurvatureSample c = curvature_at(surface, wu, wv);
  const Mat2& W = c.weingarten;
  out.jacobian = 1.0 - s * W.trace() + s * s * W.determinant();
  if (eta == 0.0) {
    out.velocity = Vec3::Zero();
    return out;
  }
  const Vec3 nu_u = -(W(0, 0) * jet.pu + W(1, 0) * jet.pv);
  const Vec3 nu_v = -(W(0, 1) * jet.pu + W(1, 1) * jet.pv);
  const Vec3 phi_u = jet.pu + s * nu_u;
  const Vec3 phi_v = jet.pv + s * nu_v;
  out.velocity = (eta / out.jacobian) * (comps.x() * phi_u + comps.y() * phi_v);
  return out;
}

Vec3 AmbientField::value_at_chart(double u, double v, double s) const {
  if (eta_.value(s) == 0.0) return Vec3::Zero();
  return sample_chart(u, v, s).velocity;
}

void AmbientField::sample_column(double u, double v, std::span<const double> s,
                                 std::vector<TubeSample>& out) const {
  const EmbeddedSurface& surface = chart_.surface();
  const auto [wu, wv] = surface.wrap(u, v);
  const SurfaceJet jet = surface.jet(wu, wv);
  const MetricSample m = metric_at(surface, wu, wv);
  const CurvatureSample c = curvature_at(surface, wu, wv);
  const Mat2& W = c.weingarten;
  const Vec2 comps = tangent_.chart_components(wu, wv);
  const double root = std::sqrt(m.det_g);
  const double tr = W.trace();
  const double det = W.determinant();
  const Vec3 nu_u = -(W(0, 0) * jet.pu + W(1, 0) * jet.pv);
  const Vec3 nu_v = -(W(0, 1) * jet.pu + W(1, 1) * jet.pv);

  out.clear();
  out.reserve(s.size());
  for (const double si : s) {
    TubeSample ts;
    ts.area_density = root;
    ts.jacobian = 1.0 - si * tr + si * si * det;
    const double eta = eta_.value(si);
    if (eta == 0.0) {
      ts.velocity = Vec3::Zero();
    } else if (mode_ == ExtensionMode::product) {
      ts.velocity = eta * (comps.x() * jet.pu + comps.y() * jet.pv);
    } else {
      const Vec3 phi_u = jet.pu + si * nu_u;
      const Vec3 phi_v = jet.pv + si * nu_v;
      ts.velocity = (eta / ts.jacobian) * (comps.x() * phi_u + comps.y() * phi_v);
    }
    out.push_back(ts);
  }
}

Vec3 AmbientField::value(const Vec3& x) const {
  const EmbeddedSurface::Projection p =
      chart_.surface().project(x, support_halfwidth());
  if (!p.ok) return Vec3::Zero();
  return value_at_chart(p.u, p.v, p.s);
}

double AmbientField::divergence_fd(const Vec3& x, double h) const {
  double acc = 0.0;
  for (int axis = 0; axis < 3; ++axis) {
    Vec3 xp = x, xm = x;
    xp[axis] += h;
    xm[axis] -= h;
    acc += (value(xp)[axis] - value(xm)[axis]) / (2.0 * h);
  }
  return acc;
}

Mat3 AmbientField::jacobian_fd(const Vec3& x, double h) const {
  Mat3 out;
  for (int axis = 0; axis < 3; ++axis) {
    Vec3 xp = x, xm = x;
    xp[axis] += h;
    xm[axis] -= h;
    out.col(axis) = (value(xp) - value(xm)) / (2.0 * h);
  }
  return out;
}

AmbientField extend_field(const TangentField& tangent, const TubularChart& chart,
                          const CutoffProfile& eta, ExtensionMode mode,
                          std::optional<double> required_divergence_tol) {
  if (mode == ExtensionMode::product && required_divergence_tol) {
    const double kappa = chart.surface().kappa_max();
    if (kappa > 0.0) {
      // The product transport leaves a divergence defect of order
      // delta * kappa * speed on curved surfaces; 0.01 of that product is a
      // deliberately loose floor no finite-difference measurement undercuts.
      const double floor =
          0.01 * eta.delta * kappa * std::max(tangent.plateau_speed(), 1.0);
      if (*required_divergence_tol < floor) {
        std::ostringstream msg;
        msg << "extend_field: product mode cannot reach divergence tolerance "
            << *required_divergence_tol << " on a curved surface (defect floor "
            << floor << "); use the jacobian_corrected mode";
        throw PreconditionError(msg.str());
      }
    }
  }
  return AmbientField(tangent, chart, eta, mode);
}

}  // namespace stirlab
