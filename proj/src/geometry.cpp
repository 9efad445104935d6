#include "stirlab/geometry.hpp"

#include "stirlab/parallel.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace stirlab {

namespace {

constexpr double kPi = std::numbers::pi;

double floor_mod(double x, double period) {
  double t = std::fmod(x, period);
  if (t < 0.0) t += period;
  return t;
}

std::string node_label(double u, double v) {
  std::ostringstream os;
  os << "(u=" << u << ", v=" << v << ")";
  return os.str();
}

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on the
// recurrence.  Deterministic and accurate to machine precision for the
// small orders used here.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 64; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = x;
    weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

}  // namespace

// ============================================================================
// ChartDomain
// ============================================================================

bool ChartDomain::contains(double u, double v, double slack) const {
  const bool in_u = periodic_u || (u >= u0 - slack && u <= u1 + slack);
  const bool in_v = periodic_v || (v >= v0 - slack && v <= v1 + slack);
  return in_u && in_v;
}

// ============================================================================
// EmbeddedSurface factories
// ============================================================================

EmbeddedSurface EmbeddedSurface::torus(double major_radius, double minor_radius) {
  if (!(minor_radius > 0.0) || !(major_radius > minor_radius)) {
    throw PreconditionError("torus requires major_radius > minor_radius > 0");
  }
  EmbeddedSurface s;
  s.kind_ = Kind::torus;
  s.pa_ = major_radius;
  s.pb_ = minor_radius;
  s.domain_ = ChartDomain{-kPi, kPi, -kPi, kPi, true, true};
  s.kappa_max_ = std::max(1.0 / minor_radius, 1.0 / (major_radius - minor_radius));
  std::ostringstream os;
  os << "torus_revolution(A=" << major_radius << ", a=" << minor_radius << ")";
  s.description_ = os.str();
  return s;
}

EmbeddedSurface EmbeddedSurface::flat_strip(double width, double height) {
  if (!(width > 0.0) || !(height > 0.0)) {
    throw PreconditionError("flat_strip requires positive width and height");
  }
  EmbeddedSurface s;
  s.kind_ = Kind::flat_strip;
  s.pa_ = width;
  s.pb_ = height;
  s.domain_ = ChartDomain{0.0, width, 0.0, height, false, false};
  s.kappa_max_ = 0.0;
  std::ostringstream os;
  os << "flat_strip(" << width << " x " << height << ")";
  s.description_ = os.str();
  return s;
}

EmbeddedSurface EmbeddedSurface::flat_annulus(double r0, double r1) {
  if (!(r0 > 0.0) || !(r1 > r0)) {
    throw PreconditionError("flat_annulus requires 0 < r0 < r1");
  }
  EmbeddedSurface s;
  s.kind_ = Kind::flat_annulus;
  s.pa_ = r0;
  s.pb_ = r1;
  s.domain_ = ChartDomain{r0, r1, -kPi, kPi, false, true};
  s.kappa_max_ = 0.0;
  std::ostringstream os;
  os << "flat_annulus(r0=" << r0 << ", r1=" << r1 << ")";
  s.description_ = os.str();
  return s;
}

EmbeddedSurface EmbeddedSurface::sphere(double radius) {
  if (!(radius > 0.0)) throw PreconditionError("sphere requires positive radius");
  EmbeddedSurface s;
  s.kind_ = Kind::sphere;
  s.pa_ = radius;
  s.domain_ = ChartDomain{-kPi / 2.0, kPi / 2.0, -kPi, kPi, false, true};
  s.kappa_max_ = 1.0 / radius;
  std::ostringstream os;
  os << "sphere(r=" << radius << ")";
  s.description_ = os.str();
  return s;
}

EmbeddedSurface EmbeddedSurface::custom(ChartDomain domain,
                                        std::function<Vec3(double, double)> embed,
                                        double kappa_max_hint, double fd_step) {
  if (!(fd_step > 0.0)) throw PreconditionError("custom chart requires positive fd_step");
  EmbeddedSurface s;
  s.kind_ = Kind::custom;
  s.domain_ = domain;
  s.embed_fn_ = std::move(embed);
  s.kappa_max_ = kappa_max_hint;
  s.fd_step_custom_ = fd_step;
  s.description_ = "custom_chart";
  return s;
}

double EmbeddedSurface::fd_step() const {
  if (kind_ == Kind::custom) return fd_step_custom_;
  return 1e-5 * std::max(domain_.extent_u(), domain_.extent_v());
}

std::pair<double, double> EmbeddedSurface::wrap(double u, double v) const {
  double uw = u, vw = v;
  if (domain_.periodic_u) uw = domain_.u0 + floor_mod(u - domain_.u0, domain_.extent_u());
  if (domain_.periodic_v) vw = domain_.v0 + floor_mod(v - domain_.v0, domain_.extent_v());
  return {uw, vw};
}

Vec3 EmbeddedSurface::embed(double u, double v) const {
  switch (kind_) {
    case Kind::torus: {
      const double A = pa_, a = pb_;
      const double w = A + a * std::cos(u);
      return {w * std::cos(v), w * std::sin(v), -a * std::sin(u)};
    }
    case Kind::flat_strip:
      return {u, v, 0.0};
    case Kind::flat_annulus:
      return {u * std::cos(v), u * std::sin(v), 0.0};
    case Kind::sphere: {
      const double r = pa_;
      return {r * std::cos(u) * std::cos(v), r * std::cos(u) * std::sin(v), r * std::sin(u)};
    }
    case Kind::custom:
      return embed_fn_(u, v);
  }
  return Vec3::Zero();
}

SurfaceJet EmbeddedSurface::jet(double u, double v) const {
  SurfaceJet j;
  switch (kind_) {
    case Kind::torus: {
      const double A = pa_, a = pb_;
      const double cu = std::cos(u), su = std::sin(u);
      const double cv = std::cos(v), sv = std::sin(v);
      const double w = A + a * cu;
      j.p = {w * cv, w * sv, -a * su};
      j.pu = {-a * su * cv, -a * su * sv, -a * cu};
      j.pv = {-w * sv, w * cv, 0.0};
      j.puu = {-a * cu * cv, -a * cu * sv, a * su};
      j.puv = {a * su * sv, -a * su * cv, 0.0};
      j.pvv = {-w * cv, -w * sv, 0.0};
      return j;
    }
    case Kind::flat_strip: {
      j.p = {u, v, 0.0};
      j.pu = {1.0, 0.0, 0.0};
      j.pv = {0.0, 1.0, 0.0};
      j.puu = j.puv = j.pvv = Vec3::Zero();
      return j;
    }
    case Kind::flat_annulus: {
      const double cv = std::cos(v), sv = std::sin(v);
      j.p = {u * cv, u * sv, 0.0};
      j.pu = {cv, sv, 0.0};
      j.pv = {-u * sv, u * cv, 0.0};
      j.puu = Vec3::Zero();
      j.puv = {-sv, cv, 0.0};
      j.pvv = {-u * cv, -u * sv, 0.0};
      return j;
    }
    case Kind::sphere: {
      const double r = pa_;
      const double cu = std::cos(u), su = std::sin(u);
      const double cv = std::cos(v), sv = std::sin(v);
      j.p = {r * cu * cv, r * cu * sv, r * su};
      j.pu = {-r * su * cv, -r * su * sv, r * cu};
      j.pv = {-r * cu * sv, r * cu * cv, 0.0};
      j.puu = {-r * cu * cv, -r * cu * sv, -r * su};
      j.puv = {r * su * sv, -r * su * cv, 0.0};
      j.pvv = {-r * cu * cv, -r * cu * sv, 0.0};
      return j;
    }
    case Kind::custom:
      return jet_finite_difference(u, v, fd_step_custom_);
  }
  return j;
}

SurfaceJet EmbeddedSurface::jet_finite_difference(double u, double v, double h) const {
  SurfaceJet j;
  const Vec3 pc = embed(u, v);
  const Vec3 pup = embed(u + h, v), pum = embed(u - h, v);
  const Vec3 pvp = embed(u, v + h), pvm = embed(u, v - h);
  const Vec3 ppp = embed(u + h, v + h), ppm = embed(u + h, v - h);
  const Vec3 pmp = embed(u - h, v + h), pmm = embed(u - h, v - h);
  j.p = pc;
  j.pu = (pup - pum) / (2.0 * h);
  j.pv = (pvp - pvm) / (2.0 * h);
  j.puu = (pup - 2.0 * pc + pum) / (h * h);
  j.pvv = (pvp - 2.0 * pc + pvm) / (h * h);
  j.puv = (ppp - ppm - pmp + pmm) / (4.0 * h * h);
  return j;
}

EmbeddedSurface::Projection EmbeddedSurface::project(const Vec3& x, double max_normal_dist) const {
  Projection out;
  switch (kind_) {
    case Kind::torus: {
      const double A = pa_, a = pb_;
      const double rho = std::hypot(x.x(), x.y());
      const double d = rho - A;
      const double rc = std::hypot(d, x.z());
      out.s = rc - a;
      if (std::abs(out.s) > max_normal_dist) return out;
      out.u = std::atan2(-x.z(), d);
      out.v = std::atan2(x.y(), x.x());
      out.ok = true;
      return out;
    }
    case Kind::flat_strip: {
      out.u = x.x();
      out.v = x.y();
      out.s = x.z();
      out.ok = std::abs(out.s) <= max_normal_dist && domain_.contains(out.u, out.v);
      return out;
    }
    case Kind::flat_annulus: {
      out.u = std::hypot(x.x(), x.y());
      out.s = x.z();
      if (std::abs(out.s) > max_normal_dist || out.u < domain_.u0 || out.u > domain_.u1) {
        return out;
      }
      out.v = std::atan2(x.y(), x.x());
      out.ok = true;
      return out;
    }
    case Kind::sphere: {
      const double r = x.norm();
      out.s = pa_ - r;  // inward-oriented normal
      if (r < 1e-12 || std::abs(out.s) > max_normal_dist) return out;
      const double ez = std::clamp(x.z() / r, -1.0, 1.0);
      out.u = std::asin(ez);
      out.v = std::atan2(x.y(), x.x());
      out.ok = true;
      return out;
    }
    case Kind::custom:
      throw PreconditionError("custom charts do not support ambient projection");
  }
  return out;
}

// ============================================================================
// Metric and curvature
// ============================================================================

MetricSample metric_at(const EmbeddedSurface& surface, double u, double v) {
  const SurfaceJet j = surface.jet(u, v);
  MetricSample m;
  m.g(0, 0) = j.pu.dot(j.pu);
  m.g(0, 1) = j.pu.dot(j.pv);
  m.g(1, 0) = m.g(0, 1);
  m.g(1, 1) = j.pv.dot(j.pv);
  m.det_g = m.g(0, 0) * m.g(1, 1) - m.g(0, 1) * m.g(1, 0);
  if (!(m.det_g > 0.0)) {
    throw PreconditionError("non-immersion: det g <= 0 at node " + node_label(u, v));
  }
  m.g_inv(0, 0) = m.g(1, 1) / m.det_g;
  m.g_inv(1, 1) = m.g(0, 0) / m.det_g;
  m.g_inv(0, 1) = -m.g(0, 1) / m.det_g;
  m.g_inv(1, 0) = -m.g(1, 0) / m.det_g;
  const Vec3 cross = j.pu.cross(j.pv);
  const double norm = cross.norm();
  if (!(norm > 0.0)) {
    throw PreconditionError("non-immersion: vanishing normal at node " + node_label(u, v));
  }
  m.normal = cross / norm;
  return m;
}

CurvatureSample curvature_at(const EmbeddedSurface& surface, double u, double v) {
  const SurfaceJet j = surface.jet(u, v);
  const MetricSample m = metric_at(surface, u, v);
  Mat2 second;
  second(0, 0) = m.normal.dot(j.puu);
  second(0, 1) = m.normal.dot(j.puv);
  second(1, 0) = second(0, 1);
  second(1, 1) = m.normal.dot(j.pvv);
  CurvatureSample c;
  c.weingarten = m.g_inv * second;
  const double tr = c.weingarten(0, 0) + c.weingarten(1, 1);
  const double det = c.weingarten(0, 0) * c.weingarten(1, 1) -
                     c.weingarten(0, 1) * c.weingarten(1, 0);
  const double disc = std::max(tr * tr - 4.0 * det, 0.0);
  const double root = std::sqrt(disc);
  c.kappa1 = 0.5 * (tr + root);
  c.kappa2 = 0.5 * (tr - root);
  return c;
}

// ============================================================================
// TubularChart
// ============================================================================

TubularChart::TubularChart(const EmbeddedSurface& surface, double delta)
    : surface_(&surface), delta_(delta) {
  if (!(delta > 0.0)) throw PreconditionError("tube half-width delta must be positive");
  const double kmax = surface.kappa_max();
  if (kmax > 0.0 && delta > 0.1 / kmax) {
    std::ostringstream os;
    os << "tube half-width delta=" << delta << " exceeds admissible bound 0.1/kappa_max="
       << 0.1 / kmax;
    throw PreconditionError(os.str());
  }
}

Vec3 TubularChart::map(double u, double v, double s) const {
  const MetricSample m = metric_at(*surface_, u, v);
  return surface_->embed(u, v) + s * m.normal;
}

Mat3 TubularChart::frame(double u, double v, double s) const {
  const SurfaceJet j = surface_->jet(u, v);
  const MetricSample m = metric_at(*surface_, u, v);
  const CurvatureSample c = curvature_at(*surface_, u, v);
  const Vec3 nu_u = -(c.weingarten(0, 0) * j.pu + c.weingarten(1, 0) * j.pv);
  const Vec3 nu_v = -(c.weingarten(0, 1) * j.pu + c.weingarten(1, 1) * j.pv);
  Mat3 f;
  f.col(0) = j.pu + s * nu_u;
  f.col(1) = j.pv + s * nu_v;
  f.col(2) = m.normal;
  return f;
}

double TubularChart::jacobian(double u, double v, double s) const {
  const CurvatureSample c = curvature_at(*surface_, u, v);
  const double tr = c.weingarten(0, 0) + c.weingarten(1, 1);
  const double det = c.weingarten(0, 0) * c.weingarten(1, 1) -
                     c.weingarten(0, 1) * c.weingarten(1, 0);
  return 1.0 - s * tr + s * s * det;
}

TubularChart tubular_chart(const EmbeddedSurface& surface, double delta) {
  return TubularChart(surface, delta);
}

// ============================================================================
// Quadrature
// ============================================================================

double QuadratureMesh::total_weight() const { return ordered_sum(weights); }

QuadratureMesh build_quadrature(const EmbeddedSurface& surface, int nu, int nv) {
  const ChartDomain& dom = surface.domain();
  if ((dom.periodic_u && nu < 8) || (dom.periodic_v && nv < 8)) {
    throw PreconditionError("quadrature requires at least 8 nodes per periodic direction");
  }
  if (nu < 1 || nv < 1) {
    throw PreconditionError("quadrature requires at least 1 node per direction");
  }

  QuadratureMesh mesh;
  mesh.nu = nu;
  mesh.nv = nv;
  mesh.declared_order = 2;

  const double hu = dom.extent_u() / nu;
  const double hv = dom.extent_v() / nv;
  mesh.nodes_u.resize(nu);
  mesh.nodes_v.resize(nv);
  mesh.step_u_weight.assign(nu, hu);
  mesh.step_v_weight.assign(nv, hv);
  for (int i = 0; i < nu; ++i) {
    mesh.nodes_u[i] = dom.u0 + (dom.periodic_u ? i * hu : (i + 0.5) * hu);
  }
  for (int k = 0; k < nv; ++k) {
    mesh.nodes_v[k] = dom.v0 + (dom.periodic_v ? k * hv : (k + 0.5) * hv);
  }

  mesh.weights.assign(static_cast<std::size_t>(nu) * nv, 0.0);
  parallel_for(mesh.weights.size(), [&](std::size_t idx) {
    const int i = static_cast<int>(idx) / nv;
    const int k = static_cast<int>(idx) % nv;
    const MetricSample m = metric_at(surface, mesh.nodes_u[i], mesh.nodes_v[k]);
    mesh.weights[idx] = std::sqrt(m.det_g) * hu * hv;
  });
  return mesh;
}

void attach_normal_rule(QuadratureMesh& mesh, double delta, int points_per_piece) {
  if (!(delta > 0.0)) throw PreconditionError("normal rule requires positive delta");
  if (points_per_piece < 2 || points_per_piece > 64) {
    throw PreconditionError("normal rule requires 2..64 points per piece");
  }
  std::vector<double> gl_x, gl_w;
  gauss_legendre(points_per_piece, gl_x, gl_w);

  const double breaks[] = {-0.75 * delta, -0.5 * delta, 0.0, 0.5 * delta, 0.75 * delta};
  mesh.s_nodes.clear();
  mesh.s_weights.clear();
  for (int piece = 0; piece < 4; ++piece) {
    const double a = breaks[piece], b = breaks[piece + 1];
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int q = 0; q < points_per_piece; ++q) {
      mesh.s_nodes.push_back(mid + half * gl_x[q]);
      mesh.s_weights.push_back(half * gl_w[q]);
    }
  }
}

}  // namespace stirlab
