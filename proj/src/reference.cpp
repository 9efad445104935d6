#include "stirlab/reference.hpp"

#include <cmath>
#include <numbers>

namespace stirlab::reference {

namespace {

// Own copy of the quintic ramp; kept local so the oracle does not lean on
// the code it is meant to check.
double ramp(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return x * x * x * (10.0 - 15.0 * x + 6.0 * x * x);
}

constexpr int kMaxDepth = 48;
// Levels that must be subdivided before the error estimate may be trusted.
// Piecewise-polynomial integrands with breakpoints at dyadic fractions of
// the interval can alias: the five-point stencil of an early level may see
// values whose refined and coarse Simpson sums agree exactly while both are
// wrong (the quintic plateau profiles of this project do exactly that on
// symmetric intervals).  Forcing a handful of levels aligns the recursion
// cells with the breakpoints, after which each cell is a single smooth
// piece and the estimate is honest.
constexpr int kForcedLevels = 5;

double adaptive_simpson(double (*f)(double, const void*), const void* ctx, double a,
                        double b, double fa, double fm, double fb, double whole,
                        double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm, ctx);
  const double frm = f(rm, ctx);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0) throw std::runtime_error("reference integrator: recursion exhausted");
  const bool may_accept = depth <= kMaxDepth - kForcedLevels;
  if (may_accept && std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson(f, ctx, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, ctx, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

struct ProfileCtx {
  const AnnulusProfile* profile;
  double r0, r1;
  int power;  // integrand omega^(1 or 2) * r^power
};

double profile_integrand(double r, const void* vctx) {
  const ProfileCtx& c = *static_cast<const ProfileCtx*>(vctx);
  const double w = c.profile->omega(r, c.r0, c.r1);
  double value = c.power == 3 ? w * w * r * r * r : w * r;
  return value;
}

}  // namespace

double AnnulusProfile::omega(double r, double r0, double r1) const {
  if (kind == Kind::rigid) return amplitude;
  if (r <= r0 || r >= r1) return 0.0;
  const double half = 0.5 * (r1 - r0);
  const double w = half * (1.0 - plateau_fraction);
  if (w <= 0.0) return amplitude;
  if (r < r0 + w) return amplitude * ramp((r - r0) / w);
  if (r > r1 - w) return amplitude * ramp((r1 - r) / w);
  return amplitude;
}

double integrate(double (*f)(double, const void*), const void* ctx, double a, double b,
                 double tol) {
  if (b <= a) return 0.0;
  const double fa = f(a, ctx);
  const double m = 0.5 * (a + b);
  const double fm = f(m, ctx);
  const double fb = f(b, ctx);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, ctx, a, b, fa, fm, fb, whole, tol, kMaxDepth);
}

AnnulusValues annulus_values(double r0, double r1, const AnnulusProfile& profile) {
  if (!(0.0 < r0) || !(r0 < r1))
    throw std::invalid_argument("annulus_values: need 0 < r0 < r1");
  constexpr double pi = std::numbers::pi;

  AnnulusValues out;
  out.area = pi * (r1 * r1 - r0 * r0);

  if (profile.kind == AnnulusProfile::Kind::rigid) {
    const double w = profile.amplitude;
    out.action = 0.25 * pi * w * w * (std::pow(r1, 4) - std::pow(r0, 4));
    out.mass_flow = pi * w * (r1 * r1 - r0 * r0);
    return out;
  }

  ProfileCtx ctx{&profile, r0, r1, 3};
  out.action = pi * integrate(profile_integrand, &ctx, r0, r1, 1e-10);
  ctx.power = 1;
  out.mass_flow = 2.0 * pi * integrate(profile_integrand, &ctx, r0, r1, 1e-10);
  return out;
}

double annulus_angle_gradient_norm_squared(double r0, double r1) {
  return 2.0 * std::numbers::pi * std::log(r1 / r0);
}

double annulus_rigid_slack(double r0, double r1) {
  return (r1 * r1 + r0 * r0) * std::log(r1 / r0) / (r1 * r1 - r0 * r0);
}

double annulus_orbit_angle(double r, double t, double r0, double r1,
                           const AnnulusProfile& profile) {
  return profile.omega(r, r0, r1) * t;
}

}  // namespace stirlab::reference
