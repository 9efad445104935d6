#pragma once

#include "stirlab/geometry.hpp"
#include "stirlab/types.hpp"

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace stirlab {

// ============================================================================
// Scalar profiles
// ============================================================================

/// Quintic smoothstep 10x^3 - 15x^4 + 6x^5 clamped to [0, 1]; C2 at both ends.
double smoothstep_quintic(double x);
double smoothstep_quintic_derivative(double x);

/// C2 plateau bump on the band [lo, hi]: identically 1 on the central
/// plateau (plateau_fraction of the half-width on each side of the center),
/// smoothstep ramps down to 0 at the band edges, identically 0 outside.
struct BandProfile {
  double lo = 0.0;
  double hi = 1.0;
  double plateau_fraction = 0.5;

  double center() const { return 0.5 * (lo + hi); }
  double halfwidth() const { return 0.5 * (hi - lo); }
  double ramp_width() const { return halfwidth() * (1.0 - plateau_fraction); }
  double plateau_lo() const { return lo + ramp_width(); }
  double plateau_hi() const { return hi - ramp_width(); }

  double value(double c) const;
  double derivative(double c) const;
};

/// Radial cutoff for tubular extensions: 1 on [0, delta/2], strictly
/// decreasing on (delta/2, 3delta/4), 0 from 3delta/4 on; C2 throughout.
struct CutoffProfile {
  double delta = 0.1;

  double value(double s) const;       // even in s
  double derivative(double s) const;  // odd in s

  /// Closed form of the integral of value^2 over [-delta, delta]:
  /// delta * 1105 / 924, strictly between delta and 1.5 * delta.
  double squared_integral() const { return delta * (1105.0 / 924.0); }
};

/// Cutoff value eta(|s|) for tube half-width delta.
double cutoff(double s, double delta);

// ============================================================================
// Tangent fields on a surface
// ============================================================================

/// Scalar chart function with partial derivatives, (value, d/du, d/dv).
using ScalarJetFn = std::function<std::array<double, 3>(double, double)>;

/// Velocity field tangent to a surface, stored in chart components.
/// Band stirrers have V^u = 0 and V^v = turns * base_speed * profile(u):
/// the amplitude is linear in the integer turn count, the chart divergence
/// vanishes identically, and flow lines wind along the v direction.
class TangentField {
public:
  enum class Kind { zero, band_stirrer, hamiltonian, gradient, custom };

  static TangentField zero(const EmbeddedSurface& surface);
  static TangentField band_stirrer(const EmbeddedSurface& surface, BandProfile band,
                                   int turns, double base_speed = 1.0);
  /// Rotated gradient of psi with respect to the area form: divergence free.
  static TangentField hamiltonian(const EmbeddedSurface& surface, ScalarJetFn psi);
  /// Metric gradient of psi; generically not divergence free (negative control).
  static TangentField gradient(const EmbeddedSurface& surface, ScalarJetFn psi);

  const EmbeddedSurface& surface() const { return *surface_; }
  Kind kind() const { return kind_; }
  int turns() const { return turns_; }
  double base_speed() const { return base_speed_; }
  const std::optional<BandProfile>& band() const { return band_; }

  /// (V^u, V^v) at wrapped chart coordinates.
  Vec2 chart_components(double u, double v) const;

  /// V^u p_u + V^v p_v in ambient coordinates.
  Vec3 ambient(double u, double v) const;

  /// Angular advance rate along v on the plateau: turns * base_speed.
  double plateau_speed() const;

  /// Sampled sup of the ambient speed over the chart (resolution^2 samples).
  double max_ambient_speed(int resolution = 64) const;

private:
  TangentField() = default;

  const EmbeddedSurface* surface_ = nullptr;
  Kind kind_ = Kind::zero;
  int turns_ = 0;
  double base_speed_ = 1.0;
  std::optional<BandProfile> band_;
  std::function<Vec2(double, double)> eval_;  // takes wrapped coordinates
};

/// The band stirrer V_N = N * V_1 used throughout; N = 0 gives the zero field.
TangentField stirring_field(const EmbeddedSurface& surface, BandProfile band, int turns,
                            double base_speed = 1.0);

/// Central-difference evaluation of (1/sqrt g) d_i (sqrt g V^i) at (u, v).
/// h defaults to the chart finite-difference step.
double intrinsic_divergence(const TangentField& field, double u, double v, double h = 0.0);

/// Cut-chart potential of a band stirrer: psi(u) with psi' = -sqrt(det g) V^v,
/// normalized to 0 below the band.  Constant above the band; the nonzero
/// plateau-to-plateau difference is exactly the winding flux of the field.
struct StreamFunction {
  const TangentField* field = nullptr;

  double value(double u) const;
  double derivative(double u) const;
};

StreamFunction stream_function(const TangentField& field);

// ============================================================================
// Tubular extension to an ambient field
// ============================================================================

enum class ExtensionMode {
  product,             // eta(s) * V(footpoint), transported unchanged
  jacobian_corrected,  // eta(s) * DPhi(V) / det DPhi, exactly divergence free
};

const char* to_string(ExtensionMode mode);

/// Velocity and densities at one tube node, for tube quadrature.
struct TubeSample {
  Vec3 velocity;
  double jacobian = 1.0;      // offset-volume distortion at (u, v, s)
  double area_density = 0.0;  // sqrt(det g) at the footpoint
};

/// Compactly supported ambient field on the tube of half-width delta around
/// the surface; identically zero outside the 3delta/4 sub-tube.
class AmbientField {
public:
  AmbientField(TangentField tangent, TubularChart chart, CutoffProfile eta,
               ExtensionMode mode);

  const TangentField& tangent() const { return tangent_; }
  const TubularChart& chart() const { return chart_; }
  const CutoffProfile& eta() const { return eta_; }
  ExtensionMode mode() const { return mode_; }
  double support_halfwidth() const { return 0.75 * eta_.delta; }

  /// Default ambient finite-difference step, 1.5e-6 * delta: small enough
  /// that the cutoff's third derivative does not pollute divergence and
  /// Jacobian estimates, large enough to stay above rounding noise.
  double fd_step() const { return 1.5e-6 * eta_.delta; }

  Vec3 value(const Vec3& x) const;
  Vec3 value_at_chart(double u, double v, double s) const;
  TubeSample sample_chart(double u, double v, double s) const;

  /// One footpoint, many offsets: shares the surface jet across s values.
  void sample_column(double u, double v, std::span<const double> s,
                     std::vector<TubeSample>& out) const;

  /// Central-difference Euclidean divergence at x.
  double divergence_fd(const Vec3& x, double h) const;

  /// Central-difference velocity gradient (column j holds d value / d x_j).
  Mat3 jacobian_fd(const Vec3& x, double h) const;

private:
  TangentField tangent_;
  TubularChart chart_;
  CutoffProfile eta_;
  ExtensionMode mode_;
};

/// Builds the extension after validating the mode against the requested
/// divergence tolerance: the product mode carries an O(delta * kappa_max)
/// divergence defect on curved surfaces and is rejected when the caller
/// demands a tolerance below 3 * delta * kappa_max * max_speed.
AmbientField extend_field(const TangentField& tangent, const TubularChart& chart,
                          const CutoffProfile& eta, ExtensionMode mode,
                          std::optional<double> required_divergence_tol = std::nullopt);

}  // namespace stirlab
