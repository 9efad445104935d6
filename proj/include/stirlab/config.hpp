#pragma once

#include "stirlab/energy.hpp"
#include "stirlab/fields.hpp"

#include <cstdint>
#include <string>

namespace stirlab {

/// One fully specified run: surface, stirrer, tube, dynamics, schedule,
/// resolutions and tolerances.  Serializes to a canonical key=value text
/// whose parse -> serialize -> parse round trip is the identity.
struct Scenario {
  // Surface: torus_revolution (a = major, b = minor), flat_annulus
  // (a = inner radius, b = outer), flat_strip (a = width, b = height).
  std::string surface = "torus_revolution";
  double surface_a = 2.0;
  double surface_b = 1.0;

  // Stirring band in the u coordinate.
  double band_lo = -1.2;
  double band_hi = 1.2;
  double plateau_fraction = 0.5;
  double base_speed = 1.0;
  int turns = 3;

  // Tubular extension.
  double delta = 0.1;
  std::string extension = "jacobian_corrected";  // or "product"

  // Dynamics.
  double time = 1.0;
  int steps = 0;  // 0: choose 512 * max(1, turns) automatically

  // Block schedule.
  int schedule_count = 16;
  double rho0 = 0.125;
  double decay = 0.25;
  double target_scale = 1.0;  // per-block target = target_scale / j
  std::string scaling = "kinematic";  // or "jacobian_squared"

  // Resolution and sampling.
  int mesh_u = 128;
  int mesh_v = 128;
  int samples = 10000;
  std::uint64_t seed = 20260821;

  // Tolerances.
  double tol_divergence = 1e-5;
  double tol_duality = 1e-4;

  std::string output_dir = ".";
};

/// Parses the canonical key=value format.  Lines are `key = value`, blank,
/// or `#` comments.  Unknown keys, duplicate keys and malformed values are
/// precondition errors that name the offending line.
Scenario parse_scenario(const std::string& text);

/// Canonical serialization: fixed key order, %.17g numbers (so values
/// survive the round trip bit-for-bit).
std::string serialize_scenario(const Scenario& s);

Scenario load_scenario(const std::string& path);

/// Cross-field validation; throws PreconditionError naming the violated
/// requirement.  Implicit surface descriptions are rejected here with a
/// pointer to the supported parametric kinds.
void validate(const Scenario& s);

// Builders from a validated scenario.
EmbeddedSurface build_surface(const Scenario& s);
BandProfile build_band(const Scenario& s);
TangentField build_field(const Scenario& s, const EmbeddedSurface& surface);
ExtensionMode parse_extension_mode(const std::string& name);
ScalingMode parse_scaling_mode(const std::string& name);

/// steps when positive, otherwise 512 * max(1, turns).
int effective_steps(const Scenario& s);

}  // namespace stirlab
