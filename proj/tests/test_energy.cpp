#include "stirlab/energy.hpp"

#include <doctest.h>

#include <cmath>

#include "stirlab/reference.hpp"

using namespace stirlab;

namespace {

// Closed-form targets for the annulus r in [1, 2], frozen from the
// self-contained oracle (reference suite pins the rigid values; the bump
// value is the oracle's adaptive quadrature at tolerance 1e-10).
constexpr double kRigidAction = 11.780972450961723;  // 15 pi / 4
constexpr double kBumpAction = 7.7902808213962862;

const EmbeddedSurface& torus() {
  static EmbeddedSurface s = EmbeddedSurface::torus(2.0, 1.0);
  return s;
}

const EmbeddedSurface& annulus() {
  static EmbeddedSurface s = EmbeddedSurface::flat_annulus(1.0, 2.0);
  return s;
}

const EmbeddedSurface& wide_annulus() {
  static EmbeddedSurface s = EmbeddedSurface::flat_annulus(0.9, 2.1);
  return s;
}

BandProfile torus_band() { return BandProfile{-1.2, 1.2, 0.5}; }

/// Unit-rate rigid rotation: psi = -u^2/2, so V^v = 1 and |V| = r.
TangentField rigid_rotation(const EmbeddedSurface& surface) {
  return TangentField::hamiltonian(surface, [](double u, double) {
    return std::array<double, 3>{-0.5 * u * u, -u, 0.0};
  });
}

AmbientField make_extension(const EmbeddedSurface& surface, const TangentField& field,
                            double delta) {
  const TubularChart chart = tubular_chart(surface, delta);
  return extend_field(field, chart, CutoffProfile{delta},
                      ExtensionMode::jacobian_corrected);
}

QuadratureMesh tube_mesh(const EmbeddedSurface& surface, int nu, int nv, double delta) {
  QuadratureMesh mesh = build_quadrature(surface, nu, nv);
  attach_normal_rule(mesh, delta);
  return mesh;
}

double rel(double a, double b) { return std::abs(a / b - 1.0); }

}  // namespace

TEST_SUITE("energy") {

TEST_CASE("rigid annulus energy matches the closed form and its error estimate") {
  const TangentField rigid = rigid_rotation(annulus());
  const EnergyReport report = kinetic_energy_report(rigid, 256, 16);
  // Midpoint rule in r at 256 nodes: relative error around 1.5e-6.
  CHECK(rel(report.value, kRigidAction) < 1e-5);
  // Order-2 consistency: the half-resolution difference bounds the error.
  CHECK(std::abs(report.value - kRigidAction) <= report.refinement_error);
  CHECK(report.refinement_error < 1e-3);
  CHECK(report.resolution_u == 256);
  CHECK(report.resolution_v == 16);
  CHECK(!report.domain.empty());
}

TEST_CASE("zero field carries zero energy exactly") {
  const QuadratureMesh mesh = build_quadrature(torus(), 32, 32);
  CHECK(kinetic_energy(TangentField::zero(torus()), mesh) == 0.0);
  CHECK(l2_norm_squared(TangentField::zero(torus()), mesh) == 0.0);
}

TEST_CASE("energy scales exactly with the square of the turn count") {
  const QuadratureMesh mesh = build_quadrature(torus(), 64, 64);
  const double j1 = kinetic_energy(TangentField::band_stirrer(torus(), torus_band(), 1), mesh);
  const double j2 = kinetic_energy(TangentField::band_stirrer(torus(), torus_band(), 2), mesh);
  const double j3 = kinetic_energy(TangentField::band_stirrer(torus(), torus_band(), 3), mesh);
  CHECK(j1 > 0.0);
  // Doubling the turns scales every velocity by an exact power of two, so the
  // quadrature sum quadruples bit for bit.
  CHECK(j2 == 4.0 * j1);
  CHECK(rel(j3, 9.0 * j1) < 1e-12);
}

TEST_CASE("the squared norm is twice the kinetic energy") {
  const QuadratureMesh mesh = build_quadrature(annulus(), 64, 16);
  const TangentField rigid = rigid_rotation(annulus());
  CHECK(l2_norm_squared(rigid, mesh) == 2.0 * kinetic_energy(rigid, mesh));
}

TEST_CASE("bump stirrer energy agrees with the oracle and refines cleanly") {
  // The band [1, 2] sits strictly inside the chart, so the chart integral
  // equals the oracle's band integral.
  const TangentField bump =
      TangentField::band_stirrer(wide_annulus(), BandProfile{1.0, 2.0, 0.5}, 1);
  const EnergyReport coarse = kinetic_energy_report(bump, 256, 16);
  const EnergyReport fine = kinetic_energy_report(bump, 512, 16);
  CHECK(rel(fine.value, kBumpAction) < 1e-2);
  CHECK(std::abs(fine.value - kBumpAction) <= 2.0 * fine.refinement_error + 1e-9);
  // The integrand vanishes to high order at the chart ends, which cancels the
  // midpoint rule's boundary term: convergence beats the declared order two
  // (observed near four).  Demand at least the declared order and keep an
  // upper sanity cap so the estimate stays above rounding noise.
  CHECK(coarse.refinement_error / fine.refinement_error > 3.5);
  CHECK(coarse.refinement_error / fine.refinement_error < 40.0);
}

TEST_CASE("flat tube energy is the squared-cutoff multiple of the surface energy") {
  const double delta = 0.1;
  const TangentField rigid = rigid_rotation(annulus());
  const AmbientField ext = make_extension(annulus(), rigid, delta);
  const QuadratureMesh mesh = tube_mesh(annulus(), 128, 16, delta);
  const TubularComparison cmp = tubular_energy_check(ext, mesh);
  // On a flat surface the normal offset is an isometry and the extension
  // factorizes, so the ratio is the cutoff integral exactly; the aligned
  // Gauss rule integrates the piecewise-polynomial cutoff without error.
  CHECK(rel(cmp.ratio, cmp.flat_ratio) < 1e-10);
  CHECK(cmp.flat_ratio == doctest::Approx(delta * 1105.0 / 924.0).epsilon(1e-15));
  CHECK(cmp.curvature_margin == 0.0);
  CHECK(cmp.tube_energy >= 0.5 * delta * cmp.surface_energy);
}

TEST_CASE("curved tube energy stays within the curvature envelope") {
  const double delta = 0.1;
  const TangentField stir = TangentField::band_stirrer(torus(), torus_band(), 2);
  const AmbientField ext = make_extension(torus(), stir, delta);
  const QuadratureMesh mesh = tube_mesh(torus(), 128, 128, delta);
  const TubularComparison cmp = tubular_energy_check(ext, mesh);
  CHECK(std::abs(cmp.ratio / cmp.flat_ratio - 1.0) <= cmp.curvature_margin);
  CHECK(cmp.curvature_margin == doctest::Approx(3.0 * delta * 1.0).epsilon(1e-12));
  CHECK(cmp.tube_energy >= 0.5 * delta * cmp.surface_energy);
}

TEST_CASE("time averaging reproduces the autonomous tube energy") {
  const double delta = 0.1;
  const TangentField stir = TangentField::band_stirrer(torus(), torus_band(), 1);
  const AmbientField ext = make_extension(torus(), stir, delta);
  const QuadratureMesh mesh = tube_mesh(torus(), 48, 48, delta);
  const double autonomous = tube_energy(ext, mesh);

  // A forward-then-reversed protocol has the same speed at every instant, so
  // its action per unit time equals the autonomous tube energy even though
  // the net displacement cancels.
  const TimeDependentVelocity reversing = [&ext](const Vec3& x, double t) -> Vec3 {
    return t < 0.5 ? ext.value(x) : Vec3(-ext.value(x));
  };
  const double averaged =
      average_tube_energy(reversing, ext.chart(), mesh, 0.0, 1.0, 4);
  CHECK(rel(averaged, autonomous) < 1e-9);

  const TimeDependentVelocity frozen = [&ext](const Vec3& x, double) -> Vec3 {
    return ext.value(x);
  };
  CHECK(rel(average_tube_energy(frozen, ext.chart(), mesh, 0.0, 2.0, 1), autonomous) <
        1e-9);
}

TEST_CASE("tube integrals demand a normal rule and a sane time grid") {
  const double delta = 0.1;
  const TangentField stir = TangentField::band_stirrer(torus(), torus_band(), 1);
  const AmbientField ext = make_extension(torus(), stir, delta);
  const QuadratureMesh bare = build_quadrature(torus(), 32, 32);
  CHECK_THROWS_AS(tube_energy(ext, bare), PreconditionError);
  const TimeDependentVelocity frozen = [&ext](const Vec3& x, double) -> Vec3 {
    return ext.value(x);
  };
  CHECK_THROWS_AS(average_tube_energy(frozen, ext.chart(), bare, 0.0, 1.0, 2),
                  PreconditionError);
  const QuadratureMesh mesh = tube_mesh(torus(), 32, 32, delta);
  CHECK_THROWS_AS(average_tube_energy(frozen, ext.chart(), mesh, 0.0, 1.0, 0),
                  PreconditionError);
  CHECK_THROWS_AS(average_tube_energy(frozen, ext.chart(), mesh, 1.0, 1.0, 2),
                  PreconditionError);
}

TEST_CASE("homothety rescaling follows the declared exponents") {
  CHECK(scaling_exponent(ScalingMode::kinematic, 3) == 5.0);
  CHECK(scaling_exponent(ScalingMode::jacobian_squared, 3) == 6.0);
  CHECK(scaling_exponent(ScalingMode::kinematic, 2) == 4.0);
  CHECK(scaling_exponent(ScalingMode::jacobian_squared, 2) == 4.0);
  CHECK_THROWS_AS(scaling_exponent(ScalingMode::kinematic, 0), PreconditionError);

  CHECK(scaled_energy(2.0, 0.5, 3, ScalingMode::kinematic) == 0.0625);
  CHECK(scaled_energy(2.0, 0.5, 3, ScalingMode::jacobian_squared) == 0.03125);
  // The two conventions agree exactly in dimension two.
  CHECK(scaled_energy(7.0, 0.5, 2, ScalingMode::kinematic) ==
        scaled_energy(7.0, 0.5, 2, ScalingMode::jacobian_squared));
  CHECK(scaled_energy(7.0, 1.0, 3, ScalingMode::kinematic) == 7.0);
  CHECK_THROWS_AS(scaled_energy(1.0, 0.0, 3, ScalingMode::kinematic),
                  PreconditionError);
}

TEST_CASE("scaling modes round trip through their names") {
  CHECK(scaling_mode_from_string(to_string(ScalingMode::kinematic)) ==
        ScalingMode::kinematic);
  CHECK(scaling_mode_from_string(to_string(ScalingMode::jacobian_squared)) ==
        ScalingMode::jacobian_squared);
  CHECK_THROWS_AS(scaling_mode_from_string("volumetric"), PreconditionError);
}

TEST_CASE("the report rejects resolutions too coarse to estimate refinement") {
  const TangentField rigid = rigid_rotation(annulus());
  CHECK_THROWS_AS(kinetic_energy_report(rigid, 8, 16), PreconditionError);
  CHECK_THROWS_AS(kinetic_energy_report(rigid, 256, 8), PreconditionError);
}

TEST_CASE("oracle cross-check: rigid tube energy against the flat closed form") {
  // Independent path to the same number: (cutoff integral) x (oracle action).
  const double delta = 0.1;
  const TangentField rigid = rigid_rotation(annulus());
  const AmbientField ext = make_extension(annulus(), rigid, delta);
  const QuadratureMesh mesh = tube_mesh(annulus(), 256, 16, delta);
  const double tube = tube_energy(ext, mesh);
  const double predicted =
      delta * (1105.0 / 924.0) *
      reference::annulus_values(1.0, 2.0, reference::AnnulusProfile{}).action;
  CHECK(rel(tube, predicted) < 1e-5);
}

}  // TEST_SUITE
