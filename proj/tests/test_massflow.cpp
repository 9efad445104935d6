#include "stirlab/massflow.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <string>

#include "stirlab/energy.hpp"

using namespace stirlab;

namespace {

constexpr double kPi = std::numbers::pi;

// Frozen closed forms for the annulus r in [1, 2] (see the reference suite).
constexpr double kArea = 9.42477796076938;        // 3 pi
constexpr double kGradNormSq = 4.355172180607204;  // 2 pi ln 2
constexpr double kRigidSlack = 1.1552453009332422;  // (5/3) ln 2

const EmbeddedSurface& torus() {
  static EmbeddedSurface s = EmbeddedSurface::torus(2.0, 1.0);
  return s;
}

const EmbeddedSurface& annulus() {
  static EmbeddedSurface s = EmbeddedSurface::flat_annulus(1.0, 2.0);
  return s;
}

BandProfile torus_band() { return BandProfile{-1.2, 1.2, 0.5}; }

/// Rigid rotation at the given angular rate: psi = -a u^2 / 2, V^v = a.
TangentField rigid_rotation(const EmbeddedSurface& surface, double rate = 1.0) {
  return TangentField::hamiltonian(surface, [rate](double u, double) {
    return std::array<double, 3>{-0.5 * rate * u * u, -rate * u, 0.0};
  });
}

double rel(double a, double b) { return std::abs(a / b - 1.0); }

}  // namespace

TEST_SUITE("massflow") {

TEST_CASE("the angular map winds once and verifies its declaration") {
  const CircleMap f = CircleMap::angular(annulus());
  CHECK(f.declared_winding() == 1);
  CHECK(f.measured_winding(1.5) == 1);
  f.verify_winding(1.5);
  const CircleMap g = CircleMap::angular(torus());
  CHECK(g.measured_winding(0.0) == 1);
  CHECK(g.measured_winding(2.0) == 1);  // u wraps; the loop is the same circle

  // Winding needs a closed v loop and a minimal sample count.
  const EmbeddedSurface strip = EmbeddedSurface::flat_strip(1.0, 1.0);
  const CircleMap open_map(
      strip, [](double, double v) { return std::array<double, 3>{v, 0.0, 1.0}; }, 1);
  CHECK_THROWS_AS(open_map.measured_winding(0.5), PreconditionError);
  CHECK_THROWS_AS(f.measured_winding(1.5, 8), PreconditionError);
}

TEST_CASE("winding mismatches and non-closing lifts are rejected") {
  const CircleMap doubled(
      annulus(), [](double, double v) { return std::array<double, 3>{2.0 * v, 0.0, 2.0}; },
      2);
  CHECK(doubled.measured_winding(1.5) == 2);
  doubled.verify_winding(1.5);

  const CircleMap misdeclared(
      annulus(), [](double, double v) { return std::array<double, 3>{2.0 * v, 0.0, 2.0}; },
      1);
  CHECK_THROWS_AS(misdeclared.verify_winding(1.5), CheckFailure);

  // A half-speed angle is discontinuous across the seam; the seam jump
  // cancels the climb, so the sampled loop reports winding zero and the
  // declaration of one is caught.
  const CircleMap half(
      annulus(), [](double, double v) { return std::array<double, 3>{0.5 * v, 0.0, 0.5}; },
      1);
  CHECK(half.measured_winding(1.5) == 0);
  CHECK_THROWS_AS(half.verify_winding(1.5), CheckFailure);
}

TEST_CASE("rigid annulus transport equals the area, and the zero field moves nothing") {
  const QuadratureMesh mesh = build_quadrature(annulus(), 128, 16);
  const CircleMap f = CircleMap::angular(annulus());
  const TangentField rigid = rigid_rotation(annulus());

  const MassFlowValue mf = mass_flow(rigid, f, mesh, 1.0, 64);
  // Unit angular advance at every point: the transport is the area itself.
  CHECK(rel(mf.value, kArea) < 1e-10);
  CHECK(mf.turns == 0);  // a plain Hamiltonian carries no turn label
  CHECK(mf.norm() == mf.value * mf.basis_constant);

  // The stored basis constant is the closed-form normalization.
  const double gn = gradient_norm_squared(f, mesh);
  CHECK(rel(gn, kGradNormSq) < 1e-4);
  CHECK(mf.basis_constant == basis_constant(mesh.total_weight(), gn));
  CHECK(rel(mf.basis_constant, 1.0 / std::sqrt(kArea * kGradNormSq)) < 1e-4);

  CHECK(mass_flow(TangentField::zero(annulus()), f, mesh, 1.0, 64).value == 0.0);
}

TEST_CASE("transport is linear in the turn count") {
  const QuadratureMesh mesh = build_quadrature(torus(), 64, 64);
  const CircleMap f = CircleMap::angular(torus());
  const MassFlowValue m1 =
      mass_flow(TangentField::band_stirrer(torus(), torus_band(), 1), f, mesh, 1.0, 128);
  const MassFlowValue m2 =
      mass_flow(TangentField::band_stirrer(torus(), torus_band(), 2), f, mesh, 1.0, 128);
  const MassFlowValue m4 =
      mass_flow(TangentField::band_stirrer(torus(), torus_band(), 4), f, mesh, 1.0, 256);
  CHECK(m1.value > 0.0);
  CHECK(rel(m2.value, 2.0 * m1.value) < 1e-9);
  CHECK(rel(m4.value, 4.0 * m1.value) < 1e-9);
  CHECK(m1.turns == 1);
  CHECK(m4.turns == 4);
}

TEST_CASE("concatenating half-time stirs reproduces the unit-time transport") {
  const QuadratureMesh mesh = build_quadrature(torus(), 64, 64);
  const CircleMap f = CircleMap::angular(torus());
  const TangentField stir = TangentField::band_stirrer(torus(), torus_band(), 2);
  const double half = mass_flow(stir, f, mesh, 0.5, 128).value;
  const double whole = mass_flow(stir, f, mesh, 1.0, 256).value;
  CHECK(rel(2.0 * half, whole) < 1e-12);
  // Lift already unambiguous: doubling the time grid barely moves the value.
  const double finer = mass_flow(stir, f, mesh, 1.0, 512).value;
  CHECK(rel(finer, whole) < 1e-7);
}

TEST_CASE("transport is stable under mesh refinement") {
  const CircleMap f = CircleMap::angular(torus());
  const TangentField stir = TangentField::band_stirrer(torus(), torus_band(), 2);
  const double coarse =
      mass_flow(stir, f, build_quadrature(torus(), 64, 64), 1.0, 128).value;
  const double fine =
      mass_flow(stir, f, build_quadrature(torus(), 128, 128), 1.0, 128).value;
  // The lift profile is C^2 across the band edges, so the periodic rule
  // converges at roughly third order: the doubling residue sits near 3e-5.
  CHECK(rel(coarse, fine) < 1e-4);
}

TEST_CASE("static flux pairing is dual to the dynamic transport") {
  const QuadratureMesh amesh = build_quadrature(annulus(), 128, 16);
  const CircleMap af = CircleMap::angular(annulus());
  const TangentField rigid = rigid_rotation(annulus());
  const double flux = flux_pairing(rigid, af, amesh);
  CHECK(rel(flux, kArea) < 1e-10);
  CHECK(rel(flux, mass_flow(rigid, af, amesh, 1.0, 64).value) < 1e-5);

  const QuadratureMesh tmesh = build_quadrature(torus(), 64, 64);
  const CircleMap tf = CircleMap::angular(torus());
  const TangentField stir = TangentField::band_stirrer(torus(), torus_band(), 2);
  CHECK(rel(flux_pairing(stir, tf, tmesh), mass_flow(stir, tf, tmesh, 1.0, 256).value) <
        1e-4);

  // A constant map pairs to zero with every field.
  const CircleMap constant(
      torus(), [](double, double) { return std::array<double, 3>{0.3, 0.0, 0.0}; }, 0);
  CHECK(flux_pairing(stir, constant, tmesh) == 0.0);

  // Time scales the pairing linearly.
  CHECK(flux_pairing(rigid, af, amesh, 2.5) == doctest::Approx(2.5 * flux).epsilon(1e-14));
}

TEST_CASE("per-step jumps at the pi boundary demand a finer grid") {
  const QuadratureMesh mesh = build_quadrature(annulus(), 16, 16);
  const CircleMap f = CircleMap::angular(annulus());
  // Angular rate 64 pi: at 64 unit-time steps every jump is exactly pi, the
  // first advance at which the principal-value lift turns ambiguous.
  const TangentField fast = rigid_rotation(annulus(), 64.0 * kPi);
  try {
    mass_flow(fast, f, mesh, 1.0, 64);
    FAIL("expected a lift-safety failure");
  } catch (const CheckFailure& e) {
    CHECK(std::string(e.what()).find("refine the time grid") != std::string::npos);
  }
  // Twice the resolution makes the advance pi/2 and the lift unambiguous.
  const MassFlowValue ok = mass_flow(fast, f, mesh, 1.0, 128);
  CHECK(rel(ok.value, 64.0 * kPi * kArea) < 1e-9);

  CHECK_THROWS_AS(mass_flow(fast, f, mesh, 1.0, 0), PreconditionError);
  CHECK_THROWS_AS(
      mass_flow(TangentField::zero(torus()), f, mesh, 1.0, 64), PreconditionError);
}

TEST_CASE("jensen chain closes on the rigid annulus with the closed-form slack") {
  const QuadratureMesh mesh = build_quadrature(annulus(), 128, 16);
  const CircleMap f = CircleMap::angular(annulus());
  const TangentField rigid = rigid_rotation(annulus());
  const double action = kinetic_energy(rigid, mesh);
  const MassFlowValue mf = mass_flow(rigid, f, mesh, 1.0, 64);
  const JensenChain chain = jensen_chain(action, mf.norm(), mesh.total_weight());
  CHECK(chain.pass);
  CHECK(rel(chain.slack, kRigidSlack) < 1e-4);
  CHECK(chain.lower_bound == doctest::Approx(action / chain.slack).epsilon(1e-12));

  // The slack is a quadrature-converged quantity: refining the mesh moves it
  // by well under a percent.
  const QuadratureMesh fine = build_quadrature(annulus(), 256, 16);
  const double fine_action = kinetic_energy(rigid, fine);
  const MassFlowValue fine_mf = mass_flow(rigid, f, fine, 1.0, 64);
  const JensenChain fine_chain =
      jensen_chain(fine_action, fine_mf.norm(), fine.total_weight());
  CHECK(std::abs(chain.slack / fine_chain.slack - 1.0) < 0.01);
}

TEST_CASE("slack is invariant under the turn count") {
  const QuadratureMesh mesh = build_quadrature(torus(), 64, 64);
  const CircleMap f = CircleMap::angular(torus());
  const TangentField s1 = TangentField::band_stirrer(torus(), torus_band(), 1);
  const TangentField s4 = TangentField::band_stirrer(torus(), torus_band(), 4);
  const JensenChain c1 = jensen_chain(kinetic_energy(s1, mesh),
                                      mass_flow(s1, f, mesh, 1.0, 128).norm(),
                                      mesh.total_weight());
  const JensenChain c4 = jensen_chain(kinetic_energy(s4, mesh),
                                      mass_flow(s4, f, mesh, 1.0, 256).norm(),
                                      mesh.total_weight());
  CHECK(c1.pass);
  CHECK(c4.pass);
  CHECK(rel(c1.slack, c4.slack) < 1e-6);
}

TEST_CASE("jensen chain edge cases") {
  const JensenChain zero = jensen_chain(0.0, 0.0, kArea);
  CHECK(zero.pass);
  CHECK(zero.slack == 1.0);
  CHECK(zero.lower_bound == 0.0);

  // An action below the bound fails with slack under one.
  const JensenChain failing = jensen_chain(1.0, 10.0, kArea);
  CHECK_FALSE(failing.pass);
  CHECK(failing.slack < 1.0);

  CHECK_THROWS_AS(jensen_chain(1.0, 1.0, 0.0), PreconditionError);
  CHECK_THROWS_AS(basis_constant(0.0, 1.0), PreconditionError);
  CHECK_THROWS_AS(basis_constant(1.0, -2.0), PreconditionError);
}

TEST_CASE("quadratic bound holds across the turn family") {
  const QuadratureMesh mesh = build_quadrature(torus(), 64, 64);
  const CircleMap f = CircleMap::angular(torus());
  const double j1 =
      kinetic_energy(TangentField::band_stirrer(torus(), torus_band(), 1), mesh);
  for (int n : {1, 2, 4, 8}) {
    const TangentField stir = TangentField::band_stirrer(torus(), torus_band(), n);
    const double action = kinetic_energy(stir, mesh);
    // J(N)/N^2 is one constant for the whole family.
    CHECK(rel(action / (n * n), j1) < 1e-12);
    const MassFlowValue mf = mass_flow(stir, f, mesh, 1.0, 128 * n);
    const JensenChain chain = jensen_chain(action, mf.norm(), mesh.total_weight());
    CHECK(chain.pass);
  }
}

}  // TEST_SUITE
