#pragma once

#include "stirlab/energy.hpp"
#include "stirlab/fields.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace stirlab {

// ============================================================================
// Block schedule
// ============================================================================

/// One ball of the countable schedule: center (x, rho, rho) sits at distance
/// rho from the two faces meeting the packing edge, the scaled stirrer lives
/// in the concentric tube of half-width delta = 0.1 * lambda.
struct Block {
  int index = 0;  // 1-based
  Vec3 center = Vec3::Zero();
  double radius = 0.0;  // rho_j
  double lambda = 0.0;  // rho_j / (2 R): homothety ratio against the model
  double delta = 0.0;   // 0.1 * lambda, strictly below radius / 4
};

/// Geometric schedule: radii rho_j = rho0 * decay^(j-1) along one edge of
/// the unit cube, centers x_1 = (9/8) rho_1, x_{j+1} = x_j + (9/8)(rho_j +
/// rho_{j+1}).  The 9/8 gap keeps the balls strictly disjoint while the
/// centers accumulate at a boundary point of the cube.
struct BlockSchedule {
  double rho0 = 0.125;
  double decay = 0.25;
  double model_radius = 3.0;  // R: circumradius of the unscaled model block
  std::vector<Block> blocks;

  int count() const { return static_cast<int>(blocks.size()); }

  /// Limit of the centers along the edge: (9/4) * rho0 / (1 - decay).
  Vec3 accumulation_point() const;
};

/// Materializes `count` blocks.  Preconditions: 1 <= count <= 300,
/// 0 < rho0 <= 1/8, decay in [1/8, 1/2].  The returned schedule has passed
/// audit_schedule.
BlockSchedule pack_balls(int count, double rho0, double decay);

/// Exact-arithmetic audit of the stored schedule: every coordinate is a
/// dyadic rational, so pairwise disjointness, containment in the unit cube,
/// strict radius decrease and delta < radius / 4 are all decided without
/// rounding.  Throws CheckFailure naming the offending block pair or index.
void audit_schedule(const BlockSchedule& schedule);

// ============================================================================
// Turn counts and per-block lower bounds
// ============================================================================

/// Measured constants of the model block that enter every bound.
struct BlockConstants {
  double unit_energy = 0.0;   // surface kinetic energy of the one-turn stirrer
  double delta_factor = 0.1;  // tube thickness ratio of the model block
  ScalingMode mode = ScalingMode::kinematic;
  int ambient_dimension = 3;  // n
  int surface_dimension = 2;  // m
};

/// Certified lower bound for one block:
///   L = (1/2) * delta_factor^(n-m) * lambda^e * N^2 * unit_energy,
/// evaluated as coeff * (lambda^(e/2) * N)^2 so deep blocks neither
/// underflow nor overflow.
double block_lower_bound(double lambda, double turns, const BlockConstants& c);

/// The closed-form turn count ceil(j^(-1/2) * rho^(-2n) * delta^(m-n)),
/// reported alongside the target-based choice for comparison; may overflow
/// to infinity for deep blocks.
double literal_turn_formula(int j, double rho, double delta, int n, int m);

struct TurnChoice {
  double turns = 1.0;        // N(j): least integer with bound >= target
  double lower_bound = 0.0;  // L_j evaluated at that N
  double target = 0.0;
  double literal_formula = 0.0;  // the closed-form alternative, for the ledger
};

/// Least positive integer N with block_lower_bound(lambda_j, N) >= target.
/// A nonpositive target yields N = 1.  Throws PreconditionError when the
/// block is too deep for N to be representable.
TurnChoice choose_turns(const BlockSchedule& schedule, int j, double per_block_target,
                        const BlockConstants& constants);

// ============================================================================
// Glued ambient field
// ============================================================================

/// Value at x of the disjoint union of scaled stirrers: block j contributes
/// lambda_j * turns[j-1] * model((x - c_j) / lambda_j), and the supports
/// (scaled tubes inside (3/4) B_j) are pairwise disjoint, so at most one
/// block contributes.  Identically zero outside every tube.
Vec3 glued_field_value(const BlockSchedule& schedule, const AmbientField& model,
                       std::span<const double> turns, const Vec3& x);

/// True when x lies in the support tube of block j.
bool in_block_support(const BlockSchedule& schedule, int j, const AmbientField& model,
                      const Vec3& x);

/// End-to-end energy of block j: the model tube quadrature transported into
/// the ball (nodes scaled and shifted, weights times lambda^3), with the
/// integrand evaluated through glued_field_value — projection, cutoff and
/// frame included, no shortcut through the scaling law.
double audit_block_energy(const BlockSchedule& schedule, int j, const AmbientField& model,
                          double turns, const QuadratureMesh& mesh);

// ============================================================================
// Divergence certificate
// ============================================================================

struct CertificateRow {
  int index = 0;
  double radius = 0.0;
  double delta = 0.0;
  double lambda = 0.0;
  double turns = 0.0;
  double term = 0.0;         // L_j
  double partial_sum = 0.0;  // S_j
};

struct CertificateWitness {
  double bound = 0.0;        // requested B
  int k = 0;                 // minimal K with S_K >= B
  double partial_sum = 0.0;  // S_K at that K
};

struct DivergenceCertificate {
  std::string mode;
  double rho0 = 0.0;
  double decay = 0.0;
  double unit_energy = 0.0;
  int explicit_terms = 0;  // rows with explicitly evaluated turn counts
  std::vector<CertificateRow> rows;
  std::vector<CertificateWitness> witnesses;
  std::uint64_t config_hash = 0;
};

/// Builds the certificate for the per-block target 1/j: every term is
/// >= 1/j by construction, so partial sums dominate the harmonic series and
/// each requested bound B gets a finite witness K(B).  Blocks past the
/// explicitly evaluated prefix contribute exactly their target (the integer
/// ceiling overshoot is below double resolution there).  Throws CheckFailure
/// when a bound is not reached within k_max terms.
DivergenceCertificate certify_divergence(const BlockSchedule& schedule,
                                         std::span<const double> bounds,
                                         const BlockConstants& constants,
                                         int k_max = 20000);

/// Re-derives every recorded witness from the certificate's own rows and
/// scaling rule; throws CheckFailure on any mismatch.
void recheck_certificate(const DivergenceCertificate& certificate);

}  // namespace stirlab
