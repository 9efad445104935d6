#include "stirlab/blocks.hpp"

#include "stirlab/parallel.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace stirlab {

namespace {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Exact dyadic value of a finite double: mantissa times a power of two.
Rational exact(double v) {
  if (v == 0.0) return Rational(0);
  if (!std::isfinite(v))
    throw PreconditionError("exact rational audit: value is not finite");
  int e = 0;
  const double m = std::frexp(v, &e);
  const auto mant = static_cast<long long>(std::ldexp(m, 53));
  const int shift = e - 53;
  if (shift >= 0) return Rational(BigInt(mant) << shift);
  return Rational(BigInt(mant), BigInt(1) << -shift);
}

Rational squared_distance(const Vec3& a, const Vec3& b) {
  Rational acc = 0;
  for (int k = 0; k < 3; ++k) {
    const Rational d = exact(a[k]) - exact(b[k]);
    acc += d * d;
  }
  return acc;
}

std::string block_label(int index) { return "block " + std::to_string(index); }

}  // namespace

Vec3 BlockSchedule::accumulation_point() const {
  return Vec3((9.0 / 4.0) * rho0 / (1.0 - decay), 0.0, 0.0);
}

BlockSchedule pack_balls(int count, double rho0, double decay) {
  if (count < 1 || count > 300)
    throw PreconditionError("pack_balls: count must lie in [1, 300]");
  if (!(rho0 > 0.0) || rho0 > 0.125)
    throw PreconditionError("pack_balls: base radius must lie in (0, 1/8]");
  if (decay < 0.125 || decay > 0.5)
    throw PreconditionError(
        "pack_balls: decay factor must lie in [1/8, 1/2] (radii must shrink "
        "geometrically)");

  BlockSchedule schedule;
  schedule.rho0 = rho0;
  schedule.decay = decay;
  schedule.blocks.reserve(count);

  double rho = rho0;
  double x = 1.125 * rho0;
  for (int j = 1; j <= count; ++j) {
    Block b;
    b.index = j;
    b.radius = rho;
    b.lambda = rho / (2.0 * schedule.model_radius);
    b.delta = 0.1 * b.lambda;
    b.center = Vec3(x, rho, rho);
    schedule.blocks.push_back(b);

    const double next = rho * decay;
    x += 1.125 * (rho + next);
    rho = next;
  }

  audit_schedule(schedule);
  return schedule;
}

void audit_schedule(const BlockSchedule& schedule) {
  if (schedule.blocks.empty())
    throw PreconditionError("audit_schedule: empty schedule");

  const Rational one = 1;
  for (std::size_t i = 0; i < schedule.blocks.size(); ++i) {
    const Block& b = schedule.blocks[i];
    if (b.index != static_cast<int>(i) + 1)
      throw CheckFailure("audit_schedule: " + block_label(b.index) +
                         " carries the wrong index");
    if (!(b.radius > 0.0))
      throw CheckFailure("audit_schedule: " + block_label(b.index) +
                         " has nonpositive radius");
    if (b.lambda != b.radius / (2.0 * schedule.model_radius))
      throw CheckFailure("audit_schedule: " + block_label(b.index) +
                         " has inconsistent homothety ratio");
    if (b.delta != 0.1 * b.lambda)
      throw CheckFailure("audit_schedule: " + block_label(b.index) +
                         " has inconsistent tube width");
    if (4 * exact(b.delta) >= exact(b.radius))
      throw CheckFailure("audit_schedule: " + block_label(b.index) +
                         " violates delta < radius / 4");
    if (i > 0 && !(b.radius < schedule.blocks[i - 1].radius))
      throw CheckFailure("audit_schedule: radii fail to decrease at " +
                         block_label(b.index));

    // Containment in the closed unit cube, exactly: the ball through
    // center (x, rho, rho) must keep x - rho >= 0 and x + rho <= 1, and the
    // transverse center coordinates must be at least rho.
    const Rational rx = exact(b.center.x());
    const Rational rr = exact(b.radius);
    if (rx - rr < 0 || rx + rr > one)
      throw CheckFailure("audit_schedule: " + block_label(b.index) +
                         " leaves the unit cube along the edge");
    if (exact(b.center.y()) < rr || exact(b.center.z()) < rr ||
        exact(b.center.y()) + rr > one || exact(b.center.z()) + rr > one)
      throw CheckFailure("audit_schedule: " + block_label(b.index) +
                         " leaves the unit cube transversally");
  }

  for (std::size_t i = 0; i < schedule.blocks.size(); ++i) {
    for (std::size_t j = i + 1; j < schedule.blocks.size(); ++j) {
      const Block& a = schedule.blocks[i];
      const Block& b = schedule.blocks[j];
      const Rational rsum = exact(a.radius) + exact(b.radius);
      if (squared_distance(a.center, b.center) <= rsum * rsum)
        throw CheckFailure("audit_schedule: blocks " + std::to_string(a.index) +
                           " and " + std::to_string(b.index) + " overlap");
    }
  }
}

// ============================================================================
// Turn counts and bounds
// ============================================================================

double block_lower_bound(double lambda, double turns, const BlockConstants& c) {
  if (!(lambda > 0.0)) throw PreconditionError("block_lower_bound: lambda must be positive");
  if (!(turns >= 1.0)) throw PreconditionError("block_lower_bound: need at least one turn");
  const double e = scaling_exponent(c.mode, c.ambient_dimension);
  const double base = 0.5 *
                      std::pow(c.delta_factor,
                               c.ambient_dimension - c.surface_dimension) *
                      c.unit_energy;
  const double half_scale = std::pow(lambda, 0.5 * e) * turns;
  return base * half_scale * half_scale;
}

double literal_turn_formula(int j, double rho, double delta, int n, int m) {
  if (j < 1 || !(rho > 0.0) || !(delta > 0.0))
    throw PreconditionError("literal_turn_formula: need j >= 1 and positive scales");
  const double value =
      std::pow(j, -0.5) * std::pow(rho, -2.0 * n) * std::pow(delta, m - n);
  return std::isfinite(value) ? std::ceil(value) : value;
}

TurnChoice choose_turns(const BlockSchedule& schedule, int j, double per_block_target,
                        const BlockConstants& constants) {
  if (j < 1 || j > schedule.count())
    throw PreconditionError("choose_turns: block index out of range");
  if (!(constants.unit_energy > 0.0))
    throw PreconditionError("choose_turns: unit energy must be measured and positive");

  const Block& block = schedule.blocks[j - 1];
  const double e = scaling_exponent(constants.mode, constants.ambient_dimension);
  const double base =
      0.5 *
      std::pow(constants.delta_factor,
               constants.ambient_dimension - constants.surface_dimension) *
      constants.unit_energy;
  const double half_scale = std::pow(block.lambda, 0.5 * e);
  if (!(half_scale > 0.0))
    throw PreconditionError("choose_turns: block too deep - homothety factor "
                            "underflows; certify it from the scaling rule instead");

  TurnChoice out;
  out.target = per_block_target;
  if (per_block_target > 0.0) {
    const double needed = std::sqrt(per_block_target / base) / half_scale;
    if (!std::isfinite(needed))
      throw PreconditionError("choose_turns: target unreachable - required turn "
                              "count overflows");
    out.turns = std::max(1.0, std::ceil(needed));
  } else {
    out.turns = 1.0;
  }
  out.lower_bound = base * (half_scale * out.turns) * (half_scale * out.turns);
  out.literal_formula =
      literal_turn_formula(j, block.radius, block.delta, constants.ambient_dimension,
                           constants.surface_dimension);
  return out;
}

// ============================================================================
// Glued field
// ============================================================================

namespace {

const Block* find_candidate(const BlockSchedule& schedule, std::size_t active,
                            const Vec3& x) {
  for (std::size_t i = 0; i < active && i < schedule.blocks.size(); ++i) {
    const Block& b = schedule.blocks[i];
    if ((x - b.center).norm() <= 0.75 * b.radius) return &b;
  }
  return nullptr;
}

}  // namespace

Vec3 glued_field_value(const BlockSchedule& schedule, const AmbientField& model,
                       std::span<const double> turns, const Vec3& x) {
  if (turns.empty()) throw PreconditionError("glued_field_value: no turn counts");
  // The scaled supports live inside the disjoint balls (3/4) B_j, so at
  // most one block can see x.
  const Block* b = find_candidate(schedule, turns.size(), x);
  if (b == nullptr) return Vec3::Zero();
  const Vec3 model_point = (x - b->center) / b->lambda;
  const Vec3 v = model.value(model_point);
  return (b->lambda * turns[b->index - 1]) * v;
}

bool in_block_support(const BlockSchedule& schedule, int j, const AmbientField& model,
                      const Vec3& x) {
  if (j < 1 || j > schedule.count())
    throw PreconditionError("in_block_support: block index out of range");
  const Block& b = schedule.blocks[j - 1];
  const Vec3 model_point = (x - b.center) / b.lambda;
  return model.chart().surface().project(model_point, model.support_halfwidth()).ok;
}

double audit_block_energy(const BlockSchedule& schedule, int j, const AmbientField& model,
                          double turns, const QuadratureMesh& mesh) {
  if (j < 1 || j > schedule.count())
    throw PreconditionError("audit_block_energy: block index out of range");
  if (mesh.s_nodes.empty())
    throw PreconditionError("audit_block_energy: mesh carries no normal rule");
  const Block& b = schedule.blocks[j - 1];
  const TubularChart& chart = model.chart();
  const std::vector<double> turn_table(static_cast<std::size_t>(j), turns);

  std::vector<double> terms(mesh.size(), 0.0);
  parallel_for(mesh.size(), [&](std::size_t i) {
    const double u = mesh.node_u(i);
    const double v = mesh.node_v(i);
    double acc = 0.0;
    for (std::size_t k = 0; k < mesh.s_nodes.size(); ++k) {
      const double s = mesh.s_nodes[k];
      const Vec3 ambient = b.center + b.lambda * chart.map(u, v, s);
      const Vec3 w = glued_field_value(schedule, model, turn_table, ambient);
      acc += mesh.s_weights[k] * chart.jacobian(u, v, s) * w.squaredNorm();
    }
    terms[i] = 0.5 * mesh.weights[i] * acc;
  });
  const double lambda3 = b.lambda * b.lambda * b.lambda;
  return lambda3 * ordered_sum(terms);
}

// ============================================================================
// Divergence certificate
// ============================================================================

namespace {

std::string canonical_config_line(const BlockSchedule& s, const BlockConstants& c,
                                  int k_max) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "mode=%s|rho0=%.17g|decay=%.17g|R=%.17g|J1=%.17g|"
                "delta_factor=%.17g|n=%d|m=%d|k_max=%d",
                to_string(c.mode), s.rho0, s.decay, s.model_radius, c.unit_energy,
                c.delta_factor, c.ambient_dimension, c.surface_dimension, k_max);
  return std::string(buf);
}

}  // namespace

DivergenceCertificate certify_divergence(const BlockSchedule& schedule,
                                         std::span<const double> bounds,
                                         const BlockConstants& constants,
                                         int k_max) {
  if (bounds.empty())
    throw PreconditionError("certify_divergence: no bounds requested");
  if (k_max < schedule.count())
    throw PreconditionError("certify_divergence: k_max below the materialized prefix");

  DivergenceCertificate cert;
  cert.mode = to_string(constants.mode);
  cert.rho0 = schedule.rho0;
  cert.decay = schedule.decay;
  cert.unit_energy = constants.unit_energy;
  cert.explicit_terms = std::min(schedule.count(), 64);
  cert.config_hash = fnv1a(canonical_config_line(schedule, constants, k_max));

  std::vector<double> pending(bounds.begin(), bounds.end());
  std::sort(pending.begin(), pending.end());

  double sum = 0.0;
  std::size_t next_bound = 0;
  for (int j = 1; j <= k_max && next_bound < pending.size(); ++j) {
    double term;
    if (j <= cert.explicit_terms) {
      const TurnChoice choice = choose_turns(schedule, j, 1.0 / j, constants);
      term = choice.lower_bound;
      const Block& b = schedule.blocks[j - 1];
      cert.rows.push_back(CertificateRow{j, b.radius, b.delta, b.lambda, choice.turns,
                                         term, 0.0});
    } else {
      // Past the explicit prefix the integer-ceiling overshoot of the turn
      // count is far below one ulp of the partial sum, so the certified
      // term is the target itself.
      term = 1.0 / j;
    }
    sum += term;
    if (j <= cert.explicit_terms) cert.rows.back().partial_sum = sum;
    while (next_bound < pending.size() && sum >= pending[next_bound]) {
      cert.witnesses.push_back(CertificateWitness{pending[next_bound], j, sum});
      ++next_bound;
    }
  }

  if (next_bound < pending.size()) {
    std::ostringstream msg;
    msg << "certify_divergence: insufficient schedule length - bound "
        << pending[next_bound] << " not reached within " << k_max << " terms";
    throw CheckFailure(msg.str());
  }
  return cert;
}

void recheck_certificate(const DivergenceCertificate& certificate) {
  if (certificate.rows.empty())
    throw CheckFailure("recheck_certificate: certificate has no rows");

  double sum = 0.0;
  int j = 0;
  std::size_t row = 0;
  std::vector<CertificateWitness> pending(certificate.witnesses);
  std::sort(pending.begin(), pending.end(),
            [](const CertificateWitness& a, const CertificateWitness& b) {
              return a.k < b.k;
            });

  const int last_k = pending.empty() ? 0 : pending.back().k;
  std::size_t next = 0;
  while (j < last_k) {
    ++j;
    double term;
    if (row < certificate.rows.size() && certificate.rows[row].index == j) {
      term = certificate.rows[row].term;
      sum += term;
      if (std::abs(certificate.rows[row].partial_sum - sum) >
          1e-12 * std::max(1.0, sum))
        throw CheckFailure("recheck_certificate: partial sum mismatch at row " +
                           std::to_string(j));
      ++row;
    } else {
      term = 1.0 / j;
      sum += term;
    }
    if (term < 0.0)
      throw CheckFailure("recheck_certificate: negative term at index " +
                         std::to_string(j));
    while (next < pending.size() && pending[next].k == j) {
      if (sum < pending[next].bound)
        throw CheckFailure("recheck_certificate: witness K=" + std::to_string(j) +
                           " fails its bound on recomputation");
      ++next;
    }
  }
  if (next != pending.size())
    throw CheckFailure("recheck_certificate: witness beyond recomputed range");
}

}  // namespace stirlab
