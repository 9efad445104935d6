#include "stirlab/energy.hpp"

#include "stirlab/parallel.hpp"

#include <cmath>
#include <vector>

namespace stirlab {

double scaling_exponent(ScalingMode mode, int dimension) {
  if (dimension < 1) throw PreconditionError("scaling_exponent: dimension must be >= 1");
  return mode == ScalingMode::kinematic ? dimension + 2.0 : 2.0 * dimension;
}

const char* to_string(ScalingMode mode) {
  return mode == ScalingMode::kinematic ? "kinematic" : "jacobian_squared";
}

ScalingMode scaling_mode_from_string(const std::string& name) {
  if (name == "kinematic") return ScalingMode::kinematic;
  if (name == "jacobian_squared") return ScalingMode::jacobian_squared;
  throw PreconditionError("unknown scaling mode '" + name +
                          "' (expected kinematic or jacobian_squared)");
}

double l2_norm_squared(const TangentField& field, const QuadratureMesh& mesh) {
  std::vector<double> terms(mesh.size(), 0.0);
  parallel_for(mesh.size(), [&](std::size_t i) {
    const Vec3 v = field.ambient(mesh.node_u(i), mesh.node_v(i));
    terms[i] = mesh.weights[i] * v.squaredNorm();
  });
  return ordered_sum(terms);
}

double kinetic_energy(const TangentField& field, const QuadratureMesh& mesh) {
  return 0.5 * l2_norm_squared(field, mesh);
}

EnergyReport kinetic_energy_report(const TangentField& field, int nu, int nv) {
  if (nu < 16 || nv < 16)
    throw PreconditionError("kinetic_energy_report: need at least 16 nodes per "
                            "direction to estimate refinement error");
  const EmbeddedSurface& surface = field.surface();
  const QuadratureMesh fine = build_quadrature(surface, nu, nv);
  const QuadratureMesh coarse = build_quadrature(surface, nu / 2, nv / 2);

  EnergyReport report;
  report.value = kinetic_energy(field, fine);
  report.domain = surface.describe();
  report.resolution_u = nu;
  report.resolution_v = nv;
  report.refinement_error = std::abs(report.value - kinetic_energy(field, coarse));
  if (report.value < 0.0)
    throw CheckFailure("kinetic_energy_report: negative energy");
  return report;
}

double tube_energy(const AmbientField& field, const QuadratureMesh& mesh) {
  if (mesh.s_nodes.empty())
    throw PreconditionError("tube_energy: mesh carries no normal-direction rule");

  std::vector<double> terms(mesh.size(), 0.0);
  parallel_for(mesh.size(), [&](std::size_t i) {
    std::vector<TubeSample> column;
    field.sample_column(mesh.node_u(i), mesh.node_v(i), mesh.s_nodes, column);
    // The surface weight already carries sqrt(det g); the offset direction
    // contributes the dimensionless distortion det(I - s W).
    double acc = 0.0;
    for (std::size_t k = 0; k < column.size(); ++k)
      acc += mesh.s_weights[k] * column[k].jacobian * column[k].velocity.squaredNorm();
    terms[i] = 0.5 * mesh.weights[i] * acc;
  });
  return ordered_sum(terms);
}

double average_tube_energy(const TimeDependentVelocity& rhs, const TubularChart& chart,
                           const QuadratureMesh& mesh, double t0, double t1,
                           int time_samples) {
  if (mesh.s_nodes.empty())
    throw PreconditionError("average_tube_energy: mesh carries no normal rule");
  if (time_samples < 1 || !(t1 > t0))
    throw PreconditionError("average_tube_energy: empty time grid");

  const double dt = (t1 - t0) / time_samples;
  std::vector<double> terms(mesh.size(), 0.0);
  parallel_for(mesh.size(), [&](std::size_t i) {
    const double u = mesh.node_u(i);
    const double v = mesh.node_v(i);
    double acc = 0.0;
    for (std::size_t k = 0; k < mesh.s_nodes.size(); ++k) {
      const double s = mesh.s_nodes[k];
      const Vec3 x = chart.map(u, v, s);
      const double jac = chart.jacobian(u, v, s);
      double time_acc = 0.0;
      for (int q = 0; q < time_samples; ++q)
        time_acc += rhs(x, t0 + (q + 0.5) * dt).squaredNorm();
      acc += mesh.s_weights[k] * jac * time_acc / time_samples;
    }
    terms[i] = 0.5 * mesh.weights[i] * acc;
  });
  return ordered_sum(terms);
}

TubularComparison tubular_energy_check(const AmbientField& field,
                                       const QuadratureMesh& mesh) {
  TubularComparison out;
  out.tube_energy = tube_energy(field, mesh);
  out.surface_energy = kinetic_energy(field.tangent(), mesh);
  if (out.surface_energy <= 0.0)
    throw PreconditionError("tubular_energy_check: surface energy vanishes");
  out.ratio = out.tube_energy / out.surface_energy;
  out.flat_ratio = field.eta().squared_integral();
  out.curvature_margin =
      3.0 * field.eta().delta * field.chart().surface().kappa_max();
  return out;
}

double scaled_energy(double base_energy, double lambda, int dimension,
                     ScalingMode mode) {
  if (lambda <= 0.0) throw PreconditionError("scaled_energy: lambda must be positive");
  return base_energy * std::pow(lambda, scaling_exponent(mode, dimension));
}

}  // namespace stirlab
