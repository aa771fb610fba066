#include "beamid/objective.hpp"

#include "beamid/errors.hpp"

#include <cmath>

namespace beamid {

MeasurementSeries apply_io_operators(const BeamSystem& system, const LoadField& load) {
  return solve_forward(system, load).outputs;
}

double ObjectiveEvaluation::discrepancy() const { return std::sqrt(2 * value); }

ObjectiveEvaluation objective_from_outputs(const SpaceTimeGrid& grid,
                                           const MeasurementSeries& outputs,
                                           const MeasurementSeries& measurements) {
  measurements.check(grid);
  ObjectiveEvaluation e;
  e.residual0 = outputs.theta0 - measurements.theta0;
  e.residualL = outputs.thetaL - measurements.thetaL;
  e.misfit0 = 0.5 * time_inner(grid, e.residual0, e.residual0);
  e.misfitL = 0.5 * time_inner(grid, e.residualL, e.residualL);
  e.value = e.misfit0 + e.misfitL;
  return e;
}

ObjectiveEvaluation evaluate_objective(const BeamSystem& system, const LoadField& load,
                                       const MeasurementSeries& measurements) {
  return objective_from_outputs(system.grid(), apply_io_operators(system, load), measurements);
}

DualityCheck duality_residual(const BeamSystem& system, const LoadField& load_increment,
                              const Eigen::VectorXd& p, const Eigen::VectorXd& q,
                              const AdjointOptions& options) {
  const auto& g = system.grid();
  const auto du = solve_forward(system, load_increment);
  const auto phi = solve_adjoint(system, p, q, options);

  DualityCheck d;
  d.boundary_side = time_inner(g, p, du.outputs.theta0) + time_inner(g, q, du.outputs.thetaL);
  d.volume_side = load_pairing(system, load_increment, phi.phi);
  d.residual = std::abs(d.boundary_side - d.volume_side) / (std::abs(d.volume_side) + kResidualFloor);
  return d;
}

GradientField compute_gradient(const BeamSystem& system, const LoadField& load,
                               const MeasurementSeries& measurements,
                               const AdjointOptions& options) {
  if (measurements.smoothness != Smoothness::H1Smoothed)
    warn("gradient computed from raw measurements; the adjoint data need H1 regularity and the "
         "gradient may be polluted by noise");
  return gradient_from_residuals(system, evaluate_objective(system, load, measurements), options);
}

GradientField gradient_from_residuals(const BeamSystem& system, ObjectiveEvaluation objective,
                                      const AdjointOptions& options) {
  const auto phi = solve_adjoint(system, objective.residual0, objective.residualL, options);
  LoadField values(system.grid(), phi.nodal_values());
  const double norm = l2_norm_spacetime(values);
  return GradientField{std::move(values), norm, std::move(objective), phi.phi};
}

double GradientField::directional(const BeamSystem& system, const LoadField& direction) const {
  return load_pairing(system, direction, dofs);
}

double load_pairing(const BeamSystem& system, const LoadField& load, const Eigen::MatrixXd& dof_field) {
  const auto& g = system.grid();
  if (!(load.grid() == g)) throw DimensionError("load and system grids differ");
  if (dof_field.rows() != system.dofs().size() || dof_field.cols() != g.n_times())
    throw DimensionError("DOF field does not match the system");
  const Eigen::MatrixXd f = load_history(load, system.dofs());
  const Eigen::VectorXd wt = g.time_weights();
  double sum = 0;
  for (int n = 0; n < g.n_times(); ++n) sum += wt(n) * f.col(n).dot(dof_field.col(n));
  return sum;
}

}  // namespace beamid
