#pragma once

#include "beamid/adjoint_solver.hpp"
#include "beamid/forward_solver.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace beamid {

/// Phi_0(F) = u_x(0,.;F) and Phi_l(F) = u_x(l,.;F), returned as a raw series.
MeasurementSeries apply_io_operators(const BeamSystem& system, const LoadField& load);

struct ObjectiveEvaluation {
  double value = 0;            // J = 1/2 ||p||^2 + 1/2 ||q||^2
  Eigen::VectorXd residual0;   // p(t) = u_x(0,t;F) - theta_0(t)
  Eigen::VectorXd residualL;   // q(t) = u_x(l,t;F) - theta_l(t)
  double misfit0 = 0;          // 1/2 ||p||^2
  double misfitL = 0;          // 1/2 ||q||^2

  /// sqrt(2 J), the L2 norm of the residual over both channels.
  double discrepancy() const;
};

ObjectiveEvaluation objective_from_outputs(const SpaceTimeGrid& grid,
                                           const MeasurementSeries& outputs,
                                           const MeasurementSeries& measurements);

ObjectiveEvaluation evaluate_objective(const BeamSystem& system, const LoadField& load,
                                       const MeasurementSeries& measurements);

/// Both sides of the duality relation
///   int p du_x(0,t) + int q du_x(l,t) = int int dF phi
/// with du the forward response to dF and phi the backward solution for (p, q).
struct DualityCheck {
  double boundary_side = 0;
  double volume_side = 0;
  double residual = 0;  // |boundary - volume| / (|volume| + floor)
};

DualityCheck duality_residual(const BeamSystem& system, const LoadField& load_increment,
                              const Eigen::VectorXd& p, const Eigen::VectorXd& q,
                              const AdjointOptions& options = {});

/// J'(F) = phi(x,t;F) sampled at (node, time instant).
struct GradientField {
  LoadField values;
  double norm = 0;
  ObjectiveEvaluation objective;  // J at the point where the gradient was taken
  Eigen::MatrixXd dofs;           // phi as (dof, time instant), Hermite interpolant

  /// <J'(F), D>, exact in space for the piecewise-linear D and the Hermite
  /// field phi, trapezoidal in time.
  double directional(const BeamSystem& system, const LoadField& direction) const;
};

/// int_0^T int_0^l F phi dx dt, exact in space for a piecewise-linear F and a
/// Hermite field phi given by its DOFs (trapezoidal in time).
double load_pairing(const BeamSystem& system, const LoadField& load, const Eigen::MatrixXd& dof_field);

/// Adjoint solve driven by the residuals of an objective evaluation.
GradientField gradient_from_residuals(const BeamSystem& system, ObjectiveEvaluation objective,
                                      const AdjointOptions& options = {});

/// Forward solve, residuals, adjoint solve. Warns when the measurements are
/// not H1-smoothed.
GradientField compute_gradient(const BeamSystem& system, const LoadField& load,
                               const MeasurementSeries& measurements,
                               const AdjointOptions& options = {});

}  // namespace beamid
