#pragma once

#include "beamid/banded.hpp"
#include "beamid/beam_model.hpp"
#include "beamid/constants.hpp"
#include "beamid/discretization.hpp"

#include <Eigen/Dense>

#include <string>

namespace beamid {

/// Newmark average-acceleration integrator (gamma = 1/2, beta = 1/4) for
///   M a + C v + K u = f(t),  u(0) = v(0) = 0,
/// with C = C_ext + K_kappa and K = K_T + K_r. The effective matrix is
/// factored once.
class NewmarkIntegrator {
 public:
  NewmarkIntegrator(const SystemMatrices& matrices, double dt);

  struct History {
    Eigen::MatrixXd displacement;  // (dof, time instant)
    Eigen::MatrixXd velocity;
  };

  /// `loads` holds one DOF load vector per time instant. Throws
  /// DivergenceError if a step produces non-finite values.
  History integrate(const Eigen::MatrixXd& loads) const;

  double dt() const { return dt_; }

 private:
  double dt_;
  SymmetricBandMatrix damping_;
  SymmetricBandMatrix stiffness_;
  BandCholesky mass_factor_;
  BandCholesky effective_factor_;
};

/// Discretized beam on a fixed grid: matrices plus factorizations, reused by
/// every forward and adjoint solve. Immutable after construction.
class BeamSystem {
 public:
  /// Throws ValidationError for inadmissible coefficients.
  BeamSystem(SpaceTimeGrid grid, CoefficientSet coeffs);

  const SpaceTimeGrid& grid() const { return grid_; }
  const CoefficientSet& coefficients() const { return coeffs_; }
  const SystemMatrices& matrices() const { return matrices_; }
  const DofMap& dofs() const { return matrices_.dofs; }
  const NewmarkIntegrator& integrator() const { return integrator_; }

 private:
  SpaceTimeGrid grid_;
  CoefficientSet coeffs_;
  SystemMatrices matrices_;
  NewmarkIntegrator integrator_;
};

struct BeamTrajectory {
  SpaceTimeGrid grid;
  DofMap dofs;
  Eigen::MatrixXd displacement;  // (dof, time instant)
  Eigen::MatrixXd velocity;
  MeasurementSeries outputs;     // u_x(0,t), u_x(l,t)
  Eigen::VectorXd slope_rate0;   // u_xt(0,t)
  Eigen::VectorXd slope_rateL;   // u_xt(l,t)

  /// Deflection at every (node, time instant), zero at the supports.
  Eigen::MatrixXd nodal_deflection() const;
};

BeamTrajectory solve_forward(const BeamSystem& system, const LoadField& load);
BeamTrajectory solve_forward(const CoefficientSet& coeffs, const LoadField& load,
                             const SpaceTimeGrid& grid);

struct EnergyAudit {
  /// int [rho_A u_t^2 + r u_xx^2 + T_r u_x^2] dx + 2 int_0^t int [mu u_t^2 + kappa u_xxt^2]
  Eigen::VectorXd lhs;
  /// 2 int_0^t int F u_t
  Eigen::VectorXd rhs;
  /// |lhs - rhs| / max(max rhs, floor)
  Eigen::VectorXd residual;

  double max_residual() const { return residual.maxCoeff(); }
};

inline constexpr double kResidualFloor = 1e-14;

/// Energy balance of a trajectory produced by solve_forward(system, load).
EnergyAudit energy_residual(const BeamTrajectory& traj, const BeamSystem& system,
                            const LoadField& load);

/// Instantaneous mechanical energy int [rho_A u_t^2 + r u_xx^2 + T_r u_x^2] dx.
Eigen::VectorXd mechanical_energy(const BeamTrajectory& traj, const BeamSystem& system);

/// The six a-priori bounds on u_t, u_xx, u_xxt and the four trace bounds on
/// u_x, u_xt at both ends.
InequalityReport check_apriori_estimates(const BeamTrajectory& traj, const LoadField& load,
                                         const ConstantSet& constants,
                                         const BeamSystem& system,
                                         const std::string& scenario = "");

/// Norms of a (dof, time) history used by the estimate checks.
struct HistoryNorms {
  double value_sup = 0, value_l2 = 0;          // ||w||^2 in L_inf(L2) / L2(L2)
  double slope_sup = 0, slope_l2 = 0;          // ||w_x||^2
  double curvature_sup = 0, curvature_l2 = 0;  // ||w_xx||^2
};

HistoryNorms history_norms(const Eigen::MatrixXd& history, const SystemMatrices& matrices,
                           const SpaceTimeGrid& grid);

}  // namespace beamid
