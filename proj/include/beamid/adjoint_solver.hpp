#pragma once

#include "beamid/constants.hpp"
#include "beamid/forward_solver.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>

namespace beamid {

/// Solution of the backward problem
///   rho_A phi_tt - mu phi_t - (T_r phi_x)_x + (r phi_xx - kappa phi_xxt)_xx = 0,
///   phi(.,T) = phi_t(.,T) = 0,  phi = 0 at both ends,
///   -(r phi_xx - kappa phi_xxt)(0,t) = p(t),  (r phi_xx - kappa phi_xxt)(l,t) = q(t),
/// stored in the original time t.
struct AdjointField {
  SpaceTimeGrid grid;
  DofMap dofs;
  Eigen::MatrixXd phi;      // (dof, time instant)
  Eigen::MatrixXd phi_t;    // d phi / dt
  Eigen::VectorXd p, q;
  std::optional<Eigen::VectorXd> dp, dq;  // p'(t), q'(t)

  /// phi at every (node, time instant), zero at the supports.
  Eigen::MatrixXd nodal_values() const;
};

struct AdjointOptions {
  /// Sign applied to the boundary-moment forcing. Only the verification
  /// harness flips it, as a negative control.
  double boundary_sign = 1.0;
};

/// Solves the backward problem through tau = T - t, where it becomes the
/// forward damped beam problem driven by boundary moments p~(tau) = p(T - tau),
/// q~(tau) = q(T - tau); the forward Newmark integrator is reused unchanged.
AdjointField solve_adjoint(const BeamSystem& system, const Eigen::VectorXd& p,
                           const Eigen::VectorXd& q, const AdjointOptions& options = {});

/// Same, recording derivative series for the estimate checks.
AdjointField solve_adjoint(const BeamSystem& system, const Eigen::VectorXd& p,
                           const Eigen::VectorXd& q, const Eigen::VectorXd& dp,
                           const Eigen::VectorXd& dq, const AdjointOptions& options = {});

/// The six energy bounds on phi_xx, phi_tau, phi_xxtau in terms of
/// ||p'||^2 + ||q'||^2. Throws PreconditionError without derivative series.
InequalityReport check_adjoint_estimates(const AdjointField& field, const ConstantSet& constants,
                                         const BeamSystem& system,
                                         const std::string& scenario = "");

}  // namespace beamid
