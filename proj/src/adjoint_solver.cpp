#include "beamid/adjoint_solver.hpp"

#include "beamid/errors.hpp"

#include <cmath>

namespace beamid {

Eigen::MatrixXd AdjointField::nodal_values() const {
  Eigen::MatrixXd w(grid.n_nodes(), grid.n_times());
  for (int n = 0; n < grid.n_times(); ++n) w.col(n) = dofs.nodal_deflection(phi.col(n));
  return w;
}

AdjointField solve_adjoint(const BeamSystem& system, const Eigen::VectorXd& p,
                           const Eigen::VectorXd& q, const AdjointOptions& options) {
  const auto& g = system.grid();
  if (p.size() != g.n_times() || q.size() != g.n_times())
    throw DimensionError("adjoint data length does not match the time grid");
  if (!p.allFinite() || !q.allFinite()) throw InputError("adjoint data contain non-finite values");

  const Eigen::VectorXd p_rev = p.reverse();
  const Eigen::VectorXd q_rev = q.reverse();
  const auto loads = natural_bc_load(p_rev, q_rev, g, system.dofs(), options.boundary_sign);
  auto hist = system.integrator().integrate(loads);

  AdjointField field{g, system.dofs(), {}, {}, p, q, std::nullopt, std::nullopt};
  field.phi = hist.displacement.rowwise().reverse();
  // d/dt = -d/dtau
  field.phi_t = -hist.velocity.rowwise().reverse();
  return field;
}

AdjointField solve_adjoint(const BeamSystem& system, const Eigen::VectorXd& p,
                           const Eigen::VectorXd& q, const Eigen::VectorXd& dp,
                           const Eigen::VectorXd& dq, const AdjointOptions& options) {
  const auto& g = system.grid();
  if (dp.size() != g.n_times() || dq.size() != g.n_times())
    throw DimensionError("adjoint derivative data length does not match the time grid");
  auto field = solve_adjoint(system, p, q, options);
  field.dp = dp;
  field.dq = dq;
  return field;
}

InequalityReport check_adjoint_estimates(const AdjointField& field, const ConstantSet& k,
                                         const BeamSystem& system, const std::string& scenario) {
  if (!field.dp || !field.dq)
    throw PreconditionError("adjoint estimate check needs the derivative series p', q'");
  const auto& g = field.grid;
  const double q2 = time_inner(g, *field.dp, *field.dp) + time_inner(g, *field.dq, *field.dq);
  const auto disp = history_norms(field.phi, system.matrices(), g);
  const auto vel = history_norms(field.phi_t, system.matrices(), g);

  const double eT = std::exp(g.final_time());
  const double c0 = k.c0_sq;
  InequalityReport r;
  r.add("adjoint.phixx_sup", scenario, disp.curvature_sup, eT * c0 * q2);
  r.add("adjoint.phixx_l2", scenario, disp.curvature_l2, (eT - 1) * c0 * q2);
  r.add("adjoint.phit_sup", scenario, vel.value_sup, eT * k.r0 / (2 * k.rho0) * c0 * q2);
  r.add("adjoint.phit_l2", scenario, vel.value_l2, (eT - 1) * k.r0 / (2 * k.rho0) * c0 * q2);
  r.add("adjoint.phixxt_sup", scenario, vel.curvature_sup, eT * k.r0 / (2 * k.kappa0) * c0 * q2);
  r.add("adjoint.phixxt_l2", scenario, vel.curvature_l2,
        (eT - 1) * k.r0 / (2 * k.kappa0) * c0 * q2);
  return r;
}

}  // namespace beamid
