#include "beamid/forward_solver.hpp"

#include "beamid/errors.hpp"

#include <algorithm>
#include <cmath>

namespace beamid {

namespace {

SymmetricBandMatrix effective_matrix(const SystemMatrices& m, double dt) {
  SymmetricBandMatrix eff = m.mass;
  eff += (0.5 * dt) * m.damping();
  eff += (0.25 * dt * dt) * m.stiffness();
  return eff;
}

}  // namespace

NewmarkIntegrator::NewmarkIntegrator(const SystemMatrices& matrices, double dt)
    : dt_(dt),
      damping_(matrices.damping()),
      stiffness_(matrices.stiffness()),
      mass_factor_(matrices.mass),
      effective_factor_(effective_matrix(matrices, dt)) {}

NewmarkIntegrator::History NewmarkIntegrator::integrate(const Eigen::MatrixXd& loads) const {
  const int ndof = mass_factor_.size();
  if (loads.rows() != ndof) throw DimensionError("load history has the wrong DOF count");
  const int n_times = static_cast<int>(loads.cols());

  History h;
  h.displacement = Eigen::MatrixXd::Zero(ndof, n_times);
  h.velocity = Eigen::MatrixXd::Zero(ndof, n_times);

  const double dt = dt_;
  Eigen::VectorXd u = Eigen::VectorXd::Zero(ndof);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(ndof);
  Eigen::VectorXd a = mass_factor_.solve(loads.col(0));
  Eigen::VectorXd rhs(ndof), u_pred(ndof), v_pred(ndof);

  for (int n = 0; n + 1 < n_times; ++n) {
    u_pred = u + dt * v + (0.25 * dt * dt) * a;
    v_pred = v + (0.5 * dt) * a;
    rhs = loads.col(n + 1);
    damping_.multiply_add(v_pred, rhs, -1.0);
    stiffness_.multiply_add(u_pred, rhs, -1.0);
    effective_factor_.solve_in_place(rhs);
    a = rhs;
    u = u_pred + (0.25 * dt * dt) * a;
    v = v_pred + (0.5 * dt) * a;
    if (!u.allFinite() || !v.allFinite())
      throw DivergenceError("non-finite state at time step " + std::to_string(n + 1));
    h.displacement.col(n + 1) = u;
    h.velocity.col(n + 1) = v;
  }
  return h;
}

BeamSystem::BeamSystem(SpaceTimeGrid grid, CoefficientSet coeffs)
    : grid_(std::move(grid)),
      coeffs_(std::move(coeffs)),
      matrices_(assemble(grid_, coeffs_)),
      integrator_(matrices_, grid_.dt()) {}

Eigen::MatrixXd BeamTrajectory::nodal_deflection() const {
  Eigen::MatrixXd w(grid.n_nodes(), grid.n_times());
  for (int n = 0; n < grid.n_times(); ++n) w.col(n) = dofs.nodal_deflection(displacement.col(n));
  return w;
}

BeamTrajectory solve_forward(const BeamSystem& system, const LoadField& load) {
  if (!(load.grid() == system.grid())) throw DimensionError("load and system grids differ");
  if (!load.values().allFinite()) throw InputError("load contains non-finite values");
  auto hist = system.integrator().integrate(load_history(load, system.dofs()));

  BeamTrajectory traj{system.grid(), system.dofs(), std::move(hist.displacement),
                      std::move(hist.velocity), {}, {}, {}};
  const int l = traj.dofs.left_rotation(), r = traj.dofs.right_rotation();
  traj.outputs.theta0 = traj.displacement.row(l).transpose();
  traj.outputs.thetaL = traj.displacement.row(r).transpose();
  traj.slope_rate0 = traj.velocity.row(l).transpose();
  traj.slope_rateL = traj.velocity.row(r).transpose();
  return traj;
}

BeamTrajectory solve_forward(const CoefficientSet& coeffs, const LoadField& load,
                             const SpaceTimeGrid& grid) {
  return solve_forward(BeamSystem(grid, coeffs), load);
}

Eigen::VectorXd mechanical_energy(const BeamTrajectory& traj, const BeamSystem& system) {
  const auto& m = system.matrices();
  const auto stiffness = m.stiffness();
  Eigen::VectorXd e(traj.grid.n_times());
  for (int n = 0; n < traj.grid.n_times(); ++n)
    e(n) = m.mass.quadratic_form(traj.velocity.col(n)) +
           stiffness.quadratic_form(traj.displacement.col(n));
  return e;
}

EnergyAudit energy_residual(const BeamTrajectory& traj, const BeamSystem& system,
                            const LoadField& load) {
  const auto& g = traj.grid;
  const auto& m = system.matrices();
  const auto damping = m.damping();
  const Eigen::MatrixXd f = load_history(load, traj.dofs);
  const Eigen::VectorXd energy = mechanical_energy(traj, system);

  const int nt = g.n_times();
  EnergyAudit audit{Eigen::VectorXd::Zero(nt), Eigen::VectorXd::Zero(nt),
                    Eigen::VectorXd::Zero(nt)};
  double dissipated = 0, work = 0;
  double prev_diss = 0, prev_work = 0;
  for (int n = 0; n < nt; ++n) {
    const Eigen::VectorXd v = traj.velocity.col(n);
    const double diss = damping.quadratic_form(v);
    const double power = v.dot(f.col(n));
    if (n > 0) {
      dissipated += 0.5 * g.dt() * (diss + prev_diss);
      work += 0.5 * g.dt() * (power + prev_work);
    }
    prev_diss = diss;
    prev_work = power;
    audit.lhs(n) = energy(n) + 2 * dissipated;
    audit.rhs(n) = 2 * work;
  }
  const double scale = std::max(audit.rhs.cwiseAbs().maxCoeff(), kResidualFloor);
  audit.residual = (audit.lhs - audit.rhs).cwiseAbs() / scale;
  return audit;
}

HistoryNorms history_norms(const Eigen::MatrixXd& history, const SystemMatrices& matrices,
                           const SpaceTimeGrid& grid) {
  const Eigen::VectorXd wt = grid.time_weights();
  HistoryNorms out;
  for (int n = 0; n < grid.n_times(); ++n) {
    const Eigen::VectorXd w = history.col(n);
    const double v = matrices.unit_mass.quadratic_form(w);
    const double s = matrices.unit_slope.quadratic_form(w);
    const double c = matrices.unit_curvature.quadratic_form(w);
    out.value_sup = std::max(out.value_sup, v);
    out.slope_sup = std::max(out.slope_sup, s);
    out.curvature_sup = std::max(out.curvature_sup, c);
    out.value_l2 += wt(n) * v;
    out.slope_l2 += wt(n) * s;
    out.curvature_l2 += wt(n) * c;
  }
  return out;
}

InequalityReport check_apriori_estimates(const BeamTrajectory& traj, const LoadField& load,
                                         const ConstantSet& k, const BeamSystem& system,
                                         const std::string& scenario) {
  const auto& g = traj.grid;
  const double f2 = spacetime_inner(load, load);
  const auto disp = history_norms(traj.displacement, system.matrices(), g);
  const auto vel = history_norms(traj.velocity, system.matrices(), g);
  const double ce2 = k.ce_sq;

  InequalityReport r;
  r.add("apriori.ut_sup", scenario, vel.value_sup, ce2 / k.rho0 * f2);
  r.add("apriori.ut_l2", scenario, vel.value_l2, (ce2 - 1) * f2);
  r.add("apriori.uxx_sup", scenario, disp.curvature_sup, ce2 / k.r0 * f2);
  r.add("apriori.uxx_l2", scenario, disp.curvature_l2, k.rho0 / k.r0 * (ce2 - 1) * f2);
  r.add("apriori.uxxt_sup", scenario, vel.curvature_sup, ce2 / k.kappa0 * f2);
  r.add("apriori.uxxt_l2", scenario, vel.curvature_l2, k.rho0 / k.kappa0 * (ce2 - 1) * f2);

  auto sq = [&](const Eigen::VectorXd& s) { return time_inner(g, s, s); };
  r.add("trace.ux0", scenario, sq(traj.outputs.theta0), k.c1_sq / k.r0 * f2);
  r.add("trace.uxt0", scenario, sq(traj.slope_rate0), k.c1_sq / k.kappa0 * f2);
  r.add("trace.uxL", scenario, sq(traj.outputs.thetaL), k.c1_sq / k.r0 * f2);
  r.add("trace.uxtL", scenario, sq(traj.slope_rateL), k.c1_sq / k.kappa0 * f2);
  return r;
}

}  // namespace beamid
