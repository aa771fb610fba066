#include "beamid/discretization.hpp"

#include "beamid/errors.hpp"

namespace beamid {

namespace {

// 4-point Gauss-Legendre on [0, 1]: exact through degree 7, which covers the
// mass form (cubic x cubic x linear coefficient).
constexpr int kGaussPoints = 4;
constexpr std::array<double, kGaussPoints> kGaussXi = {
    0.5 - 0.5 * 0.8611363115940526, 0.5 - 0.5 * 0.3399810435848563,
    0.5 + 0.5 * 0.3399810435848563, 0.5 + 0.5 * 0.8611363115940526};
constexpr std::array<double, kGaussPoints> kGaussW = {
    0.5 * 0.3478548451374538, 0.5 * 0.6521451548625461, 0.5 * 0.6521451548625461,
    0.5 * 0.3478548451374538};

struct ShapeValues {
  std::array<double, 4> n;
  std::array<double, 4> dn;
  std::array<double, 4> ddn;
};

ShapeValues hermite(double xi, double h) {
  const double xi2 = xi * xi, xi3 = xi2 * xi;
  ShapeValues s;
  s.n = {1 - 3 * xi2 + 2 * xi3, h * (xi - 2 * xi2 + xi3), 3 * xi2 - 2 * xi3, h * (xi3 - xi2)};
  s.dn = {(-6 * xi + 6 * xi2) / h, 1 - 4 * xi + 3 * xi2, (6 * xi - 6 * xi2) / h,
          -2 * xi + 3 * xi2};
  s.ddn = {(-6 + 12 * xi) / (h * h), (-4 + 6 * xi) / h, (6 - 12 * xi) / (h * h),
           (-2 + 6 * xi) / h};
  return s;
}

}  // namespace

Eigen::VectorXd DofMap::nodal_deflection(const Eigen::VectorXd& dofs) const {
  if (dofs.size() != size()) throw DimensionError("DOF vector size mismatch");
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n_nodes_);
  for (int i = 1; i + 1 < n_nodes_; ++i) w(i) = dofs(deflection(i));
  return w;
}

ElementMatrix element_matrix(Form form, double h, double c_left, double c_right) {
  ElementMatrix m{};
  for (int g = 0; g < kGaussPoints; ++g) {
    const double xi = kGaussXi[g];
    const double c = c_left * (1 - xi) + c_right * xi;
    const auto s = hermite(xi, h);
    const auto& phi = form == Form::Mass ? s.n : form == Form::Slope ? s.dn : s.ddn;
    const double w = kGaussW[g] * h * c;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) m[a][b] += w * phi[a] * phi[b];
  }
  return m;
}

SymmetricBandMatrix assemble_unconstrained(const SpaceTimeGrid& grid,
                                           const Eigen::VectorXd& nodal_coeff, Form form) {
  if (nodal_coeff.size() != grid.n_nodes())
    throw DimensionError("coefficient field does not match the grid");
  SymmetricBandMatrix a(2 * grid.n_nodes(), 3);
  const double h = grid.h();
  for (int e = 0; e < grid.n_elements(); ++e) {
    const auto m = element_matrix(form, h, nodal_coeff(e), nodal_coeff(e + 1));
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j <= i; ++j) a.add(2 * e + i, 2 * e + j, m[i][j]);
  }
  return a;
}

SymmetricBandMatrix constrain(const SymmetricBandMatrix& full, const DofMap& dofs) {
  if (full.size() != 2 * dofs.n_nodes()) throw DimensionError("matrix does not match DOF map");
  SymmetricBandMatrix c(dofs.size(), full.half_bandwidth());
  for (int i = 0; i < full.size(); ++i) {
    const int ci = dofs.constrained(i);
    if (ci < 0) continue;
    for (int j = std::max(0, i - full.half_bandwidth()); j <= i; ++j) {
      const int cj = dofs.constrained(j);
      if (cj < 0) continue;
      c.add(ci, cj, full(i, j));
    }
  }
  return c;
}

SystemMatrices assemble(const SpaceTimeGrid& grid, const CoefficientSet& coeffs) {
  if (coeffs.n_nodes() != grid.n_nodes())
    throw DimensionError("coefficients are not sampled on the grid nodes");
  const auto report = validate_coefficients(coeffs);
  if (!report.ok()) throw ValidationError(report.describe());

  SystemMatrices s;
  s.dofs = DofMap(grid.n_nodes());
  auto build = [&](const Eigen::VectorXd& c, Form f) {
    return constrain(assemble_unconstrained(grid, c, f), s.dofs);
  };
  s.mass = build(coeffs.mass, Form::Mass);
  s.external_damping = build(coeffs.damping, Form::Mass);
  s.tension = build(coeffs.tension, Form::Slope);
  s.bending = build(coeffs.rigidity, Form::Curvature);
  s.kelvin_voigt = build(coeffs.kv, Form::Curvature);

  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(grid.n_nodes());
  s.unit_mass = build(ones, Form::Mass);
  s.unit_slope = build(ones, Form::Slope);
  s.unit_curvature = build(ones, Form::Curvature);
  return s;
}

Eigen::VectorXd load_vector(const SpaceTimeGrid& grid, const DofMap& dofs,
                            const Eigen::VectorXd& nodal_load) {
  if (nodal_load.size() != grid.n_nodes()) throw DimensionError("nodal load size mismatch");
  // int N_a L_b over the element, L = (1 - xi, xi)
  const double h = grid.h();
  std::array<std::array<double, 2>, 4> local{};
  for (int g = 0; g < kGaussPoints; ++g) {
    const double xi = kGaussXi[g];
    const auto s = hermite(xi, h);
    for (int a = 0; a < 4; ++a) {
      local[a][0] += kGaussW[g] * h * s.n[a] * (1 - xi);
      local[a][1] += kGaussW[g] * h * s.n[a] * xi;
    }
  }

  Eigen::VectorXd f = Eigen::VectorXd::Zero(dofs.size());
  for (int e = 0; e < grid.n_elements(); ++e) {
    const double fl = nodal_load(e), fr = nodal_load(e + 1);
    for (int a = 0; a < 4; ++a) {
      const int idx = dofs.constrained(2 * e + a);
      if (idx >= 0) f(idx) += local[a][0] * fl + local[a][1] * fr;
    }
  }
  return f;
}

Eigen::MatrixXd load_history(const LoadField& f, const DofMap& dofs) {
  const auto& g = f.grid();
  Eigen::MatrixXd out(dofs.size(), g.n_times());
  for (int n = 0; n < g.n_times(); ++n) out.col(n) = load_vector(g, dofs, f.values().col(n));
  return out;
}

Eigen::MatrixXd natural_bc_load(const Eigen::VectorXd& p, const Eigen::VectorXd& q,
                                const SpaceTimeGrid& grid, const DofMap& dofs, double sign) {
  if (p.size() != grid.n_times() || q.size() != grid.n_times())
    throw DimensionError("boundary series length does not match the time grid");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dofs.size(), grid.n_times());
  out.row(dofs.left_rotation()) = sign * p.transpose();
  out.row(dofs.right_rotation()) = sign * q.transpose();
  return out;
}

}  // namespace beamid
