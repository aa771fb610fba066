#pragma once

#include "beamid/banded.hpp"
#include "beamid/beam_model.hpp"

#include <Eigen/Dense>

#include <array>
#include <iosfwd>

namespace beamid {

/// Degrees of freedom of the simply supported Hermite beam: per node one
/// deflection and one rotation; the deflections of the two end nodes are
/// eliminated. Ordering is node-wise, [theta_0, w_1, theta_1, ..., w_{N-1},
/// theta_{N-1}, theta_N].
class DofMap {
 public:
  explicit DofMap(int n_nodes) : n_nodes_(n_nodes) {}

  int n_nodes() const { return n_nodes_; }
  int size() const { return 2 * n_nodes_ - 2; }
  /// Constrained index of the deflection DOF at `node`, or -1 at the supports.
  int deflection(int node) const {
    return (node == 0 || node == n_nodes_ - 1) ? -1 : 2 * node - 1;
  }
  int rotation(int node) const { return node == n_nodes_ - 1 ? size() - 1 : 2 * node; }
  int left_rotation() const { return rotation(0); }
  int right_rotation() const { return rotation(n_nodes_ - 1); }
  /// Maps an unconstrained index (2 * node + {0: w, 1: theta}) to a
  /// constrained index, -1 if eliminated.
  int constrained(int full_index) const {
    const int node = full_index / 2;
    return full_index % 2 == 0 ? deflection(node) : rotation(node);
  }

  /// Deflection values at all nodes (zero at the supports) from a DOF vector.
  Eigen::VectorXd nodal_deflection(const Eigen::VectorXd& dofs) const;

  bool operator==(const DofMap&) const = default;

 private:
  int n_nodes_;
};

enum class Form {
  Mass,       // int c N_i N_j
  Slope,      // int c N_i' N_j'
  Curvature,  // int c N_i'' N_j''
};

using ElementMatrix = std::array<std::array<double, 4>, 4>;

/// Element matrix of the cubic Hermite element of length h with coefficient
/// interpolated linearly between c_left and c_right. Local DOFs are
/// (w_left, theta_left, w_right, theta_right).
ElementMatrix element_matrix(Form form, double h, double c_left, double c_right);

/// Assembly over all 2 * n_nodes DOFs (no supports), half bandwidth 3.
SymmetricBandMatrix assemble_unconstrained(const SpaceTimeGrid& grid,
                                           const Eigen::VectorXd& nodal_coeff, Form form);

/// Drops the rows and columns of the end deflections.
SymmetricBandMatrix constrain(const SymmetricBandMatrix& full, const DofMap& dofs);

/// Galerkin matrices of the damped beam on the constrained DOF set, plus
/// coefficient-free matrices used to evaluate L2 norms of u, u_x and u_xx.
struct SystemMatrices {
  DofMap dofs{0};
  SymmetricBandMatrix mass;              // int rho_A u v
  SymmetricBandMatrix external_damping;  // int mu u v
  SymmetricBandMatrix tension;           // int T_r u' v'
  SymmetricBandMatrix bending;           // int r u'' v''
  SymmetricBandMatrix kelvin_voigt;      // int kappa u'' v''

  SymmetricBandMatrix unit_mass;
  SymmetricBandMatrix unit_slope;
  SymmetricBandMatrix unit_curvature;

  SymmetricBandMatrix damping() const { return external_damping + kelvin_voigt; }
  SymmetricBandMatrix stiffness() const { return tension + bending; }
};

/// Validates the coefficients (ValidationError on failure) and assembles.
SystemMatrices assemble(const SpaceTimeGrid& grid, const CoefficientSet& coeffs);

/// Consistent load vector int F(x) N_i(x) dx of a node-sampled, piecewise
/// linear load profile.
Eigen::VectorXd load_vector(const SpaceTimeGrid& grid, const DofMap& dofs,
                            const Eigen::VectorXd& nodal_load);

/// Consistent load vectors for every time instant, one column per instant.
Eigen::MatrixXd load_history(const LoadField& f, const DofMap& dofs);

/// Boundary-moment forcing: p(t) on the rotation at x = 0 and q(t) on the
/// rotation at x = l, zero elsewhere. One column per time instant.
Eigen::MatrixXd natural_bc_load(const Eigen::VectorXd& p, const Eigen::VectorXd& q,
                                const SpaceTimeGrid& grid, const DofMap& dofs,
                                double sign = 1.0);

}  // namespace beamid
