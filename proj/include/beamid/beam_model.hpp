#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace beamid {

/// Uniform space-time grid on (0, length) x (0, final_time).
class SpaceTimeGrid {
 public:
  SpaceTimeGrid(double length, double final_time, int n_elements, int n_steps);

  double length() const { return length_; }
  double final_time() const { return final_time_; }
  int n_elements() const { return n_elements_; }
  int n_steps() const { return n_steps_; }
  int n_nodes() const { return n_elements_ + 1; }
  int n_times() const { return n_steps_ + 1; }
  double h() const { return length_ / n_elements_; }
  double dt() const { return final_time_ / n_steps_; }
  double x(int node) const { return length_ * node / n_elements_; }
  double t(int step) const { return final_time_ * step / n_steps_; }

  /// Trapezoidal quadrature weights over the nodes / time instants.
  Eigen::VectorXd space_weights() const;
  Eigen::VectorXd time_weights() const;

  /// Same grid with both element and step counts multiplied by `factor`.
  SpaceTimeGrid refined(int factor) const;

  bool operator==(const SpaceTimeGrid&) const = default;

 private:
  double length_;
  double final_time_;
  int n_elements_;
  int n_steps_;
};

struct CoefficientBounds {
  double mass_min = 0, mass_max = 0;
  double damping_min = 0, damping_max = 0;
  double tension_min = 0, tension_max = 0;
  double rigidity_min = 0, rigidity_max = 0;
  double kv_min = 0, kv_max = 0;

  bool operator==(const CoefficientBounds&) const = default;
};

/// Node-sampled coefficient fields of the damped beam, linearly interpolated
/// inside elements.
///   mass      rho_A(x)  [kg/m]
///   damping   mu(x)     [kg/(m s)]   external viscous damping
///   tension   T_r(x)    [N]          axial tension
///   rigidity  r(x)      [N m^2]      flexural rigidity EI
///   kv        kappa(x)  [N m^2 s]    Kelvin-Voigt (strain-rate) damping
struct CoefficientSet {
  Eigen::VectorXd mass;
  Eigen::VectorXd damping;
  Eigen::VectorXd tension;
  Eigen::VectorXd rigidity;
  Eigen::VectorXd kv;
  CoefficientBounds bounds;

  static CoefficientSet constant(int n_nodes, double mass, double damping, double tension,
                                 double rigidity, double kv, const CoefficientBounds& bounds);

  /// Constant fields whose declared bounds are the values themselves.
  static CoefficientSet constant_tight(int n_nodes, double mass, double damping,
                                       double tension, double rigidity, double kv);

  int n_nodes() const { return static_cast<int>(mass.size()); }

  /// Every field multiplied by `factor` (bounds included).
  CoefficientSet scaled(double factor) const;
};

struct BoundViolation {
  std::string field;
  int node = -1;  // -1: the bounds record itself is inconsistent
  double value = 0;
  double lower = 0;
  double upper = 0;
};

struct ValidationReport {
  std::vector<BoundViolation> violations;
  bool ok() const { return violations.empty(); }
  std::string describe() const;
};

/// Checks every node against the admissibility bounds
///   0 < rho_0 <= rho_A <= rho_1,  0 <= T_r0 <= T_r <= T_r1,  0 < r_0 <= r <= r_1,
///   0 <= mu_0 <= mu <= mu_1,      0 < kappa_0 <= kappa <= kappa_1.
/// Throws DimensionError if the fields have different lengths.
ValidationReport validate_coefficients(const CoefficientSet& coeffs);

/// Declared lower bounds that are more than 10x below the sampled minimum.
std::vector<std::string> bounds_slack_warnings(const CoefficientSet& coeffs);

/// Load F(x,t) sampled at (node, time instant), in N/m.
class LoadField {
 public:
  explicit LoadField(const SpaceTimeGrid& grid);
  LoadField(const SpaceTimeGrid& grid, Eigen::MatrixXd values);

  template <class Fn>
  static LoadField sample(const SpaceTimeGrid& grid, Fn&& fn) {
    LoadField f(grid);
    for (int n = 0; n < grid.n_times(); ++n)
      for (int i = 0; i < grid.n_nodes(); ++i) f.values_(i, n) = fn(grid.x(i), grid.t(n));
    return f;
  }

  const SpaceTimeGrid& grid() const { return grid_; }
  const Eigen::MatrixXd& values() const { return values_; }
  Eigen::MatrixXd& values() { return values_; }
  double operator()(int node, int step) const { return values_(node, step); }

  LoadField& operator+=(const LoadField& other);
  LoadField& operator-=(const LoadField& other);
  LoadField& operator*=(double s);
  friend LoadField operator+(LoadField a, const LoadField& b) { return a += b; }
  friend LoadField operator-(LoadField a, const LoadField& b) { return a -= b; }
  friend LoadField operator*(double s, LoadField a) { return a *= s; }

 private:
  SpaceTimeGrid grid_;
  Eigen::MatrixXd values_;
};

/// Trapezoidal L2(Omega_T) inner product of two node/time sampled fields.
double spacetime_inner(const SpaceTimeGrid& grid, const Eigen::MatrixXd& a,
                       const Eigen::MatrixXd& b);
double spacetime_inner(const LoadField& a, const LoadField& b);

double l2_norm_spacetime(const LoadField& f);

/// Radial projection onto { F : ||F||^2 <= radius_sq }.
LoadField project_admissible(const LoadField& f, double radius_sq);

enum class Smoothness { Raw, H1Smoothed };

/// End-slope series theta_0(t) = u_x(0,t), theta_l(t) = u_x(l,t).
struct MeasurementSeries {
  Eigen::VectorXd theta0;
  Eigen::VectorXd thetaL;
  Smoothness smoothness = Smoothness::Raw;
  // Present when smoothed to H1.
  std::optional<Eigen::VectorXd> dtheta0;
  std::optional<Eigen::VectorXd> dthetaL;
  // Absolute L2(0,T) norm of the injected noise over both channels.
  std::optional<double> noise_norm;

  static MeasurementSeries zeros(const SpaceTimeGrid& grid);

  /// Throws DimensionError / InputError if the invariants do not hold for `grid`.
  void check(const SpaceTimeGrid& grid) const;
};

/// Trapezoidal L2(0,T) inner product / norm of time series.
double time_inner(const SpaceTimeGrid& grid, const Eigen::VectorXd& a, const Eigen::VectorXd& b);
double time_norm(const SpaceTimeGrid& grid, const Eigen::VectorXd& a);

// CSV: coefficients as `x,value`; loads as `x,t,value` (time-major rows).
void write_coefficient_csv(std::ostream& os, const SpaceTimeGrid& grid,
                           const Eigen::VectorXd& field, const std::string& name = "value");
Eigen::VectorXd read_coefficient_csv(std::istream& is, const SpaceTimeGrid& grid);
void write_load_csv(std::ostream& os, const LoadField& f, const std::string& name = "value");
LoadField read_load_csv(std::istream& is, const SpaceTimeGrid& grid);

}  // namespace beamid
