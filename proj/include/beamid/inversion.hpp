#pragma once

#include "beamid/constants.hpp"
#include "beamid/forward_solver.hpp"
#include "beamid/objective.hpp"

#include <Eigen/Dense>

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace beamid {

enum class StepRule { Fixed, Backtracking };
const char* to_string(StepRule r);
StepRule parse_step_rule(const std::string& s);

enum class StopReason { MaxIterations, Discrepancy, Stagnation, ZeroGradient, Divergence };
const char* to_string(StopReason r);

struct InversionConfig {
  StepRule step_rule = StepRule::Fixed;
  std::optional<double> omega;  // fixed step; 1 / L_G when empty
  int max_iterations = 500;
  double noise_level = 0;       // absolute delta over both channels
  double tau_d = 1.1;           // Morozov safety factor
  double admissible_radius = std::numeric_limits<double>::infinity();  // C_F, bound on ||F||^2
  std::optional<LoadField> initial;                                    // F^0, zero when empty
  CtVariant ct_variant = CtVariant::Literal;

  /// Throws ConfigError unless omega > 0, tau_d > 1, C_F > 0, max_iterations >= 0.
  void validate() const;
};

struct InversionState {
  LoadField iterate;
  std::vector<double> objective_history;      // J(F^n)
  std::vector<double> gradient_norm_history;  // ||J'(F^n)||
  std::vector<double> discrepancy_history;    // sqrt(2 J(F^n))
  std::vector<double> step_history;           // omega_n, one fewer entry than the others
  StopReason stop_reason = StopReason::MaxIterations;
  std::string diagnostic;
  double omega = 0;  // fixed step used, or the last accepted step for backtracking

  int iterations() const { return static_cast<int>(objective_history.size()) - 1; }
  /// True when J(F^{n+1}) <= J(F^n) for every recorded step.
  bool monotone() const;
};

/// Step size 1 / L_G from the declared coefficient bounds of `system`.
double default_step(const BeamSystem& system, const MeasurementSeries& measurements,
                    double admissible_radius, CtVariant variant);

/// Projected Landweber iteration F^{n+1} = P(F^n - omega_n J'(F^n)). Stops on
/// the discrepancy principle 2 J <= (tau_d delta)^2 (only when delta > 0), on
/// a gradient norm below 1e-12, on stagnation (relative J change below 1e-10
/// over 10 iterations), on divergence (three consecutive increases of J with
/// a fixed step) or after max_iterations.
InversionState run_inversion(const BeamSystem& system, const MeasurementSeries& measurements,
                             const InversionConfig& config);

void write_iteration_log(std::ostream& os, const InversionState& state);

// ---------------------------------------------------------------------------
// Parametric load families.

enum class LoadFamily {
  MovingGaussian,  // A exp(-(x - x0 - v t)^2 / (2 sigma^2)), parameters (A, v, sigma)
  Modal,           // sum c_jk sin(j pi x / l) sin(k pi t / T)
};

struct ParametricModel {
  LoadFamily family = LoadFamily::MovingGaussian;
  double start = 0;  // x0 of the moving Gaussian
  int space_modes = 2;
  int time_modes = 2;

  static ParametricModel moving_gaussian(double start = 0);
  /// Throws DomainError for more than 8 coefficients.
  static ParametricModel modal(int space_modes, int time_modes);

  int n_params() const;
  std::vector<std::string> names() const;
  LoadField evaluate(const SpaceTimeGrid& grid, const Eigen::VectorXd& params) const;
  /// dF/dtheta_i for every parameter.
  std::vector<LoadField> jacobian(const SpaceTimeGrid& grid, const Eigen::VectorXd& params) const;
  /// Index of the amplitude-like parameter (A for the Gaussian), -1 if none.
  int amplitude_index() const;
};

struct ParametricConfig {
  ParametricModel model;
  /// Starting point. For the moving Gaussian the amplitude entry is replaced
  /// by the linear least-squares amplitude for the starting speed and width
  /// when `fit_initial_amplitude` is set.
  Eigen::VectorXd initial;
  bool fit_initial_amplitude = true;
  int max_iterations = 200;
  double noise_level = 0;  // absolute delta, for the amplitude noise floor
};

struct ParametricResult {
  Eigen::VectorXd params;
  std::vector<std::string> names;
  double objective = 0;
  std::vector<double> objective_history;
  std::vector<double> gradient_norm_history;  // Euclidean norm of dJ/dtheta
  int iterations = 0;
  bool converged = false;
  /// False when the output sensitivities are (numerically) linearly dependent
  /// at the optimum.
  bool identifiable = true;
  double sensitivity_condition = 0;  // condition number of the normalized Gram matrix
  /// delta / ||dPhi/dA||: bound on |A| when the true amplitude is zero.
  double amplitude_noise_floor = 0;
  std::string diagnostic;
};

/// Minimizes J over the family parameters with BFGS, using the adjoint
/// gradient chained through dF/dtheta and a Gauss-Newton initial Hessian.
ParametricResult reconstruct_parametric(const BeamSystem& system,
                                        const MeasurementSeries& measurements,
                                        const ParametricConfig& config);

}  // namespace beamid
