#pragma once

#include "beamid/beam_model.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace beamid {

/// Which reading of C_T = max(2/T, 1 + ...) to use. `Literal` is
/// max(2/T, 1 + 3T/3) = max(2/T, 1 + T); `Corrected` is max(2/T, 1 + 2T/3),
/// the coefficient that appears in the adjoint energy bound.
enum class CtVariant { Literal, Corrected };

const char* to_string(CtVariant v);
CtVariant parse_ct_variant(const std::string& s);

struct ConstantInputs {
  double length = 1;
  double final_time = 1;
  CoefficientBounds bounds;
  double admissible_radius = 1;  // C_F, bound on ||F||^2
  double theta0_norm = 0;        // ||theta_0||_{L2(0,T)}
  double thetaL_norm = 0;        // ||theta_l||_{L2(0,T)}
  CtVariant ct_variant = CtVariant::Literal;
};

/// Closed-form constants of the forward/adjoint estimates.
struct ConstantSet {
  double ce_sq = 0;  // C_e^2 = exp(T / rho_0)
  double c1_sq = 0;  // C_1^2 = (5 l rho_0 / 3)(C_e^2 - 1)
  double c_l = 0;    // C_L = C_1 / sqrt(r_0), Lipschitz constant of the I/O maps
  double c_j = 0;    // C_J = [2 C_1 C_F / sqrt(r_0) + ||theta_0|| + ||theta_l||] C_L
  double c_t = 0;    // C_T
  double c0_sq = 0;  // C_0^2 = 20 l C_T / (3 r_0^2)
  double l_g = 0;    // L_G = sqrt((e^T - 1) / (2 kappa_0)) l^2 C_0 C_1
  CtVariant ct_variant = CtVariant::Literal;

  // The other C_T reading, reported alongside.
  double c_t_alt = 0;
  double c0_sq_alt = 0;
  double l_g_alt = 0;

  // Inputs kept for the estimate checks.
  double length = 0;
  double final_time = 0;
  double rho0 = 0;
  double r0 = 0;
  double kappa0 = 0;
  double admissible_radius = 0;

  std::string describe() const;
};

/// Throws DomainError unless l, T, rho_0, r_0, kappa_0 and C_F are positive.
ConstantSet compute_constants(const ConstantInputs& in);

double ct_value(double final_time, CtVariant variant);

/// One inequality lhs <= rhs evaluated on one scenario.
struct CheckResult {
  std::string check;
  std::string scenario;
  double lhs = 0;
  double rhs = 0;
  bool pass = false;
};

/// Relative allowance for quadrature error in discrete inequality checks.
inline constexpr double kQuadratureSlack = 0.05;

inline bool holds_with_slack(double lhs, double rhs, double slack = kQuadratureSlack) {
  return lhs <= (1 + slack) * rhs;
}

struct InequalityReport {
  std::vector<CheckResult> checks;

  void add(std::string check, std::string scenario, double lhs, double rhs,
           double slack = kQuadratureSlack);
  void append(const InequalityReport& other);
  std::size_t violations() const;
  bool ok() const { return violations() == 0; }

  /// `check,scenario,lhs,rhs,pass`
  void write_csv(std::ostream& os) const;
  void write_text(std::ostream& os) const;
};

}  // namespace beamid
