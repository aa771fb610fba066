#pragma once

#include "beamid/adjoint_solver.hpp"
#include "beamid/constants.hpp"
#include "beamid/forward_solver.hpp"
#include "beamid/objective.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace beamid {

/// int v_x^2 <= (l^2 / 2) int v_xx^2 for every column of a DOF history
/// (functions vanishing at both ends); checked at the instant where the ratio
/// is largest.
void check_poincare(InequalityReport& report, const Eigen::MatrixXd& history,
                    const SystemMatrices& matrices, double length, const std::string& scenario);

struct SuiteOptions {
  int n_scenarios = 20;
  std::uint64_t seed = 1;
  int n_elements = 64;
  int n_steps = 512;
  bool include_duality = true;
  bool include_gradient_fd = true;
  double duality_tolerance = 1e-3;
  double gradient_tolerance = 5e-3;
  CtVariant ct_variant = CtVariant::Literal;
  AdjointOptions adjoint;  // negative-control hook
  unsigned threads = 0;    // 0: hardware concurrency
};

/// Randomized admissible inputs of one scenario, reproducible from
/// (seed, index).
struct SuiteScenario {
  std::string name;
  std::string description;
  SpaceTimeGrid grid;
  CoefficientSet coefficients;
  LoadField load;          // F1
  LoadField load_other;    // F2
  // Grid-resolved increment for the duality and finite-difference checks,
  // which are second-order consistent only for smooth loads.
  LoadField smooth_increment;
  MeasurementSeries data;  // theta_0, theta_l used by J
  Eigen::VectorXd p, q, dp, dq;  // adjoint data, vanishing at t = T
};

SuiteScenario make_suite_scenario(const SuiteOptions& options, int index);

/// Every check on one scenario: a-priori (6), traces (4), Poincare, I/O
/// Lipschitz (2), J Lipschitz, adjoint (6), gradient Lipschitz, plus duality
/// and gradient-vs-finite-difference when enabled.
InequalityReport verify_scenario(const SuiteScenario& scenario, const SuiteOptions& options);

struct SuiteReport {
  InequalityReport checks;
  std::vector<std::string> scenarios;  // descriptions, in index order
  std::uint64_t seed = 0;

  bool ok() const { return checks.ok(); }
  /// Per-check summary, then every violation with the reproduction data of
  /// its scenario.
  void write_text(std::ostream& os) const;
};

/// Runs the scenarios on worker threads and merges the reports in index
/// order, so the result does not depend on scheduling.
SuiteReport verify_inequality_suite(const SuiteOptions& options);

/// Relative mismatch between <J'(F), D> and the central difference
/// (J(F + eps D) - J(F - eps D)) / (2 eps), with <J', D> from GradientField::directional and eps = 1e-4 ||F|| / ||D|| (1e-4 / ||D|| at F = 0).
double gradient_fd_mismatch(const BeamSystem& system, const LoadField& load,
                            const MeasurementSeries& measurements, const LoadField& direction,
                            const AdjointOptions& options = {});

}  // namespace beamid
