#pragma once

#include "beamid/forward_solver.hpp"

#include <filesystem>
#include <string>

namespace beamid::test {

// Baseline beam: rho 1, mu 0.1, T_r 0.2, r 1, kappa 0.05 on (0, 1) x (0, 1).
inline CoefficientSet baseline_coefficients(int n_nodes) {
  return CoefficientSet::constant_tight(n_nodes, 1.0, 0.1, 0.2, 1.0, 0.05);
}

inline BeamSystem baseline_system(int n_elements, int n_steps, double length = 1.0,
                                  double final_time = 1.0) {
  SpaceTimeGrid g(length, final_time, n_elements, n_steps);
  return BeamSystem(g, baseline_coefficients(g.n_nodes()));
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("beamid_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace beamid::test
