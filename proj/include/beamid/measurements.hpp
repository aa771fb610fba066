#pragma once

#include "beamid/beam_model.hpp"
#include "beamid/forward_solver.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace beamid {

/// Zero-mean Gaussian measurement noise, relative to each channel's L2 norm.
struct NoiseSpec {
  double relative_level = 0;  // delta_rel >= 0
  std::uint64_t seed = 0;
};

/// Adds i.i.d. Gaussian noise to both channels, rescaled so that each
/// channel's perturbation has L2(0,T) norm exactly delta_rel * ||channel||.
/// The result is tagged raw and records the realized absolute noise norm
/// sqrt(delta_0^2 + delta_l^2). Throws DomainError if delta_rel < 0.
MeasurementSeries add_noise(const SpaceTimeGrid& grid, const MeasurementSeries& series,
                            const NoiseSpec& spec);

struct SmoothingResult {
  MeasurementSeries series;  // H1-smoothed, with derivative series
  double lambda = 0;         // smoothing parameter actually used
  double residual = 0;       // L2 norm of smoothed - raw over both channels
};

/// Cubic smoothing spline per channel, minimizing
///   sum_i (y_i - g(t_i))^2 + lambda int g''(t)^2 dt,
/// returning the knot values and the spline's first derivative at the knots.
/// With no lambda, lambda is chosen by the discrepancy principle so that the
/// residual matches the recorded noise norm (PreconditionError if the series
/// carries none). Throws DomainError for lambda < 0.
SmoothingResult smooth_to_h1(const SpaceTimeGrid& grid, const MeasurementSeries& series,
                             std::optional<double> lambda = std::nullopt);

/// Sum of squared second differences of a series.
double second_difference_seminorm(const Eigen::VectorXd& y);

enum class ScenarioKind { MovingGaussian, Modal, Csv, Manufactured, Zero };
const char* to_string(ScenarioKind k);
ScenarioKind parse_scenario_kind(const std::string& s);

struct ScenarioParams {
  ScenarioKind kind = ScenarioKind::MovingGaussian;
  double amplitude = 1000;  // N/m
  // Moving Gaussian: centre start + speed * t, width sigma. Zero width means 2h,
  // an absent speed means l / T.
  std::optional<double> speed;
  double width = 0;
  double start = 0;
  bool clamp = false;  // hold the centre at the nearest end instead of leaving the beam
  // Modal: amplitude * sin(j pi x / l) * sin(k pi t / T).
  int space_mode = 1;
  int time_mode = 1;
  std::string csv_path;  // `x,t,value` load table on the run grid
};

struct Scenario {
  LoadField truth;
  MeasurementSeries clean;
};

/// Builds F_true, runs the forward problem and returns the clean end slopes.
/// Manufactured loads need constant coefficients (DomainError otherwise).
Scenario generate_scenario(const ScenarioParams& params, const BeamSystem& system);

/// Load that makes u = t^2 sin(pi x / l) an exact solution for constant
/// coefficients.
LoadField manufactured_load(const SpaceTimeGrid& grid, double mass, double damping,
                            double tension, double rigidity, double kv);
/// u = t^2 sin(pi x / l) at every (node, time instant).
Eigen::MatrixXd manufactured_solution(const SpaceTimeGrid& grid);

// `t,theta0,thetaL`
void write_measurements_csv(std::ostream& os, const SpaceTimeGrid& grid,
                            const MeasurementSeries& series);
/// Reads a raw series; throws DimensionError if the time column does not
/// match the grid.
MeasurementSeries read_measurements_csv(std::istream& is, const SpaceTimeGrid& grid);
/// Sidecar `key=value` lines: seed, delta_rel, realized_delta.
void write_noise_metadata(std::ostream& os, const NoiseSpec& spec, const MeasurementSeries& noisy);

}  // namespace beamid
