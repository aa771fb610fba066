#include "beamid/inversion.hpp"

#include "beamid/errors.hpp"
#include "csv_util.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

namespace beamid {

const char* to_string(StepRule r) {
  return r == StepRule::Fixed ? "fixed" : "backtracking";
}

StepRule parse_step_rule(const std::string& s) {
  if (s == "fixed") return StepRule::Fixed;
  if (s == "backtracking") return StepRule::Backtracking;
  throw ConfigError("unknown step rule '" + s + "' (expected fixed|backtracking)");
}

const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::MaxIterations: return "max_iterations";
    case StopReason::Discrepancy: return "discrepancy";
    case StopReason::Stagnation: return "stagnation";
    case StopReason::ZeroGradient: return "zero_gradient";
    case StopReason::Divergence: return "divergence";
  }
  return "unknown";
}

void InversionConfig::validate() const {
  if (omega && !(*omega > 0)) throw ConfigError("step size omega must be > 0");
  if (!(tau_d > 1)) throw ConfigError("discrepancy safety factor tau_d must be > 1");
  if (!(admissible_radius > 0)) throw ConfigError("admissible radius C_F must be > 0");
  if (max_iterations < 0) throw ConfigError("max_iterations must be >= 0");
  if (!(noise_level >= 0)) throw ConfigError("noise level must be >= 0");
}

bool InversionState::monotone() const {
  for (std::size_t n = 1; n < objective_history.size(); ++n)
    if (objective_history[n] > objective_history[n - 1]) return false;
  return true;
}

double default_step(const BeamSystem& system, const MeasurementSeries& measurements,
                    double admissible_radius, CtVariant variant) {
  const auto& g = system.grid();
  ConstantInputs in;
  in.length = g.length();
  in.final_time = g.final_time();
  in.bounds = system.coefficients().bounds;
  in.admissible_radius = admissible_radius;
  in.theta0_norm = time_norm(g, measurements.theta0);
  in.thetaL_norm = time_norm(g, measurements.thetaL);
  in.ct_variant = variant;
  return 1.0 / compute_constants(in).l_g;
}

namespace {

constexpr double kGradientTolerance = 1e-12;
constexpr double kStagnationTolerance = 1e-10;
constexpr int kStagnationWindow = 10;
constexpr int kDivergenceRun = 3;
constexpr double kArmijo = 1e-4;
constexpr int kMaxHalvings = 60;

}  // namespace

InversionState run_inversion(const BeamSystem& system, const MeasurementSeries& measurements,
                             const InversionConfig& config) {
  config.validate();
  const auto& g = system.grid();
  measurements.check(g);
  if (measurements.smoothness != Smoothness::H1Smoothed)
    warn("inversion driven by raw measurements; smooth them to H1 first");

  LoadField f = config.initial ? *config.initial : LoadField(g);
  if (!(f.grid() == g)) throw DimensionError("initial iterate grid differs from the system grid");
  f = project_admissible(f, config.admissible_radius);

  const double omega_fixed =
      config.omega ? *config.omega
                   : default_step(system, measurements, config.admissible_radius, config.ct_variant);

  InversionState st{f, {}, {}, {}, {}, StopReason::MaxIterations, {}, omega_fixed};
  auto grad = gradient_from_residuals(system, objective_from_outputs(g, apply_io_operators(system, f),
                                                                      measurements));
  auto record = [&](const GradientField& gr) {
    st.objective_history.push_back(gr.objective.value);
    st.gradient_norm_history.push_back(gr.norm);
    st.discrepancy_history.push_back(gr.objective.discrepancy());
  };
  record(grad);

  const double target = config.tau_d * config.noise_level;
  double omega_prev = omega_fixed;
  int increases = 0;

  for (int n = 0;; ++n) {
    const double j = grad.objective.value;
    if (config.noise_level > 0 && 2 * j <= target * target) {
      st.stop_reason = StopReason::Discrepancy;
      break;
    }
    if (grad.norm < kGradientTolerance) {
      st.stop_reason = StopReason::ZeroGradient;
      break;
    }
    if (n >= kStagnationWindow) {
      const double old = st.objective_history[n - kStagnationWindow];
      if (std::abs(old - j) <= kStagnationTolerance * old) {
        st.stop_reason = StopReason::Stagnation;
        st.diagnostic = "relative change of J below 1e-10 over 10 iterations";
        break;
      }
    }
    if (n >= config.max_iterations) {
      st.stop_reason = StopReason::MaxIterations;
      break;
    }

    double omega = omega_fixed;
    LoadField next(g);
    if (config.step_rule == StepRule::Fixed) {
      next = project_admissible(f - omega * grad.values, config.admissible_radius);
    } else {
      // First trial: Polyak step J / ||g||^2 on the first iteration, then
      // twice the last accepted step.
      omega = n == 0 ? j / (grad.norm * grad.norm) : 2 * omega_prev;
      bool accepted = false;
      for (int k = 0; k < kMaxHalvings; ++k, omega *= 0.5) {
        next = project_admissible(f - omega * grad.values, config.admissible_radius);
        const double decrease = spacetime_inner(grad.values, f - next);
        const double trial = evaluate_objective(system, next, measurements).value;
        if (trial <= j - kArmijo * decrease) {
          accepted = true;
          break;
        }
      }
      if (!accepted) {
        st.stop_reason = StopReason::Stagnation;
        st.diagnostic = "line search found no decrease";
        break;
      }
      omega_prev = omega;
    }

    grad = gradient_from_residuals(system,
                                   objective_from_outputs(g, apply_io_operators(system, next),
                                                          measurements));
    f = std::move(next);
    st.step_history.push_back(omega);
    st.omega = omega;
    record(grad);

    if (!std::isfinite(grad.objective.value)) {
      st.stop_reason = StopReason::Divergence;
      st.diagnostic = "objective became non-finite";
      break;
    }
    increases = grad.objective.value > j ? increases + 1 : 0;
    if (config.step_rule == StepRule::Fixed && increases >= kDivergenceRun) {
      st.stop_reason = StopReason::Divergence;
      st.diagnostic = "J increased for 3 consecutive fixed steps (omega = " +
                      detail::fmt_double(omega_fixed) +
                      "); the step exceeds 2 / ||A*A||, so L_G is underestimated or the "
                      "discretization is inconsistent";
      break;
    }
  }
  st.iterate = std::move(f);
  return st;
}

void write_iteration_log(std::ostream& os, const InversionState& st) {
  os << "iter,J,grad_norm,discrepancy\n";
  for (std::size_t n = 0; n < st.objective_history.size(); ++n)
    os << n << ',' << detail::fmt_double(st.objective_history[n]) << ','
       << detail::fmt_double(st.gradient_norm_history[n]) << ','
       << detail::fmt_double(st.discrepancy_history[n]) << '\n';
}

// ---------------------------------------------------------------------------

ParametricModel ParametricModel::moving_gaussian(double start) {
  ParametricModel m;
  m.family = LoadFamily::MovingGaussian;
  m.start = start;
  return m;
}

ParametricModel ParametricModel::modal(int space_modes, int time_modes) {
  if (space_modes < 1 || time_modes < 1 || space_modes * time_modes > 8)
    throw DomainError("modal family needs 1..8 coefficients");
  ParametricModel m;
  m.family = LoadFamily::Modal;
  m.space_modes = space_modes;
  m.time_modes = time_modes;
  return m;
}

int ParametricModel::n_params() const {
  return family == LoadFamily::MovingGaussian ? 3 : space_modes * time_modes;
}

std::vector<std::string> ParametricModel::names() const {
  if (family == LoadFamily::MovingGaussian) return {"amplitude", "speed", "width"};
  std::vector<std::string> out;
  for (int j = 1; j <= space_modes; ++j)
    for (int k = 1; k <= time_modes; ++k)
      out.push_back("c_" + std::to_string(j) + "_" + std::to_string(k));
  return out;
}

int ParametricModel::amplitude_index() const { return family == LoadFamily::MovingGaussian ? 0 : -1; }

namespace {

void check_params(const ParametricModel& m, const Eigen::VectorXd& p) {
  if (p.size() != m.n_params()) throw DimensionError("parameter vector has the wrong length");
  if (!p.allFinite()) throw InputError("parameters contain non-finite values");
  if (m.family == LoadFamily::MovingGaussian && !(p(2) > 0))
    throw DomainError("moving Gaussian width must be > 0");
}

}  // namespace

LoadField ParametricModel::evaluate(const SpaceTimeGrid& grid, const Eigen::VectorXd& p) const {
  check_params(*this, p);
  if (family == LoadFamily::MovingGaussian) {
    const double a = p(0), v = p(1), s = p(2);
    return LoadField::sample(grid, [&](double x, double t) {
      const double z = x - start - v * t;
      return a * std::exp(-z * z / (2 * s * s));
    });
  }
  const double l = grid.length(), T = grid.final_time();
  return LoadField::sample(grid, [&](double x, double t) {
    double sum = 0;
    for (int j = 1; j <= space_modes; ++j)
      for (int k = 1; k <= time_modes; ++k)
        sum += p((j - 1) * time_modes + (k - 1)) * std::sin(j * std::numbers::pi * x / l) *
               std::sin(k * std::numbers::pi * t / T);
    return sum;
  });
}

std::vector<LoadField> ParametricModel::jacobian(const SpaceTimeGrid& grid,
                                                 const Eigen::VectorXd& p) const {
  check_params(*this, p);
  std::vector<LoadField> out;
  if (family == LoadFamily::MovingGaussian) {
    const double a = p(0), v = p(1), s = p(2);
    auto profile = [&](double x, double t) {
      const double z = x - start - v * t;
      return std::pair{z, std::exp(-z * z / (2 * s * s))};
    };
    out.push_back(LoadField::sample(grid, [&](double x, double t) { return profile(x, t).second; }));
    out.push_back(LoadField::sample(grid, [&](double x, double t) {
      const auto [z, e] = profile(x, t);
      return a * e * z * t / (s * s);
    }));
    out.push_back(LoadField::sample(grid, [&](double x, double t) {
      const auto [z, e] = profile(x, t);
      return a * e * z * z / (s * s * s);
    }));
    return out;
  }
  const double l = grid.length(), T = grid.final_time();
  for (int j = 1; j <= space_modes; ++j)
    for (int k = 1; k <= time_modes; ++k)
      out.push_back(LoadField::sample(grid, [&](double x, double t) {
        return std::sin(j * std::numbers::pi * x / l) * std::sin(k * std::numbers::pi * t / T);
      }));
  return out;
}

namespace {

double output_inner(const SpaceTimeGrid& g, const MeasurementSeries& a, const MeasurementSeries& b) {
  return time_inner(g, a.theta0, b.theta0) + time_inner(g, a.thetaL, b.thetaL);
}

// Output sensitivities dPhi/dtheta_i (the I/O map is linear in F).
std::vector<MeasurementSeries> sensitivities(const BeamSystem& system, const ParametricModel& m,
                                             const Eigen::VectorXd& p) {
  std::vector<MeasurementSeries> out;
  for (const auto& d : m.jacobian(system.grid(), p)) out.push_back(apply_io_operators(system, d));
  return out;
}

Eigen::MatrixXd gram(const SpaceTimeGrid& g, const std::vector<MeasurementSeries>& s) {
  const int n = static_cast<int>(s.size());
  Eigen::MatrixXd G(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) G(i, j) = G(j, i) = output_inner(g, s[i], s[j]);
  return G;
}

struct Evaluation {
  double value = 0;
  Eigen::VectorXd gradient;
};

}  // namespace

ParametricResult reconstruct_parametric(const BeamSystem& system,
                                        const MeasurementSeries& measurements,
                                        const ParametricConfig& config) {
  const auto& g = system.grid();
  const auto& model = config.model;
  measurements.check(g);
  if (config.max_iterations < 0) throw ConfigError("max_iterations must be >= 0");
  Eigen::VectorXd p = config.initial;
  check_params(model, p);
  const int np = model.n_params();

  const int ia = model.amplitude_index();
  if (ia >= 0 && config.fit_initial_amplitude) {
    // The family is linear in A: best A for the starting shape.
    Eigen::VectorXd unit = p;
    unit(ia) = 1;
    const auto s = apply_io_operators(system, model.evaluate(g, unit));
    const double ss = output_inner(g, s, s);
    if (ss > 0) p(ia) = output_inner(g, s, measurements) / ss;
  }

  auto evaluate = [&](const Eigen::VectorXd& q) {
    const auto grad = gradient_from_residuals(
        system, objective_from_outputs(g, apply_io_operators(system, model.evaluate(g, q)),
                                       measurements));
    Evaluation e;
    e.value = grad.objective.value;
    e.gradient.resize(np);
    const auto jac = model.jacobian(g, q);
    for (int i = 0; i < np; ++i) e.gradient(i) = grad.directional(system, jac[i]);
    return e;
  };

  // Inverse Gauss-Newton matrix as the initial BFGS metric.
  auto gauss_newton_inverse = [&](const Eigen::VectorXd& q) {
    Eigen::MatrixXd G = gram(g, sensitivities(system, model, q));
    const double scale = G.diagonal().maxCoeff();
    G.diagonal().array() += 1e-12 * std::max(scale, 1e-300);
    return Eigen::MatrixXd(G.ldlt().solve(Eigen::MatrixXd::Identity(np, np)));
  };

  ParametricResult res;
  res.names = model.names();
  Eigen::MatrixXd H = gauss_newton_inverse(p);
  auto cur = evaluate(p);
  res.objective_history.push_back(cur.value);
  res.gradient_norm_history.push_back(cur.gradient.norm());

  int it = 0;
  for (; it < config.max_iterations; ++it) {
    const Eigen::VectorXd dir = -H * cur.gradient;
    const double slope = cur.gradient.dot(dir);
    if (!(slope < 0)) {
      H = gauss_newton_inverse(p);
      if (!(cur.gradient.dot(-H * cur.gradient) < 0)) {
        res.converged = true;
        break;
      }
      continue;
    }
    // Predicted decrease below round-off of J: done.
    if (-slope <= 1e-13 * cur.value || cur.value == 0) {
      res.converged = true;
      break;
    }
    double step = 1;
    bool accepted = false;
    Eigen::VectorXd trial;
    Evaluation next;
    for (int k = 0; k < 40; ++k, step *= 0.5) {
      trial = p + step * dir;
      if (model.family == LoadFamily::MovingGaussian && !(trial(2) > 0)) continue;
      next = evaluate(trial);
      if (next.value <= cur.value + kArmijo * step * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      res.converged = true;
      res.diagnostic = "line search stalled";
      break;
    }
    const Eigen::VectorXd s = trial - p;
    const Eigen::VectorXd y = next.gradient - cur.gradient;
    const double sy = s.dot(y);
    if (sy > 1e-14 * s.norm() * y.norm()) {
      const double rho = 1 / sy;
      const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(np, np);
      H = (I - rho * s * y.transpose()) * H * (I - rho * y * s.transpose()) +
          rho * s * s.transpose();
    }
    const double prev = cur.value;
    p = trial;
    cur = std::move(next);
    res.objective_history.push_back(cur.value);
    res.gradient_norm_history.push_back(cur.gradient.norm());
    if (prev - cur.value <= 1e-14 * prev) {
      res.converged = true;
      break;
    }
  }
  res.iterations = it;
  res.params = p;
  res.objective = cur.value;

  const auto sens = sensitivities(system, model, p);
  const Eigen::MatrixXd G = gram(g, sens);
  Eigen::VectorXd d = G.diagonal().cwiseSqrt();
  if (d.minCoeff() <= 0) {
    res.identifiable = false;
    res.sensitivity_condition = std::numeric_limits<double>::infinity();
  } else {
    const Eigen::MatrixXd C = d.cwiseInverse().asDiagonal() * G * d.cwiseInverse().asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
    const double lo = std::max(es.eigenvalues().minCoeff(), 0.0);
    res.sensitivity_condition =
        lo > 0 ? es.eigenvalues().maxCoeff() / lo : std::numeric_limits<double>::infinity();
    res.identifiable = res.sensitivity_condition < 1e10;
  }
  if (!res.identifiable) {
    if (!res.diagnostic.empty()) res.diagnostic += "; ";
    res.diagnostic += "output sensitivities are rank deficient at the optimum";
  }
  if (ia >= 0) {
    // Partial sensitivity to A at unit amplitude.
    Eigen::VectorXd unit = p;
    unit(ia) = 1;
    const auto s = apply_io_operators(system, model.evaluate(g, unit));
    const double ns = std::sqrt(output_inner(g, s, s));
    res.amplitude_noise_floor = ns > 0 ? config.noise_level / ns
                                       : std::numeric_limits<double>::infinity();
  }
  return res;
}

}  // namespace beamid
