#include "beamid/cli.hpp"

#include "beamid/errors.hpp"
#include "beamid/inversion.hpp"
#include "beamid/measurements.hpp"
#include "beamid/verification.hpp"
#include "csv_util.hpp"

#include <Eigen/Core>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

namespace beamid {

namespace fs = std::filesystem;
using detail::fmt_double;

namespace {

const char* kFields[] = {"mass", "damping", "tension", "rigidity", "kv"};

std::set<std::string> make_known_keys() {
  std::set<std::string> k = {
      "grid.length", "grid.final_time", "grid.n_elements", "grid.n_steps",
      "scenario.kind", "scenario.amplitude", "scenario.speed", "scenario.width", "scenario.start",
      "scenario.clamp", "scenario.space_mode", "scenario.time_mode", "scenario.csv",
      "noise.level", "run.seed", "constants.ct_variant", "constants.admissible_radius",
      "smoothing.enabled", "smoothing.lambda", "measurements.csv", "measurements.noise_norm",
      "invert.mode", "invert.step", "invert.omega", "invert.max_iterations", "invert.tau_d",
      "invert.radius", "invert.family", "invert.initial_amplitude", "invert.initial_speed",
      "invert.initial_width", "invert.start", "invert.space_modes", "invert.time_modes",
      "invert.fit_initial_amplitude",
      "verify.scenarios", "verify.n_elements", "verify.n_steps", "verify.duality",
      "verify.gradient_fd", "verify.corrupt_adjoint_sign", "verify.threads",
      "verify.duality_tolerance", "verify.gradient_tolerance",
      "output.dir", "output.field"};
  for (const char* f : kFields) {
    k.insert(std::string("coeff.") + f);
    k.insert(std::string("coeff.") + f + "_csv");
    k.insert(std::string("bounds.") + f + "_min");
    k.insert(std::string("bounds.") + f + "_max");
  }
  return k;
}

// Baseline coefficient values.
double default_coefficient(const std::string& f) {
  if (f == "mass") return 1.0;
  if (f == "damping") return 0.1;
  if (f == "tension") return 0.2;
  if (f == "rigidity") return 1.0;
  return 0.05;
}

SpaceTimeGrid grid_from(const RunConfig& c) {
  const double l = c.get_double("grid.length", 1.0);
  const double T = c.get_double("grid.final_time", 1.0);
  const int ne = c.get_int("grid.n_elements", 64);
  const int ns = c.get_int("grid.n_steps", 512);
  if (!(l > 0) || !(T > 0)) throw ConfigError("grid.length and grid.final_time must be > 0");
  if (ne < 4 || ns < 4) throw ConfigError("grid.n_elements and grid.n_steps must be >= 4");
  return SpaceTimeGrid(l, T, ne, ns);
}

CoefficientSet coefficients_from(const RunConfig& c, const SpaceTimeGrid& g) {
  CoefficientSet set;
  Eigen::VectorXd* fields[] = {&set.mass, &set.damping, &set.tension, &set.rigidity, &set.kv};
  double* lo[] = {&set.bounds.mass_min, &set.bounds.damping_min, &set.bounds.tension_min,
                  &set.bounds.rigidity_min, &set.bounds.kv_min};
  double* hi[] = {&set.bounds.mass_max, &set.bounds.damping_max, &set.bounds.tension_max,
                  &set.bounds.rigidity_max, &set.bounds.kv_max};
  for (int i = 0; i < 5; ++i) {
    const std::string f = kFields[i];
    if (auto path = c.get_existing_path("coeff." + f + "_csv")) {
      std::ifstream in(*path);
      try {
        *fields[i] = read_coefficient_csv(in, g);
      } catch (const Error& e) {
        throw ConfigError("coefficient file '" + path->string() + "': " + e.what());
      }
    } else {
      *fields[i] = Eigen::VectorXd::Constant(g.n_nodes(), c.get_double("coeff." + f,
                                                                        default_coefficient(f)));
    }
    *lo[i] = c.get_double("bounds." + f + "_min", fields[i]->minCoeff());
    *hi[i] = c.get_double("bounds." + f + "_max", fields[i]->maxCoeff());
  }
  const auto report = validate_coefficients(set);
  if (!report.ok()) throw ConfigError("inadmissible coefficients: " + report.describe());
  for (const auto& w : bounds_slack_warnings(set)) warn(w);
  return set;
}

CtVariant ct_variant_from(const RunConfig& c) {
  return parse_ct_variant(c.get_string("constants.ct_variant", "literal"));
}

ScenarioParams scenario_from(const RunConfig& c, const std::string& fallback_kind) {
  ScenarioParams p;
  p.kind = parse_scenario_kind(c.get_string("scenario.kind", fallback_kind));
  p.amplitude = c.get_double("scenario.amplitude", p.kind == ScenarioKind::Modal ? 1.0 : 1000.0);
  p.speed = c.get_optional_double("scenario.speed");
  p.width = c.get_double("scenario.width", 0.0);
  p.start = c.get_double("scenario.start", 0.0);
  p.clamp = c.get_bool("scenario.clamp", false);
  p.space_mode = c.get_int("scenario.space_mode", 1);
  p.time_mode = c.get_int("scenario.time_mode", 1);
  if (p.kind == ScenarioKind::Csv) {
    const auto path = c.get_existing_path("scenario.csv");
    if (!path) throw ConfigError("scenario.kind = csv needs scenario.csv");
    p.csv_path = path->string();
  }
  return p;
}

template <class Fn>
void write_file(const fs::path& path, Fn&& fn) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write '" + path.string() + "'");
  fn(os);
  if (!os) throw ConfigError("failed writing '" + path.string() + "'");
}

std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void write_manifest(const fs::path& dir, const std::string& command, const RunConfig& c) {
  write_file(dir / "manifest.txt", [&](std::ostream& os) {
    os << "command=" << command << '\n'
       << "version=" << kVersion << '\n'
       << "eigen=" << EIGEN_WORLD_VERSION << '.' << EIGEN_MAJOR_VERSION << '.'
       << EIGEN_MINOR_VERSION << '\n'
       << "config_hash=" << hex64(c.hash()) << '\n'
       << "seed=" << c.get_u64("run.seed", 1) << '\n';
    for (const auto& [k, v] : c.resolved())
      if (k != "output.dir") os << k << '=' << v << '\n';
  });
}

void write_field_csv(std::ostream& os, const SpaceTimeGrid& g, const Eigen::MatrixXd& w,
                     const char* name) {
  os << "x,t," << name << '\n';
  for (int n = 0; n < g.n_times(); ++n)
    for (int i = 0; i < g.n_nodes(); ++i)
      os << fmt_double(g.x(i)) << ',' << fmt_double(g.t(n)) << ',' << fmt_double(w(i, n)) << '\n';
}

void write_summary(const fs::path& dir, const std::vector<std::pair<std::string, std::string>>& kv,
                   std::ostream& log) {
  write_file(dir / "summary.txt", [&](std::ostream& os) {
    for (const auto& [k, v] : kv) os << k << " = " << v << '\n';
  });
  for (const auto& [k, v] : kv) log << k << " = " << v << '\n';
}

double output_norm(const SpaceTimeGrid& g, const MeasurementSeries& m) {
  return std::sqrt(time_inner(g, m.theta0, m.theta0) + time_inner(g, m.thetaL, m.thetaL));
}

}  // namespace

const std::set<std::string>& known_config_keys() {
  static const std::set<std::string> keys = make_known_keys();
  return keys;
}

int cmd_forward(const RunConfig& c, const fs::path& out, std::ostream& log) {
  const auto g = grid_from(c);
  BeamSystem system(g, coefficients_from(c, g));
  const auto params = scenario_from(c, "zero");
  const auto sc = generate_scenario(params, system);
  const auto traj = solve_forward(system, sc.truth);
  const auto audit = energy_residual(traj, system, sc.truth);

  write_file(out / "outputs.csv", [&](std::ostream& os) { write_measurements_csv(os, g, traj.outputs); });
  write_file(out / "energy.csv", [&](std::ostream& os) {
    os << "t,lhs,rhs,residual\n";
    for (int n = 0; n < g.n_times(); ++n)
      os << fmt_double(g.t(n)) << ',' << fmt_double(audit.lhs(n)) << ',' << fmt_double(audit.rhs(n))
         << ',' << fmt_double(audit.residual(n)) << '\n';
  });
  const Eigen::MatrixXd w = traj.nodal_deflection();
  if (c.get_bool("output.field", true))
    write_file(out / "field.csv", [&](std::ostream& os) { write_field_csv(os, g, w, "u"); });

  std::vector<std::pair<std::string, std::string>> kv = {
      {"scenario", to_string(params.kind)},
      {"max_energy_residual", fmt_double(audit.max_residual())},
      {"theta0_norm", fmt_double(time_norm(g, traj.outputs.theta0))},
      {"thetaL_norm", fmt_double(time_norm(g, traj.outputs.thetaL))},
      {"load_norm", fmt_double(l2_norm_spacetime(sc.truth))}};
  if (params.kind == ScenarioKind::Manufactured) {
    const Eigen::MatrixXd exact = manufactured_solution(g);
    kv.emplace_back("max_relative_solution_error",
                    fmt_double((w - exact).cwiseAbs().maxCoeff() / exact.cwiseAbs().maxCoeff()));
  }
  write_summary(out, kv, log);
  write_manifest(out, "forward", c);
  return kExitOk;
}

int cmd_verify(const RunConfig& c, const fs::path& out, std::ostream& log) {
  SuiteOptions o;
  o.n_scenarios = c.get_int("verify.scenarios", 20);
  o.seed = c.get_u64("run.seed", 1);
  o.n_elements = c.get_int("verify.n_elements", 64);
  o.n_steps = c.get_int("verify.n_steps", 512);
  o.include_duality = c.get_bool("verify.duality", true);
  o.include_gradient_fd = c.get_bool("verify.gradient_fd", true);
  o.duality_tolerance = c.get_double("verify.duality_tolerance", 1e-3);
  o.gradient_tolerance = c.get_double("verify.gradient_tolerance", 5e-3);
  o.threads = static_cast<unsigned>(c.get_int("verify.threads", 0));
  o.ct_variant = ct_variant_from(c);
  if (c.get_bool("verify.corrupt_adjoint_sign", false)) {
    warn("adjoint boundary sign deliberately flipped (negative control)");
    o.adjoint.boundary_sign = -1;
  }
  if (o.n_scenarios < 0) throw ConfigError("verify.scenarios must be >= 0");
  if (o.n_elements < 4 || o.n_steps < 4)
    throw ConfigError("verify.n_elements and verify.n_steps must be >= 4");

  const auto report = verify_inequality_suite(o);
  write_file(out / "report.csv", [&](std::ostream& os) { report.checks.write_csv(os); });
  write_file(out / "report.txt", [&](std::ostream& os) { report.write_text(os); });
  report.write_text(log);
  write_manifest(out, "verify", c);
  return report.ok() ? kExitOk : kExitVerificationFailed;
}

int cmd_scenario(const RunConfig& c, const fs::path& out, std::ostream& log) {
  const auto g = grid_from(c);
  BeamSystem system(g, coefficients_from(c, g));
  const auto params = scenario_from(c, "moving_gaussian");
  const auto sc = generate_scenario(params, system);
  write_file(out / "load.csv", [&](std::ostream& os) { write_load_csv(os, sc.truth); });
  write_file(out / "measurements.csv",
             [&](std::ostream& os) { write_measurements_csv(os, g, sc.clean); });
  std::vector<std::pair<std::string, std::string>> kv = {
      {"scenario", to_string(params.kind)},
      {"load_norm", fmt_double(l2_norm_spacetime(sc.truth))},
      {"output_norm", fmt_double(output_norm(g, sc.clean))}};
  const NoiseSpec noise{c.get_double("noise.level", 0.0), c.get_u64("run.seed", 1)};
  if (noise.relative_level > 0) {
    const auto noisy = add_noise(g, sc.clean, noise);
    write_file(out / "measurements_noisy.csv",
               [&](std::ostream& os) { write_measurements_csv(os, g, noisy); });
    write_file(out / "measurements_noisy.meta",
               [&](std::ostream& os) { write_noise_metadata(os, noise, noisy); });
    kv.emplace_back("realized_delta", fmt_double(*noisy.noise_norm));
  }
  write_summary(out, kv, log);
  write_manifest(out, "scenario", c);
  return kExitOk;
}

int cmd_invert(const RunConfig& c, const fs::path& out, std::ostream& log) {
  const auto g = grid_from(c);
  BeamSystem system(g, coefficients_from(c, g));
  std::vector<std::pair<std::string, std::string>> kv;

  // Measurements: a file, or synthesized twin data.
  MeasurementSeries data;
  std::optional<LoadField> truth;
  std::optional<ScenarioParams> params;
  if (auto path = c.get_existing_path("measurements.csv")) {
    std::ifstream in(*path);
    try {
      data = read_measurements_csv(in, g);
    } catch (const Error& e) {
      throw ConfigError("measurement file '" + path->string() + "': " + e.what());
    }
    if (auto nn = c.get_optional_double("measurements.noise_norm")) data.noise_norm = *nn;
    kv.emplace_back("measurements", path->filename().string());
  } else {
    params = scenario_from(c, "moving_gaussian");
    auto sc = generate_scenario(*params, system);
    truth = std::move(sc.truth);
    const NoiseSpec noise{c.get_double("noise.level", 0.0), c.get_u64("run.seed", 1)};
    data = add_noise(g, sc.clean, noise);
    kv.emplace_back("measurements", std::string("twin:") + to_string(params->kind));
    kv.emplace_back("noise_level", fmt_double(noise.relative_level));
  }
  const double delta = data.noise_norm.value_or(0.0);
  kv.emplace_back("realized_delta", fmt_double(delta));

  MeasurementSeries used = data;
  if (c.get_bool("smoothing.enabled", true)) {
    auto lambda = c.get_optional_double("smoothing.lambda");
    if (!lambda && !data.noise_norm) {
      warn("no noise level and no smoothing.lambda: using the interpolating spline");
      lambda = 0.0;
    }
    const auto sm = smooth_to_h1(g, data, lambda);
    used = sm.series;
    kv.emplace_back("smoothing_lambda", fmt_double(sm.lambda));
  }

  const std::string mode = c.get_string("invert.mode", "parametric");
  if (mode == "parametric") {
    ParametricConfig pc;
    const std::string family = c.get_string("invert.family", "moving_gaussian");
    if (family == "moving_gaussian") {
      pc.model = ParametricModel::moving_gaussian(c.get_double("invert.start", 0.0));
      pc.initial = Eigen::Vector3d(c.get_double("invert.initial_amplitude", 1.0),
                                   c.get_double("invert.initial_speed", g.length() / g.final_time()),
                                   c.get_double("invert.initial_width", 2 * g.h()));
    } else if (family == "modal") {
      pc.model = ParametricModel::modal(c.get_int("invert.space_modes", 2),
                                        c.get_int("invert.time_modes", 2));
      pc.initial = Eigen::VectorXd::Zero(pc.model.n_params());
    } else {
      throw ConfigError("unknown invert.family '" + family + "' (expected moving_gaussian|modal)");
    }
    pc.fit_initial_amplitude = c.get_bool("invert.fit_initial_amplitude", true);
    pc.max_iterations = c.get_int("invert.max_iterations", 200);
    pc.noise_level = delta;
    const auto r = reconstruct_parametric(system, used, pc);

    write_file(out / "iterations.csv", [&](std::ostream& os) {
      os << "iter,J,grad_norm,discrepancy\n";
      for (std::size_t n = 0; n < r.objective_history.size(); ++n)
        os << n << ',' << fmt_double(r.objective_history[n]) << ','
           << fmt_double(r.gradient_norm_history[n]) << ','
           << fmt_double(std::sqrt(2 * r.objective_history[n])) << '\n';
    });
    write_file(out / "parameters.csv", [&](std::ostream& os) {
      os << "name,value\n";
      for (int i = 0; i < r.params.size(); ++i) os << r.names[i] << ',' << fmt_double(r.params(i)) << '\n';
    });
    write_file(out / "load.csv",
               [&](std::ostream& os) { write_load_csv(os, pc.model.evaluate(g, r.params)); });
    kv.emplace_back("mode", "parametric");
    for (int i = 0; i < r.params.size(); ++i) kv.emplace_back(r.names[i], fmt_double(r.params(i)));
    kv.emplace_back("objective", fmt_double(r.objective));
    kv.emplace_back("iterations", std::to_string(r.iterations));
    kv.emplace_back("converged", r.converged ? "true" : "false");
    kv.emplace_back("identifiable", r.identifiable ? "true" : "false");
    kv.emplace_back("sensitivity_condition", fmt_double(r.sensitivity_condition));
    if (pc.model.amplitude_index() >= 0)
      kv.emplace_back("amplitude_noise_floor", fmt_double(r.amplitude_noise_floor));
    if (!r.diagnostic.empty()) kv.emplace_back("diagnostic", r.diagnostic);
    if (params && params->kind == ScenarioKind::MovingGaussian && family == "moving_gaussian") {
      const double a = params->amplitude;
      const double v = params->speed.value_or(g.length() / g.final_time());
      const double s = params->width > 0 ? params->width : 2 * g.h();
      auto rel = [](double est, double ref) {
        return ref != 0 ? std::abs(est - ref) / std::abs(ref) : std::abs(est);
      };
      kv.emplace_back("amplitude_rel_error", fmt_double(rel(r.params(0), a)));
      kv.emplace_back("speed_rel_error", fmt_double(rel(r.params(1), v)));
      kv.emplace_back("width_rel_error", fmt_double(rel(r.params(2), s)));
    }
    if (!r.identifiable) warn("parametric fit is not identifiable: " + r.diagnostic);
    write_summary(out, kv, log);
    write_manifest(out, "invert", c);
    return kExitOk;
  }
  if (mode != "full_field")
    throw ConfigError("unknown invert.mode '" + mode + "' (expected parametric|full_field)");

  InversionConfig ic;
  ic.step_rule = parse_step_rule(c.get_string("invert.step", "backtracking"));
  ic.omega = c.get_optional_double("invert.omega");
  ic.max_iterations = c.get_int("invert.max_iterations", 500);
  ic.tau_d = c.get_double("invert.tau_d", 1.1);
  ic.noise_level = delta;
  if (auto radius = c.get_optional_double("invert.radius")) ic.admissible_radius = *radius;
  ic.ct_variant = ct_variant_from(c);
  const auto st = run_inversion(system, used, ic);

  write_file(out / "iterations.csv", [&](std::ostream& os) { write_iteration_log(os, st); });
  write_file(out / "load.csv", [&](std::ostream& os) { write_load_csv(os, st.iterate); });
  kv.emplace_back("mode", "full_field");
  kv.emplace_back("step_rule", to_string(ic.step_rule));
  kv.emplace_back("omega", fmt_double(st.omega));
  kv.emplace_back("iterations", std::to_string(st.iterations()));
  kv.emplace_back("stop_reason", to_string(st.stop_reason));
  kv.emplace_back("objective", fmt_double(st.objective_history.back()));
  kv.emplace_back("discrepancy", fmt_double(st.discrepancy_history.back()));
  kv.emplace_back("discrepancy_target", fmt_double(ic.tau_d * delta));
  kv.emplace_back("monotone", st.monotone() ? "true" : "false");
  if (truth) {
    const double nt = l2_norm_spacetime(*truth);
    const double err = l2_norm_spacetime(st.iterate - *truth);
    kv.emplace_back("field_rel_error", fmt_double(nt > 0 ? err / nt : err));
  }
  if (!st.diagnostic.empty()) kv.emplace_back("diagnostic", st.diagnostic);
  write_summary(out, kv, log);
  write_manifest(out, "invert", c);
  if (st.stop_reason == StopReason::Divergence) throw DivergenceError(st.diagnostic);
  return kExitOk;
}

int run_command(const std::string& command, const CommandOptions& opt, std::ostream& out,
                std::ostream& err) {
  try {
    RunConfig c = opt.config_path ? RunConfig::load(*opt.config_path) : RunConfig{};
    for (const auto& [k, v] : opt.overrides) c.set(k, v);
    if (opt.seed) c.set("run.seed", std::to_string(*opt.seed));
    if (opt.ct_variant) c.set("constants.ct_variant", *opt.ct_variant);
    c.reject_unknown(known_config_keys());

    fs::path dir = opt.out_dir ? *opt.out_dir : fs::path(c.get_string("output.dir", "out"));
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + dir.string() + "': " + ec.message());

    if (command == "forward") return cmd_forward(c, dir, out);
    if (command == "verify") return cmd_verify(c, dir, out);
    if (command == "invert") return cmd_invert(c, dir, out);
    if (command == "scenario") return cmd_scenario(c, dir, out);
    throw ConfigError("unknown command '" + command + "'");
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const ValidationError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const DomainError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const DimensionError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const PreconditionError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "numeric error: " << e.what() << '\n';
    return kExitNumericError;
  }
}

}  // namespace beamid
