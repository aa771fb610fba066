#include "beamid/verification.hpp"

#include "beamid/errors.hpp"
#include "csv_util.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numbers>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

namespace beamid {

void check_poincare(InequalityReport& report, const Eigen::MatrixXd& history,
                    const SystemMatrices& m, double length, const std::string& scenario) {
  double best_lhs = 0, best_rhs = 0, best_ratio = -1;
  for (Eigen::Index n = 0; n < history.cols(); ++n) {
    const Eigen::VectorXd w = history.col(n);
    const double lhs = m.unit_slope.quadratic_form(w);
    const double rhs = 0.5 * length * length * m.unit_curvature.quadratic_form(w);
    if (rhs <= 0) continue;
    if (lhs / rhs > best_ratio) {
      best_ratio = lhs / rhs;
      best_lhs = lhs;
      best_rhs = rhs;
    }
  }
  report.add("poincare", scenario, best_lhs, best_rhs);
}

namespace {

constexpr double kPi = std::numbers::pi;

class Sampler {
 public:
  Sampler(std::uint64_t seed, int index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index)};
    rng_.seed(seq);
  }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double normal() { return std::normal_distribution<double>(0, 1)(rng_); }

 private:
  std::mt19937_64 rng_;
};

Eigen::VectorXd smooth_field(Sampler& s, const SpaceTimeGrid& g, double lo, double hi) {
  const int f = s.integer(1, 3);
  const double phase = s.uniform(0, 2 * kPi);
  Eigen::VectorXd v(g.n_nodes());
  for (int i = 0; i < g.n_nodes(); ++i)
    v(i) = lo + (hi - lo) * (0.5 + 0.5 * std::sin(2 * kPi * f * g.x(i) / g.length() + phase));
  return v;
}

LoadField modal_load(Sampler& s, const SpaceTimeGrid& g) {
  const double l = g.length(), T = g.final_time();
  struct Term {
    int j, k;
    double a;
  };
  std::vector<Term> terms;
  for (int m = 0; m < 3; ++m) terms.push_back({s.integer(1, 4), s.integer(1, 4), s.uniform(-1, 1)});
  return LoadField::sample(g, [&](double x, double t) {
    double sum = 0;
    for (const auto& tm : terms)
      sum += tm.a * std::sin(tm.j * kPi * x / l) * std::cos(tm.k * kPi * t / T);
    return sum;
  });
}

LoadField gaussian_load(Sampler& s, const SpaceTimeGrid& g) {
  const double l = g.length(), T = g.final_time();
  const double a = s.uniform(0.5, 5), sigma = l / s.uniform(10, 30);
  const bool forward = s.uniform(0, 1) < 0.5;
  const double v = s.uniform(0.3, 1.0) * l / T * (forward ? 1 : -1);
  const double start = forward ? 0 : l;
  return LoadField::sample(g, [&](double x, double t) {
    const double z = x - start - v * t;
    return a * std::exp(-z * z / (2 * sigma * sigma));
  });
}

LoadField noise_load(Sampler& s, const SpaceTimeGrid& g) {
  LoadField f(g);
  const double scale = s.uniform(0.1, 2);
  for (int n = 0; n < g.n_times(); ++n)
    for (int i = 0; i < g.n_nodes(); ++i) f.values()(i, n) = scale * s.normal();
  return f;
}

LoadField random_load(Sampler& s, const SpaceTimeGrid& g, int kind, std::string& label) {
  switch (kind % 3) {
    case 0: label = "modal"; return modal_load(s, g);
    case 1: label = "moving_gaussian"; return gaussian_load(s, g);
    default: label = "white_noise"; return noise_load(s, g);
  }
}

// sum a_k sin(k pi t / T) and its derivative: vanishes at t = 0 and t = T.
void boundary_series(Sampler& s, const SpaceTimeGrid& g, Eigen::VectorXd& v, Eigen::VectorXd& dv) {
  const double T = g.final_time();
  v = Eigen::VectorXd::Zero(g.n_times());
  dv = Eigen::VectorXd::Zero(g.n_times());
  for (int k = 1; k <= 3; ++k) {
    const double a = s.uniform(-1, 1);
    for (int n = 0; n < g.n_times(); ++n) {
      v(n) += a * std::sin(k * kPi * g.t(n) / T);
      dv(n) += a * (k * kPi / T) * std::cos(k * kPi * g.t(n) / T);
    }
  }
}

std::string fmt(double v) { return detail::fmt_double(v); }

}  // namespace

SuiteScenario make_suite_scenario(const SuiteOptions& options, int index) {
  Sampler s(options.seed, index);
  const double l = s.uniform(0.5, 2.0), T = s.uniform(0.5, 1.0);
  SpaceTimeGrid g(l, T, options.n_elements, options.n_steps);

  CoefficientBounds b;
  b.mass_min = s.uniform(0.5, 2.0);
  b.mass_max = b.mass_min * s.uniform(1.0, 2.0);
  b.damping_min = s.uniform(0.0, 0.2);
  b.damping_max = b.damping_min + s.uniform(0.0, 0.3);
  b.tension_min = s.uniform(0.0, 0.5);
  b.tension_max = b.tension_min + s.uniform(0.0, 0.5);
  b.rigidity_min = s.uniform(0.5, 2.0);
  b.rigidity_max = b.rigidity_min * s.uniform(1.0, 2.0);
  b.kv_min = s.uniform(0.01, 0.1);
  b.kv_max = b.kv_min * s.uniform(1.0, 3.0);

  CoefficientSet c;
  c.bounds = b;
  c.mass = smooth_field(s, g, b.mass_min, b.mass_max);
  c.damping = smooth_field(s, g, b.damping_min, b.damping_max);
  c.tension = smooth_field(s, g, b.tension_min, b.tension_max);
  c.rigidity = smooth_field(s, g, b.rigidity_min, b.rigidity_max);
  c.kv = smooth_field(s, g, b.kv_min, b.kv_max);

  // Smooth draws first so they do not depend on the grid size.
  LoadField fd = modal_load(s, g);
  const std::string kd = "modal";
  LoadField inc = modal_load(s, g);
  Eigen::VectorXd p, dp, q, dq;
  boundary_series(s, g, p, dp);
  boundary_series(s, g, q, dq);
  std::string k1, k2;
  LoadField f1 = random_load(s, g, index, k1);
  LoadField f2 = random_load(s, g, index + 1, k2);

  SuiteScenario sc{"s" + std::to_string(index), {}, g, std::move(c), std::move(f1), std::move(f2),
                   std::move(inc), {}, std::move(p), std::move(q), std::move(dp), std::move(dq)};
  // Measurements: the clean outputs of an unrelated smooth load.
  sc.data = solve_forward(sc.coefficients, fd, g).outputs;

  std::ostringstream d;
  d << sc.name << ": seed=" << options.seed << " index=" << index << " l=" << fmt(l)
    << " T=" << fmt(T) << " grid=" << options.n_elements << "x" << options.n_steps
    << " rho=[" << fmt(b.mass_min) << "," << fmt(b.mass_max) << "] mu=[" << fmt(b.damping_min)
    << "," << fmt(b.damping_max) << "] T_r=[" << fmt(b.tension_min) << "," << fmt(b.tension_max)
    << "] r=[" << fmt(b.rigidity_min) << "," << fmt(b.rigidity_max) << "] kappa=["
    << fmt(b.kv_min) << "," << fmt(b.kv_max) << "] F1=" << k1 << " F2=" << k2 << " data=" << kd;
  sc.description = d.str();
  return sc;
}

double gradient_fd_mismatch(const BeamSystem& system, const LoadField& load,
                            const MeasurementSeries& measurements, const LoadField& direction,
                            const AdjointOptions& options) {
  const double nd = l2_norm_spacetime(direction);
  if (!(nd > 0)) throw DomainError("finite-difference direction must be nonzero");
  const double nf = l2_norm_spacetime(load);
  const double eps = 1e-4 * (nf > 0 ? nf : 1.0) / nd;
  const auto& g = system.grid();
  const auto grad = gradient_from_residuals(
      system, objective_from_outputs(g, apply_io_operators(system, load), measurements), options);
  const double jp = evaluate_objective(system, load + eps * direction, measurements).value;
  const double jm = evaluate_objective(system, load - eps * direction, measurements).value;
  const double fd = (jp - jm) / (2 * eps);
  const double an = grad.directional(system, direction);
  return std::abs(an - fd) / std::max(std::abs(fd), kResidualFloor);
}

InequalityReport verify_scenario(const SuiteScenario& sc, const SuiteOptions& options) {
  const auto& g = sc.grid;
  const std::string& name = sc.name;
  BeamSystem sys(g, sc.coefficients);

  const LoadField diff = sc.load - sc.load_other;
  const double nd = l2_norm_spacetime(diff);
  ConstantInputs in;
  in.length = g.length();
  in.final_time = g.final_time();
  in.bounds = sc.coefficients.bounds;
  in.admissible_radius = std::max({1.0, spacetime_inner(sc.load, sc.load),
                                   spacetime_inner(sc.load_other, sc.load_other)});
  in.theta0_norm = time_norm(g, sc.data.theta0);
  in.thetaL_norm = time_norm(g, sc.data.thetaL);
  in.ct_variant = options.ct_variant;
  const auto k = compute_constants(in);

  InequalityReport r;
  const auto tr1 = solve_forward(sys, sc.load);
  r.append(check_apriori_estimates(tr1, sc.load, k, sys, name));
  check_poincare(r, tr1.displacement, sys.matrices(), g.length(), name);

  const auto tr2 = solve_forward(sys, sc.load_other);
  r.add("lipschitz.io0", name, time_norm(g, tr1.outputs.theta0 - tr2.outputs.theta0), k.c_l * nd);
  r.add("lipschitz.ioL", name, time_norm(g, tr1.outputs.thetaL - tr2.outputs.thetaL), k.c_l * nd);

  auto j1 = objective_from_outputs(g, tr1.outputs, sc.data);
  auto j2 = objective_from_outputs(g, tr2.outputs, sc.data);
  r.add("lipschitz.J", name, std::abs(j1.value - j2.value), k.c_j * nd);

  const auto adj = solve_adjoint(sys, sc.p, sc.q, sc.dp, sc.dq, options.adjoint);
  r.append(check_adjoint_estimates(adj, k, sys, name));

  const auto g1 = gradient_from_residuals(sys, std::move(j1), options.adjoint);
  const auto g2 = gradient_from_residuals(sys, std::move(j2), options.adjoint);
  r.add("lipschitz.gradient", name, l2_norm_spacetime(g1.values - g2.values), k.l_g * nd);

  if (options.include_duality)
    r.add("duality", name,
          duality_residual(sys, sc.smooth_increment, sc.p, sc.q, options.adjoint).residual,
          options.duality_tolerance, 0.0);
  if (options.include_gradient_fd)
    r.add("gradient_fd", name,
          gradient_fd_mismatch(sys, sc.load, sc.data, sc.smooth_increment, options.adjoint),
          options.gradient_tolerance, 0.0);
  return r;
}

void SuiteReport::write_text(std::ostream& os) const {
  os << "scenarios: " << scenarios.size() << ", seed: " << seed << '\n';
  checks.write_text(os);
  std::set<std::string> bad;
  for (const auto& c : checks.checks)
    if (!c.pass) bad.insert(c.scenario);
  for (const auto& d : scenarios) {
    const auto name = d.substr(0, d.find(':'));
    if (bad.count(name)) os << "REPRODUCE " << d << '\n';
  }
}

SuiteReport verify_inequality_suite(const SuiteOptions& options) {
  if (options.n_scenarios < 0) throw ConfigError("scenario count must be >= 0");
  const int n = options.n_scenarios;
  std::vector<InequalityReport> reports(n);
  std::vector<std::string> descriptions(n);
  std::vector<std::exception_ptr> errors(n);

  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        const auto sc = make_suite_scenario(options, i);
        descriptions[i] = sc.description;
        reports[i] = verify_scenario(sc, options);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  unsigned threads = options.threads ? options.threads : std::thread::hardware_concurrency();
  threads = std::clamp<unsigned>(threads, 1, std::max(n, 1));
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  pool.clear();

  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  SuiteReport out;
  out.seed = options.seed;
  out.scenarios = std::move(descriptions);
  for (const auto& r : reports) out.checks.append(r);
  return out;
}

}  // namespace beamid
