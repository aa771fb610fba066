#include "support.hpp"

#include "beamid/errors.hpp"
#include "beamid/inversion.hpp"
#include "beamid/measurements.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace beamid;
using std::numbers::pi;

namespace {

MeasurementSeries exact_data(const BeamSystem& sys, const LoadField& f) {
  auto raw = apply_io_operators(sys, f);
  return smooth_to_h1(sys.grid(), raw, 0.0).series;
}

}  // namespace

TEST_CASE("config validation") {
  InversionConfig c;
  CHECK_NOTHROW(c.validate());
  c.omega = -1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.tau_d = 1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.admissible_radius = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK(parse_step_rule("backtracking") == StepRule::Backtracking);
  CHECK_THROWS(parse_step_rule("newton"));
}

TEST_CASE("zero data and zero start stop immediately") {
  auto sys = test::baseline_system(16, 64);
  auto data = smooth_to_h1(sys.grid(), MeasurementSeries::zeros(sys.grid()), 0.0).series;
  const auto st = run_inversion(sys, data, {});
  CHECK(st.iterations() == 0);
  CHECK(st.stop_reason == StopReason::ZeroGradient);
  CHECK(l2_norm_spacetime(st.iterate) == 0.0);
}

TEST_CASE("starting at the truth stops with zero objective") {
  auto sys = test::baseline_system(16, 64);
  auto f = LoadField::sample(sys.grid(), [](double x, double t) { return std::sin(pi * x) * t; });
  InversionConfig c;
  c.initial = f;
  auto data = exact_data(sys, f);
  data.theta0 = apply_io_operators(sys, f).theta0;
  data.thetaL = apply_io_operators(sys, f).thetaL;
  const auto st = run_inversion(sys, data, c);
  CHECK(st.iterations() == 0);
  CHECK(st.objective_history.front() == 0.0);
}

TEST_CASE("fixed and backtracking steps decrease the objective") {
  auto sys = test::baseline_system(16, 64);
  auto f = LoadField::sample(sys.grid(), [](double x, double t) { return std::sin(pi * x) * std::sin(pi * t); });
  const auto data = exact_data(sys, f);
  for (auto rule : {StepRule::Fixed, StepRule::Backtracking}) {
    InversionConfig c;
    c.step_rule = rule;
    c.max_iterations = 20;
    const auto st = run_inversion(sys, data, c);
    CHECK(st.monotone());
    CHECK(st.objective_history.back() < st.objective_history.front());
    CHECK(st.step_history.size() + 1 == st.objective_history.size());
  }
}

TEST_CASE("default step is the reciprocal gradient Lipschitz constant") {
  auto sys = test::baseline_system(16, 64);
  const auto data = MeasurementSeries::zeros(sys.grid());
  const double w = default_step(sys, data, 1.0, CtVariant::Literal);
  ConstantInputs in;
  in.bounds = sys.coefficients().bounds;
  CHECK(w == doctest::Approx(1.0 / compute_constants(in).l_g));
}

TEST_CASE("noisy data stop at the discrepancy level") {
  auto sys = test::baseline_system(16, 128);
  auto f = LoadField::sample(sys.grid(), [](double x, double t) { return 100 * std::sin(pi * x) * std::sin(pi * t); });
  auto noisy = add_noise(sys.grid(), apply_io_operators(sys, f), {0.02, 5});
  const auto data = smooth_to_h1(sys.grid(), noisy).series;
  InversionConfig c;
  c.step_rule = StepRule::Backtracking;
  c.noise_level = *noisy.noise_norm;
  c.max_iterations = 300;
  const auto st = run_inversion(sys, data, c);
  CHECK(st.stop_reason == StopReason::Discrepancy);
  CHECK(st.discrepancy_history.back() <= c.tau_d * c.noise_level);
  CHECK(st.discrepancy_history.back() >= 0.5 * c.tau_d * c.noise_level);
}

TEST_CASE("admissible radius bounds every iterate") {
  auto sys = test::baseline_system(16, 64);
  auto f = LoadField::sample(sys.grid(), [](double x, double t) { return 50 * x * t; });
  InversionConfig c;
  c.step_rule = StepRule::Backtracking;
  c.max_iterations = 15;
  c.admissible_radius = 4.0;
  const auto st = run_inversion(sys, exact_data(sys, f), c);
  CHECK(std::pow(l2_norm_spacetime(st.iterate), 2) <= 4.0 * (1 + 1e-12));
}

TEST_CASE("parametric jacobian matches finite differences") {
  SpaceTimeGrid g(1, 1, 16, 32);
  for (const auto& model : {ParametricModel::moving_gaussian(0.1), ParametricModel::modal(2, 3)}) {
    Eigen::VectorXd th = Eigen::VectorXd::LinSpaced(model.n_params(), 0.8, 1.3);
    if (model.family == LoadFamily::MovingGaussian) th << 5.0, 0.7, 0.09;
    const auto jac = model.jacobian(g, th);
    REQUIRE(static_cast<int>(jac.size()) == model.n_params());
    for (int i = 0; i < model.n_params(); ++i) {
      const double e = 1e-6;
      Eigen::VectorXd a = th, b = th;
      a(i) += e;
      b(i) -= e;
      const Eigen::MatrixXd fd = (model.evaluate(g, a).values() - model.evaluate(g, b).values()) / (2 * e);
      CHECK((fd - jac[i].values()).norm() <= 1e-6 * (1 + fd.norm()));
    }
  }
  CHECK_THROWS_AS(ParametricModel::modal(3, 3), DomainError);
}

TEST_CASE("noiseless moving gaussian is recovered within 1%") {
  auto sys = test::baseline_system(64, 256);
  const auto model = ParametricModel::moving_gaussian(0.0);
  Eigen::Vector3d truth(500, 0.9, 0.06);
  const auto data = exact_data(sys, model.evaluate(sys.grid(), truth));
  ParametricConfig c;
  c.model = model;
  c.initial = Eigen::Vector3d(1, 0.8, 0.08);
  const auto r = reconstruct_parametric(sys, data, c);
  CHECK(r.identifiable);
  for (int i = 0; i < 3; ++i) CHECK(r.params(i) == doctest::Approx(truth(i)).epsilon(0.01));
}

TEST_CASE("noiseless modal coefficients are recovered") {
  auto sys = test::baseline_system(32, 128);
  const auto model = ParametricModel::modal(2, 2);
  Eigen::Vector4d truth(30, -10, 5, 8);
  const auto data = exact_data(sys, model.evaluate(sys.grid(), truth));
  ParametricConfig c;
  c.model = model;
  c.initial = Eigen::Vector4d::Zero();
  const auto r = reconstruct_parametric(sys, data, c);
  CHECK(r.converged);
  CHECK((r.params - truth).norm() <= 1e-3 * truth.norm());
  CHECK(r.names[1] == "c_1_2");
}

TEST_CASE("zero load with noise gives an amplitude near the noise floor") {
  auto sys = test::baseline_system(64, 256);
  const auto& g = sys.grid();
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n(0, 1e-3);
  auto data = MeasurementSeries::zeros(g);
  for (int k = 0; k < g.n_times(); ++k) {
    data.theta0(k) = n(rng);
    data.thetaL(k) = n(rng);
  }
  data.noise_norm = std::hypot(time_norm(g, data.theta0), time_norm(g, data.thetaL));
  const auto sm = smooth_to_h1(g, data).series;
  ParametricConfig c;
  c.model = ParametricModel::moving_gaussian(0.0);
  c.initial = Eigen::Vector3d(1, 1, 0.05);
  c.noise_level = *data.noise_norm;
  const auto r = reconstruct_parametric(sys, sm, c);
  CHECK(r.amplitude_noise_floor > 0);
  CHECK(std::abs(r.params(0)) <= 3 * r.amplitude_noise_floor);
}
