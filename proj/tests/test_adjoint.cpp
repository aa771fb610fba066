#include "support.hpp"

#include "beamid/adjoint_solver.hpp"
#include "beamid/errors.hpp"
#include "beamid/measurements.hpp"
#include "beamid/objective.hpp"
#include "beamid/verification.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

using namespace beamid;
using std::numbers::pi;

namespace {

Eigen::VectorXd series(const SpaceTimeGrid& g, double (*fn)(double, double), double T) {
  Eigen::VectorXd s(g.n_times());
  for (int n = 0; n < g.n_times(); ++n) s(n) = fn(g.t(n), T);
  return s;
}

double p_fn(double t, double T) { return std::sin(pi * t / T) + 0.5 * std::sin(3 * pi * t / T); }
double q_fn(double t, double T) { return 1 - t / T; }

LoadField smooth_increment(const SpaceTimeGrid& g) {
  return LoadField::sample(g, [](double x, double t) {
    return std::sin(pi * x) * std::cos(2 * t) + 0.3 * std::sin(2 * pi * x) * t;
  });
}

}  // namespace

TEST_CASE("zero boundary data gives the zero adjoint") {
  auto sys = test::baseline_system(16, 64);
  const auto z = Eigen::VectorXd::Zero(sys.grid().n_times());
  const auto adj = solve_adjoint(sys, z, z);
  CHECK(adj.phi.norm() == 0.0);
  CHECK(adj.phi_t.norm() == 0.0);
}

TEST_CASE("adjoint vanishes at the final time") {
  auto sys = test::baseline_system(16, 64);
  const auto& g = sys.grid();
  const auto adj = solve_adjoint(sys, series(g, p_fn, 1), series(g, q_fn, 1));
  CHECK(adj.phi.col(g.n_steps()).norm() == 0.0);
  CHECK(adj.phi.norm() > 0.0);
}

TEST_CASE("duality residual is small and shrinks under refinement") {
  double res[2];
  for (int k = 0; k < 2; ++k) {
    auto sys = test::baseline_system(32 << k, 256 << k);
    const auto& g = sys.grid();
    const auto d = duality_residual(sys, smooth_increment(g), series(g, p_fn, 1), series(g, q_fn, 1));
    CHECK(std::abs(d.volume_side) > 0);
    res[k] = d.residual;
  }
  CHECK(res[0] < 1e-3);
  CHECK(res[0] / res[1] > 3.0);
}

TEST_CASE("flipping the adjoint boundary sign breaks duality") {
  auto sys = test::baseline_system(16, 128);
  const auto& g = sys.grid();
  AdjointOptions bad;
  bad.boundary_sign = -1;
  const auto d = duality_residual(sys, smooth_increment(g), series(g, p_fn, 1), series(g, q_fn, 1), bad);
  CHECK(d.residual == doctest::Approx(2.0).epsilon(0.01));
}

TEST_CASE("objective vanishes at the data-generating load and its gradient is zero") {
  auto sys = test::baseline_system(16, 64);
  auto f = LoadField::sample(sys.grid(), [](double x, double t) { return 10 * x * (1 - x) * t; });
  auto data = apply_io_operators(sys, f);
  auto sm = smooth_to_h1(sys.grid(), data, 0.0).series;
  sm.theta0 = data.theta0;
  sm.thetaL = data.thetaL;
  const auto g = compute_gradient(sys, f, sm);
  CHECK(g.objective.value == 0.0);
  CHECK(g.norm == 0.0);
}

TEST_CASE("objective is half the squared residual") {
  auto sys = test::baseline_system(16, 64);
  const auto& g = sys.grid();
  auto m = MeasurementSeries::zeros(g);
  m.theta0.setConstant(0.3);
  m.thetaL.setConstant(-0.4);
  const auto j = evaluate_objective(sys, LoadField(g), m);
  CHECK(j.value == doctest::Approx(0.5 * (0.09 + 0.16)));
  CHECK(j.discrepancy() == doctest::Approx(0.5));
}

TEST_CASE("adjoint gradient matches central differences") {
  auto sys = test::baseline_system(32, 256);
  const auto& g = sys.grid();
  auto f = LoadField::sample(g, [](double x, double t) { return 20 * std::exp(-40 * (x - 0.3 - 0.4 * t) * (x - 0.3 - 0.4 * t)); });
  auto other = LoadField::sample(g, [](double x, double t) { return 15 * std::sin(pi * x) * t; });
  const auto data = smooth_to_h1(g, apply_io_operators(sys, other), 0.0).series;
  const std::vector<LoadField> dirs = {
      smooth_increment(g),
      LoadField::sample(g, [](double x, double t) { return std::cos(3 * x) * std::exp(-t); }),
      LoadField::sample(g, [](double x, double t) { return x * x * std::sin(7 * t); })};
  for (const auto& d : dirs) CHECK(gradient_fd_mismatch(sys, f, data, d) < 5e-3);
}

TEST_CASE("gradient warns once per call on raw measurements") {
  auto sys = test::baseline_system(8, 16);
  std::vector<std::string> seen;
  auto prev = set_warning_sink([&](std::string_view m) { seen.emplace_back(m); });
  compute_gradient(sys, LoadField(sys.grid()), MeasurementSeries::zeros(sys.grid()));
  set_warning_sink(prev);
  CHECK(seen.size() == 1);
}

TEST_CASE("adjoint estimates need derivative series") {
  auto sys = test::baseline_system(16, 64);
  const auto& g = sys.grid();
  const auto adj = solve_adjoint(sys, series(g, p_fn, 1), series(g, q_fn, 1));
  ConstantInputs in;
  in.bounds = sys.coefficients().bounds;
  const auto c = compute_constants(in);
  CHECK_THROWS_AS(check_adjoint_estimates(adj, c, sys), PreconditionError);
}
