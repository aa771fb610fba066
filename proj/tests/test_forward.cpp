#include "support.hpp"

#include "beamid/constants.hpp"
#include "beamid/errors.hpp"
#include "beamid/measurements.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace beamid;
using std::numbers::pi;

TEST_CASE("zero load gives the zero solution") {
  auto sys = test::baseline_system(16, 64);
  const auto tr = solve_forward(sys, LoadField(sys.grid()));
  CHECK(tr.displacement.norm() == 0.0);
  CHECK(tr.outputs.theta0.norm() == 0.0);
}

TEST_CASE("forward map is linear") {
  auto sys = test::baseline_system(16, 64);
  const auto& g = sys.grid();
  auto f1 = LoadField::sample(g, [](double x, double t) { return std::sin(3 * x) * t; });
  auto f2 = LoadField::sample(g, [](double x, double t) { return std::exp(-x) * std::cos(5 * t); });
  const auto u1 = solve_forward(sys, f1).displacement;
  const auto u2 = solve_forward(sys, f2).displacement;
  const auto u = solve_forward(sys, 2.0 * f1 - 0.5 * f2).displacement;
  CHECK((u - (2.0 * u1 - 0.5 * u2)).norm() <= 1e-12 * u.norm());
}

TEST_CASE("symmetric load gives opposite end slopes") {
  auto sys = test::baseline_system(20, 80);
  auto f = LoadField::sample(sys.grid(), [](double x, double t) {
    return std::cos(2 * pi * (x - 0.5)) * std::sin(4 * t) + (x - 0.5) * (x - 0.5);
  });
  const auto tr = solve_forward(sys, f);
  CHECK((tr.outputs.theta0 + tr.outputs.thetaL).norm() <= 1e-10 * tr.outputs.theta0.norm());
}

TEST_CASE("manufactured solution converges at second order") {
  double err[2];
  for (int k = 0; k < 2; ++k) {
    auto sys = test::baseline_system(16 << k, 128 << k);
    const auto& g = sys.grid();
    const auto f = manufactured_load(g, 1.0, 0.1, 0.2, 1.0, 0.05);
    const Eigen::MatrixXd exact = manufactured_solution(g);
    const Eigen::MatrixXd w = solve_forward(sys, f).nodal_deflection();
    err[k] = (w - exact).cwiseAbs().maxCoeff() / exact.cwiseAbs().maxCoeff();
  }
  CHECK(err[0] < 5e-3);
  CHECK(err[0] / err[1] > 3.5);
}

TEST_CASE("energy balance holds and improves under refinement") {
  double res[2];
  for (int k = 0; k < 2; ++k) {
    auto sys = test::baseline_system(16 << k, 128 << k);
    const auto f = manufactured_load(sys.grid(), 1.0, 0.1, 0.2, 1.0, 0.05);
    res[k] = energy_residual(solve_forward(sys, f), sys, f).max_residual();
  }
  CHECK(res[0] < 1e-3);
  CHECK(res[1] < res[0]);
}

TEST_CASE("mechanical energy does not grow once the load stops") {
  auto sys = test::baseline_system(24, 200);
  auto f = LoadField::sample(sys.grid(), [](double x, double t) {
    return t < 0.3 ? 50 * std::sin(pi * x) * std::sin(pi * t / 0.3) : 0.0;
  });
  const auto tr = solve_forward(sys, f);
  const auto e = mechanical_energy(tr, sys);
  const auto& g = sys.grid();
  int start = 0;
  while (g.t(start) < 0.3 + 1e-12) ++start;
  for (int n = start + 1; n < g.n_times(); ++n) CHECK(e(n) <= e(n - 1) * (1 + 1e-10));
  CHECK(e(g.n_steps()) < e(start));
}

TEST_CASE("a-priori and trace estimates hold for a rough load") {
  SpaceTimeGrid g(1.3, 0.8, 32, 160);
  Eigen::VectorXd rho(g.n_nodes()), r(g.n_nodes());
  for (int i = 0; i < g.n_nodes(); ++i) {
    rho(i) = 1.5 + 0.4 * std::sin(3 * g.x(i));
    r(i) = 2.0 + std::cos(g.x(i));
  }
  auto c = CoefficientSet::constant_tight(g.n_nodes(), 1, 0.2, 0.3, 1, 0.1);
  c.mass = rho;
  c.rigidity = r;
  c.bounds.mass_min = 1.0;
  c.bounds.mass_max = 2.0;
  c.bounds.rigidity_min = 0.9;
  c.bounds.rigidity_max = 3.0;
  BeamSystem sys(g, c);
  auto f = LoadField::sample(g, [](double x, double t) { return x < 0.5 && t > 0.2 ? 80.0 : -10.0 * t; });
  ConstantInputs in;
  in.length = g.length();
  in.final_time = g.final_time();
  in.bounds = c.bounds;
  in.admissible_radius = std::max(1.0, std::pow(l2_norm_spacetime(f), 2));
  const auto consts = compute_constants(in);
  const auto report = check_apriori_estimates(solve_forward(sys, f), f, consts, sys, "rough");
  CHECK(report.checks.size() == 10);
  CHECK(report.ok());
}

TEST_CASE("loads on the wrong grid are rejected") {
  auto sys = test::baseline_system(8, 16);
  CHECK_THROWS_AS(solve_forward(sys, LoadField(SpaceTimeGrid(1, 1, 8, 17))), DimensionError);
}
