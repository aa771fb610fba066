#include "support.hpp"

#include "beamid/verification.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace beamid;
using std::numbers::pi;

TEST_CASE("poincare inequality for sin(pi x) on the unit beam") {
  // int v_x^2 = pi^2 / 2 <= (1/2) int v_xx^2 = pi^4 / 4
  SpaceTimeGrid g(1, 1, 64, 4);
  const auto sm = assemble(g, test::baseline_coefficients(g.n_nodes()));
  const DofMap& d = sm.dofs;
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(d.size(), 1);
  for (int i = 0; i < g.n_nodes(); ++i) {
    if (d.deflection(i) >= 0) v(d.deflection(i), 0) = std::sin(pi * g.x(i));
    v(d.rotation(i), 0) = pi * std::cos(pi * g.x(i));
  }
  InequalityReport r;
  check_poincare(r, v, sm, 1.0, "sine");
  REQUIRE(r.checks.size() == 1);
  CHECK(r.checks[0].lhs == doctest::Approx(pi * pi / 2).epsilon(1e-4));
  CHECK(r.checks[0].rhs == doctest::Approx(pi * pi * pi * pi / 4).epsilon(1e-4));
  CHECK(r.ok());
}

TEST_CASE("suite scenarios are reproducible and admissible") {
  SuiteOptions o;
  o.n_elements = 16;
  o.n_steps = 64;
  const auto a = make_suite_scenario(o, 3);
  const auto b = make_suite_scenario(o, 3);
  CHECK(a.description == b.description);
  CHECK(a.load.values() == b.load.values());
  CHECK(validate_coefficients(a.coefficients).ok());
  CHECK(a.p(a.grid.n_steps()) == doctest::Approx(0.0).scale(1.0));
  CHECK(a.q(a.grid.n_steps()) == doctest::Approx(0.0).scale(1.0));
  CHECK(make_suite_scenario(o, 4).description != a.description);
}

TEST_CASE("small suite passes and does not depend on the thread count") {
  SuiteOptions o;
  o.n_scenarios = 3;
  o.n_elements = 32;
  o.n_steps = 256;
  o.gradient_tolerance = 2e-2;  // the 5e-3 default is calibrated for 64 x 512
  o.threads = 1;
  const auto one = verify_inequality_suite(o);
  o.threads = 3;
  const auto three = verify_inequality_suite(o);
  CHECK(one.ok());
  REQUIRE(one.checks.checks.size() == three.checks.checks.size());
  for (std::size_t i = 0; i < one.checks.checks.size(); ++i) {
    CHECK(one.checks.checks[i].check == three.checks.checks[i].check);
    CHECK(one.checks.checks[i].lhs == three.checks.checks[i].lhs);
  }
  // 6 + 4 + 1 + 2 + 1 + 6 + 1 + duality + gradient_fd per scenario
  CHECK(one.checks.checks.size() == 3 * 23);
}

TEST_CASE("negative control: wrong adjoint sign is caught") {
  SuiteOptions o;
  o.n_scenarios = 2;
  o.n_elements = 16;
  o.n_steps = 128;
  o.adjoint.boundary_sign = -1;
  const auto r = verify_inequality_suite(o);
  int flagged = 0;
  for (const auto& c : r.checks.checks)
    if (c.check == "duality" || c.check == "gradient_fd") {
      CHECK_FALSE(c.pass);
      ++flagged;
    }
  CHECK(flagged == 4);
  std::ostringstream os;
  r.write_text(os);
  CHECK(os.str().find("REPRODUCE") != std::string::npos);
}

TEST_CASE("empty suite is vacuously ok") {
  SuiteOptions o;
  o.n_scenarios = 0;
  CHECK(verify_inequality_suite(o).ok());
}
