#include "support.hpp"

#include "beamid/constants.hpp"
#include "beamid/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace beamid;

namespace {

ConstantInputs unit_inputs() {
  ConstantInputs in;
  in.bounds = test::baseline_coefficients(3).bounds;
  in.admissible_radius = 4.0;
  in.theta0_norm = 0.5;
  in.thetaL_norm = 0.25;
  return in;
}

}  // namespace

TEST_CASE("constants at unit length, time and mass") {
  const auto c = compute_constants(unit_inputs());
  CHECK(c.ce_sq == doctest::Approx(std::numbers::e));
  CHECK(c.c1_sq == doctest::Approx(2.863803).epsilon(1e-6));
  CHECK(c.c_t == doctest::Approx(2.0));
  CHECK(c.c_t_alt == doctest::Approx(2.0));  // both readings agree at T = 1
  CHECK(c.c_l == doctest::Approx(std::sqrt(2.863803)).epsilon(1e-6));
  CHECK(c.c0_sq == doctest::Approx(40.0 / 3));

  // L_G = sqrt((e^T - 1) / (2 kappa_0)) l^2 C_0 C_1 with kappa_0 = 0.05
  const double lg = std::sqrt((std::numbers::e - 1) / 0.1) * std::sqrt(40.0 / 3) * std::sqrt(2.863803);
  CHECK(c.l_g == doctest::Approx(lg).epsilon(1e-6));

  // C_J = [2 C_1 C_F / sqrt(r_0) + ||theta_0|| + ||theta_l||] C_L
  const double c1 = std::sqrt(2.863803);
  CHECK(c.c_j == doctest::Approx((2 * c1 * 4.0 + 0.75) * c1).epsilon(1e-6));
}

TEST_CASE("C_T readings differ away from T = 1") {
  CHECK(ct_value(0.5, CtVariant::Literal) == doctest::Approx(4.0));
  CHECK(ct_value(3.0, CtVariant::Literal) == doctest::Approx(4.0));
  CHECK(ct_value(3.0, CtVariant::Corrected) == doctest::Approx(3.0));
  auto in = unit_inputs();
  in.final_time = 3.0;
  in.ct_variant = CtVariant::Corrected;
  const auto c = compute_constants(in);
  CHECK(c.c_t == doctest::Approx(3.0));
  CHECK(c.c_t_alt == doctest::Approx(4.0));
  CHECK(c.l_g < c.l_g_alt);
  CHECK(parse_ct_variant("corrected") == CtVariant::Corrected);
  CHECK_THROWS(parse_ct_variant("other"));
}

TEST_CASE("constants reject non-positive inputs") {
  auto in = unit_inputs();
  in.bounds.kv_min = 0;
  CHECK_THROWS_AS(compute_constants(in), DomainError);
  in = unit_inputs();
  in.admissible_radius = 0;
  CHECK_THROWS_AS(compute_constants(in), DomainError);
}

TEST_CASE("inequality report slack and csv") {
  InequalityReport r;
  r.add("a", "s0", 1.04, 1.0);
  r.add("b", "s0", 1.06, 1.0);
  CHECK(r.violations() == 1);
  CHECK_FALSE(r.ok());
  std::ostringstream os;
  r.write_csv(os);
  CHECK(os.str().rfind("check,scenario,lhs,rhs,pass\n", 0) == 0);
}
