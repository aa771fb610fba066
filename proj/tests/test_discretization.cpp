#include "support.hpp"

#include "beamid/banded.hpp"
#include "beamid/discretization.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace beamid;
using std::numbers::pi;

TEST_CASE("hermite curvature element matrix, unit length") {
  const auto k = element_matrix(Form::Curvature, 1.0, 1.0, 1.0);
  CHECK(k[0][0] == doctest::Approx(12.0));
  CHECK(k[0][2] == doctest::Approx(-12.0));
  CHECK(k[0][1] == doctest::Approx(6.0));
  CHECK(k[1][1] == doctest::Approx(4.0));
  CHECK(k[1][3] == doctest::Approx(2.0));

  const auto m = element_matrix(Form::Mass, 1.0, 1.0, 1.0);
  CHECK(m[0][0] == doctest::Approx(156.0 / 420));
  CHECK(m[0][2] == doctest::Approx(54.0 / 420));

  // Symmetric for linearly varying coefficients too.
  const auto s = element_matrix(Form::Slope, 0.3, 1.0, 4.0);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) CHECK(s[i][j] == doctest::Approx(s[j][i]));
}

TEST_CASE("consistent mass integrates to the beam mass") {
  SpaceTimeGrid g(1.7, 1, 12, 4);
  Eigen::VectorXd rho = Eigen::VectorXd::Constant(g.n_nodes(), 2.0);
  const auto m = assemble_unconstrained(g, rho, Form::Mass);
  Eigen::VectorXd one = Eigen::VectorXd::Zero(2 * g.n_nodes());
  for (int i = 0; i < g.n_nodes(); ++i) one(2 * i) = 1.0;  // u = 1, u' = 0
  CHECK(m.quadratic_form(one) == doctest::Approx(2.0 * 1.7));
}

TEST_CASE("natural frequencies of the simply supported beam within 1%") {
  // omega_j^2 = (r (j pi / l)^4 + T_r (j pi / l)^2) / rho
  const double rho = 1.3, tension = 0.2, r = 0.8, l = 1.5;
  SpaceTimeGrid g(l, 1, 32, 4);
  auto c = CoefficientSet::constant_tight(g.n_nodes(), rho, 0.1, tension, r, 0.05);
  const auto sm = assemble(g, c);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(sm.stiffness().to_dense(),
                                                               sm.mass.to_dense());
  for (int j = 1; j <= 5; ++j) {
    const double k = j * pi / l;
    const double exact = (r * k * k * k * k + tension * k * k) / rho;
    CHECK(es.eigenvalues()(j - 1) == doctest::Approx(exact).epsilon(0.01));
  }
}

TEST_CASE("dof map ordering") {
  DofMap d(5);
  CHECK(d.size() == 8);
  CHECK(d.left_rotation() == 0);
  CHECK(d.deflection(1) == 1);
  CHECK(d.rotation(1) == 2);
  CHECK(d.deflection(0) == -1);
  CHECK(d.deflection(4) == -1);
  CHECK(d.right_rotation() == 7);
}

TEST_CASE("banded cholesky matches a dense solve") {
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(-1, 1);
  const int n = 30, kd = 3;
  SymmetricBandMatrix a(n, kd);
  for (int i = 0; i < n; ++i) {
    a.add(i, i, 10.0);
    for (int d = 1; d <= kd && i - d >= 0; ++d) a.add(i, i - d, u(rng));
  }
  Eigen::VectorXd b = Eigen::VectorXd::NullaryExpr(n, [&] { return u(rng); });
  const Eigen::VectorXd x = BandCholesky(a).solve(b);
  const Eigen::VectorXd ref = a.to_dense().llt().solve(b);
  CHECK((x - ref).norm() < 1e-12);
  CHECK((a * x - b).norm() < 1e-12);

  SymmetricBandMatrix indefinite(3, 1);
  indefinite.add(0, 0, 1);
  indefinite.add(1, 1, -1);
  indefinite.add(2, 2, 1);
  CHECK_THROWS(BandCholesky{indefinite});
}

TEST_CASE("consistent load vector integrates against the shape functions") {
  // For F = 1 the w-entries sum to l (partition of unity) and the end rotation
  // entries are +-h^2/12.
  SpaceTimeGrid g(1, 1, 10, 4);
  DofMap d(g.n_nodes());
  Eigen::VectorXd one = Eigen::VectorXd::Ones(g.n_nodes());
  const auto f = load_vector(g, d, one);
  double wsum = 0;
  for (int i = 1; i < g.n_nodes() - 1; ++i) wsum += f(d.deflection(i));
  CHECK(wsum == doctest::Approx(1.0 - g.h()));  // the two half elements at the supports are dropped
  CHECK(f(d.left_rotation()) == doctest::Approx(g.h() * g.h() / 12));
  CHECK(f(d.right_rotation()) == doctest::Approx(-g.h() * g.h() / 12));
}
