#include "beamid/banded.hpp"

#include "beamid/errors.hpp"
#include "csv_util.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace beamid {

SymmetricBandMatrix::SymmetricBandMatrix(int n, int half_bandwidth)
    : n_(n), kd_(half_bandwidth), band_(Eigen::MatrixXd::Zero(n, half_bandwidth + 1)) {}

double SymmetricBandMatrix::operator()(int i, int j) const {
  if (i < j) std::swap(i, j);
  const int d = i - j;
  return d > kd_ ? 0.0 : band_(i, d);
}

void SymmetricBandMatrix::add(int i, int j, double v) {
  if (i < j) std::swap(i, j);
  const int d = i - j;
  if (d > kd_) throw InternalError("entry outside the matrix band");
  band_(i, d) += v;
}

void SymmetricBandMatrix::multiply_add(const Eigen::VectorXd& x, Eigen::VectorXd& y,
                                       double alpha) const {
  for (int i = 0; i < n_; ++i) {
    double acc = band_(i, 0) * x(i);
    const int dmax = std::min(kd_, i);
    for (int d = 1; d <= dmax; ++d) acc += band_(i, d) * x(i - d);
    for (int d = 1; d <= kd_ && i + d < n_; ++d) acc += band_(i + d, d) * x(i + d);
    y(i) += alpha * acc;
  }
}

Eigen::VectorXd SymmetricBandMatrix::operator*(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n_);
  multiply_add(x, y);
  return y;
}

double SymmetricBandMatrix::quadratic_form(const Eigen::VectorXd& x) const {
  double acc = 0;
  for (int i = 0; i < n_; ++i) {
    double row = 0.5 * band_(i, 0) * x(i);
    const int dmax = std::min(kd_, i);
    for (int d = 1; d <= dmax; ++d) row += band_(i, d) * x(i - d);
    acc += row * x(i);
  }
  return 2 * acc;
}

SymmetricBandMatrix& SymmetricBandMatrix::operator+=(const SymmetricBandMatrix& other) {
  if (other.n_ != n_ || other.kd_ != kd_) throw DimensionError("band matrix shape mismatch");
  band_ += other.band_;
  return *this;
}

SymmetricBandMatrix& SymmetricBandMatrix::operator*=(double s) {
  band_ *= s;
  return *this;
}

Eigen::MatrixXd SymmetricBandMatrix::to_dense() const {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int d = 0; d <= std::min(kd_, i); ++d) {
      a(i, i - d) = band_(i, d);
      a(i - d, i) = band_(i, d);
    }
  return a;
}

void SymmetricBandMatrix::write_coordinates(std::ostream& os) const {
  os << "row,col,value\n";
  for (int i = 0; i < n_; ++i)
    for (int j = std::max(0, i - kd_); j <= std::min(n_ - 1, i + kd_); ++j) {
      const double v = (*this)(i, j);
      if (v != 0.0) os << i << ',' << j << ',' << detail::fmt_double(v) << '\n';
    }
}

BandCholesky::BandCholesky(const SymmetricBandMatrix& a)
    : n_(a.size()), kd_(a.half_bandwidth()), l_(Eigen::MatrixXd::Zero(n_, kd_ + 1)) {
  for (int i = 0; i < n_; ++i) l_(i, 0) = a(i, i);
  for (int i = 0; i < n_; ++i)
    for (int d = 1; d <= std::min(kd_, i); ++d) l_(i, d) = a(i, i - d);

  for (int j = 0; j < n_; ++j) {
    double diag = l_(j, 0);
    for (int k = std::max(0, j - kd_); k < j; ++k) {
      const double ljk = l_(j, j - k);
      diag -= ljk * ljk;
    }
    if (!(diag > 0) || !std::isfinite(diag))
      throw InternalError("band matrix is not positive definite (pivot " + std::to_string(j) +
                          ")");
    const double ljj = std::sqrt(diag);
    l_(j, 0) = ljj;
    for (int i = j + 1; i <= std::min(n_ - 1, j + kd_); ++i) {
      double s = l_(i, i - j);
      for (int k = std::max(0, i - kd_); k < j; ++k) s -= l_(i, i - k) * l_(j, j - k);
      l_(i, i - j) = s / ljj;
    }
  }
}

void BandCholesky::solve_in_place(Eigen::VectorXd& b) const {
  if (b.size() != n_) throw DimensionError("right-hand side size mismatch");
  for (int i = 0; i < n_; ++i) {
    double s = b(i);
    for (int k = std::max(0, i - kd_); k < i; ++k) s -= l_(i, i - k) * b(k);
    b(i) = s / l_(i, 0);
  }
  for (int i = n_ - 1; i >= 0; --i) {
    double s = b(i);
    for (int k = i + 1; k <= std::min(n_ - 1, i + kd_); ++k) s -= l_(k, k - i) * b(k);
    b(i) = s / l_(i, 0);
  }
}

Eigen::VectorXd BandCholesky::solve(const Eigen::VectorXd& b) const {
  Eigen::VectorXd x = b;
  solve_in_place(x);
  return x;
}

}  // namespace beamid
