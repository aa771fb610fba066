#pragma once

#include <Eigen/Dense>

#include <iosfwd>

namespace beamid {

/// Symmetric band matrix stored by its lower band: entry (i, j) with
/// 0 <= i - j <= half_bandwidth lives at band_(i, i - j).
class SymmetricBandMatrix {
 public:
  SymmetricBandMatrix() = default;
  SymmetricBandMatrix(int n, int half_bandwidth);

  int size() const { return n_; }
  int half_bandwidth() const { return kd_; }

  /// Entry (i, j); zero outside the band.
  double operator()(int i, int j) const;
  /// Adds v to entry (i, j) (and by symmetry to (j, i)).
  void add(int i, int j, double v);

  Eigen::VectorXd operator*(const Eigen::VectorXd& x) const;
  /// y += alpha * A x
  void multiply_add(const Eigen::VectorXd& x, Eigen::VectorXd& y, double alpha = 1.0) const;
  /// x^T A x
  double quadratic_form(const Eigen::VectorXd& x) const;

  SymmetricBandMatrix& operator+=(const SymmetricBandMatrix& other);
  SymmetricBandMatrix& operator*=(double s);
  friend SymmetricBandMatrix operator+(SymmetricBandMatrix a, const SymmetricBandMatrix& b) {
    return a += b;
  }
  friend SymmetricBandMatrix operator*(double s, SymmetricBandMatrix a) { return a *= s; }

  Eigen::MatrixXd to_dense() const;

  /// Coordinate dump `row,col,value`, both triangles, row-major order.
  void write_coordinates(std::ostream& os) const;

 private:
  int n_ = 0;
  int kd_ = 0;
  Eigen::MatrixXd band_;
};

/// Cholesky factorization A = L L^T of a symmetric positive definite band
/// matrix; L keeps the bandwidth of A.
class BandCholesky {
 public:
  /// Throws InternalError if A is not numerically positive definite.
  explicit BandCholesky(const SymmetricBandMatrix& a);

  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  void solve_in_place(Eigen::VectorXd& b) const;
  int size() const { return n_; }

 private:
  int n_ = 0;
  int kd_ = 0;
  Eigen::MatrixXd l_;  // l_(i, d) = L(i, i - d)
};

}  // namespace beamid
