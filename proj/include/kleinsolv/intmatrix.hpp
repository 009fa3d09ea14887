#pragma once

#include <gmpxx.h>

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace kleinsolv::linalg {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// Integer vector with arbitrary-precision entries.
using ZVec = std::vector<mpz_class>;

ZVec zvec_from(const std::vector<long>& v);
Vec zvec_to_real(const ZVec& v);

/// Square integer matrix with arbitrary-precision entries and exact
/// arithmetic: Bareiss determinants, binary powers, adjugate inverses.
class IntMatrix {
public:
  IntMatrix() = default;
  explicit IntMatrix(int n) : n_(n), a_(static_cast<size_t>(n) * n, mpz_class(0)) {}

  static IntMatrix identity(int n);
  static IntMatrix from_rows(const std::vector<std::vector<long>>& rows);
  /// Nearest-integer rounding of a real matrix.
  static IntMatrix round_from(const Mat& a);

  int dim() const { return n_; }

  mpz_class& at(int i, int j) { return a_[static_cast<size_t>(i) * n_ + j]; }
  const mpz_class& at(int i, int j) const { return a_[static_cast<size_t>(i) * n_ + j]; }

  bool operator==(const IntMatrix& o) const { return n_ == o.n_ && a_ == o.a_; }

  IntMatrix operator*(const IntMatrix& o) const;
  IntMatrix operator-(const IntMatrix& o) const;
  ZVec apply(const ZVec& v) const;

  /// Exact determinant by fraction-free (Bareiss) elimination.
  mpz_class det() const;
  /// Adjugate matrix (transpose of the cofactor matrix), exact.
  IntMatrix adjugate() const;
  /// Exact inverse; requires |det| = 1, throws NumericError("not unimodular") otherwise.
  IntMatrix inverse_unimodular() const;
  /// Exact n-th power by binary exponentiation; n < 0 requires |det| = 1.
  IntMatrix pow(long n) const;

  Mat to_real() const;
  std::string to_string() const;

private:
  int n_ = 0;
  std::vector<mpz_class> a_;
};

struct DetPower {
  mpz_class det;
  IntMatrix power;
};

/// Exact determinant together with the exact n-th power of b.
DetPower int_det_and_power(const IntMatrix& b, long n);

/// Exact inverse over the rationals, rounded to double on exit.
/// Throws NumericError("not invertible") on singular input.
Mat inverse_exact(const IntMatrix& a);

/// Exact solve a.x = rhs over the rationals, rounded to double on exit.
Vec solve_exact(const IntMatrix& a, const ZVec& rhs);

/// Exact a^{-1} b over the rationals, rounded to double on exit.
Mat inverse_exact_times(const IntMatrix& a, const IntMatrix& b);

} // namespace kleinsolv::linalg
