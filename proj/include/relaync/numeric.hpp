// Copyright 2026 The relaync Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef RELAYNC_NUMERIC_HPP
#define RELAYNC_NUMERIC_HPP

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <vector>

namespace relaync {

using cplx = std::complex<double>;

// Smallest singular value of a training matrix must exceed this fraction of
// the largest one before we build a projection from it.
inline constexpr double kRankTolerance = 1e-10;
// Smallest eigenvalue of a matrix handed to invert_hermitian, relative to
// the largest diagonal entry.
inline constexpr double kPdTolerance = 1e-12;
// Per-entry residual allowed for M * inv(M) - I.
inline constexpr double kInverseResidual = 1e-9;
// Per-entry asymmetry allowed for a Hermitian-tagged matrix.
inline constexpr double kHermitianTolerance = 1e-12;

class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CVec {
 public:
  CVec() = default;
  explicit CVec(std::size_t n) : v_(n) {}
  CVec(std::initializer_list<cplx> init) : v_(init) {}
  explicit CVec(std::vector<cplx> v) : v_(std::move(v)) {}

  std::size_t size() const { return v_.size(); }
  cplx& operator[](std::size_t i) { return v_[i]; }
  const cplx& operator[](std::size_t i) const { return v_[i]; }
  const std::vector<cplx>& entries() const { return v_; }

  CVec& operator+=(const CVec& o);
  CVec& operator-=(const CVec& o);
  CVec& operator*=(cplx s);

 private:
  std::vector<cplx> v_;
};

CVec operator+(CVec a, const CVec& b);
CVec operator-(CVec a, const CVec& b);
CVec operator*(cplx s, CVec a);
CVec conj(const CVec& a);

// a^H b
cplx dot(const CVec& a, const CVec& b);
double norm2(const CVec& a);

class CMat {
 public:
  CMat() = default;
  CMat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), d_(rows * cols) {}

  static CMat identity(std::size_t n);
  static CMat diagonal(const std::vector<cplx>& d);
  static CMat from_columns(const std::vector<CVec>& cols);
  // a b^H
  static CMat outer(const CVec& a, const CVec& b);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  cplx& operator()(std::size_t i, std::size_t j) { return d_[i * cols_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return d_[i * cols_ + j]; }

  CVec column(std::size_t j) const;
  CMat adjoint() const;
  cplx trace() const;

  CMat& operator+=(const CMat& o);
  CMat& operator-=(const CMat& o);
  CMat& operator*=(cplx s);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> d_;
};

CMat operator+(CMat a, const CMat& b);
CMat operator-(CMat a, const CMat& b);
CMat operator*(cplx s, CMat a);
CMat operator*(const CMat& a, const CMat& b);
CVec operator*(const CMat& a, const CVec& x);

double max_abs_diff(const CMat& a, const CMat& b);
bool is_hermitian(const CMat& m, double tol = kHermitianTolerance);

// Cholesky-based inverse of a Hermitian positive definite matrix. The result
// is checked against the input before it is returned.
CMat invert_hermitian(const CMat& m);

// Hermitian eigenvalues in ascending order (cyclic Jacobi). Meant for the
// small matrices in this library and for test oracles.
std::vector<double> hermitian_eigenvalues(const CMat& m);

// P_T = T (T^H T)^{-1} T^H.
CMat projection_onto_columns(const CMat& t);

// (T^H T)^{-1} T^H, the least-squares left inverse.
CMat pseudo_inverse(const CMat& t);

}  // namespace relaync

#endif  // RELAYNC_NUMERIC_HPP
