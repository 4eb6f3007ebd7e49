// Copyright 2026 The relaync Authors
// SPDX-License-Identifier: Apache-2.0

#include "relaync/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace relaync {
namespace {

void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) throw std::invalid_argument(std::string(what) + ": size mismatch");
}

// Lower-triangular Cholesky factor; throws when a pivot falls below the PD
// tolerance.
CMat cholesky(const CMat& m) {
  const std::size_t n = m.rows();
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(m(i, i).real()));
  if (scale == 0.0) throw SingularMatrixError("cholesky: zero matrix");

  CMat l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    cplx s = m(j, j);
    for (std::size_t k = 0; k < j; ++k) s -= l(j, k) * std::conj(l(j, k));
    const double pivot = s.real();
    if (!(pivot > kPdTolerance * scale)) {
      throw SingularMatrixError("matrix is not positive definite");
    }
    const double d = std::sqrt(pivot);
    l(j, j) = d;
    for (std::size_t i = j + 1; i < n; ++i) {
      cplx t = m(i, j);
      for (std::size_t k = 0; k < j; ++k) t -= l(i, k) * std::conj(l(j, k));
      l(i, j) = t / d;
    }
  }
  return l;
}

}  // namespace

CVec& CVec::operator+=(const CVec& o) {
  require_same_size(size(), o.size(), "CVec +=");
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
  return *this;
}

CVec& CVec::operator-=(const CVec& o) {
  require_same_size(size(), o.size(), "CVec -=");
  for (std::size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
  return *this;
}

CVec& CVec::operator*=(cplx s) {
  for (auto& x : v_) x *= s;
  return *this;
}

CVec operator+(CVec a, const CVec& b) { return a += b; }
CVec operator-(CVec a, const CVec& b) { return a -= b; }
CVec operator*(cplx s, CVec a) { return a *= s; }

CVec conj(const CVec& a) {
  CVec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = std::conj(a[i]);
  return out;
}

cplx dot(const CVec& a, const CVec& b) {
  require_same_size(a.size(), b.size(), "dot");
  cplx s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

double norm2(const CVec& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i]);
  return s;
}

CMat CMat::identity(std::size_t n) {
  CMat m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

CMat CMat::diagonal(const std::vector<cplx>& d) {
  CMat m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

CMat CMat::from_columns(const std::vector<CVec>& cols) {
  if (cols.empty()) throw std::invalid_argument("from_columns: no columns");
  const std::size_t n = cols.front().size();
  CMat m(n, cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j) {
    require_same_size(cols[j].size(), n, "from_columns");
    for (std::size_t i = 0; i < n; ++i) m(i, j) = cols[j][i];
  }
  return m;
}

CMat CMat::outer(const CVec& a, const CVec& b) {
  CMat m(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) m(i, j) = a[i] * std::conj(b[j]);
  return m;
}

CVec CMat::column(std::size_t j) const {
  CVec c(rows_);
  for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
  return c;
}

CMat CMat::adjoint() const {
  CMat m(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) m(j, i) = std::conj((*this)(i, j));
  return m;
}

cplx CMat::trace() const {
  cplx s = 0.0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) s += (*this)(i, i);
  return s;
}

CMat& CMat::operator+=(const CMat& o) {
  require_same_size(rows_, o.rows_, "CMat +=");
  require_same_size(cols_, o.cols_, "CMat +=");
  for (std::size_t i = 0; i < d_.size(); ++i) d_[i] += o.d_[i];
  return *this;
}

CMat& CMat::operator-=(const CMat& o) {
  require_same_size(rows_, o.rows_, "CMat -=");
  require_same_size(cols_, o.cols_, "CMat -=");
  for (std::size_t i = 0; i < d_.size(); ++i) d_[i] -= o.d_[i];
  return *this;
}

CMat& CMat::operator*=(cplx s) {
  for (auto& x : d_) x *= s;
  return *this;
}

CMat operator+(CMat a, const CMat& b) { return a += b; }
CMat operator-(CMat a, const CMat& b) { return a -= b; }
CMat operator*(cplx s, CMat a) { return a *= s; }

CMat operator*(const CMat& a, const CMat& b) {
  require_same_size(a.cols(), b.rows(), "CMat *");
  CMat m(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const cplx aik = a(i, k);
      if (aik == cplx(0.0)) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) m(i, j) += aik * b(k, j);
    }
  return m;
}

CVec operator*(const CMat& a, const CVec& x) {
  require_same_size(a.cols(), x.size(), "CMat * CVec");
  CVec y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    cplx s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

double max_abs_diff(const CMat& a, const CMat& b) {
  require_same_size(a.rows(), b.rows(), "max_abs_diff");
  require_same_size(a.cols(), b.cols(), "max_abs_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
  return m;
}

bool is_hermitian(const CMat& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return max_abs_diff(m, m.adjoint()) <= tol;
}

CMat invert_hermitian(const CMat& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("invert_hermitian: not square");
  const std::size_t n = m.rows();
  const CMat l = cholesky(m);

  // Invert L by forward substitution, then inv(M) = inv(L)^H inv(L).
  CMat li(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    li(j, j) = 1.0 / l(j, j);
    for (std::size_t i = j + 1; i < n; ++i) {
      cplx s = 0.0;
      for (std::size_t k = j; k < i; ++k) s += l(i, k) * li(k, j);
      li(i, j) = -s / l(i, i);
    }
  }
  CMat inv = li.adjoint() * li;
  // Symmetrize away rounding so the result is Hermitian-tagged.
  for (std::size_t i = 0; i < n; ++i) {
    inv(i, i) = inv(i, i).real();
    for (std::size_t j = i + 1; j < n; ++j) {
      const cplx avg = 0.5 * (inv(i, j) + std::conj(inv(j, i)));
      inv(i, j) = avg;
      inv(j, i) = std::conj(avg);
    }
  }

  const double residual = max_abs_diff(m * inv, CMat::identity(n));
  if (!(residual <= kInverseResidual)) {
    throw SingularMatrixError("invert_hermitian: residual " + std::to_string(residual));
  }
  return inv;
}

std::vector<double> hermitian_eigenvalues(const CMat& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("hermitian_eigenvalues: not square");
  const std::size_t n = m.rows();
  CMat a = m;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += std::norm(a(p, q));
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double mag = std::abs(a(p, q));
        if (mag < 1e-300) continue;
        // Complex Jacobi rotation zeroing a(p,q).
        const cplx phase = a(p, q) / mag;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double theta = 0.5 * std::atan2(2.0 * mag, aqq - app);
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        for (std::size_t k = 0; k < n; ++k) {
          const cplx akp = a(k, p);
          const cplx akq = a(k, q);
          a(k, p) = c * akp - s * std::conj(phase) * akq;
          a(k, q) = s * phase * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const cplx apk = a(p, k);
          const cplx aqk = a(q, k);
          a(p, k) = c * apk - s * phase * aqk;
          a(q, k) = s * std::conj(phase) * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a(i, i).real();
  std::sort(ev.begin(), ev.end());
  return ev;
}

CMat pseudo_inverse(const CMat& t) {
  const CMat th = t.adjoint();
  const CMat gram = th * t;
  const auto ev = hermitian_eigenvalues(gram);
  // Eigenvalues of the Gram matrix are squared singular values.
  if (!(ev.back() > 0.0) || !(ev.front() > kRankTolerance * kRankTolerance * ev.back())) {
    throw SingularMatrixError("matrix does not have full column rank");
  }
  return invert_hermitian(gram) * th;
}

CMat projection_onto_columns(const CMat& t) {
  CMat p = t * pseudo_inverse(t);
  for (std::size_t i = 0; i < p.rows(); ++i) {
    p(i, i) = p(i, i).real();
    for (std::size_t j = i + 1; j < p.cols(); ++j) p(j, i) = std::conj(p(i, j));
  }
  return p;
}

}  // namespace relaync
