#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qsg/scalar.hpp"

namespace qsg {

template <class T>
using Vec = std::vector<T>;

template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : r_(r), c_(c), e_(r * c, T(0)) {}
  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }
  static Matrix from_rows(const std::vector<Vec<T>>& rows, std::size_t cols) {
    Matrix m(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != cols) throw std::invalid_argument("ragged rows");
      for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
    }
    return m;
  }

  std::size_t rows() const { return r_; }
  std::size_t cols() const { return c_; }
  T& operator()(std::size_t i, std::size_t j) { return e_[i * c_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return e_[i * c_ + j]; }

  Vec<T> row(std::size_t i) const { return Vec<T>(e_.begin() + i * c_, e_.begin() + (i + 1) * c_); }
  Vec<T> col(std::size_t j) const {
    Vec<T> v(r_);
    for (std::size_t i = 0; i < r_; ++i) v[i] = (*this)(i, j);
    return v;
  }
  std::vector<Vec<T>> row_list() const {
    std::vector<Vec<T>> out;
    for (std::size_t i = 0; i < r_; ++i) out.push_back(row(i));
    return out;
  }

  Matrix transpose() const {
    Matrix t(c_, r_);
    for (std::size_t i = 0; i < r_; ++i)
      for (std::size_t j = 0; j < c_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  bool is_zero() const {
    for (const T& x : e_)
      if (!qsg::is_zero(x)) return false;
    return true;
  }
  bool is_symmetric() const {
    if (r_ != c_) return false;
    for (std::size_t i = 0; i < r_; ++i)
      for (std::size_t j = i + 1; j < c_; ++j)
        if (!((*this)(i, j) == (*this)(j, i))) return false;
    return true;
  }

  Matrix& operator+=(const Matrix& o) {
    check_same(o);
    for (std::size_t k = 0; k < e_.size(); ++k) e_[k] += o.e_[k];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    check_same(o);
    for (std::size_t k = 0; k < e_.size(); ++k) e_[k] -= o.e_[k];
    return *this;
  }
  Matrix& operator*=(const T& s) {
    for (T& x : e_) x *= s;
    return *this;
  }
  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, const T& s) { return a *= s; }
  friend Matrix operator*(const T& s, Matrix a) { return a *= s; }
  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.c_ != b.r_) throw std::invalid_argument("matrix product shape mismatch");
    Matrix p(a.r_, b.c_);
    for (std::size_t i = 0; i < a.r_; ++i)
      for (std::size_t k = 0; k < a.c_; ++k) {
        const T& x = a(i, k);
        if (qsg::is_zero(x)) continue;
        for (std::size_t j = 0; j < b.c_; ++j) p(i, j) += x * b(k, j);
      }
    return p;
  }
  bool operator==(const Matrix& o) const { return r_ == o.r_ && c_ == o.c_ && e_ == o.e_; }

  Matrix submatrix(const std::vector<std::size_t>& ri, const std::vector<std::size_t>& ci) const {
    Matrix s(ri.size(), ci.size());
    for (std::size_t i = 0; i < ri.size(); ++i)
      for (std::size_t j = 0; j < ci.size(); ++j) s(i, j) = (*this)(ri[i], ci[j]);
    return s;
  }

 private:
  void check_same(const Matrix& o) const {
    if (r_ != o.r_ || c_ != o.c_) throw std::invalid_argument("matrix shape mismatch");
  }
  std::size_t r_ = 0, c_ = 0;
  std::vector<T> e_;
};

using QMatrix = Matrix<Rational>;
using SMatrix = Matrix<Scalar>;

inline SMatrix to_scalar(const QMatrix& m) {
  SMatrix s(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) s(i, j) = Scalar(m(i, j));
  return s;
}
inline Vec<Scalar> to_scalar(const Vec<Rational>& v) { return Vec<Scalar>(v.begin(), v.end()); }

template <class T>
struct Rref {
  Matrix<T> R;  // only the first `rank` rows are nonzero
  std::size_t rank = 0;
  std::vector<std::size_t> pivots;
  std::vector<Vec<T>> kernel;  // basis of {x : M x = 0}
};

// Gauss-Jordan with leftmost pivot, first nonzero row as pivot row.
template <class T>
Rref<T> rref(Matrix<T> M, bool want_kernel = true) {
  Rref<T> out;
  const std::size_t r = M.rows(), c = M.cols();
  std::size_t row = 0;
  for (std::size_t col = 0; col < c && row < r; ++col) {
    std::size_t p = row;
    while (p < r && qsg::is_zero(M(p, col))) ++p;
    if (p == r) continue;
    if (p != row)
      for (std::size_t j = 0; j < c; ++j) std::swap(M(p, j), M(row, j));
    T inv = T(1) / M(row, col);
    for (std::size_t j = col; j < c; ++j) M(row, j) *= inv;
    for (std::size_t i = 0; i < r; ++i) {
      if (i == row || qsg::is_zero(M(i, col))) continue;
      T f = M(i, col);
      for (std::size_t j = col; j < c; ++j)
        if (!qsg::is_zero(M(row, j))) M(i, j) -= f * M(row, j);
    }
    out.pivots.push_back(col);
    ++row;
  }
  out.rank = row;
  if (want_kernel) {
    std::vector<char> is_piv(c, 0);
    for (std::size_t p : out.pivots) is_piv[p] = 1;
    for (std::size_t f = 0; f < c; ++f) {
      if (is_piv[f]) continue;
      Vec<T> v(c, T(0));
      v[f] = T(1);
      for (std::size_t i = 0; i < out.rank; ++i) v[out.pivots[i]] = -M(i, f);
      out.kernel.push_back(std::move(v));
    }
  }
  out.R = std::move(M);
  return out;
}

template <class T>
std::size_t rank(const Matrix<T>& M) {
  return rref(M, false).rank;
}

template <class T>
T determinant(Matrix<T> M) {
  if (M.rows() != M.cols()) throw std::invalid_argument("determinant of non-square matrix");
  const std::size_t n = M.rows();
  T det(1);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t p = col;
    while (p < n && qsg::is_zero(M(p, col))) ++p;
    if (p == n) return T(0);
    if (p != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(M(p, j), M(col, j));
      det = -det;
    }
    det *= M(col, col);
    T inv = T(1) / M(col, col);
    for (std::size_t i = col + 1; i < n; ++i) {
      if (qsg::is_zero(M(i, col))) continue;
      T f = M(i, col) * inv;
      for (std::size_t j = col; j < n; ++j) M(i, j) -= f * M(col, j);
    }
  }
  return det;
}

template <class T>
std::optional<Matrix<T>> inverse(const Matrix<T>& M) {
  const std::size_t n = M.rows();
  if (n != M.cols()) throw std::invalid_argument("inverse of non-square matrix");
  Matrix<T> aug(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = M(i, j);
    aug(i, n + i) = T(1);
  }
  Rref<T> rr = rref(aug, false);
  if (rr.rank < n || rr.pivots[n - 1] != n - 1) return std::nullopt;
  Matrix<T> inv(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inv(i, j) = rr.R(i, n + j);
  return inv;
}

// Solve x * A = b for a row vector x (A given as rows); nullopt if b is not in the row space.
template <class T>
std::optional<Vec<T>> solve_in_row_space(const std::vector<Vec<T>>& A, const Vec<T>& b) {
  const std::size_t k = A.size(), c = b.size();
  // columns of the system: unknowns x_1..x_k, equations per coordinate
  Matrix<T> sys(c, k + 1);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < c; ++j) sys(j, i) = A[i][j];
  for (std::size_t j = 0; j < c; ++j) sys(j, k) = b[j];
  Rref<T> rr = rref(sys, false);
  if (rr.rank > 0 && rr.pivots[rr.rank - 1] == k) return std::nullopt;
  Vec<T> x(k, T(0));
  for (std::size_t i = 0; i < rr.rank; ++i) x[rr.pivots[i]] = rr.R(i, k);
  return x;
}

template <class T>
Vec<T> vec_mul(const Vec<T>& x, const Matrix<T>& M) {
  Vec<T> out(M.cols(), T(0));
  for (std::size_t i = 0; i < M.rows(); ++i) {
    if (qsg::is_zero(x[i])) continue;
    for (std::size_t j = 0; j < M.cols(); ++j) out[j] += x[i] * M(i, j);
  }
  return out;
}

template <class T>
T dot(const Vec<T>& x, const Vec<T>& y) {
  T s(0);
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

template <class T>
bool is_zero_vec(const Vec<T>& v) {
  for (const T& x : v)
    if (!qsg::is_zero(x)) return false;
  return true;
}

// Scale so the first nonzero entry is 1.
template <class T>
Vec<T> normalize_leading(Vec<T> v) {
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!qsg::is_zero(v[i])) {
      T inv = T(1) / v[i];
      for (std::size_t j = i; j < v.size(); ++j) v[j] *= inv;
      break;
    }
  return v;
}

template <class T>
bool proportional(const Vec<T>& x, const Vec<T>& y) {
  return normalize_leading(x) == normalize_leading(y);
}

}  // namespace qsg
