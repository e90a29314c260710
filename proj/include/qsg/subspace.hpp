#pragma once

#include <string>
#include <vector>

#include "qsg/matrix.hpp"

namespace qsg {

// A space of linear forms in n variables, stored as its RREF basis.
template <class T>
class BasicSubspace {
 public:
  explicit BasicSubspace(std::size_t n = 0) : n_(n), basis_(0, n) {}

  static BasicSubspace span(std::size_t n, const std::vector<Vec<T>>& gens) {
    BasicSubspace s(n);
    if (gens.empty()) return s;
    s.assign(Matrix<T>::from_rows(gens, n));
    return s;
  }
  static BasicSubspace from_matrix(const Matrix<T>& rows) {
    BasicSubspace s(rows.cols());
    s.assign(rows);
    return s;
  }
  static BasicSubspace full(std::size_t n) { return from_matrix(Matrix<T>::identity(n)); }
  static BasicSubspace coordinate(std::size_t n, const std::vector<std::size_t>& idx) {
    std::vector<Vec<T>> g;
    for (std::size_t i : idx) {
      Vec<T> v(n, T(0));
      v.at(i) = T(1);
      g.push_back(v);
    }
    return span(n, g);
  }

  std::size_t ambient() const { return n_; }
  std::size_t dim() const { return basis_.rows(); }
  const Matrix<T>& basis() const { return basis_; }
  std::vector<Vec<T>> basis_rows() const { return basis_.row_list(); }
  const std::vector<std::size_t>& pivots() const { return pivots_; }

  // v minus its projection along pivot coordinates
  Vec<T> reduce(Vec<T> v) const {
    check(v.size());
    for (std::size_t i = 0; i < dim(); ++i) {
      const T f = v[pivots_[i]];
      if (qsg::is_zero(f)) continue;
      for (std::size_t j = 0; j < n_; ++j)
        if (!qsg::is_zero(basis_(i, j))) v[j] -= f * basis_(i, j);
    }
    return v;
  }
  bool contains(const Vec<T>& v) const { return is_zero_vec(reduce(v)); }
  bool contains(const BasicSubspace& o) const {
    check(o.n_);
    for (std::size_t i = 0; i < o.dim(); ++i)
      if (!contains(o.basis_.row(i))) return false;
    return true;
  }
  bool operator==(const BasicSubspace& o) const { return n_ == o.n_ && basis_ == o.basis_; }

  BasicSubspace sum(const BasicSubspace& o) const {
    check(o.n_);
    std::vector<Vec<T>> g = basis_rows();
    for (auto& r : o.basis_rows()) g.push_back(r);
    return span(n_, g);
  }
  BasicSubspace add(const Vec<T>& v) const {
    std::vector<Vec<T>> g = basis_rows();
    g.push_back(v);
    return span(n_, g);
  }
  // points where every form vanishes, as a space of coefficient vectors
  BasicSubspace annihilator() const {
    if (dim() == 0) return full(n_);
    Rref<T> rr = rref(basis_, true);
    return span(n_, rr.kernel);
  }
  std::vector<Vec<T>> annihilator_basis() const {
    if (dim() == 0) return Matrix<T>::identity(n_).row_list();
    return rref(basis_, true).kernel;
  }
  BasicSubspace intersection(const BasicSubspace& o) const {
    check(o.n_);
    return annihilator().sum(o.annihilator()).annihilator();
  }

 private:
  void check(std::size_t m) const {
    if (m != n_) throw std::invalid_argument("ambient mismatch: " + std::to_string(m) + " vs " + std::to_string(n_));
  }
  void assign(const Matrix<T>& rows) {
    Rref<T> rr = rref(rows, false);
    basis_ = Matrix<T>(rr.rank, n_);
    for (std::size_t i = 0; i < rr.rank; ++i)
      for (std::size_t j = 0; j < n_; ++j) basis_(i, j) = rr.R(i, j);
    pivots_ = rr.pivots;
  }

  std::size_t n_;
  Matrix<T> basis_;
  std::vector<std::size_t> pivots_;
};

// Incremental echelon basis; cheaper than rebuilding a BasicSubspace per insertion.
template <class T>
class SpanBuilder {
 public:
  explicit SpanBuilder(std::size_t n = 0) : n_(n) {}
  std::size_t ambient() const { return n_; }
  std::size_t dim() const { return rows_.size(); }
  Vec<T> reduce(Vec<T> v) const {
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const T f = v[piv_[i]];
      if (qsg::is_zero(f)) continue;
      const Vec<T>& r = rows_[i];
      for (std::size_t j = piv_[i]; j < n_; ++j)
        if (!qsg::is_zero(r[j])) v[j] -= f * r[j];
    }
    return v;
  }
  bool contains(const Vec<T>& v) const { return is_zero_vec(reduce(v)); }
  // returns true if v enlarged the span
  bool add(const Vec<T>& v) {
    if (v.size() != n_) throw std::invalid_argument("ambient mismatch in span builder");
    Vec<T> r = reduce(v);
    std::size_t p = 0;
    while (p < n_ && qsg::is_zero(r[p])) ++p;
    if (p == n_) return false;
    T inv = T(1) / r[p];
    for (std::size_t j = p; j < n_; ++j) r[j] *= inv;
    std::size_t pos = 0;
    while (pos < piv_.size() && piv_[pos] < p) ++pos;
    rows_.insert(rows_.begin() + pos, std::move(r));
    piv_.insert(piv_.begin() + pos, p);
    return true;
  }
  const std::vector<Vec<T>>& rows() const { return rows_; }

 private:
  std::size_t n_;
  std::vector<Vec<T>> rows_;
  std::vector<std::size_t> piv_;
};

using Subspace = BasicSubspace<Rational>;
using ExtSubspace = BasicSubspace<Scalar>;

inline ExtSubspace to_scalar(const Subspace& s) { return ExtSubspace::from_matrix(to_scalar(s.basis())); }

}  // namespace qsg
