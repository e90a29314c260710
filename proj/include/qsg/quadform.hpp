#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qsg/subspace.hpp"

namespace qsg {

// Homogeneous quadratic x^T M x with M rational symmetric.
class QuadForm {
 public:
  explicit QuadForm(std::size_t n = 0) : M_(n, n) {}
  explicit QuadForm(QMatrix M);

  // monomial coefficient map: (i, j) with i <= j -> coefficient of x_i x_j
  static QuadForm from_monomials(std::size_t n, const std::map<std::pair<std::size_t, std::size_t>, Rational>& mono);
  // a*b for linear forms a, b
  static QuadForm product(const Vec<Rational>& a, const Vec<Rational>& b);
  static QuadForm square(const Vec<Rational>& a) { return product(a, a); }
  // inverse of coeff_vector
  static QuadForm from_coeff_vector(std::size_t n, const Vec<Rational>& c);

  std::size_t n() const { return M_.rows(); }
  const QMatrix& matrix() const { return M_; }
  // coefficient of the monomial x_i x_j
  Rational coeff(std::size_t i, std::size_t j) const;
  // monomial coefficients in the order (0,0),(0,1),...,(0,n-1),(1,1),...
  Vec<Rational> coeff_vector() const;
  static std::size_t coeff_dim(std::size_t n) { return n * (n + 1) / 2; }

  std::size_t rank() const { return qsg::rank(M_); }
  std::size_t rank_s() const { return (rank() + 1) / 2; }
  bool irreducible() const { return rank() >= 3; }
  bool is_zero() const { return M_.is_zero(); }
  Subspace minimal_space() const { return Subspace::from_matrix(M_); }

  Rational eval(const Vec<Rational>& x) const;
  Scalar eval(const Vec<Scalar>& x) const;

  // Q(G x) for an n x k matrix G
  QuadForm substitute(const QMatrix& G) const;

  QuadForm operator+(const QuadForm& o) const { return QuadForm(M_ + o.M_); }
  QuadForm operator-(const QuadForm& o) const { return QuadForm(M_ - o.M_); }
  QuadForm operator*(const Rational& s) const { return QuadForm(M_ * s); }
  QuadForm operator-() const { return QuadForm(M_ * Rational(-1)); }
  bool operator==(const QuadForm& o) const { return M_ == o.M_; }

  // first nonzero entry of M in row-major order scaled to 1
  QuadForm canonical() const;
  Rational canonical_scale() const;  // canonical() == (*this) * canonical_scale()
  std::string key() const;
  bool proportional_to(const QuadForm& o) const { return canonical() == o.canonical(); }

  std::string str() const;

  std::string name;

 private:
  QMatrix M_;
};

// Q restricted to {V = 0}, written on the kernel basis of V (the columns of B).
QuadForm restrict(const QuadForm& Q, const Subspace& V);
// same, also returning the basis used
QuadForm restrict(const QuadForm& Q, const Subspace& V, std::vector<Vec<Rational>>& basis);
bool in_ideal(const QuadForm& Q, const Subspace& V);
bool in_ring2(const QuadForm& Q, const Subspace& V);

// Symmetric matrix of the product of two linear forms over the extension.
SMatrix product_matrix(const Vec<Scalar>& a, const Vec<Scalar>& b);

// For rank(M) <= 2: linear forms f, g with M ~ (f g^T + g f^T)/2, exactly, over Q or one Q(sqrt d).
struct Factorization {
  Vec<Scalar> f, g;
  bool available = false;  // false only if two different extensions would be needed
};
Factorization factor_quadratic(const QMatrix& M);
Factorization factor_quadratic(const SMatrix& M);

// Restriction of a symmetric matrix to the points of a Scalar subspace's annihilator.
SMatrix restrict_matrix(const SMatrix& M, const std::vector<Vec<Scalar>>& kernel_basis);

// Coefficient-space utilities for spans of quadratics.
class QuadSpan {
 public:
  explicit QuadSpan(std::size_t n) : n_(n), span_(QuadForm::coeff_dim(n)) {}
  bool add(const QuadForm& Q) { return span_.add(Q.coeff_vector()); }
  void add_ring2(const Subspace& V);  // all products of V's basis
  bool contains(const QuadForm& Q) const { return span_.contains(Q.coeff_vector()); }
  std::size_t dim() const { return span_.dim(); }
  std::size_t n() const { return n_; }

 private:
  std::size_t n_;
  SpanBuilder<Rational> span_;
};

}  // namespace qsg
