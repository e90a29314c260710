#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>

namespace qsg {

using Rational = mpq_class;

class ExtensionConflict : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// a + b*sqrt(d).  d == 0 means "no extension"; otherwise d is squarefree, != 0, 1.
class Scalar {
 public:
  Scalar() = default;
  Scalar(long v) : a_(v) {}
  Scalar(const Rational& v) : a_(v) {}
  Scalar(Rational a, Rational b, long d);

  const Rational& a() const { return a_; }
  const Rational& b() const { return b_; }
  long d() const { return d_; }
  bool is_rational() const { return d_ == 0; }
  bool is_zero() const { return sgn(a_) == 0 && sgn(b_) == 0; }

  Scalar conj() const;
  // a^2 - d b^2, the field norm down to Q
  Rational norm() const;
  Scalar inverse() const;

  Scalar operator-() const;
  Scalar& operator+=(const Scalar& o);
  Scalar& operator-=(const Scalar& o);
  Scalar& operator*=(const Scalar& o);
  Scalar& operator/=(const Scalar& o);

  friend Scalar operator+(Scalar x, const Scalar& y) { return x += y; }
  friend Scalar operator-(Scalar x, const Scalar& y) { return x -= y; }
  friend Scalar operator*(Scalar x, const Scalar& y) { return x *= y; }
  friend Scalar operator/(Scalar x, const Scalar& y) { return x /= y; }

  // structural: values from different extension contexts are never equal
  bool operator==(const Scalar& o) const { return d_ == o.d_ && a_ == o.a_ && b_ == o.b_; }
  bool operator!=(const Scalar& o) const { return !(*this == o); }
  // total order used only for deterministic sorting
  static int compare(const Scalar& x, const Scalar& y);

  std::string str() const;

  // join of two extension tags; throws ExtensionConflict on mismatch
  static long join(long d1, long d2);

 private:
  void normalize();

  Rational a_{0};
  Rational b_{0};
  long d_ = 0;
};

// Largest square s^2 dividing |v|; returns v / s^2 (sign kept) and stores s.
mpz_class squarefree_part(const mpz_class& v, mpz_class* root = nullptr);
bool is_squarefree(long d);

// Exact sqrt(c).  If fixed_d != 0 the result must live in Q(sqrt(fixed_d)).
Scalar sqrt_scalar(const Rational& c, long fixed_d = 0);
// True if c is the square of a rational.
bool is_rational_square(const Rational& c, Rational* root = nullptr);

inline bool is_zero(const Rational& x) { return sgn(x) == 0; }
inline bool is_zero(const Scalar& x) { return x.is_zero(); }

std::string to_string(const Rational& q);
Rational parse_rational(const std::string& s);

}  // namespace qsg
