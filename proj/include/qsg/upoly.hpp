#pragma once

#include <vector>

#include "qsg/scalar.hpp"

namespace qsg {

// Dense univariate polynomial over Q, coefficients low degree first, no trailing zeros.
class UPoly {
 public:
  UPoly() = default;
  explicit UPoly(std::vector<Rational> c);
  static UPoly constant(const Rational& c) { return UPoly({c}); }
  static UPoly x() { return UPoly({Rational(0), Rational(1)}); }

  int degree() const { return static_cast<int>(c_.size()) - 1; }  // -1 for zero
  bool is_zero() const { return c_.empty(); }
  const std::vector<Rational>& coeffs() const { return c_; }
  Rational coeff(int i) const { return (i >= 0 && i < (int)c_.size()) ? c_[i] : Rational(0); }
  const Rational& lead() const { return c_.back(); }

  Rational eval(const Rational& t) const;
  Scalar eval(const Scalar& t) const;
  UPoly derivative() const;
  UPoly monic() const;

  friend UPoly operator+(const UPoly& a, const UPoly& b);
  friend UPoly operator-(const UPoly& a, const UPoly& b);
  friend UPoly operator*(const UPoly& a, const UPoly& b);
  UPoly scaled(const Rational& s) const;
  bool operator==(const UPoly& o) const { return c_ == o.c_; }

  // a = q*b + r
  static void divmod(const UPoly& a, const UPoly& b, UPoly& q, UPoly& r);
  static UPoly gcd(UPoly a, UPoly b);  // monic, gcd(0,0) = 0

  // Lagrange interpolation through (x_i, y_i), distinct x_i
  static UPoly interpolate(const std::vector<Rational>& xs, const std::vector<Rational>& ys);

 private:
  void trim();
  std::vector<Rational> c_;
};

struct URoots {
  std::vector<Scalar> roots;  // distinct roots, in Q or a single Q(sqrt d)
  bool overflow = false;      // an irreducible factor of degree > 2 remains, or two different extensions
  UPoly unresolved;           // the factor whose roots were not produced
};

// Distinct roots of p != 0.
URoots roots(const UPoly& p);

}  // namespace qsg
