#include "qsg/scalar.hpp"

#include <cctype>

namespace qsg {

Scalar::Scalar(Rational a, Rational b, long d) : a_(std::move(a)), b_(std::move(b)), d_(d) {
  if (d_ != 0 && (d_ == 1 || !is_squarefree(d_)))
    throw std::invalid_argument("extension tag must be squarefree and != 0, 1: " + std::to_string(d));
  normalize();
}

void Scalar::normalize() {
  a_.canonicalize();
  b_.canonicalize();
  if (sgn(b_) == 0) d_ = 0;
  if (d_ == 0) b_ = 0;
}

long Scalar::join(long d1, long d2) {
  if (d1 == 0) return d2;
  if (d2 == 0 || d1 == d2) return d1;
  throw ExtensionConflict("mixed extensions sqrt(" + std::to_string(d1) + ") and sqrt(" +
                          std::to_string(d2) + ")");
}

Scalar Scalar::conj() const {
  Scalar r = *this;
  r.b_ = -r.b_;
  return r;
}

Rational Scalar::norm() const { return a_ * a_ - Rational(d_) * b_ * b_; }

Scalar Scalar::inverse() const {
  if (is_zero()) throw std::domain_error("division by zero");
  Rational nm = norm();
  Scalar r;
  r.a_ = a_ / nm;
  r.b_ = -b_ / nm;
  r.d_ = d_;
  r.normalize();
  return r;
}

Scalar Scalar::operator-() const {
  Scalar r = *this;
  r.a_ = -r.a_;
  r.b_ = -r.b_;
  return r;
}

Scalar& Scalar::operator+=(const Scalar& o) {
  long d = join(d_, o.d_);
  a_ += o.a_;
  b_ += o.b_;
  d_ = d;
  normalize();
  return *this;
}

Scalar& Scalar::operator-=(const Scalar& o) {
  long d = join(d_, o.d_);
  a_ -= o.a_;
  b_ -= o.b_;
  d_ = d;
  normalize();
  return *this;
}

Scalar& Scalar::operator*=(const Scalar& o) {
  long d = join(d_, o.d_);
  Rational na = a_ * o.a_ + Rational(d) * b_ * o.b_;
  Rational nb = a_ * o.b_ + b_ * o.a_;
  a_ = std::move(na);
  b_ = std::move(nb);
  d_ = d;
  normalize();
  return *this;
}

Scalar& Scalar::operator/=(const Scalar& o) {
  join(d_, o.d_);
  return *this *= o.inverse();
}

int Scalar::compare(const Scalar& x, const Scalar& y) {
  if (x.d_ != y.d_) return x.d_ < y.d_ ? -1 : 1;
  int c = cmp(x.a_, y.a_);
  if (c != 0) return c < 0 ? -1 : 1;
  c = cmp(x.b_, y.b_);
  return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

std::string Scalar::str() const {
  if (d_ == 0) return to_string(a_);
  std::string s;
  if (sgn(a_) != 0) s = to_string(a_) + " + ";
  return s + to_string(b_) + "*sqrt(" + std::to_string(d_) + ")";
}

mpz_class squarefree_part(const mpz_class& v, mpz_class* root) {
  mpz_class n = abs(v);
  mpz_class s = 1, rest = 1;
  if (n == 0) {
    if (root) *root = 0;
    return 0;
  }
  // trial division up to the cube root (capped); whatever remains is taken as p, p^2 or p*q
  mpz_class p = 2;
  while (p * p * p <= n && p < 1000000) {
    if (n % p == 0) {
      int e = 0;
      while (n % p == 0) {
        n /= p;
        ++e;
      }
      for (int i = 0; i < e / 2; ++i) s *= p;
      if (e % 2) rest *= p;
    }
    p += (p == 2) ? 1 : 2;
  }
  if (n > 1) {
    mpz_class r = sqrt(n);
    if (r * r == n)
      s *= r;
    else
      rest *= n;
  }
  if (root) *root = s;
  return sgn(v) < 0 ? mpz_class(-rest) : rest;
}

bool is_squarefree(long d) {
  if (d == 0) return false;
  mpz_class s;
  squarefree_part(mpz_class(d), &s);
  return s == 1;
}

bool is_rational_square(const Rational& c, Rational* root) {
  if (sgn(c) < 0) return false;
  mpz_class p = c.get_num(), q = c.get_den();
  if (!mpz_perfect_square_p(p.get_mpz_t()) || !mpz_perfect_square_p(q.get_mpz_t())) return false;
  if (root) *root = Rational(mpz_class(sqrt(p)), mpz_class(sqrt(q)));
  return true;
}

Scalar sqrt_scalar(const Rational& c, long fixed_d) {
  if (sgn(c) == 0) throw std::invalid_argument("sqrt_scalar requires c != 0");
  Rational r;
  if (is_rational_square(c, &r)) return Scalar(r);
  // sqrt(p/q) = sqrt(p*q)/q
  mpz_class pq = c.get_num() * c.get_den();
  mpz_class s;
  mpz_class k = squarefree_part(pq, &s);
  if (!k.fits_slong_p()) throw ExtensionConflict("squarefree kernel does not fit the extension tag");
  long d = k.get_si();
  if (fixed_d != 0 && fixed_d != d)
    throw ExtensionConflict("sqrt requires sqrt(" + std::to_string(d) + ") but context fixed sqrt(" +
                            std::to_string(fixed_d) + ")");
  Rational b(s, c.get_den());
  b.canonicalize();
  return Scalar(Rational(0), b, d);
}

std::string to_string(const Rational& q) {
  Rational c = q;
  c.canonicalize();
  return c.get_num().get_str() + "/" + c.get_den().get_str();
}

Rational parse_rational(const std::string& s) {
  auto bad = [&] { return std::invalid_argument("not a rational \"p/q\": " + s); };
  if (s.empty()) throw bad();
  size_t slash = s.find('/');
  auto check_int = [&](const std::string& t, bool allow_sign) {
    size_t i = 0;
    if (allow_sign && i < t.size() && (t[i] == '-' || t[i] == '+')) ++i;
    if (i == t.size()) throw bad();
    for (; i < t.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(t[i]))) throw bad();
  };
  std::string num = s.substr(0, slash);
  std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
  check_int(num, true);
  check_int(den, false);
  if (num[0] == '+') num = num.substr(1);
  mpz_class d(den);
  if (d == 0) throw std::invalid_argument("zero denominator: " + s);
  Rational r(mpz_class(num), d);
  r.canonicalize();
  return r;
}

}  // namespace qsg
