#include "qsg/upoly.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace qsg {

UPoly::UPoly(std::vector<Rational> c) : c_(std::move(c)) { trim(); }

void UPoly::trim() {
  while (!c_.empty() && sgn(c_.back()) == 0) c_.pop_back();
}

Rational UPoly::eval(const Rational& t) const {
  Rational r = 0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * t + *it;
  return r;
}

Scalar UPoly::eval(const Scalar& t) const {
  Scalar r;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * t + Scalar(*it);
  return r;
}

UPoly UPoly::derivative() const {
  std::vector<Rational> d;
  for (std::size_t i = 1; i < c_.size(); ++i) d.push_back(c_[i] * Rational(static_cast<long>(i)));
  return UPoly(d);
}

UPoly UPoly::monic() const {
  if (is_zero()) return *this;
  return scaled(Rational(1) / lead());
}

UPoly UPoly::scaled(const Rational& s) const {
  std::vector<Rational> c = c_;
  for (auto& x : c) x *= s;
  return UPoly(c);
}

UPoly operator+(const UPoly& a, const UPoly& b) {
  std::vector<Rational> c(std::max(a.c_.size(), b.c_.size()));
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = a.coeff(i) + b.coeff(i);
  return UPoly(c);
}

UPoly operator-(const UPoly& a, const UPoly& b) {
  std::vector<Rational> c(std::max(a.c_.size(), b.c_.size()));
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = a.coeff(i) - b.coeff(i);
  return UPoly(c);
}

UPoly operator*(const UPoly& a, const UPoly& b) {
  if (a.is_zero() || b.is_zero()) return UPoly();
  std::vector<Rational> c(a.c_.size() + b.c_.size() - 1);
  for (std::size_t i = 0; i < a.c_.size(); ++i)
    for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
  return UPoly(c);
}

void UPoly::divmod(const UPoly& a, const UPoly& b, UPoly& q, UPoly& r) {
  if (b.is_zero()) throw std::domain_error("polynomial division by zero");
  std::vector<Rational> rem = a.c_;
  int db = b.degree();
  std::vector<Rational> quo(std::max(0, a.degree() - db + 1));
  for (int k = a.degree(); k >= db; --k) {
    if (sgn(rem[k]) == 0) continue;
    Rational f = rem[k] / b.lead();
    quo[k - db] = f;
    for (int j = 0; j <= db; ++j) rem[k - db + j] -= f * b.c_[j];
  }
  q = UPoly(quo);
  r = UPoly(rem);
}

UPoly UPoly::gcd(UPoly a, UPoly b) {
  while (!b.is_zero()) {
    UPoly q, r;
    divmod(a, b, q, r);
    a = std::move(b);
    b = r.monic();
  }
  return a.monic();
}

UPoly UPoly::interpolate(const std::vector<Rational>& xs, const std::vector<Rational>& ys) {
  UPoly acc;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (sgn(ys[i]) == 0) continue;
    UPoly basis = UPoly::constant(1);
    Rational denom = 1;
    for (std::size_t j = 0; j < xs.size(); ++j) {
      if (j == i) continue;
      basis = basis * UPoly({-xs[j], Rational(1)});
      denom *= xs[i] - xs[j];
    }
    acc = acc + basis.scaled(ys[i] / denom);
  }
  return acc;
}

namespace {

// Approximate complex roots (Durand-Kerner); input squarefree, degree >= 1.
std::vector<std::complex<long double>> approx_roots(const UPoly& p) {
  using C = std::complex<long double>;
  int n = p.degree();
  std::vector<C> a(n + 1);
  UPoly m = p.monic();
  for (int i = 0; i <= n; ++i) a[i] = C(m.coeff(i).get_d(), 0);
  auto ev = [&](C z) {
    C r = 0;
    for (int i = n; i >= 0; --i) r = r * z + a[i];
    return r;
  };
  long double bound = 1;
  for (int i = 0; i < n; ++i) bound = std::max(bound, 1 + std::abs(a[i]));
  std::vector<C> z(n);
  for (int i = 0; i < n; ++i) z[i] = std::polar(bound * 0.9L, 2.0L * 3.14159265358979323846L * i / n + 0.4L);
  for (int it = 0; it < 2000; ++it) {
    long double delta = 0;
    for (int i = 0; i < n; ++i) {
      C den = 1;
      for (int j = 0; j < n; ++j)
        if (j != i) den *= (z[i] - z[j]);
      if (std::abs(den) == 0) den = C(1e-30L, 0);
      C step = ev(z[i]) / den;
      z[i] -= step;
      delta = std::max(delta, std::abs(step));
    }
    if (delta < 1e-18L) break;
  }
  return z;
}

// continued-fraction convergents of a real approximation
std::vector<Rational> convergents(long double x, int maxn = 40) {
  std::vector<Rational> out;
  mpz_class h0 = 1, h1 = 0, k0 = 0, k1 = 1;
  long double r = x;
  for (int i = 0; i < maxn; ++i) {
    long double fl = std::floor(r);
    if (std::fabs(fl) > 1e18L) break;
    mpz_class a(static_cast<double>(fl));
    mpz_class h2 = a * h0 + h1, k2 = a * k0 + k1;
    out.emplace_back(h2, k2);
    out.back().canonicalize();
    h1 = h0;
    h0 = h2;
    k1 = k0;
    k0 = k2;
    long double frac = r - fl;
    if (frac < 1e-15L) break;
    r = 1 / frac;
  }
  return out;
}

UPoly squarefree(const UPoly& p) {
  UPoly g = UPoly::gcd(p, p.derivative());
  if (g.degree() <= 0) return p.monic();
  UPoly q, r;
  UPoly::divmod(p, g, q, r);
  return q.monic();
}

}  // namespace

URoots roots(const UPoly& p0) {
  if (p0.is_zero()) throw std::invalid_argument("roots of the zero polynomial");
  URoots out;
  UPoly p = squarefree(p0);
  std::vector<Rational> rat;
  // strip zero root
  if (p.degree() >= 1 && sgn(p.coeff(0)) == 0) {
    rat.push_back(0);
    UPoly q, r;
    UPoly::divmod(p, UPoly::x(), q, r);
    p = q;
  }
  if (p.degree() > 2) {
    for (auto z : approx_roots(p)) {
      if (p.degree() <= 2) break;
      if (std::fabs(z.imag()) > 1e-6L * (1 + std::abs(z))) continue;
      for (const Rational& c : convergents(z.real())) {
        if (sgn(p.eval(c)) == 0) {
          rat.push_back(c);
          UPoly q, r;
          UPoly::divmod(p, UPoly({-c, Rational(1)}), q, r);
          p = q;
          break;
        }
      }
    }
  }
  for (auto& r : rat) out.roots.emplace_back(r);
  if (p.degree() == 1) {
    out.roots.emplace_back(-p.coeff(0) / p.coeff(1));
  } else if (p.degree() == 2) {
    Rational a = p.coeff(2), b = p.coeff(1), c = p.coeff(0);
    Rational disc = b * b - 4 * a * c;
    Scalar s = sqrt_scalar(disc);
    Scalar r1 = (Scalar(-b) + s) / Scalar(2 * a);
    Scalar r2 = (Scalar(-b) - s) / Scalar(2 * a);
    out.roots.push_back(r1);
    out.roots.push_back(r2);
  } else if (p.degree() > 2) {
    out.overflow = true;
    out.unresolved = p;
  }
  std::sort(out.roots.begin(), out.roots.end(),
            [](const Scalar& x, const Scalar& y) { return Scalar::compare(x, y) < 0; });
  return out;
}

}  // namespace qsg
