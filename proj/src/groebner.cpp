#include "qsg/groebner.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace qsg::gb {

Mono Mono::var(std::size_t i, unsigned power) {
  if (i >= MAXV) throw std::invalid_argument("too many variables for the Groebner engine");
  Mono m;
  m.e[i] = static_cast<std::uint8_t>(power);
  m.deg = static_cast<std::uint16_t>(power);
  return m;
}

Mono Mono::operator*(const Mono& o) const {
  Mono r;
  for (std::size_t i = 0; i < MAXV; ++i) {
    unsigned s = unsigned(e[i]) + o.e[i];
    if (s > 255) throw std::overflow_error("monomial exponent overflow");
    r.e[i] = static_cast<std::uint8_t>(s);
  }
  r.deg = static_cast<std::uint16_t>(deg + o.deg);
  return r;
}

bool Mono::divides(const Mono& o) const {
  if (deg > o.deg) return false;
  for (std::size_t i = 0; i < MAXV; ++i)
    if (e[i] > o.e[i]) return false;
  return true;
}

Mono Mono::operator/(const Mono& o) const {
  Mono r;
  for (std::size_t i = 0; i < MAXV; ++i) r.e[i] = static_cast<std::uint8_t>(e[i] - o.e[i]);
  r.deg = static_cast<std::uint16_t>(deg - o.deg);
  return r;
}

Mono Mono::lcm(const Mono& a, const Mono& b) {
  Mono r;
  unsigned d = 0;
  for (std::size_t i = 0; i < MAXV; ++i) {
    r.e[i] = std::max(a.e[i], b.e[i]);
    d += r.e[i];
  }
  r.deg = static_cast<std::uint16_t>(d);
  return r;
}

bool Mono::coprime(const Mono& o) const {
  for (std::size_t i = 0; i < MAXV; ++i)
    if (e[i] && o.e[i]) return false;
  return true;
}

int compare(const Mono& a, const Mono& b, Order ord) {
  if (ord == Order::Grevlex) {
    if (a.deg != b.deg) return a.deg > b.deg ? 1 : -1;
    for (std::size_t i = MAXV; i-- > 0;)
      if (a.e[i] != b.e[i]) return a.e[i] < b.e[i] ? 1 : -1;
    return 0;
  }
  for (std::size_t i = 0; i < MAXV; ++i)
    if (a.e[i] != b.e[i]) return a.e[i] > b.e[i] ? 1 : -1;
  return 0;
}

Poly::Poly(std::size_t nvars, Order ord) : n_(nvars), ord_(ord) {
  if (nvars > MAXV) throw std::invalid_argument("too many variables for the Groebner engine");
}

Poly Poly::constant(std::size_t nvars, const Rational& c, Order ord) { return monomial(nvars, Mono{}, c, ord); }

Poly Poly::variable(std::size_t nvars, std::size_t i, Order ord) {
  if (i >= nvars) throw std::invalid_argument("variable index out of range");
  return monomial(nvars, Mono::var(i), 1, ord);
}

Poly Poly::monomial(std::size_t nvars, const Mono& m, const Rational& c, Order ord) {
  Poly p(nvars, ord);
  if (sgn(c) != 0) p.t_.push_back({m, c});
  return p;
}

Poly Poly::from_quadform(const QuadForm& Q, std::size_t nvars, Order ord) {
  if (Q.n() > nvars) throw std::invalid_argument("quadratic has more variables than the ring");
  Poly p(nvars, ord);
  for (std::size_t i = 0; i < Q.n(); ++i)
    for (std::size_t j = i; j < Q.n(); ++j) {
      Rational c = Q.coeff(i, j);
      if (sgn(c) != 0) p = p + monomial(nvars, Mono::var(i) * Mono::var(j), c, ord);
    }
  return p;
}

Poly Poly::from_linear(const Vec<Rational>& l, std::size_t nvars, Order ord) {
  if (l.size() > nvars) throw std::invalid_argument("linear form has more variables than the ring");
  Poly p(nvars, ord);
  for (std::size_t i = 0; i < l.size(); ++i)
    if (sgn(l[i]) != 0) p = p + monomial(nvars, Mono::var(i), l[i], ord);
  return p;
}

int Poly::degree() const {
  int d = -1;
  for (const auto& t : t_) d = std::max(d, int(t.m.deg));
  return d;
}

bool Poly::homogeneous() const {
  for (const auto& t : t_)
    if (t.m.deg != t_.front().m.deg) return false;
  return true;
}

static void check_compatible(const Poly& a, const Poly& b) {
  if (a.nvars() != b.nvars() || a.order() != b.order())
    throw std::invalid_argument("polynomials from different rings");
}

Poly sub_mul_term(const Poly& a, const Poly& b, const Mono& m, const Rational& c) {
  check_compatible(a, b);
  Poly r(a.n_, a.ord_);
  r.t_.reserve(a.t_.size() + b.t_.size());
  std::size_t i = 0, j = 0;
  Mono bm;
  bool have = false;
  while (i < a.t_.size() || j < b.t_.size()) {
    if (j < b.t_.size() && !have) {
      bm = b.t_[j].m * m;
      have = true;
    }
    int cmp = (i == a.t_.size()) ? -1 : (j == b.t_.size()) ? 1 : compare(a.t_[i].m, bm, a.ord_);
    if (cmp > 0) {
      r.t_.push_back(a.t_[i++]);
    } else if (cmp < 0) {
      r.t_.push_back({bm, -c * b.t_[j].c});
      ++j;
      have = false;
    } else {
      Rational s = a.t_[i].c - c * b.t_[j].c;
      if (sgn(s) != 0) r.t_.push_back({bm, s});
      ++i;
      ++j;
      have = false;
    }
  }
  return r;
}

Poly Poly::operator+(const Poly& o) const { return sub_mul_term(*this, o, Mono{}, -1); }
Poly Poly::operator-(const Poly& o) const { return sub_mul_term(*this, o, Mono{}, 1); }

Poly Poly::mul_term(const Mono& m, const Rational& c) const {
  Poly r(n_, ord_);
  if (sgn(c) == 0) return r;
  r.t_.reserve(t_.size());
  for (const auto& t : t_) r.t_.push_back({t.m * m, t.c * c});
  return r;
}

Poly Poly::operator*(const Poly& o) const {
  check_compatible(*this, o);
  Poly r(n_, ord_);
  for (const auto& t : o.t_) r = r + mul_term(t.m, t.c);
  return r;
}

Poly Poly::operator*(const Rational& s) const { return mul_term(Mono{}, s); }

Poly Poly::monic() const {
  if (is_zero()) return *this;
  return *this * (Rational(1) / lead().c);
}

Poly Poly::pow(unsigned k) const {
  Poly r = constant(n_, 1, ord_);
  for (unsigned i = 0; i < k; ++i) r = r * *this;
  return r;
}

bool Poly::operator==(const Poly& o) const {
  if (n_ != o.n_ || t_.size() != o.t_.size()) return false;
  for (std::size_t i = 0; i < t_.size(); ++i)
    if (!(t_[i].m == o.t_[i].m) || t_[i].c != o.t_[i].c) return false;
  return true;
}

std::string Poly::str() const {
  if (t_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& t : t_) {
    Rational c = t.c;
    if (!first) os << (sgn(c) < 0 ? " - " : " + ");
    else if (sgn(c) < 0) os << "-";
    first = false;
    Rational a = abs(c);
    bool unit = a == 1 && t.m.deg > 0;
    if (!unit) os << a.get_str();
    bool star = !unit;
    for (std::size_t i = 0; i < n_; ++i)
      if (t.m.e[i]) {
        os << (star ? "*" : "") << "x" << i + 1;
        if (t.m.e[i] > 1) os << "^" << int(t.m.e[i]);
        star = true;
      }
  }
  return os.str();
}

Poly with_order(const Poly& p, Order ord) {
  Poly r(p.nvars(), ord);
  for (const auto& t : p.terms()) r = r + Poly::monomial(p.nvars(), t.m, t.c, ord);
  return r;
}

Poly substitute(const Poly& p, std::size_t i, const Rational& value) {
  Poly r(p.nvars(), p.order());
  for (const auto& t : p.terms()) {
    Mono m = t.m;
    unsigned e = m.e[i];
    m.e[i] = 0;
    m.deg = static_cast<std::uint16_t>(m.deg - e);
    Rational c = t.c;
    for (unsigned k = 0; k < e; ++k) c *= value;
    r = r + Poly::monomial(p.nvars(), m, c, p.order());
  }
  return r;
}

bool univariate_in(const Poly& p, std::size_t i, std::vector<Rational>* coeffs) {
  int top = 0;
  for (const auto& t : p.terms()) {
    if (t.m.deg != t.m.e[i]) return false;
    top = std::max(top, int(t.m.e[i]));
  }
  if (coeffs) {
    coeffs->assign(top + 1, Rational(0));
    for (const auto& t : p.terms()) (*coeffs)[t.m.e[i]] += t.c;
  }
  return true;
}

Poly normal_form(const Poly& f, const std::vector<Poly>& basis) {
  Poly rem(f.nvars(), f.order());
  Poly p = f;
  while (!p.is_zero()) {
    const Term lt = p.lead();
    bool reduced = false;
    for (const auto& g : basis) {
      if (g.is_zero() || !g.lead().m.divides(lt.m)) continue;
      p = sub_mul_term(p, g, lt.m / g.lead().m, lt.c / g.lead().c);
      reduced = true;
      break;
    }
    if (!reduced) {
      rem.t_.push_back(lt);
      p.t_.erase(p.t_.begin());
    }
  }
  return rem;
}

static Poly spoly(const Poly& f, const Poly& g) {
  Mono l = Mono::lcm(f.lead().m, g.lead().m);
  Poly a = f.mul_term(l / f.lead().m, Rational(1) / f.lead().c);
  return sub_mul_term(a, g, l / g.lead().m, Rational(1) / g.lead().c);
}

namespace {

struct Pair {
  std::size_t i, j;
  Mono lcm;
};

struct Engine {
  std::vector<Poly> polys;
  std::vector<bool> active;
  std::vector<Pair> pairs;
  Order ord;
  std::size_t skipped = 0;

  const Mono& lt(std::size_t i) const { return polys[i].lead().m; }

  // Gebauer-Moller update for the new element h
  void update(std::size_t h) {
    std::vector<Pair> C, D;
    for (std::size_t g = 0; g < h; ++g)
      if (active[g]) C.push_back({g, h, Mono::lcm(lt(g), lt(h))});
    for (std::size_t a = 0; a < C.size(); ++a) {
      bool keep = lt(C[a].i).coprime(lt(h));
      if (!keep) {
        keep = true;
        for (std::size_t b = a + 1; b < C.size() && keep; ++b)
          if (C[b].lcm.divides(C[a].lcm)) keep = false;
        for (std::size_t b = 0; b < D.size() && keep; ++b)
          if (D[b].lcm.divides(C[a].lcm)) keep = false;
      }
      if (keep) D.push_back(C[a]);
      else ++skipped;
    }
    std::vector<Pair> E;
    for (const auto& p : D) {
      if (lt(p.i).coprime(lt(h))) ++skipped;
      else E.push_back(p);
    }
    std::vector<Pair> B;
    for (const auto& p : pairs) {
      bool drop = lt(h).divides(p.lcm) && !(Mono::lcm(lt(p.i), lt(h)) == p.lcm) &&
                  !(Mono::lcm(lt(p.j), lt(h)) == p.lcm);
      if (drop) ++skipped;
      else B.push_back(p);
    }
    for (auto& p : E) B.push_back(p);
    pairs = std::move(B);
    for (std::size_t g = 0; g < h; ++g)
      if (active[g] && lt(h).divides(lt(g))) active[g] = false;
  }

  std::size_t pick() const {
    std::size_t best = 0;
    for (std::size_t k = 1; k < pairs.size(); ++k) {
      const Pair &a = pairs[k], &b = pairs[best];
      int c = a.lcm.deg != b.lcm.deg ? (a.lcm.deg < b.lcm.deg ? -1 : 1) : compare(a.lcm, b.lcm, ord);
      if (c < 0 || (c == 0 && std::make_pair(a.j, a.i) < std::make_pair(b.j, b.i))) best = k;
    }
    return best;
  }

  std::vector<Poly> reducers() const {
    std::vector<Poly> r;
    for (std::size_t k = 0; k < polys.size(); ++k)
      if (active[k]) r.push_back(polys[k]);
    return r;
  }
};

std::vector<Poly> reduce_basis(std::vector<Poly> G) {
  // minimal basis, then tail reduction
  std::sort(G.begin(), G.end(), [](const Poly& a, const Poly& b) { return compare(a.lead().m, b.lead().m, a.order()) < 0; });
  std::vector<Poly> M;
  for (const auto& g : G) {
    bool redundant = false;
    for (const auto& h : M)
      if (h.lead().m.divides(g.lead().m)) redundant = true;
    if (!redundant) M.push_back(g.monic());
  }
  for (std::size_t k = 0; k < M.size(); ++k) {
    std::vector<Poly> others;
    for (std::size_t l = 0; l < M.size(); ++l)
      if (l != k) others.push_back(M[l]);
    const Term lt = M[k].lead();
    Poly tail = M[k] - Poly::monomial(M[k].nvars(), lt.m, lt.c, M[k].order());
    M[k] = Poly::monomial(M[k].nvars(), lt.m, lt.c, M[k].order()) + normal_form(tail, others);
  }
  return M;
}

}  // namespace

GbResult buchberger(const std::vector<Poly>& gens, const Budget& budget) {
  auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };
  GbResult res;
  if (gens.empty()) return res;
  Engine E;
  E.ord = gens.front().order();
  std::size_t nv = gens.front().nvars();
  auto add = [&](const Poly& p) {
    E.polys.push_back(p.monic());
    E.active.push_back(true);
    E.update(E.polys.size() - 1);
  };
  auto unit = [&] {
    res.basis = {Poly::constant(nv, 1, E.ord)};
    res.seconds = elapsed();
    res.pairs_skipped = E.skipped;
    return res;
  };
  for (const auto& g : gens) {
    if (g.nvars() != nv || g.order() != E.ord) throw std::invalid_argument("generators from different rings");
    Poly r = normal_form(g, E.reducers());
    if (r.is_zero()) continue;
    if (r.is_constant()) return unit();
    add(r);
  }
  while (!E.pairs.empty()) {
    if (res.spolys >= budget.max_spolys || elapsed() > budget.max_seconds) {
      res.status = Status::Exhausted;
      res.basis = E.reducers();
      res.seconds = elapsed();
      res.pairs_skipped = E.skipped;
      return res;
    }
    std::size_t k = E.pick();
    Pair p = E.pairs[k];
    E.pairs.erase(E.pairs.begin() + static_cast<long>(k));
    ++res.spolys;
    Poly r = normal_form(spoly(E.polys[p.i], E.polys[p.j]), E.reducers());
    if (r.is_zero()) continue;
    if (r.is_constant()) return unit();
    add(r);
  }
  res.basis = reduce_basis(E.reducers());
  res.seconds = elapsed();
  res.pairs_skipped = E.skipped;
  return res;
}

bool ideal_membership(const Poly& f, const std::vector<Poly>& basis) { return normal_form(f, basis).is_zero(); }

bool is_proper(const std::vector<Poly>& basis) {
  for (const auto& g : basis)
    if (g.is_constant()) return false;
  return true;
}

bool is_groebner_basis(const std::vector<Poly>& basis) {
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = i + 1; j < basis.size(); ++j)
      if (!normal_form(spoly(basis[i], basis[j]), basis).is_zero()) return false;
  return true;
}

std::string to_string(Decision d) {
  switch (d) {
    case Decision::Yes: return "yes";
    case Decision::No: return "no";
    default: return "undecided";
  }
}

static Poly extend(const Poly& p, std::size_t nvars) {
  Poly r(nvars, p.order());
  for (const auto& t : p.terms()) r = r + Poly::monomial(nvars, t.m, t.c, p.order());
  return r;
}

RabinowitschResult rabinowitsch(const Poly& C, const std::vector<Poly>& gens, const Budget& budget) {
  const std::size_t n = C.nvars();
  std::vector<Poly> G;
  for (const auto& g : gens) G.push_back(extend(g, n + 1));
  Poly t = Poly::variable(n + 1, n, C.order());
  G.push_back(Poly::constant(n + 1, 1, C.order()) - t * extend(C, n + 1));
  GbResult r = buchberger(G, budget);
  RabinowitschResult out;
  out.spolys = r.spolys;
  out.seconds = r.seconds;
  if (!r.complete()) return out;
  out.decision = is_proper(r.basis) ? Decision::No : Decision::Yes;
  return out;
}

RabinowitschResult rabinowitsch(const QuadForm& C, const QuadForm& A, const QuadForm& B, const Budget& budget) {
  const std::size_t n = A.n();
  if (B.n() != n || C.n() != n) throw std::invalid_argument("ambient mismatch");
  return rabinowitsch(Poly::from_quadform(C, n), {Poly::from_quadform(A, n), Poly::from_quadform(B, n)}, budget);
}

Decision solvable(const std::vector<Poly>& gens, const Budget& budget) {
  GbResult r = buchberger(gens, budget);
  if (!r.complete()) return Decision::Undecided;
  return is_proper(r.basis) ? Decision::Yes : Decision::No;
}

}  // namespace qsg::gb
