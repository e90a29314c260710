#include "qsg/radical.hpp"

#include <map>
#include <random>
#include <stdexcept>

namespace qsg {

namespace {

json vec_json(const Vec<Rational>& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(to_string(x));
  return a;
}

json vec_json(const Vec<Scalar>& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(x.str());
  return a;
}

// Forms with MS inside W, rewritten on W's basis (pivot coordinates of the RREF basis).
QuadForm compress(const QuadForm& Q, const Subspace& W) {
  const auto& piv = W.pivots();
  QMatrix M(piv.size(), piv.size());
  for (std::size_t i = 0; i < piv.size(); ++i)
    for (std::size_t j = 0; j < piv.size(); ++j) M(i, j) = Q.matrix()(piv[i], piv[j]);
  return QuadForm(M);
}

Vec<Scalar> lift_point(const Vec<Scalar>& y, const Subspace& W) {
  Vec<Scalar> x(W.ambient(), Scalar(0));
  for (std::size_t i = 0; i < y.size(); ++i) x[W.pivots()[i]] = y[i];
  return x;
}

Vec<Scalar> flatten(const SMatrix& M) {
  Vec<Scalar> v;
  for (std::size_t i = 0; i < M.rows(); ++i)
    for (std::size_t j = i; j < M.cols(); ++j) v.push_back(M(i, j));
  return v;
}

// C in rad<G> for a single quadric G, any coefficient context
bool in_principal_radical(const SMatrix& C, const SMatrix& G) {
  const std::size_t r = rank(G);
  if (r == 0) return C.is_zero();
  if (r >= 2) {
    auto a = flatten(C), b = flatten(G);
    SMatrix S(2, a.size());
    for (std::size_t j = 0; j < a.size(); ++j) {
      S(0, j) = a[j];
      S(1, j) = b[j];
    }
    return rank(S) <= 1;
  }
  // G = c u^2: u must divide C
  std::size_t i = 0;
  while (G.row(i) == Vec<Scalar>(G.cols(), Scalar(0))) ++i;
  auto kb = ExtSubspace::span(G.cols(), {G.row(i)}).annihilator_basis();
  return restrict_matrix(C, kb).is_zero();
}

Scalar eval_at(const SMatrix& M, const Vec<Scalar>& x) {
  Scalar s(0);
  for (std::size_t i = 0; i < M.rows(); ++i)
    for (std::size_t j = 0; j < M.cols(); ++j)
      if (!M(i, j).is_zero()) s += M(i, j) * x[i] * x[j];
  return s;
}

// A point y in Q^k or Q(sqrt d)^k with G(y) = 0 and C(y) != 0, for rational G, C.
std::optional<Vec<Scalar>> point_on_quadric(const QMatrix& G, const QMatrix& C, std::mt19937_64& rng,
                                            std::size_t lines) {
  const std::size_t k = G.rows();
  if (k == 0) return std::nullopt;
  SMatrix Gs = to_scalar(G), Cs = to_scalar(C);
  auto test = [&](const Vec<Scalar>& y) { return eval_at(Gs, y).is_zero() && !eval_at(Cs, y).is_zero(); };
  for (std::size_t i = 0; i < k; ++i) {
    Vec<Scalar> e(k, Scalar(0));
    e[i] = 1;
    if (test(e)) return e;
  }
  std::uniform_int_distribution<int> d(-3, 3);
  for (std::size_t t = 0; t < lines; ++t) {
    Vec<Rational> p(k), q(k);
    for (std::size_t i = 0; i < k; ++i) {
      p[i] = d(rng);
      q[i] = d(rng);
    }
    // G(p + s q) = a + 2 b s + c s^2
    auto bil = [&](const Vec<Rational>& x, const Vec<Rational>& y) {
      Rational r = 0;
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) r += x[i] * G(i, j) * y[j];
      return r;
    };
    Rational a = bil(p, p), b = bil(p, q), c = bil(q, q);
    std::vector<Scalar> ss;
    if (sgn(c) == 0) {
      if (sgn(b) != 0) ss.push_back(Scalar(-a / (2 * b)));
    } else if (sgn(b * b - a * c) == 0) {
      ss.push_back(Scalar(-b / c));
    } else {
      Scalar root = sqrt_scalar(b * b - a * c);
      ss.push_back((Scalar(-b) + root) / Scalar(c));
      ss.push_back((Scalar(-b) - root) / Scalar(c));
    }
    for (const auto& s : ss) {
      Vec<Scalar> y(k);
      for (std::size_t i = 0; i < k; ++i) y[i] = Scalar(p[i]) + s * Scalar(q[i]);
      if (test(y)) return y;
    }
  }
  return std::nullopt;
}

// write a form on hyperplane coordinates (values on the kernel basis) as a form on the ambient space
Vec<Rational> lift_form(const std::vector<Vec<Rational>>& kb, const Vec<Rational>& psi, std::size_t n) {
  QMatrix sys(kb.size(), n + 1);
  for (std::size_t i = 0; i < kb.size(); ++i) {
    for (std::size_t j = 0; j < n; ++j) sys(i, j) = kb[i][j];
    sys(i, n) = psi[i];
  }
  Rref<Rational> rr = rref(sys, false);
  Vec<Rational> w(n, 0);
  for (std::size_t i = 0; i < rr.rank; ++i)
    if (rr.pivots[i] < n) w[rr.pivots[i]] = rr.R(i, n);
  return w;
}

bool all_rational(const Vec<Scalar>& v) {
  for (const auto& x : v)
    if (!x.is_rational()) return false;
  return true;
}

Vec<Rational> real_part(const Vec<Scalar>& v) {
  Vec<Rational> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) r[i] = v[i].a();
  return r;
}

// A rational common zero of polynomial equations, by triangular back substitution on lex bases.
std::optional<std::vector<Rational>> rational_solution(std::vector<gb::Poly> eqs, std::size_t nu, std::size_t var,
                                                       const gb::Budget& budget) {
  if (var == nu) {
    for (const auto& e : eqs)
      if (!e.is_zero()) return std::nullopt;
    return std::vector<Rational>(nu, 0);
  }
  for (auto& e : eqs) e = gb::with_order(e, gb::Order::Lex);
  gb::GbResult G = gb::buchberger(eqs, budget);
  if (!G.complete() || !gb::is_proper(G.basis)) return std::nullopt;
  // the last variable in lex order is eliminated first
  const std::size_t v = nu - 1 - var;
  std::vector<Rational> cand;
  for (const auto& g : G.basis) {
    std::vector<Rational> c;
    if (!g.is_zero() && gb::univariate_in(g, v, &c)) {
      for (const auto& r : roots(UPoly(c)).roots)
        if (r.is_rational()) cand.push_back(r.a());
      if (cand.empty()) return std::nullopt;
      break;
    }
  }
  if (cand.empty()) cand = {0, 1, -1, 2, -2, 3};
  for (const auto& val : cand) {
    std::vector<gb::Poly> sub;
    for (const auto& g : G.basis) sub.push_back(gb::substitute(g, v, val));
    auto rest = rational_solution(sub, nu, var + 1, budget);
    if (rest) {
      (*rest)[v] = val;
      return rest;
    }
  }
  return std::nullopt;
}

// Search U inside S with A, B in <U>, over pivot patterns of a 2 x dim(S) echelon matrix.
CaseIIIResult search_U_in(const Subspace& S, const QuadForm& A, const QuadForm& B, const gb::Budget& budget,
                          const std::string& route) {
  CaseIIIResult out;
  out.route = route;
  const std::size_t n = A.n(), d = S.dim();
  if (d < 2) {
    out.decision = Decision::No;
    return out;
  }
  // coordinates y with y_i = basis form i of S for i < d
  QMatrix Bm(n, n);
  {
    std::vector<char> piv(n, 0);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < n; ++j) Bm(i, j) = S.basis()(i, j);
      piv[S.pivots()[i]] = 1;
    }
    std::size_t r = d;
    for (std::size_t j = 0; j < n; ++j)
      if (!piv[j]) Bm(r++, j) = 1;
  }
  QMatrix Bi = *inverse(Bm);
  QMatrix NA = Bi.transpose() * A.matrix() * Bi, NB = Bi.transpose() * B.matrix() * Bi;
  bool undecided = false;
  for (std::size_t p1 = 0; p1 < d; ++p1)
    for (std::size_t p2 = p1 + 1; p2 < d; ++p2) {
      // unknown index of c_{1j}, c_{2j}
      std::map<std::pair<int, std::size_t>, std::size_t> var;
      for (std::size_t j = p1 + 1; j < d; ++j)
        if (j != p2) var[{1, j}] = var.size();
      for (std::size_t j = p2 + 1; j < d; ++j) var[{2, j}] = var.size();
      const std::size_t nu = std::max<std::size_t>(1, var.size());
      using gb::Poly;
      auto unknown = [&](int row, std::size_t j) {
        auto it = var.find({row, j});
        return it == var.end() ? Poly(nu) : Poly::variable(nu, it->second);
      };
      // kernel points as polynomial vectors in y
      std::vector<std::vector<Poly>> ker;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == p1 || j == p2) continue;
        std::vector<Poly> b(n, Poly(nu));
        b[j] = Poly::constant(nu, 1);
        if (j < d) {
          b[p1] = -unknown(1, j);
          b[p2] = -unknown(2, j);
        }
        ker.push_back(b);
      }
      std::vector<Poly> eqs;
      bool infeasible = false;
      for (const QMatrix* N : {&NA, &NB})
        for (std::size_t a = 0; a < ker.size() && !infeasible; ++a)
          for (std::size_t b = a; b < ker.size() && !infeasible; ++b) {
            Poly e(nu);
            for (std::size_t i = 0; i < n; ++i) {
              if (ker[a][i].is_zero()) continue;
              for (std::size_t j = 0; j < n; ++j)
                if (sgn((*N)(i, j)) != 0 && !ker[b][j].is_zero()) e = e + ker[a][i] * ker[b][j] * (*N)(i, j);
            }
            if (e.is_zero()) continue;
            if (e.is_constant()) infeasible = true;
            eqs.push_back(e);
          }
      if (infeasible) continue;
      Decision dec = eqs.empty() ? Decision::Yes : gb::solvable(eqs, budget);
      if (dec == Decision::Undecided) {
        undecided = true;
        continue;
      }
      if (dec == Decision::No) continue;
      out.decision = Decision::Yes;
      auto sol = eqs.empty() ? std::optional<std::vector<Rational>>(std::vector<Rational>(nu, 0))
                             : rational_solution(eqs, nu, 0, budget);
      if (!sol) {
        out.witness_beyond_extension = true;
        return out;
      }
      Vec<Rational> r1(n, 0), r2(n, 0);
      for (std::size_t i = 0; i < d; ++i) {
        Rational c1 = i == p1 ? Rational(1) : var.count({1, i}) ? (*sol)[var[{1, i}]] : Rational(0);
        Rational c2 = i == p2 ? Rational(1) : var.count({2, i}) ? (*sol)[var[{2, i}]] : Rational(0);
        for (std::size_t j = 0; j < n; ++j) {
          r1[j] += c1 * S.basis()(i, j);
          r2[j] += c2 * S.basis()(i, j);
        }
      }
      Subspace U = Subspace::span(n, {r1, r2});
      require(U.dim() == 2 && in_ideal(A, U) && in_ideal(B, U), "case-iii-witness",
              "pattern solution does not put A, B in <U>", {{"A", A.str()}, {"B", B.str()}});
      out.witness = U;
      return out;
    }
  out.decision = undecided ? Decision::Undecided : Decision::No;
  return out;
}

// the radical decision on forms already compressed to MS(A)+MS(B)+MS(C)
RadicalResult decide(const QuadForm& C, const QuadForm& A, const QuadForm& B, const Subspace& W,
                     const RadicalOptions& opt) {
  RadicalResult res;
  const std::size_t w = C.n();
  if (C.is_zero()) {
    res.decision = Decision::Yes;
    res.method = "span";
    res.witness = {{"alpha", "0"}, {"beta", "0"}};
    return res;
  }
  if (auto ab = case_i(A, B, C)) {
    res.decision = Decision::Yes;
    res.method = "span";
    res.witness = {{"alpha", to_string(ab->first)}, {"beta", to_string(ab->second)}};
    return res;
  }
  std::mt19937_64 rng(opt.seed);
  auto no_with_point = [&](const Vec<Scalar>& y, const std::string& method) {
    QuadForm a = A, b = B, c = C;
    require(eval_at(to_scalar(a.matrix()), y).is_zero() && eval_at(to_scalar(b.matrix()), y).is_zero() &&
                !eval_at(to_scalar(c.matrix()), y).is_zero(),
            "sampler-point", "refutation point does not lie on Z(A,B) off Z(C)");
    res.decision = Decision::No;
    res.method = method;
    res.witness["point"] = vec_json(lift_point(y, W));
    return res;
  };
  // one generator up to scale: rad<G> directly
  if (A.is_zero() || B.is_zero() || A.proportional_to(B)) {
    const QuadForm& G = A.is_zero() ? B : A;
    bool yes = in_principal_radical(to_scalar(C.matrix()), to_scalar(G.matrix()));
    res.decision = yes ? Decision::Yes : Decision::No;
    res.method = "principal";
    return res;
  }
  // squares in the pencil: <A, B> = <G, l^2> decides exactly
  SquaresResult sq = squares_in_pencil(A, B);
  if (!sq.roots.empty()) {
    const PencilRoot& r = sq.roots.front();
    const QuadForm& G = r.beta.is_zero() ? B : A;
    auto kb = ExtSubspace::span(w, {r.v}).annihilator_basis();
    SMatrix Cb = restrict_matrix(to_scalar(C.matrix()), kb), Gb = restrict_matrix(to_scalar(G.matrix()), kb);
    bool yes = in_principal_radical(Cb, Gb);
    res.witness = {{"alpha", r.alpha.str()}, {"beta", r.beta.str()}, {"ell", vec_json(lift_point(r.v, W))},
                   {"scale", r.c.str()}};
    if (yes) {
      res.decision = Decision::Yes;
      res.method = "square-fastpath";
      return res;
    }
    if (all_rational(r.v)) {
      std::vector<Vec<Rational>> kq;
      for (const auto& k : kb) kq.push_back(real_part(k));
      QMatrix K(w, kq.size());
      for (std::size_t c = 0; c < kq.size(); ++c)
        for (std::size_t i = 0; i < w; ++i) K(i, c) = kq[c][i];
      QMatrix Gq = K.transpose() * G.matrix() * K, Cq = K.transpose() * C.matrix() * K;
      if (auto y = point_on_quadric(Gq, Cq, rng, opt.sampler_lines)) {
        Vec<Scalar> x(w, Scalar(0));
        for (std::size_t c = 0; c < kq.size(); ++c)
          for (std::size_t i = 0; i < w; ++i) x[i] += (*y)[c] * Scalar(kq[c][i]);
        json keep = res.witness;
        no_with_point(x, "square-path");
        for (auto it = keep.begin(); it != keep.end(); ++it) res.witness[it.key()] = it.value();
        return res;
      }
    }
    res.decision = Decision::No;
    res.method = "square-path";
    return res;
  }
  // points of the common kernel of M_A and M_B lie on Z(A, B)
  {
    Subspace K = A.minimal_space().sum(B.minimal_space()).annihilator();
    auto kb = K.basis_rows();
    for (std::size_t i = 0; i < kb.size(); ++i)
      for (std::size_t j = i; j < kb.size(); ++j) {
        Vec<Rational> x = kb[i];
        if (j != i)
          for (std::size_t t = 0; t < w; ++t) x[t] += kb[j][t];
        if (sgn(C.eval(x)) != 0) return no_with_point(to_scalar(x), "kernel-point");
      }
  }
  // Jacobian test: singular points of Z(A, B) lie in kernels of singular pencil members. For a regular pencil
  // whose members all have rank >= 3 those have codimension >= 1 in Z(A, B), so the complete intersection
  // <A, B> is radical and C in rad<A, B> iff C in span(A, B), already refuted above.
  {
    const Subspace Wab = A.minimal_space().sum(B.minimal_space());
    const QuadForm a = compress(A, Wab), b = compress(B, Wab);
    const std::size_t u = Wab.dim();
    bool regular = false;
    for (long t = 0; t <= static_cast<long>(u) + 1 && !regular; ++t) regular = (a + b * Rational(t)).rank() == u;
    if (regular && u >= 3) {
      PencilLocus L = pencil_rank_locus(a.matrix(), b.matrix(), 2, 4000);
      if (!L.overflow && !L.whole_pencil && L.roots.empty()) {
        res.decision = Decision::No;
        res.method = "jacobian";
        return res;
      }
    }
  }
  // rational rank-2 members f*g of the pencil: Z(f, G) lies in Z(A, B)
  {
    PencilLocus L = pencil_rank_locus(A.matrix(), B.matrix(), 2);
    for (const auto& r : L.roots) {
      if (!r.is_rational() || r.rank != 2) continue;
      SMatrix N = pencil_element(A.matrix(), B.matrix(), r.alpha, r.beta);
      Factorization f = factor_quadratic(N);
      if (!f.available) continue;
      const QuadForm& G = r.beta.is_zero() ? B : A;
      for (const auto& phi : {f.f, f.g}) {
        if (!all_rational(phi)) continue;
        auto kq = Subspace::span(w, {real_part(phi)}).annihilator_basis();
        QMatrix K(w, kq.size());
        for (std::size_t c = 0; c < kq.size(); ++c)
          for (std::size_t i = 0; i < w; ++i) K(i, c) = kq[c][i];
        QMatrix Gq = K.transpose() * G.matrix() * K, Cq = K.transpose() * C.matrix() * K;
        if (auto y = point_on_quadric(Gq, Cq, rng, opt.sampler_lines)) {
          Vec<Scalar> x(w, Scalar(0));
          for (std::size_t c = 0; c < kq.size(); ++c)
            for (std::size_t i = 0; i < w; ++i) x[i] += (*y)[c] * Scalar(kq[c][i]);
          return no_with_point(x, "sampler");
        }
      }
    }
  }
  // a singular rational member G' of the pencil: Z(A, B) contains Z(H) inside ker G' for the other generator H
  {
    std::vector<std::pair<QMatrix, const QuadForm*>> members;
    if (A.rank() < w) members.emplace_back(A.matrix(), &B);
    if (B.rank() < w) members.emplace_back(B.matrix(), &A);
    PencilLocus L = pencil_rank_locus(A.matrix(), B.matrix(), w - 1, 1);
    for (const auto& r : L.roots) {
      if (!r.is_rational() || r.at_infinity() || r.alpha.is_zero()) continue;
      QMatrix N = A.matrix() * r.alpha.a() + B.matrix() * r.beta.a();
      members.emplace_back(N, &A);
    }
    for (const auto& [G, H] : members) {
      QuadForm g(G);
      auto kq = g.minimal_space().annihilator_basis();
      if (kq.empty()) continue;
      QMatrix K(w, kq.size());
      for (std::size_t c = 0; c < kq.size(); ++c)
        for (std::size_t i = 0; i < w; ++i) K(i, c) = kq[c][i];
      QMatrix Hq = K.transpose() * H->matrix() * K, Cq = K.transpose() * C.matrix() * K;
      if (auto y = point_on_quadric(Hq, Cq, rng, opt.sampler_lines)) {
        Vec<Scalar> x(w, Scalar(0));
        for (std::size_t c = 0; c < kq.size(); ++c)
          for (std::size_t i = 0; i < w; ++i) x[i] += (*y)[c] * Scalar(kq[c][i]);
        return no_with_point(x, "sampler");
      }
    }
  }
  // A, B in <v1, v2>: off Z(v1, v2), Z(A, B) contains the rational linear spaces
  // {c2 v1 = c1 v2, c1 a1 + c2 a2 = 0, c1 b1 + c2 b2 = 0} where A = v1 a1 + v2 a2, B = v1 b1 + v2 b2
  if (A.rank() <= 4 && B.rank() <= 4) {
    CaseIIIResult c3 = case_iii_decide(A, B, opt.budget);
    if (c3.witness) {
      auto v = c3.witness->basis_rows();
      std::vector<Vec<Rational>> rows;
      for (const auto& vi : v)
        for (std::size_t k = 0; k < w; ++k) {
          Vec<Rational> e(w, 0);
          e[k] = 1;
          rows.push_back(QuadForm::product(vi, e).coeff_vector());
        }
      auto ca = solve_in_row_space(rows, A.coeff_vector()), cb = solve_in_row_space(rows, B.coeff_vector());
      require(ca.has_value() && cb.has_value(), "ideal-witness", "case (iii) witness does not generate A and B");
      auto part = [&](const Vec<Rational>& coef, std::size_t which) {
        return Vec<Rational>(coef.begin() + static_cast<long>(which * w), coef.begin() + static_cast<long>((which + 1) * w));
      };
      const Vec<Rational> a1 = part(*ca, 0), a2 = part(*ca, 1), b1 = part(*cb, 0), b2 = part(*cb, 1);
      std::uniform_int_distribution<long> d(-3, 3);
      for (long s = 0; s <= 6; ++s) {
        const Rational c1 = s == 0 ? 0 : 1, c2 = s == 0 ? 1 : Rational(s - 3);
        Vec<Rational> r1(w), r2(w), r3(w);
        for (std::size_t t = 0; t < w; ++t) {
          r1[t] = c2 * v[0][t] - c1 * v[1][t];
          r2[t] = c1 * a1[t] + c2 * a2[t];
          r3[t] = c1 * b1[t] + c2 * b2[t];
        }
        auto kb = Subspace::span(w, {r1, r2, r3}).annihilator_basis();
        if (kb.empty()) continue;
        for (int draw = 0; draw < 3; ++draw) {
          Vec<Rational> x(w, 0);
          for (const auto& k : kb) {
            const long f = d(rng);
            for (std::size_t t = 0; t < w; ++t) x[t] += f * k[t];
          }
          if (sgn(dot(v[0], x)) == 0 && sgn(dot(v[1], x)) == 0) continue;
          if (sgn(C.eval(x)) != 0) return no_with_point(to_scalar(x), "ideal-point");
        }
      }
    }
  }
  unsigned k = 0;
  if (degree_ladder(C, A, B, opt.kmax, opt.ladder_max_unknowns, &k)) {
    res.decision = Decision::Yes;
    res.method = "ladder";
    res.witness = {{"k", k}};
    return res;
  }
  gb::RabinowitschResult g = gb::rabinowitsch(C, A, B, opt.budget);
  res.decision = g.decision;
  res.method = "groebner";
  res.spolys = g.spolys;
  if (g.decision == Decision::Undecided) res.witness = {{"reason", "budget exhausted"}, {"spolys", g.spolys}};
  return res;
}

Subspace joint_space(const QuadForm& C, const QuadForm& A, const QuadForm& B) {
  return A.minimal_space().sum(B.minimal_space()).sum(C.minimal_space());
}

}  // namespace

json RadicalResult::to_json() const {
  return {{"result", gb::to_string(decision)}, {"method", method}, {"witness", witness}};
}

json CaseIIIResult::to_json() const {
  json j = {{"decision", gb::to_string(decision)}, {"route", route}};
  if (witness) {
    json rows = json::array();
    for (const auto& r : witness->basis_rows()) rows.push_back(vec_json(r));
    j["U"] = rows;
  } else if (decision == Decision::Yes) {
    j["U"] = "exists, witness beyond supported extension";
  }
  return j;
}

std::optional<std::pair<Rational, Rational>> case_i(const QuadForm& A, const QuadForm& B, const QuadForm& C) {
  if (A.n() != B.n() || A.n() != C.n()) throw std::invalid_argument("ambient mismatch");
  auto x = solve_in_row_space<Rational>({A.coeff_vector(), B.coeff_vector()}, C.coeff_vector());
  if (!x) return std::nullopt;
  return std::make_pair((*x)[0], (*x)[1]);
}

bool degree_ladder(const QuadForm& C, const QuadForm& A, const QuadForm& B, unsigned kmax, std::size_t max_unknowns,
                   unsigned* k_found) {
  const std::size_t w = C.n();
  if (w == 0 || w > gb::MAXV) return false;
  using gb::Mono;
  using gb::Poly;
  auto monomials = [&](unsigned deg) {
    std::vector<Mono> out{Mono{}};
    for (unsigned d = 0; d < deg; ++d) {
      std::vector<Mono> next;
      for (const auto& m : out) {
        std::size_t last = 0;
        for (std::size_t i = 0; i < w; ++i)
          if (m.e[i]) last = i;
        for (std::size_t i = (m.deg ? last : 0); i < w; ++i) next.push_back(m * Mono::var(i));
      }
      out = std::move(next);
    }
    return out;
  };
  Poly a = Poly::from_quadform(A, w), b = Poly::from_quadform(B, w), c = Poly::from_quadform(C, w);
  for (unsigned k = 2; k <= kmax; ++k) {
    auto mult = monomials(2 * k - 2);
    if (2 * mult.size() > max_unknowns) break;
    auto slice = monomials(2 * k);
    auto cmp = [](const Mono& x, const Mono& y) { return gb::compare(x, y, gb::Order::Grevlex) < 0; };
    std::map<Mono, std::size_t, decltype(cmp)> index(cmp);
    for (const auto& m : slice) index.emplace(m, index.size());
    auto vec = [&](const Poly& p) {
      Vec<Rational> v(slice.size(), 0);
      for (const auto& t : p.terms()) v[index.at(t.m)] = t.c;
      return v;
    };
    SpanBuilder<Rational> span(slice.size());
    for (const auto& m : mult) {
      span.add(vec(a.mul_term(m, 1)));
      span.add(vec(b.mul_term(m, 1)));
    }
    if (span.contains(vec(c.pow(k)))) {
      if (k_found) *k_found = k;
      return true;
    }
  }
  return false;
}

RadicalResult radical_membership(const QuadForm& C, const QuadForm& A, const QuadForm& B, const RadicalOptions& opt) {
  if (A.n() != B.n() || A.n() != C.n()) throw std::invalid_argument("ambient mismatch");
  if (A.is_zero() && B.is_zero()) throw PreconditionError("radical_membership needs A, B not both zero");
  Subspace W = joint_space(C, A, B);
  RadicalResult res = decide(compress(C, W), compress(A, W), compress(B, W), W, opt);
  if (opt.crosscheck && res.method != "groebner") {
    RadicalResult g = radical_groebner(C, A, B, opt.budget);
    if (g.decision != Decision::Undecided && g.decision != res.decision)
      throw std::logic_error("radical oracle disagreement: " + res.method + " says " + gb::to_string(res.decision));
  }
  return res;
}

RadicalResult radical_groebner(const QuadForm& C, const QuadForm& A, const QuadForm& B, const gb::Budget& budget) {
  if (A.is_zero() && B.is_zero()) throw PreconditionError("radical_membership needs A, B not both zero");
  Subspace W = joint_space(C, A, B);
  RadicalResult res;
  res.method = "groebner";
  if (W.dim() == 0) {
    res.decision = Decision::Yes;
    return res;
  }
  gb::RabinowitschResult g = gb::rabinowitsch(compress(C, W), compress(A, W), compress(B, W), budget);
  res.decision = g.decision;
  res.spolys = g.spolys;
  return res;
}

CaseIIIResult case_iii_decide(const QuadForm& A, const QuadForm& B, const gb::Budget& budget) {
  if (A.n() != B.n()) throw std::invalid_argument("ambient mismatch");
  const std::size_t n = A.n();
  CaseIIIResult out;
  if (A.rank() > 4 || B.rank() > 4) {
    out.decision = Decision::No;
    out.route = "rank";
    return out;
  }
  if (A.irreducible() && B.irreducible()) {
    // U lies in MS(A) and in MS(B)
    return search_U_in(A.minimal_space().intersection(B.minimal_space()), A, B, budget, "intersection");
  }
  out.route = "reducible";
  const QuadForm& R = A.irreducible() ? B : A;
  const QuadForm& G = A.irreducible() ? A : B;
  if (R.is_zero() && G.is_zero()) {
    out.decision = n >= 2 ? Decision::Yes : Decision::No;
    if (n >= 2) out.witness = Subspace::coordinate(n, {0, 1});
    return out;
  }
  if (R.is_zero()) return search_U_in(G.minimal_space().dim() >= 2 ? G.minimal_space() : Subspace::full(n), R, G,
                                      budget, "reducible");
  Factorization f = factor_quadratic(R.matrix());
  if (!f.available) return search_U_in(A.minimal_space().sum(B.minimal_space()), A, B, budget, "span-search");
  for (const auto& phi : {f.f, f.g}) {
    auto kb = ExtSubspace::span(n, {phi}).annihilator_basis();
    SMatrix Gb = restrict_matrix(to_scalar(G.matrix()), kb);
    if (rank(Gb) > 2) continue;
    out.decision = Decision::Yes;
    if (!all_rational(phi) || !all_rational(flatten(Gb))) {
      out.witness_beyond_extension = true;
      continue;
    }
    std::vector<Vec<Rational>> kq;
    for (const auto& k : kb) kq.push_back(real_part(k));
    Vec<Rational> psi;
    QMatrix Gq(Gb.rows(), Gb.cols());
    for (std::size_t i = 0; i < Gb.rows(); ++i)
      for (std::size_t j = 0; j < Gb.cols(); ++j) Gq(i, j) = Gb(i, j).a();
    if (Gq.is_zero()) {
      for (std::size_t j = 0; j < n && psi.empty(); ++j) {
        Vec<Rational> e(n, 0);
        e[j] = 1;
        if (Subspace::span(n, {real_part(phi), e}).dim() == 2) psi = e;
      }
    } else {
      Factorization g = factor_quadratic(Gq);
      if (!g.available || !all_rational(g.f)) {
        out.witness_beyond_extension = true;
        continue;
      }
      psi = lift_form(kq, real_part(g.f), n);
    }
    if (psi.empty()) continue;
    Subspace U = Subspace::span(n, {real_part(phi), psi});
    require(U.dim() == 2 && in_ideal(A, U) && in_ideal(B, U), "case-iii-witness",
            "reducible-route witness does not put A, B in <U>", {{"A", A.str()}, {"B", B.str()}});
    out.witness = U;
    out.witness_beyond_extension = false;
    return out;
  }
  if (out.decision != Decision::Yes) out.decision = Decision::No;
  return out;
}

CaseIIIResult case_iii_search(const Subspace& S, const QuadForm& A, const QuadForm& B, const gb::Budget& budget) {
  if (A.n() != B.n() || S.ambient() != A.n()) throw std::invalid_argument("ambient mismatch");
  return search_U_in(S, A, B, budget, "span-search");
}

json PairClassification::to_json() const {
  json j = {{"case_i", case_i}, {"case_ii", case_ii}, {"case_iii", case_iii}};
  if (span_coeffs) j["span_coeffs"] = {to_string(span_coeffs->first), to_string(span_coeffs->second)};
  json sq = json::array();
  for (const auto& r : squares) {
    json s = {{"alpha", r.alpha.str()}, {"beta", r.beta.str()}, {"v", vec_json(r.v)}, {"c", r.c.str()}};
    if (r.ell) s["ell"] = vec_json(*r.ell);
    sq.push_back(s);
  }
  j["squares"] = sq;
  j["case_iii_detail"] = case_iii_detail.to_json();
  j["exclusive"] = exclusive_i() ? json("i") : exclusive_ii() ? json("ii") : exclusive_iii() ? json("iii") : json();
  return j;
}

PairClassification classify_triple(const QuadForm& A, const QuadForm& B, const QuadForm& C,
                                   const RadicalOptions& opt) {
  RadicalResult r = radical_membership(C, A, B, opt);
  if (r.decision == Decision::Undecided) throw ResourceExhausted("radical membership undecided within budget");
  if (r.decision == Decision::No) throw PreconditionError("classify_triple needs C in rad<A, B>");
  PairClassification pc;
  pc.span_coeffs = case_i(A, B, C);
  pc.case_i = pc.span_coeffs.has_value();
  if (!(A.is_zero() && B.is_zero())) {
    SquaresResult sq = squares_in_pencil(A, B);
    pc.squares = sq.roots;
    pc.case_ii = !sq.roots.empty() || sq.whole_pencil_degenerate;
  }
  pc.case_iii_detail = case_iii_decide(A, B, opt.budget);
  pc.case_iii = pc.case_iii_detail.decision == Decision::Yes;
  if (pc.case_iii && pc.case_iii_detail.witness)
    require(in_ideal(C, *pc.case_iii_detail.witness), "case-iii-third", "C not in <U> although A, B are",
            {{"C", C.str()}});
  if (!pc.case_i && !pc.case_ii && pc.case_iii_detail.decision == Decision::Undecided)
    throw ResourceExhausted("case (iii) undecided within budget");
  require(pc.case_i || pc.case_ii || pc.case_iii, "structure-trichotomy", "no case of the trichotomy holds",
          {{"A", A.str()}, {"B", B.str()}, {"C", C.str()}});
  return pc;
}

std::optional<Vec<Rational>> divide_by_linear(const QuadForm& F, const Vec<Rational>& f) {
  const std::size_t n = F.n();
  std::vector<Vec<Rational>> rows;
  for (std::size_t i = 0; i < n; ++i) {
    Vec<Rational> e(n, 0);
    e[i] = 1;
    rows.push_back(QuadForm::product(f, e).coeff_vector());
  }
  return solve_in_row_space(rows, F.coeff_vector());
}

json CaseIIIDecomposition::to_json() const {
  return {{"v1", vec_json(v1)},         {"v2", vec_json(v2)},         {"ell", vec_json(ell)},
          {"u", vec_json(u)},           {"alpha", to_string(alpha)}, {"beta", to_string(beta)},
          {"sP", to_string(sP)},        {"sQ", to_string(sQ)},       {"sT", to_string(sT)}};
}

bool verify_decomposition(const CaseIIIDecomposition& d, const QuadForm& P, const QuadForm& Q, const QuadForm& T) {
  if (sgn(d.sP) == 0 || sgn(d.sQ) == 0 || sgn(d.sT) == 0) return false;
  QuadForm v2sq = QuadForm::square(d.v2);
  QuadForm Pp = P * d.sP, Qp = Q * d.sQ;
  if (!(Pp == QuadForm::product(d.v1, d.ell) + v2sq)) return false;
  if (!(Qp == QuadForm::product(d.v1, d.u) - v2sq)) return false;
  Vec<Rational> s(d.ell.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = d.ell[i] + d.u[i];
  return T * d.sT == QuadForm::product(d.v2, s) + Pp * d.alpha + Qp * d.beta;
}

CaseIIIDecomposition case3_strong_decompose(const QuadForm& P, const QuadForm& Q, const QuadForm& T,
                                            const RadicalOptions& opt) {
  const std::size_t n = P.n();
  if (Q.n() != n || T.n() != n) throw std::invalid_argument("ambient mismatch");
  if (!P.irreducible() || !Q.irreducible() || !T.irreducible())
    throw PreconditionError("case3_strong_decompose needs irreducible P, Q, T");
  if (Q.minimal_space().contains(P.minimal_space())) throw PreconditionError("MS(P) is contained in MS(Q)");
  RadicalResult r = radical_membership(T, P, Q, opt);
  if (r.decision == Decision::Undecided) throw ResourceExhausted("radical membership undecided within budget");
  if (r.decision == Decision::No) throw PreconditionError("T is not in rad<P, Q>");
  if (case_i(P, Q, T)) throw PreconditionError("T is in span(P, Q)");
  if (!squares_in_pencil(P, Q).roots.empty()) throw PreconditionError("the pencil of P, Q contains a square");
  CaseIIIResult c3 = case_iii_decide(P, Q, opt.budget);
  if (c3.decision != Decision::Yes) throw PreconditionError("P, Q do not share a two-dimensional ideal");
  if (!c3.witness) throw ResourceExhausted("witness-field overflow: no rational U");
  const Subspace& U = *c3.witness;
  PencilLocus L = pencil_rank_locus(P.matrix(), Q.matrix(), 2);
  bool overflow = L.overflow || L.whole_pencil;
  for (const auto& root : L.roots) {
    if (!root.is_rational()) {
      overflow = true;
      continue;
    }
    Factorization f = factor_quadratic(pencil_element(P.matrix(), Q.matrix(), root.alpha, root.beta));
    if (!f.available || !all_rational(f.f) || !all_rational(f.g)) {
      overflow = true;
      continue;
    }
    for (const auto& phi : {f.f, f.g}) {
      Vec<Rational> v1 = real_part(phi);
      if (!U.contains(v1)) continue;
      Vec<Rational> v2;
      for (const auto& b : U.basis_rows())
        if (Subspace::span(n, {v1, b}).dim() == 2) {
          v2 = b;
          break;
        }
      auto kb = Subspace::span(n, {v1}).annihilator_basis();
      Subspace S1 = Subspace::span(n, {v1});
      QuadForm Pb = restrict(P, S1), Qb = restrict(Q, S1);
      Vec<Rational> w(kb.size());
      for (std::size_t i = 0; i < kb.size(); ++i) w[i] = dot(v2, kb[i]);
      QuadForm ww = QuadForm::square(w);
      auto scale = [&](const QuadForm& X) -> std::optional<Rational> {
        for (std::size_t i = 0; i < w.size(); ++i)
          if (sgn(w[i]) != 0) {
            Rational c = X.matrix()(i, i) / (w[i] * w[i]);
            if (sgn(c) != 0 && X == ww * c) return c;
            return std::nullopt;
          }
        return std::nullopt;
      };
      auto cP = scale(Pb), cQ = scale(Qb);
      if (!cP || !cQ) continue;
      CaseIIIDecomposition d;
      d.v1 = v1;
      d.v2 = v2;
      d.sP = 1 / *cP;
      d.sQ = -1 / *cQ;
      QuadForm v2sq = QuadForm::square(v2);
      auto ell = divide_by_linear(P * d.sP - v2sq, v1);
      auto u = divide_by_linear(Q * d.sQ + v2sq, v1);
      if (!ell || !u) continue;
      d.ell = *ell;
      d.u = *u;
      Vec<Rational> s(n);
      for (std::size_t i = 0; i < n; ++i) s[i] = d.ell[i] + d.u[i];
      auto co = solve_in_row_space<Rational>(
          {QuadForm::product(v2, s).coeff_vector(), (P * d.sP).coeff_vector(), (Q * d.sQ).coeff_vector()},
          T.coeff_vector());
      if (!co || sgn((*co)[0]) == 0) continue;
      d.sT = 1 / (*co)[0];
      d.alpha = (*co)[1] * d.sT;
      d.beta = (*co)[2] * d.sT;
      require(verify_decomposition(d, P, Q, T), "case3-strong", "decomposition identities fail symbolically",
              d.to_json());
      return d;
    }
  }
  if (overflow) throw ResourceExhausted("witness-field overflow in the rank-2 pencil search");
  throw AssertionFailure("case3-strong", "no decomposition of the claimed shape exists",
                         {{"P", P.str()}, {"Q", Q.str()}, {"T", T.str()}});
}

UniqueTReport unique_T_check(const QuadForm& P, const QuadForm& Q, const QuadForm& Qp, const QuadForm& T,
                             const QuadForm& Tp, bool check_hypotheses, const RadicalOptions& opt) {
  Subspace V = Q.minimal_space().sum(Qp.minimal_space());
  if (check_hypotheses) {
    std::vector<const QuadForm*> four = {&P, &Q, &Qp, &T};
    for (auto* x : four)
      if (!x->irreducible()) throw PreconditionError("unique_T_check needs irreducible P, Q, Q', T");
    for (std::size_t i = 0; i < four.size(); ++i)
      for (std::size_t j = i + 1; j < four.size(); ++j)
        if (four[i]->proportional_to(*four[j])) throw PreconditionError("P, Q, Q', T must be pairwise independent");
    for (auto* x : {&P, &Q, &Qp})
      if (Tp.proportional_to(*x)) throw PreconditionError("T' must be independent of P, Q, Q'");
    for (auto [c, a, b] : {std::tuple{&T, &P, &Q}, std::tuple{&Tp, &P, &Qp}}) {
      RadicalResult r = radical_membership(*c, *a, *b, opt);
      if (r.decision == Decision::Undecided) throw ResourceExhausted("radical membership undecided within budget");
      if (r.decision == Decision::No) throw PreconditionError("radical hypothesis fails for " + c->str());
    }
    if (!in_ideal(P, V)) throw PreconditionError("P is not in <MS(Q)+MS(Q')>");
    if (V.contains(P.minimal_space())) throw PreconditionError("MS(P) is contained in MS(Q)+MS(Q')");
  }
  UniqueTReport rep;
  rep.distinct = !T.proportional_to(Tp);
  rep.T_outside = !V.contains(T.minimal_space());
  rep.Tp_outside = !V.contains(Tp.minimal_space());
  rep.holds = rep.distinct && rep.T_outside && rep.Tp_outside;
  if (!rep.holds)
    rep.failure = AssertionFailure("unique-T", "T = T' or a minimal space inside MS(Q)+MS(Q')",
                                   {{"P", P.str()}, {"Q", Q.str()}, {"Qp", Qp.str()}, {"T", T.str()}, {"Tp", Tp.str()},
                                    {"distinct", rep.distinct}, {"T_outside", rep.T_outside},
                                    {"Tp_outside", rep.Tp_outside}})
                      .to_json();
  return rep;
}

}  // namespace qsg
