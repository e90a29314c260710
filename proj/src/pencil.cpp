#include "qsg/pencil.hpp"

#include <algorithm>
#include <random>

#include "qsg/assertion.hpp"

namespace qsg {

namespace {

bool next_combination(std::vector<std::size_t>& c, std::size_t n) {
  const std::size_t k = c.size();
  for (std::size_t i = k; i-- > 0;) {
    if (c[i] < n - k + i) {
      ++c[i];
      for (std::size_t j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
      return true;
    }
  }
  return false;
}

std::vector<std::size_t> first_combination(std::size_t k) {
  std::vector<std::size_t> c(k);
  for (std::size_t i = 0; i < k; ++i) c[i] = i;
  return c;
}

QMatrix affine(const QMatrix& A, const QMatrix& B, const Rational& t) { return A * t + B; }

// finite rational roots first (by value), then (1:0), then roots over an extension
bool root_less(const PencilRoot& x, const PencilRoot& y) {
  auto cls = [](const PencilRoot& r) { return r.at_infinity() ? 1 : (r.is_rational() ? 0 : 2); };
  int cx = cls(x), cy = cls(y);
  if (cx != cy) return cx < cy;
  return Scalar::compare(x.alpha, y.alpha) < 0;
}

}  // namespace

SMatrix pencil_element(const QMatrix& A, const QMatrix& B, const Scalar& alpha, const Scalar& beta) {
  SMatrix M(A.rows(), A.cols());
  for (std::size_t i = 0; i < A.rows(); ++i)
    for (std::size_t j = 0; j < A.cols(); ++j) {
      Scalar x;
      if (sgn(A(i, j)) != 0) x += alpha * Scalar(A(i, j));
      if (sgn(B(i, j)) != 0) x += beta * Scalar(B(i, j));
      M(i, j) = x;
    }
  return M;
}

std::size_t rank_at(const QMatrix& A, const QMatrix& B, const Scalar& alpha, const Scalar& beta) {
  if (alpha.is_rational() && beta.is_rational()) return rank(A * alpha.a() + B * beta.a());
  return rank(pencil_element(A, B, alpha, beta));
}

PencilLocus pencil_rank_locus(const QMatrix& A, const QMatrix& B, std::size_t k, std::size_t max_minors) {
  if (A.rows() != B.rows() || A.cols() != B.cols()) throw std::invalid_argument("pencil shape mismatch");
  PencilLocus out;
  // compress to pivot rows/columns of the joint row and column spaces
  QMatrix st(A.rows() * 2, A.cols());
  for (std::size_t i = 0; i < A.rows(); ++i)
    for (std::size_t j = 0; j < A.cols(); ++j) {
      st(i, j) = A(i, j);
      st(A.rows() + i, j) = B(i, j);
    }
  std::vector<std::size_t> pc = rref(st, false).pivots;
  QMatrix stc(pc.size() * 2, A.rows());
  for (std::size_t a = 0; a < pc.size(); ++a)
    for (std::size_t i = 0; i < A.rows(); ++i) {
      stc(a, i) = A(i, pc[a]);
      stc(pc.size() + a, i) = B(i, pc[a]);
    }
  std::vector<std::size_t> pr = rref(stc, false).pivots;
  QMatrix Ah = A.submatrix(pr, pc), Bh = B.submatrix(pr, pc);
  const std::size_t q = pr.size(), p = pc.size();
  if (std::min(p, q) <= k) {
    out.whole_pencil = true;
    return out;
  }
  bool whole = true;
  for (std::size_t t = 0; t <= k + 1 && whole; ++t)
    if (rank(affine(Ah, Bh, Rational(static_cast<long>(t)))) > k) whole = false;
  if (whole) {
    out.whole_pencil = true;
    return out;
  }
  if (rank(Ah) <= k) {
    PencilRoot inf;
    inf.alpha = 1;
    inf.beta = 0;
    inf.rank = rank(Ah);
    out.roots.push_back(inf);
  }
  std::vector<Rational> ts;
  std::vector<QMatrix> evals;
  for (std::size_t t = 0; t <= k + 1; ++t) {
    ts.emplace_back(static_cast<long>(t));
    evals.push_back(affine(Ah, Bh, ts.back()));
  }
  UPoly G;
  bool finished = false, capped = false;
  std::vector<PencilRoot> finite;
  std::vector<std::size_t> rows = first_combination(k + 1);
  do {
    std::vector<std::size_t> cols = first_combination(k + 1);
    do {
      std::vector<Rational> ys;
      for (const auto& E : evals) ys.push_back(determinant(E.submatrix(rows, cols)));
      UPoly m = UPoly::interpolate(ts, ys);
      if (max_minors > 0 && out.minors_examined >= max_minors) {
        capped = true;
        break;
      }
      ++out.minors_examined;
      if (m.is_zero()) continue;
      UPoly g = G.is_zero() ? m.monic() : UPoly::gcd(G, m);
      if (!G.is_zero() && g.degree() == G.degree()) continue;
      G = g;
      if (G.degree() <= 0) {
        finished = true;
        break;
      }
      URoots rr = roots(G);
      if (rr.overflow) continue;
      for (const Scalar& t : rr.roots) {
        std::size_t rk = rank_at(Ah, Bh, t, Scalar(1));
        if (rk <= k) {
          PencilRoot r;
          r.alpha = t;
          r.beta = 1;
          r.rank = rk;
          finite.push_back(r);
        }
      }
      finished = true;
      break;
    } while (next_combination(cols, p));
    if (finished || capped) break;
  } while (next_combination(rows, q));
  if (!finished) {
    // every minor examined (or the cap hit) and the gcd still has an unresolved factor
    URoots rr = G.is_zero() ? URoots{} : roots(G);
    for (const Scalar& t : rr.roots) {
      std::size_t rk = rank_at(Ah, Bh, t, Scalar(1));
      if (rk <= k) {
        PencilRoot r;
        r.alpha = t;
        r.beta = 1;
        r.rank = rk;
        finite.push_back(r);
      }
    }
    out.overflow = rr.overflow || capped;
    out.unresolved = rr.unresolved;
  }
  for (auto& r : finite) out.roots.push_back(r);
  std::sort(out.roots.begin(), out.roots.end(), root_less);
  return out;
}

SquaresResult squares_in_pencil(const QuadForm& A, const QuadForm& B) {
  if (A.n() != B.n()) throw std::invalid_argument("ambient mismatch in pencil");
  if (A.is_zero() && B.is_zero()) throw PreconditionError("squares_in_pencil needs A, B not both zero");
  SquaresResult out;
  PencilLocus L = pencil_rank_locus(A.matrix(), B.matrix(), 1);
  require(!L.overflow, "minor-gcd-degree", "2x2 minor gcd of degree > 2");
  if (L.whole_pencil) {
    out.whole_pencil_degenerate = true;
    return out;
  }
  for (auto& r : L.roots) {
    if (r.rank != 1) continue;
    SMatrix N = pencil_element(A.matrix(), B.matrix(), r.alpha, r.beta);
    std::size_t i = 0;
    while (i < N.rows() && N(i, i).is_zero()) ++i;
    require(i < N.rows(), "rank-one-diagonal", "rank-1 symmetric pencil element with zero diagonal");
    r.c = N(i, i);
    r.v = N.row(i);
    for (auto& x : r.v) x /= r.c;
    if (r.c.is_rational()) {
      try {
        Scalar s = sqrt_scalar(r.c.a(), Scalar::join(r.alpha.d(), r.beta.d()));
        Vec<Scalar> l = r.v;
        for (auto& x : l) x *= s;
        r.ell = l;
      } catch (const ExtensionConflict&) {
      }
    }
    out.roots.push_back(r);
  }
  return out;
}

PencilLocus low_rank_locus(const QuadForm& A, const QuadForm& B, std::size_t r) {
  if (r < 1) throw PreconditionError("low_rank_locus needs r >= 1");
  if (A.n() != B.n()) throw std::invalid_argument("ambient mismatch in pencil");
  return pencil_rank_locus(A.matrix(), B.matrix(), 2 * r);
}

Subspace rational_closure(std::size_t n, const std::vector<Vec<Scalar>>& gens) {
  std::vector<Vec<Rational>> g;
  for (const auto& v : gens) {
    Vec<Rational> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = v[i].a();
      b[i] = v[i].b();
    }
    if (!is_zero_vec(a)) g.push_back(a);
    if (!is_zero_vec(b)) g.push_back(b);
  }
  return Subspace::span(n, g);
}

SpanSpace low_rank_span_space(const QuadForm& Q, const QuadForm& Qp, std::size_t r, const Subspace& U,
                              std::size_t validation_samples, unsigned long long seed) {
  if (r < 1) throw PreconditionError("low_rank_span_space needs r >= 1");
  const std::size_t n = Q.n();
  if (Qp.n() != n || U.ambient() != n) throw std::invalid_argument("ambient mismatch");
  const std::size_t k = U.dim();
  // form coordinates adapted to U: basis = U's rows, then unit vectors off U's pivots
  std::vector<std::size_t> comp;
  {
    std::vector<char> piv(n, 0);
    for (auto p : U.pivots()) piv[p] = 1;
    for (std::size_t j = 0; j < n; ++j)
      if (!piv[j]) comp.push_back(j);
  }
  QMatrix Bm(n, n);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < n; ++j) Bm(i, j) = U.basis()(i, j);
  for (std::size_t c = 0; c < comp.size(); ++c) Bm(k + c, comp[c]) = 1;
  QMatrix Bi = *inverse(Bm);
  auto adapted = [&](const QuadForm& F) { return Bi.transpose() * F.matrix() * Bi; };
  QMatrix MQ = adapted(Q), MP = adapted(Qp);
  std::vector<std::size_t> all(n), tail;
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  for (std::size_t i = k; i < n; ++i) tail.push_back(i);
  QMatrix FQ = MQ.submatrix(all, tail), FP = MP.submatrix(all, tail);
  QMatrix DQ = MQ.submatrix(tail, tail), DP = MP.submatrix(tail, tail);
  auto place = [&](const Vec<Scalar>& w) {
    Vec<Scalar> f(n, Scalar(0));
    for (std::size_t c = 0; c < comp.size(); ++c) f[comp[c]] = w[c];
    return f;
  };

  SpanSpace out;
  std::vector<Vec<Scalar>> gens;
  std::vector<PencilRoot> kept;
  PencilLocus L = pencil_rank_locus(FQ, FP, 2 * r);
  out.overflow = L.overflow;
  if (L.whole_pencil) {
    out.whole_pencil = true;
    for (auto& row : FQ.row_list()) gens.push_back(place(to_scalar(row)));
    for (auto& row : FP.row_list()) gens.push_back(place(to_scalar(row)));
  } else {
    for (const auto& root : L.roots) {
      // minimal rank over completions by C[U]_2 is 2*rank[B;D] - rank D
      std::size_t rd = rank_at(DQ, DP, root.alpha, root.beta);
      if (2 * root.rank - rd > 2 * r) continue;
      kept.push_back(root);
      SMatrix F = pencil_element(FQ, FP, root.alpha, root.beta);
      for (auto& row : F.row_list()) gens.push_back(place(row));
    }
    out.points = kept.size();
  }
  out.V = rational_closure(n, gens);
  require(out.V.dim() <= 8 * r, "lin-rank-r-U", "low-rank span space exceeds 8r",
          {{"dim", out.V.dim()}, {"r", r}});

  // re-test the defining property on sampled combinations
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> d(-4, 4);
  ExtSubspace VU = to_scalar(out.V.sum(U));
  auto ub = U.basis_rows();
  for (std::size_t s = 0; s < validation_samples; ++s) {
    Scalar al, be;
    if (out.whole_pencil) {
      al = d(rng);
      be = d(rng);
    } else if (!kept.empty()) {
      al = kept[s % kept.size()].alpha;
      be = kept[s % kept.size()].beta;
    } else {
      break;
    }
    QuadForm P(n);
    for (std::size_t i = 0; i < ub.size(); ++i)
      for (std::size_t j = i; j < ub.size(); ++j) P = P + QuadForm::product(ub[i], ub[j]) * Rational(d(rng));
    SMatrix A = pencil_element(Q.matrix(), Qp.matrix(), al, be) + to_scalar(P.matrix());
    ExtSubspace ms = ExtSubspace::from_matrix(A);
    require(VU.contains(ms), "lin-rank-r-U", "sampled low-rank combination escapes V + U");
  }
  return out;
}

}  // namespace qsg
