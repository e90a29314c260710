#include <gtest/gtest.h>

#include <random>
#include <set>

#include "qsg/linsg.hpp"

using namespace qsg;

namespace {

using V = Vec<Rational>;

V e(std::size_t n, std::size_t i) {
  V v(n, 0);
  v[i] = 1;
  return v;
}

V vec(std::initializer_list<int> xs) {
  V v;
  for (int x : xs) v.push_back(x);
  return v;
}

std::size_t rk(const std::vector<V>& rows, std::size_t n) { return rank(QMatrix::from_rows(rows, n)); }

// brute force: a third point k with rank(v_i, v_j, v_k) = 2, or collinear in the affine case
std::vector<std::set<std::size_t>> oracle_neighbors(const PointSet& P, SgMode mode) {
  const std::size_t m = P.size(), n = P.dim();
  std::vector<std::set<std::size_t>> g(m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      if (i == j) continue;
      for (std::size_t k = 0; k < m; ++k) {
        if (k == i || k == j) continue;
        bool on;
        if (mode == SgMode::Span) {
          on = rk({P[i], P[j], P[k]}, n) == 2;
        } else {
          V a(n), b(n);
          for (std::size_t c = 0; c < n; ++c) {
            a[c] = P[j][c] - P[i][c];
            b[c] = P[k][c] - P[i][c];
          }
          on = rk({a, b}, n) == 1;
        }
        if (on) {
          g[i].insert(j);
          break;
        }
      }
    }
  return g;
}

PointSet random_points(std::mt19937_64& rng, std::size_t n, std::size_t m, int lo, int hi, bool by_ratio) {
  std::uniform_int_distribution<int> d(lo, hi);
  std::vector<V> pts;
  for (std::size_t t = 0; t < m; ++t) {
    V v(n);
    for (auto& x : v) x = d(rng);
    if (by_ratio && is_zero_vec(v)) continue;
    pts.push_back(v);
  }
  return PointSet::make(n, pts, true, by_ratio);
}

// direct re-simulation of the low-degree removal on explicit point triples
std::vector<std::size_t> oracle_cut(const PointSet& P, const std::vector<bool>& inB, const Rational& delta) {
  const std::size_t m = P.size(), n = P.dim();
  std::vector<bool> live(m, true);
  auto collinear = [&](std::size_t i, std::size_t j, std::size_t k) {
    V a(n), b(n);
    for (std::size_t c = 0; c < n; ++c) {
      a[c] = P[j][c] - P[i][c];
      b[c] = P[k][c] - P[i][c];
    }
    return rk({a, b}, n) == 1;
  };
  auto deg = [&](std::size_t v) {
    std::size_t d = 0;
    for (std::size_t u = 0; u < m; ++u) {
      if (!live[u] || inB[u] == inB[v]) continue;
      for (std::size_t w = 0; w < m; ++w)
        if (live[w] && w != u && w != v && collinear(v, u, w)) {
          ++d;
          break;
        }
    }
    return d;
  };
  for (;;) {
    std::size_t v = m;
    for (std::size_t i = 0; i < m && v == m; ++i)
      if (live[i] && Rational(deg(i)) < delta * Rational(m) / 2) v = i;
    if (v == m) break;
    live[v] = false;
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < m; ++i)
    if (live[i] && inB[i]) out.push_back(i);
  return out;
}

}  // namespace

TEST(SgDelta, Examples) {
  EXPECT_EQ(sg_delta(PointSet::make(2, {vec({1, 0}), vec({0, 1}), vec({1, 1})})), 1);
  EXPECT_EQ(sg_delta(PointSet::make(3, {e(3, 0), e(3, 1), e(3, 2)})), 0);
  EXPECT_EQ(sg_delta(PointSet::make(3, {e(3, 0), e(3, 1), vec({1, 1, 0}), e(3, 2)})), 0);
}

TEST(SgDelta, ProportionalPointsCollapseOrFail) {
  PointSet d = PointSet::make(2, {vec({1, 1}), vec({2, 2})}, true);
  EXPECT_EQ(d.size(), 1u);
  PointSet p = PointSet::make(2, {vec({1, 1}), vec({2, 2}), vec({1, 0})});
  EXPECT_FALSE(p.pairwise_independent());
  EXPECT_THROW(sg_delta(p), PreconditionError);
  EXPECT_THROW(PointSet::make(2, {vec({1, 1}), vec({1, 1})}), PreconditionError);
  EXPECT_THROW(sg_delta(PointSet::make(2, {vec({1, 1}), vec({1, 0})})), PreconditionError);
}

TEST(SgDelta, PlanarConfigurationIsFullySpecial) {
  // any three or more directions in a plane, placed in Q^5
  std::vector<V> pts;
  for (int k = 0; k < 6; ++k) {
    V v(5, 0);
    v[1] = 1;
    v[3] = k - 2;
    pts.push_back(v);
  }
  pts.push_back(e(5, 3));
  PointSet P = PointSet::make(5, pts);
  EXPECT_EQ(sg_delta(P), 1);
  EXPECT_EQ(sg_dimension(P), 2u);
  EXPECT_TRUE(dsw_check(P, 1));
}

TEST(SgDelta, IndependentPointsPassVacuously) {
  PointSet P = PointSet::make(4, {e(4, 0), e(4, 1), e(4, 2), e(4, 3)});
  EXPECT_EQ(sg_delta(P), 0);
  EXPECT_TRUE(dsw_check(P, Rational(1, 2)));
}

TEST(SgDelta, NeighborsMatchBruteForce) {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 40; ++t) {
    SgMode mode = t % 2 ? SgMode::Affine : SgMode::Span;
    PointSet P = random_points(rng, 3, 14, -1, 1 + t % 2, mode == SgMode::Span);
    if (P.size() < 3) continue;
    auto g = sg_neighbors(P, mode);
    auto o = oracle_neighbors(P, mode);
    for (std::size_t i = 0; i < P.size(); ++i) {
      EXPECT_EQ(std::set<std::size_t>(g[i].begin(), g[i].end()), o[i]);
      for (std::size_t j : g[i]) EXPECT_TRUE(o[j].count(i));
    }
    std::size_t lo = P.size();
    for (auto& s : o) lo = std::min(lo, s.size());
    EXPECT_EQ(sg_delta(P, mode), Rational(lo) / Rational(P.size() - 1));
  }
}

TEST(SgDelta, DswHoldsAtComputedDelta) {
  std::mt19937_64 rng(22);
  for (int t = 0; t < 60; ++t) {
    PointSet P = random_points(rng, 2 + t % 4, 18, -1, 1, true);
    if (P.size() < 3) continue;
    Rational d = sg_delta(P);
    if (sgn(d) == 0) continue;
    EXPECT_TRUE(dsw_check(P, d));
  }
}

TEST(SgMod, EmptyKLeavesWUnchanged) {
  Subspace W = Subspace::span(3, {e(3, 0)});
  RobustModResult r = robust_sg_mod_subspace(PointSet(3), W, PointSet::make(3, {e(3, 0)}), Rational(1, 2));
  EXPECT_EQ(r.W_final, W);
  EXPECT_TRUE(r.steps.empty());
  EXPECT_TRUE(r.dim_bound_check);
}

TEST(SgMod, PlanarKWithoutWNeighbors) {
  Subspace W = Subspace::span(3, {e(3, 2)});
  PointSet K = PointSet::make(3, {e(3, 0), e(3, 1), vec({1, 1, 0}), vec({1, -1, 0})});
  RobustModResult r = robust_sg_mod_subspace(K, W, PointSet::make(3, {e(3, 2)}), Rational(1, 2));
  EXPECT_TRUE(r.absorbed.empty());
  EXPECT_EQ(r.K_final.size(), 4u);
  EXPECT_EQ(r.dim_W_final, 1u);
  EXPECT_EQ(r.dim_T, 3u);
  EXPECT_LE(Rational(r.dim_K_final), Rational(15) / Rational(1, 2) + 1);
}

TEST(SgMod, StarAbsorbsInOneStep) {
  // p = e3 and p + w_i for five directions w_i in W = <e1, e2>
  const std::size_t n = 4;
  std::vector<V> ws = {vec({1, 0, 0, 0}), vec({0, 1, 0, 0}), vec({1, 1, 0, 0}), vec({1, -1, 0, 0}),
                       vec({1, 2, 0, 0})};
  std::vector<V> ks = {e(n, 2)};
  for (const auto& w : ws) {
    V q = w;
    q[2] = 1;
    ks.push_back(q);
  }
  Subspace W = Subspace::span(n, {e(n, 0), e(n, 1)});
  const Rational delta(2, 11);
  RobustModResult r = robust_sg_mod_subspace(PointSet::make(n, ks), W, PointSet::make(n, ws), delta);
  ASSERT_EQ(r.steps.size(), 1u);
  EXPECT_EQ(r.absorbed, std::vector<std::size_t>{0});
  EXPECT_EQ(r.steps[0].w_neighbors, 5u);
  EXPECT_EQ(r.steps[0].moved, 6u);
  EXPECT_TRUE(r.K_final.empty());
  EXPECT_EQ(r.dim_W_final, 3u);
}

TEST(SgMod, Preconditions) {
  Subspace W = Subspace::span(3, {e(3, 0)});
  EXPECT_THROW(robust_sg_mod_subspace(PointSet::make(3, {e(3, 0)}), W, PointSet(3), Rational(1, 2)),
               PreconditionError);
  EXPECT_THROW(robust_sg_mod_subspace(PointSet::make(3, {e(3, 1), e(3, 2)}), W, PointSet::make(3, {e(3, 0)}),
                                      Rational(1, 2)),
               PreconditionError);
  EXPECT_THROW(robust_sg_mod_subspace(PointSet(3), W, PointSet::make(3, {e(3, 1)}), Rational(1, 2)),
               PreconditionError);
}

TEST(SgMod, RandomConfigurationsRespectEveryBound) {
  std::mt19937_64 rng(23);
  int ran = 0, absorbed = 0;
  for (int t = 0; t < 80; ++t) {
    const std::size_t n = 4;
    PointSet P = random_points(rng, n, 22, -1, 1, true);
    Subspace W = t % 2 ? Subspace::span(n, {e(n, 0)}) : Subspace::span(n, {e(n, 0), e(n, 1)});
    std::vector<V> ks, ws;
    for (const auto& p : P.points()) (W.contains(p) ? ws : ks).push_back(p);
    PointSet K = PointSet::make(n, ks), Wp = PointSet::make(n, ws);
    auto g = sg_neighbors(P);
    Rational delta = 1;
    for (std::size_t i = 0; i < P.size(); ++i)
      if (!W.contains(P[i])) delta = std::min<Rational>(delta, Rational(g[i].size()) / Rational(P.size()));
    if (sgn(delta) == 0) continue;
    RobustModResult r = robust_sg_mod_subspace(K, W, Wp, delta);
    ++ran;
    absorbed += !r.steps.empty();
    for (const auto& s : r.steps) EXPECT_GE(Rational(s.moved), delta * Rational(s.K_before) / 10);
    EXPECT_LE(r.dim_T, r.dim_W_final + r.dim_K_final);
  }
  EXPECT_GT(ran, 30);
  EXPECT_GT(absorbed, 5);
}

TEST(Cut, NoRemovalWhenEveryDegreeIsHigh) {
  // six collinear points split in half: 9 = m^2 / 4 cross pairs
  std::vector<V> pts;
  for (int k = 0; k < 6; ++k) pts.push_back(vec({k, 2 * k + 1}));
  CutResult r = fractional_cut(PointSet::make(2, pts), {0, 2, 4}, Rational(1, 4));
  EXPECT_EQ(r.survivors, (std::vector<std::size_t>{0, 2, 4}));
  EXPECT_TRUE(r.steps.empty());
  EXPECT_EQ(r.affine_dim, 1u);
  EXPECT_EQ(r.cross_pairs, 9u);
}

TEST(Cut, PencilCoreSurvives) {
  // center c outside B, four lines through c carrying two B points each, plus three generic B points
  std::vector<V> pts = {vec({0, 0})};
  std::vector<std::size_t> B;
  std::vector<V> dirs = {vec({1, 0}), vec({0, 1}), vec({1, 1}), vec({1, -1})};
  for (const auto& d : dirs)
    for (int s : {1, 2}) {
      B.push_back(pts.size());
      pts.push_back(vec({s * static_cast<int>(d[0].get_num().get_si()), s * static_cast<int>(d[1].get_num().get_si())}));
    }
  std::vector<std::size_t> core = B;
  for (const auto& p : {vec({3, 7}), vec({5, 11}), vec({-7, 13})}) {
    B.push_back(pts.size());
    pts.push_back(p);
  }
  const std::size_t m = pts.size();  // 12
  // 8 cross pairs (b, c); delta = 8 / m^2
  CutResult r = fractional_cut(PointSet::make(2, pts), B, Rational(8, m * m));
  EXPECT_EQ(r.survivors, core);
  EXPECT_EQ(r.steps.size(), 3u);
  EXPECT_EQ(r.affine_dim, 2u);
}

TEST(Cut, PreconditionOnCrossPairs) {
  std::vector<V> pts = {vec({0, 0}), vec({1, 0}), vec({2, 0}), vec({0, 1})};
  EXPECT_THROW(fractional_cut(PointSet::make(2, pts), {0}, Rational(1, 2)), PreconditionError);
}

TEST(Cut, MatchesDirectSimulation) {
  std::mt19937_64 rng(24);
  int ran = 0, removed = 0;
  for (int t = 0; t < 50; ++t) {
    PointSet P = random_points(rng, 2, 16, 0, 3, false);
    std::vector<std::size_t> B;
    std::vector<bool> inB(P.size());
    for (std::size_t i = 0; i < P.size(); ++i)
      if (rng() % 3 == 0) {
        B.push_back(i);
        inB[i] = true;
      }
    auto g = sg_neighbors(P, SgMode::Affine);
    std::size_t cross = 0;
    for (std::size_t i : B)
      for (std::size_t j : g[i]) cross += !inB[j];
    if (cross == 0) continue;
    const Rational m(P.size());
    Rational delta = Rational(cross) / (m * m);
    CutResult r = fractional_cut(P, B, delta);
    ++ran;
    removed += !r.steps.empty();
    EXPECT_EQ(r.survivors, oracle_cut(P, inB, delta));
    EXPECT_GE(Rational(r.survivors.size()), delta * m / 6);
  }
  EXPECT_GT(ran, 30);
  EXPECT_GT(removed, 5);
}
