#include <gtest/gtest.h>

#include <random>

#include "qsg/projection.hpp"

using namespace qsg;

namespace {

Vec<Rational> e(std::size_t n, std::size_t i, long c = 1) {
  Vec<Rational> v(n, 0);
  v[i] = c;
  return v;
}

Vec<Rational> add(Vec<Rational> a, const Vec<Rational>& b, const Rational& s = 1) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += s * b[i];
  return a;
}

Vec<Rational> random_form(std::mt19937_64& rng, std::size_t n, int range = 3) {
  std::uniform_int_distribution<int> d(-range, range);
  Vec<Rational> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

QuadForm random_quad(std::mt19937_64& rng, std::size_t n, std::size_t terms) {
  QuadForm Q(n);
  for (std::size_t t = 0; t < terms; ++t) Q = Q + QuadForm::product(random_form(rng, n), random_form(rng, n));
  return Q;
}

QuadForm xx(std::size_t n, std::size_t i, std::size_t j) { return QuadForm::product(e(n, i), e(n, j)); }

Rational det3(const QMatrix& M, std::size_t a, std::size_t b, std::size_t c) {
  auto m = [&](std::size_t i, std::size_t j) {
    std::size_t r[3] = {a, b, c};
    return M(r[i], r[j]);
  };
  return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
         m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

}  // namespace

TEST(QuadForm, RankSExamples) {
  EXPECT_EQ(xx(4, 0, 0).rank_s(), 1u);
  EXPECT_EQ((xx(4, 0, 1) + xx(4, 2, 3)).rank_s(), 2u);
  QuadForm s3 = xx(3, 0, 0) + xx(3, 1, 1) + xx(3, 2, 2);
  EXPECT_EQ(s3.rank_s(), 2u);
  EXPECT_TRUE(s3.irreducible());
  // no splitting exists: the full 3x3 determinant is nonzero
  EXPECT_NE(det3(s3.matrix(), 0, 1, 2), 0);
  EXPECT_EQ(QuadForm(5).rank_s(), 0u);
}

TEST(QuadForm, MonomialMapSplitsOffDiagonalEvenly) {
  QuadForm Q = QuadForm::from_monomials(3, {{{0, 1}, Rational(3)}, {{2, 2}, Rational(-1, 2)}});
  EXPECT_EQ(Q.matrix()(0, 1), Rational(3, 2));
  EXPECT_EQ(Q.matrix()(1, 0), Rational(3, 2));
  EXPECT_EQ(Q.coeff(0, 1), 3);
  EXPECT_EQ(Q.str(), "3*x1*x2 - 1/2*x3^2");
  EXPECT_EQ(QuadForm::from_coeff_vector(3, Q.coeff_vector()), Q);
  QMatrix bad(2, 2);
  bad(0, 1) = 1;
  EXPECT_THROW(QuadForm{bad}, std::invalid_argument);
}

TEST(QuadForm, IrreducibilityAgreesWithExplicitSplitting) {
  std::mt19937_64 rng(21);
  int reducible = 0;
  for (int t = 0; t < 1000; ++t) {
    std::size_t n = 2 + t % 5;
    QuadForm Q = random_quad(rng, n, 1 + t % 3);
    if (Q.is_zero()) continue;
    EXPECT_EQ(Q.rank_s(), (Q.rank() + 1) / 2);
    if (Q.rank() <= 2) {
      ++reducible;
      Factorization f = factor_quadratic(Q.matrix());
      if (!f.available) continue;
      EXPECT_EQ(product_matrix(f.f, f.g), to_scalar(Q.matrix())) << Q.str();
      EXPECT_FALSE(Q.irreducible());
    } else {
      bool witness = false;
      for (std::size_t a = 0; a < n && !witness; ++a)
        for (std::size_t b = a + 1; b < n && !witness; ++b)
          for (std::size_t c = b + 1; c < n && !witness; ++c) witness = det3(Q.matrix(), a, b, c) != 0;
      // a nonzero principal 3-minor is not guaranteed; fall back to the full rank count
      EXPECT_TRUE(witness || Q.rank() >= 3);
      EXPECT_TRUE(Q.irreducible());
    }
  }
  EXPECT_GT(reducible, 100);
}

TEST(QuadForm, FactorizationNeedsExtension) {
  // x1^2 - 2 x2^2 = (x1 - sqrt2 x2)(x1 + sqrt2 x2)
  QuadForm Q = xx(2, 0, 0) + xx(2, 1, 1) * Rational(-2);
  Factorization f = factor_quadratic(Q.matrix());
  ASSERT_TRUE(f.available);
  EXPECT_EQ(product_matrix(f.f, f.g), to_scalar(Q.matrix()));
  EXPECT_FALSE(f.f[1].is_rational());
}

TEST(QuadForm, MinimalSpaceExamples) {
  EXPECT_EQ(xx(3, 0, 1).minimal_space(), Subspace::coordinate(3, {0, 1}));
  Vec<Rational> s{1, 1, 0};
  EXPECT_EQ(QuadForm::square(s).minimal_space(), Subspace::span(3, {s}));
  EXPECT_EQ((xx(3, 0, 1) + xx(3, 2, 2)).minimal_space().dim(), 3u);
}

TEST(QuadForm, MinimalSpaceIsMinimal) {
  std::mt19937_64 rng(22);
  for (int t = 0; t < 200; ++t) {
    std::size_t n = 3 + t % 4;
    QuadForm Q = random_quad(rng, n, 1 + t % 3);
    Subspace ms = Q.minimal_space();
    EXPECT_TRUE(in_ring2(Q, ms));
    std::size_t r = Q.rank_s();
    EXPECT_TRUE(ms.dim() == 2 * r || ms.dim() + 1 == 2 * r);
    // dropping any basis vector leaves a space that no longer carries Q
    auto rows = ms.basis_rows();
    for (std::size_t drop = 0; drop < rows.size(); ++drop) {
      std::vector<Vec<Rational>> sub;
      for (std::size_t i = 0; i < rows.size(); ++i)
        if (i != drop) sub.push_back(rows[i]);
      EXPECT_FALSE(in_ring2(Q, Subspace::span(n, sub)));
    }
  }
}

TEST(QuadForm, RestrictExamples) {
  QuadForm Q = xx(4, 0, 1) + xx(4, 2, 3);
  QuadForm R = restrict(Q, Subspace::coordinate(4, {0}));
  EXPECT_EQ(R.n(), 3u);
  EXPECT_EQ(R.rank(), 2u);
  EXPECT_TRUE(restrict(Q, Q.minimal_space()).is_zero());
  QuadForm P = xx(3, 0, 1);
  QuadForm PR = restrict(P, Subspace::coordinate(3, {2}));
  EXPECT_EQ(PR, xx(2, 0, 1));
}

TEST(QuadForm, IdealAndRingMembership) {
  EXPECT_TRUE(in_ideal(xx(3, 0, 1) + xx(3, 1, 2), Subspace::coordinate(3, {1})));
  EXPECT_FALSE(in_ideal(xx(4, 0, 1) + xx(4, 2, 3), Subspace::coordinate(4, {0, 1})));
  EXPECT_TRUE(in_ring2(xx(3, 0, 0) + xx(3, 0, 1), Subspace::coordinate(3, {0, 1})));
  EXPECT_THROW(in_ideal(xx(3, 0, 1), Subspace(4)), std::invalid_argument);
}

TEST(QuadForm, RingMembershipImpliesIdealMembership) {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 300; ++t) {
    std::size_t n = 4 + t % 3;
    Subspace V = Subspace::span(n, {random_form(rng, n), random_form(rng, n)});
    QuadForm Q = random_quad(rng, n, 2);
    if (t % 3 == 0) {
      auto b = V.basis_rows();
      Q = QuadForm::product(b[0], random_form(rng, n)) + QuadForm::product(b.back(), random_form(rng, n));
      EXPECT_TRUE(in_ideal(Q, V));
    }
    if (in_ring2(Q, V)) EXPECT_TRUE(in_ideal(Q, V));
  }
}

TEST(QuadForm, RestrictionRankBoundOnRandomPairs) {
  std::mt19937_64 rng(24);
  for (int t = 0; t < 1000; ++t) {
    std::size_t n = 3 + t % 5;
    QuadForm Q = random_quad(rng, n, 1 + t % 4);
    std::vector<Vec<Rational>> g;
    for (std::size_t k = 0; k < 1 + t % 3; ++k) g.push_back(random_form(rng, n, 2));
    Subspace V = Subspace::span(n, g);
    QuadForm R = restrict(Q, V);
    EXPECT_GE(static_cast<long>(R.rank_s()), static_cast<long>(Q.rank_s()) - static_cast<long>(V.dim()));
  }
}

TEST(QuadForm, IndependentRankOnFreshVariables) {
  std::mt19937_64 rng(25);
  for (int t = 0; t < 100; ++t) {
    const std::size_t nx = 4, n = nx + 2;
    QuadForm P1(n);
    for (int k = 0; k < 2; ++k) {
      Vec<Rational> a = random_form(rng, nx), b = random_form(rng, nx);
      a.resize(n, 0);
      b.resize(n, 0);
      P1 = P1 + QuadForm::product(a, b);
    }
    QuadForm S = P1 + xx(n, nx, nx + 1);
    EXPECT_EQ(S.rank_s(), P1.rank_s() + 1);
    EXPECT_TRUE(S.minimal_space().contains(e(n, nx)));
    EXPECT_TRUE(S.minimal_space().contains(e(n, nx + 1)));
  }
}

TEST(QuadForm, ProductIdentityForcesSharedDirection) {
  std::mt19937_64 rng(26);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 5;
    Vec<Rational> a = random_form(rng, n), c = random_form(rng, n), f = random_form(rng, n);
    Rational al = 1 + t % 3, be = -1 - t % 2;
    Vec<Rational> b = add(Vec<Rational>(n, 0), f, al), d = add(Vec<Rational>(n, 0), f, be);
    Vec<Rational> ee = add(add(Vec<Rational>(n, 0), a, al), c, be);
    QuadForm lhs = QuadForm::product(a, b) + QuadForm::product(c, d);
    ASSERT_EQ(lhs, QuadForm::product(ee, f));
    Subspace ab = Subspace::span(n, {a, b}), cd = Subspace::span(n, {c, d});
    if (ab.dim() < 2) continue;
    EXPECT_GE(ab.intersection(cd).dim(), 1u);
  }
}

TEST(QuadForm, RankTwoInsideVSharesDirectionWithV) {
  std::mt19937_64 rng(27);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 6;
    Vec<Rational> a = random_form(rng, n), b = random_form(rng, n), c = random_form(rng, n), d = random_form(rng, n);
    QuadForm D = QuadForm::product(a, b) - QuadForm::product(c, d);
    if (D.is_zero()) continue;
    Subspace V = D.minimal_space().add(random_form(rng, n));
    EXPECT_GE(Subspace::span(n, {a, b}).intersection(V).dim(), 1u);
  }
}

TEST(QuadForm, CanonicalKeyDeduplicatesScalings) {
  QuadForm Q = xx(3, 0, 1) * Rational(-4) + xx(3, 2, 2);
  EXPECT_EQ(Q.key(), (Q * Rational(7, 3)).key());
  EXPECT_NE(Q.key(), (Q + xx(3, 1, 1)).key());
  EXPECT_EQ(Q.canonical().matrix()(0, 1), 1);
}

TEST(Projection, Examples) {
  ProjectionMap T1(Subspace::coordinate(3, {0}), {Rational(1)});
  // output variables: y1 = x2, y2 = x3, z
  QuadForm img = project(T1, xx(3, 0, 1));
  EXPECT_EQ(img, QuadForm::product(e(3, 2), e(3, 0)));
  EXPECT_EQ(project(T1, xx(3, 0, 0)), QuadForm::square(e(3, 2)));
  ProjectionMap T2(Subspace::coordinate(3, {0, 1}), {Rational(1), Rational(2)});
  EXPECT_EQ(project(T2, xx(3, 0, 1)), QuadForm::square(e(2, 1)) * Rational(2));
}

TEST(Projection, ImagesOfIdealMembersFactorThroughZ) {
  std::mt19937_64 rng(28);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 6;
    Subspace V = Subspace::span(n, {random_form(rng, n), random_form(rng, n)});
    auto b = V.basis_rows();
    QuadForm Q = QuadForm::product(b[0], random_form(rng, n)) + QuadForm::product(b[1], random_form(rng, n));
    ProjectionMap T(V, sample_coefficients(rng, V.dim()));
    QuadForm img = project(T, Q);
    Vec<Rational> l = z_cofactor(T, img);
    Vec<Rational> z = e(T.out_vars(), T.z());
    EXPECT_EQ(QuadForm::product(z, l), img);
    // multiplicativity on products
    Vec<Rational> f = random_form(rng, n), g = random_form(rng, n);
    EXPECT_EQ(T.apply(QuadForm::product(f, g)), QuadForm::product(T.apply(f), T.apply(g)));
  }
}

TEST(Projection, ProjectedProductsFactorIntoProjectedFactors) {
  std::mt19937_64 rng(29);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 5;
    Subspace V = Subspace::span(n, {random_form(rng, n)});
    Vec<Rational> f = random_form(rng, n), g = random_form(rng, n);
    ProjectionMap T(V, sample_coefficients(rng, 1));
    Vec<Rational> Tf = T.apply(f), Tg = T.apply(g);
    if (is_zero_vec(Tf) || is_zero_vec(Tg)) continue;
    QuadForm img = T.apply(QuadForm::product(f, g));
    Factorization fac = factor_quadratic(img.matrix());
    ASSERT_TRUE(fac.available);
    bool same = (proportional(fac.f, to_scalar(Tf)) && proportional(fac.g, to_scalar(Tg))) ||
                (proportional(fac.f, to_scalar(Tg)) && proportional(fac.g, to_scalar(Tf)));
    EXPECT_TRUE(same);
  }
}

TEST(Projection, GenericityExamples) {
  const std::size_t n = 4;
  QuadForm F = xx(n, 0, 1), G = xx(n, 2, 3);
  Subspace V = Subspace::coordinate(n, {0});
  std::mt19937_64 rng(30);
  ProjectionMap T(V, sample_coefficients(rng, 1));
  // images: a z y1 and y2 y3; independent, factors {z, y1} vs {y2, y3}
  QuadForm TF = T.apply(F), TG = T.apply(G);
  EXPECT_FALSE(TF.proportional_to(TG));
  EXPECT_TRUE(genericity_check(T, F, G).ok());
  EXPECT_THROW(genericity_check(T, F, F * Rational(3)), PreconditionError);
  ProjectionMap T0(V, {Rational(0)});
  EXPECT_FALSE(genericity_check(T0, F, G).ok());
}

TEST(Projection, FreshDrawsAreIndependentAndCoprime) {
  std::mt19937_64 rng(31);
  int checked = 0;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 5;
    Subspace V = Subspace::span(n, {random_form(rng, n)});
    QuadForm F = random_quad(rng, n, 2), G = random_quad(rng, n, 2);
    if (!F.irreducible() || !G.irreducible() || F.proportional_to(G)) continue;
    ProjectionMap T(V, sample_coefficients(rng, 1));
    ++checked;
    EXPECT_TRUE(genericity_check(T, F, G).ok());
  }
  EXPECT_GT(checked, 500);
}

TEST(Projection, ResamplingGivesUpAfterFiveRetries) {
  std::mt19937_64 rng(32);
  int calls = 0;
  auto never = [&](const ProjectionMap&) {
    ++calls;
    return GenericityReport{{"forced"}};
  };
  EXPECT_THROW(sample_projection(Subspace::coordinate(3, {0}), rng, never), GenericityExhausted);
  EXPECT_EQ(calls, 6);
}

TEST(Projection, LiftBoundFromIndependentDraws) {
  std::mt19937_64 rng(33);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 8;
    Subspace V = Subspace::span(n, {random_form(rng, n), random_form(rng, n)});
    Subspace W = Subspace::span(n, {random_form(rng, n), random_form(rng, n)});
    auto vb = V.basis_rows(), wb = W.basis_rows();
    std::vector<QuadForm> Qs;
    for (int k = 0; k < 5; ++k) {
      std::uniform_int_distribution<int> d(-3, 3);
      Vec<Rational> b0(n, 0), b1(n, 0);
      for (auto& w : wb) {
        b0 = add(b0, w, d(rng));
        b1 = add(b1, w, d(rng));
      }
      Qs.push_back(QuadForm::product(vb[0], b0) + QuadForm::product(vb[1], b1));
    }
    std::size_t sigma = 0;
    for (std::size_t i = 0; i < V.dim(); ++i) {
      ProjectionMap T(V, sample_coefficients(rng, V.dim()));
      Subspace ms(T.out_vars());
      for (auto& Q : Qs) ms = ms.sum(T.apply(Q).minimal_space());
      sigma = std::max(sigma, ms.dim());
    }
    Subspace all(n);
    for (auto& Q : Qs) all = all.sum(Q.minimal_space());
    EXPECT_LE(all.dim(), (sigma + 1) * V.dim());
  }
}
