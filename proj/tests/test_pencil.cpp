#include <gtest/gtest.h>

#include <random>

#include "qsg/pencil.hpp"

using namespace qsg;

namespace {

Vec<Rational> e(std::size_t n, std::size_t i) {
  Vec<Rational> v(n, 0);
  v[i] = 1;
  return v;
}
QuadForm xx(std::size_t n, std::size_t i, std::size_t j) { return QuadForm::product(e(n, i), e(n, j)); }

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

}  // namespace

TEST(Squares, SumOfSquaresAgainstProduct) {
  QuadForm A = xx(2, 0, 0) + xx(2, 1, 1), B = xx(2, 0, 1) * Rational(2);
  SquaresResult s = squares_in_pencil(A, B);
  ASSERT_EQ(s.roots.size(), 2u);
  EXPECT_FALSE(s.whole_pencil_degenerate);
  // (-1 : 1) is (1 : -1) up to scale: A - B = (x1 - x2)^2
  EXPECT_EQ(s.roots[0].alpha, Scalar(-1));
  EXPECT_TRUE(proportional(s.roots[0].v, to_scalar(Vec<Rational>{1, -1})));
  EXPECT_EQ(s.roots[0].c, Scalar(-1));
  EXPECT_EQ(s.roots[1].alpha, Scalar(1));
  EXPECT_TRUE(proportional(s.roots[1].v, to_scalar(Vec<Rational>{1, 1})));
  ASSERT_TRUE(s.roots[1].ell.has_value());
  for (const auto& r : s.roots) {
    ASSERT_TRUE(r.ell.has_value());
    EXPECT_EQ(product_matrix(*r.ell, *r.ell), pencil_element(A.matrix(), B.matrix(), r.alpha, r.beta));
  }
}

TEST(Squares, NoneInSplitPencil) {
  QuadForm A = xx(4, 0, 1) + xx(4, 2, 3), B = xx(4, 0, 1) - xx(4, 2, 3);
  EXPECT_TRUE(squares_in_pencil(A, B).roots.empty());
}

TEST(Squares, TwoSquares) {
  SquaresResult s = squares_in_pencil(xx(2, 0, 0), xx(2, 1, 1));
  ASSERT_EQ(s.roots.size(), 2u);
  EXPECT_EQ(s.roots[0].alpha, Scalar(0));
  EXPECT_TRUE(s.roots[1].at_infinity());
}

TEST(Squares, DegeneratePencilIsFlagged) {
  Vec<Rational> a{1, 2, 0};
  SquaresResult s = squares_in_pencil(QuadForm::square(a), QuadForm::square(a) * Rational(3));
  EXPECT_TRUE(s.whole_pencil_degenerate);
  EXPECT_THROW(squares_in_pencil(QuadForm(3), QuadForm(3)), std::invalid_argument);
}

TEST(Squares, IrrationalRootsLiveInOneExtension) {
  const std::size_t n = 2;
  QuadForm A = xx(n, 0, 0) + xx(n, 1, 1) * Rational(2), B = xx(n, 0, 1) * Rational(4);
  // alpha A + B singular: alpha^2 * 2 = 4 -> alpha = +-sqrt2
  SquaresResult s = squares_in_pencil(A, B);
  ASSERT_EQ(s.roots.size(), 2u);
  for (const auto& r : s.roots) {
    EXPECT_EQ(r.alpha.d(), 2);
    EXPECT_EQ(rank(pencil_element(A.matrix(), B.matrix(), r.alpha, r.beta)), 1u);
  }
}

TEST(Squares, RootsReverifyOnRandomPencils) {
  std::mt19937_64 rng(41);
  int found = 0;
  for (int t = 0; t < 300; ++t) {
    std::size_t n = 3 + t % 3;
    QuadForm A = random_quad(rng, n, 2);
    // half the time plant a square: B = l^2 - s A
    QuadForm B = (t % 2) ? QuadForm::square(random_form(rng, n)) - A * Rational(1 + t % 4) : random_quad(rng, n, 2);
    if (A.is_zero() && B.is_zero()) continue;
    SquaresResult s = squares_in_pencil(A, B);
    for (const auto& r : s.roots) {
      ++found;
      EXPECT_EQ(rank_at(A.matrix(), B.matrix(), r.alpha, r.beta), 1u);
      SMatrix N = pencil_element(A.matrix(), B.matrix(), r.alpha, r.beta);
      SMatrix cvv = product_matrix(r.v, r.v) * r.c;
      EXPECT_EQ(cvv, N);
    }
    if (t % 2 && !s.whole_pencil_degenerate && A.rank() >= 2) EXPECT_FALSE(s.roots.empty());
  }
  EXPECT_GT(found, 100);
}

TEST(LowRank, SharedFactorMakesWholePencilLowRank) {
  PencilLocus L = low_rank_locus(xx(3, 0, 1), xx(3, 0, 2), 1);
  EXPECT_TRUE(L.whole_pencil);
}

TEST(LowRank, EqualFormsCancelAtOnePoint) {
  std::mt19937_64 rng(42);
  QuadForm A = xx(4, 0, 1) + xx(4, 2, 3);
  PencilLocus L = low_rank_locus(A, A, 1);
  EXPECT_FALSE(L.whole_pencil);
  ASSERT_EQ(L.roots.size(), 1u);
  EXPECT_EQ(L.roots[0].alpha, Scalar(-1));
  EXPECT_EQ(L.roots[0].rank, 0u);
}

TEST(LowRank, DeterminantRootsOfRandomFullRankPencils) {
  std::mt19937_64 rng(43);
  for (int t = 0; t < 60; ++t) {
    const std::size_t n = 4;
    QuadForm A = random_quad(rng, n, 4), B = random_quad(rng, n, 4);
    if (A.rank() < 4 || B.rank() < 4) continue;
    // oracle: det(tA + B) by interpolation at five points, roots by the univariate solver
    std::vector<Rational> xs, ys;
    for (int s = 0; s < 5; ++s) {
      xs.emplace_back(s);
      ys.push_back(determinant(A.matrix() * Rational(s) + B.matrix()));
    }
    URoots dr = roots(UPoly::interpolate(xs, ys));
    PencilLocus L = pencil_rank_locus(A.matrix(), B.matrix(), 3);
    if (dr.overflow) {
      EXPECT_TRUE(L.overflow);
      continue;
    }
    EXPECT_FALSE(L.whole_pencil);
    EXPECT_EQ(L.roots.size(), dr.roots.size());
    // rank <= 2 points are determinant roots with rank <= 2
    PencilLocus L2 = low_rank_locus(A, B, 1);
    std::size_t expect2 = 0;
    for (const auto& x : dr.roots)
      if (rank_at(A.matrix(), B.matrix(), x, Scalar(1)) <= 2) ++expect2;
    EXPECT_EQ(L2.roots.size(), expect2);
  }
}

TEST(LowRank, RectangularPencil) {
  // [[t, 1, 0], [0, t, 1]] has rank 2 for every t; rank <= 1 nowhere
  QMatrix A(2, 3), B(2, 3);
  A(0, 0) = 1;
  A(1, 1) = 1;
  B(0, 1) = 1;
  B(1, 2) = 1;
  PencilLocus L = pencil_rank_locus(A, B, 1);
  EXPECT_FALSE(L.whole_pencil);
  EXPECT_TRUE(L.roots.empty());
  EXPECT_TRUE(pencil_rank_locus(A, B, 2).whole_pencil);
}

TEST(SpanSpace, SplitProducts) {
  SpanSpace s = low_rank_span_space(xx(4, 0, 1), xx(4, 2, 3), 1, Subspace(4));
  EXPECT_LE(s.V.dim(), 8u);
  EXPECT_TRUE(s.V.contains(xx(4, 0, 1).minimal_space()));
}

TEST(SpanSpace, BinaryFormsAreWholePencil) {
  SpanSpace s = low_rank_span_space(xx(2, 0, 0) + xx(2, 1, 1), xx(2, 0, 1) * Rational(2), 1, Subspace(2));
  EXPECT_TRUE(s.whole_pencil);
  EXPECT_EQ(s.V, Subspace::full(2));
}

TEST(SpanSpace, PlantedRankTwoCombination) {
  std::mt19937_64 rng(44);
  for (int t = 0; t < 40; ++t) {
    const std::size_t n = 7;
    QuadForm Q = random_quad(rng, n, 4);
    Vec<Rational> a = random_form(rng, n), b = random_form(rng, n), c = random_form(rng, n), d = random_form(rng, n);
    Rational al = 1 + t % 3, be = 2;
    QuadForm planted = QuadForm::product(a, b) + QuadForm::product(c, d);
    QuadForm Qp = (planted - Q * al) * (Rational(1) / be);
    SpanSpace s = low_rank_span_space(Q, Qp, 2, Subspace(n), 50, t);
    EXPECT_TRUE(s.V.contains(Subspace::span(n, {a, b, c, d})));
  }
}

TEST(SpanSpace, PlantedCombinationModuloU) {
  std::mt19937_64 rng(45);
  for (int t = 0; t < 40; ++t) {
    const std::size_t n = 7;
    Subspace U = Subspace::span(n, {random_form(rng, n), random_form(rng, n)});
    auto ub = U.basis_rows();
    QuadForm P = QuadForm::product(ub[0], ub[1]) * Rational(t % 5 - 2) + QuadForm::square(ub[0]);
    QuadForm Q = random_quad(rng, n, 4);
    Vec<Rational> a = random_form(rng, n), b = random_form(rng, n);
    QuadForm Qp = QuadForm::product(a, b) - P - Q * Rational(3);
    SpanSpace s = low_rank_span_space(Q, Qp, 1, U, 50, t);
    EXPECT_LE(s.V.dim(), 8u);
    EXPECT_TRUE(s.V.sum(U).contains(Subspace::span(n, {a, b})));
  }
}
