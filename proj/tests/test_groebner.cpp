#include <gtest/gtest.h>

#include <random>

#include "qsg/groebner.hpp"

using namespace qsg;
using namespace qsg::gb;

namespace {

Poly x(std::size_t n, std::size_t i, Order o = Order::Grevlex) { return Poly::variable(n, i, o); }

Poly random_poly(std::mt19937_64& rng, std::size_t n, int deg, int terms) {
  std::uniform_int_distribution<int> c(-4, 4);
  std::uniform_int_distribution<std::size_t> v(0, n - 1);
  Poly p(n);
  for (int t = 0; t < terms; ++t) {
    Mono m;
    int d = static_cast<int>(rng() % (deg + 1));
    for (int k = 0; k < d; ++k) m = m * Mono::var(v(rng));
    p = p + Poly::monomial(n, m, c(rng), Order::Grevlex);
  }
  return p;
}

}  // namespace

TEST(Mono, GrevlexAndLex) {
  Mono a = Mono::var(0) * Mono::var(2), b = Mono::var(1) * Mono::var(1);
  // x1 x3 < x2^2 in grevlex, x1 x3 > x2^2 in lex
  EXPECT_LT(compare(a, b, Order::Grevlex), 0);
  EXPECT_GT(compare(a, b, Order::Lex), 0);
  EXPECT_GT(compare(Mono::var(0), Mono::var(1), Order::Grevlex), 0);
  EXPECT_TRUE(Mono::var(0).divides(a));
  EXPECT_FALSE(a.divides(b));
  EXPECT_EQ(Mono::lcm(a, b).deg, 4);
}

TEST(Poly, ArithmeticAndPrinting) {
  const std::size_t n = 3;
  Poly p = x(n, 0) + x(n, 1);
  Poly q = p * p;
  EXPECT_EQ(q.str(), "x1^2 + 2*x1*x2 + x2^2");
  EXPECT_TRUE((q - p * p).is_zero());
  EXPECT_EQ(p.pow(3).degree(), 3);
  EXPECT_TRUE(q.homogeneous());
  EXPECT_FALSE((q + Poly::constant(n, 1)).homogeneous());
  QuadForm Q = QuadForm::from_monomials(3, {{{0, 1}, 2}, {{2, 2}, Rational(-1, 2)}});
  EXPECT_EQ(Poly::from_quadform(Q, 3).str(), "2*x1*x2 - 1/2*x3^2");
}

TEST(Buchberger, SingleVariable) {
  GbResult r = buchberger({x(2, 0)});
  ASSERT_TRUE(r.complete());
  ASSERT_EQ(r.basis.size(), 1u);
  EXPECT_EQ(r.basis[0], x(2, 0));
}

TEST(Buchberger, MonomialIdealInLex) {
  const std::size_t n = 2;
  Poly a = x(n, 0, Order::Lex) * x(n, 0, Order::Lex), b = x(n, 0, Order::Lex) * x(n, 1, Order::Lex);
  GbResult r = buchberger({a, b});
  ASSERT_TRUE(r.complete());
  ASSERT_EQ(r.basis.size(), 2u);
  EXPECT_TRUE(r.basis[0] == b || r.basis[1] == b);
  EXPECT_TRUE(r.basis[0] == a || r.basis[1] == a);
}

TEST(Buchberger, UnitIdeal) {
  GbResult r = buchberger({Poly::constant(3, 1)});
  ASSERT_EQ(r.basis.size(), 1u);
  EXPECT_TRUE(r.basis[0].is_constant());
  EXPECT_FALSE(is_proper(r.basis));
}

TEST(Buchberger, HandComputedTwistedCubic) {
  // <x^2 - y, x^3 - z> in lex x > y > z; reduced basis by hand
  const std::size_t n = 3;
  auto X = x(n, 0, Order::Lex), Y = x(n, 1, Order::Lex), Z = x(n, 2, Order::Lex);
  GbResult r = buchberger({X * X - Y, X * X * X - Z});
  ASSERT_TRUE(r.complete());
  std::vector<Poly> expect = {Y * Y * Y - Z * Z, X * Z - Y * Y, X * Y - Z, X * X - Y};
  ASSERT_EQ(r.basis.size(), expect.size());
  for (const auto& e : expect) {
    bool found = false;
    for (const auto& b : r.basis) found = found || b == e;
    EXPECT_TRUE(found) << e.str();
  }
}

TEST(Buchberger, OutputPassesSelfCheck) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 60; ++t) {
    const std::size_t n = 3 + t % 2;
    std::vector<Poly> gens;
    for (int k = 0; k < 3; ++k) gens.push_back(random_poly(rng, n, 2, 4));
    GbResult r = buchberger(gens);
    ASSERT_TRUE(r.complete());
    EXPECT_TRUE(is_groebner_basis(r.basis));
    for (const auto& g : gens) EXPECT_TRUE(ideal_membership(g, r.basis));
  }
}

TEST(Membership, ProductInPrincipalIdeal) {
  GbResult r = buchberger({x(2, 0)});
  EXPECT_TRUE(ideal_membership(x(2, 0) * x(2, 1), r.basis));
  EXPECT_FALSE(ideal_membership(x(2, 1), r.basis));
}

TEST(Membership, ExplicitCombinationsReduceToZero) {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 4;
    std::vector<Poly> gens = {random_poly(rng, n, 2, 3), random_poly(rng, n, 2, 3)};
    GbResult r = buchberger(gens);
    ASSERT_TRUE(r.complete());
    Poly f = gens[0] * random_poly(rng, n, 2, 3) + gens[1] * random_poly(rng, n, 1, 3);
    EXPECT_TRUE(ideal_membership(f, r.basis));
  }
}

TEST(Budget, ExhaustionReportsUndecided) {
  std::mt19937_64 rng(9);
  const std::size_t n = 5;
  std::vector<Poly> gens;
  for (int k = 0; k < 4; ++k) gens.push_back(random_poly(rng, n, 3, 6));
  Budget tiny{1, 60};
  GbResult r = buchberger(gens, tiny);
  EXPECT_EQ(r.status, Status::Exhausted);
  EXPECT_EQ(solvable(gens, tiny), Decision::Undecided);
}

TEST(Rabinowitsch, SquareOffTheVariety) {
  const std::size_t n = 4;
  QuadForm A = QuadForm::from_monomials(n, {{{0, 1}, 1}, {{2, 3}, 1}});
  QuadForm B = A + QuadForm::from_monomials(n, {{{0, 0}, 1}});
  QuadForm C = QuadForm::from_monomials(n, {{{1, 1}, 1}});
  EXPECT_EQ(rabinowitsch(C, A, B).decision, Decision::No);
}

TEST(Rabinowitsch, CaseTwoTriple) {
  const std::size_t n = 4;
  QuadForm A = QuadForm::from_monomials(n, {{{0, 1}, 1}, {{2, 3}, 1}});
  QuadForm B = A + QuadForm::from_monomials(n, {{{0, 0}, 1}});
  QuadForm C = A + QuadForm::from_monomials(n, {{{0, 2}, 1}});
  EXPECT_EQ(rabinowitsch(C, A, B).decision, Decision::Yes);
  EXPECT_EQ(rabinowitsch(A, A, B).decision, Decision::Yes);
}

TEST(Rabinowitsch, PowersOfGeneratorsAreInTheRadical) {
  const std::size_t n = 3;
  Poly a = x(n, 0) * x(n, 0), b = x(n, 1) * x(n, 1) * x(n, 1);
  EXPECT_EQ(rabinowitsch(x(n, 0) + x(n, 1), {a, b}).decision, Decision::Yes);
  EXPECT_EQ(rabinowitsch(x(n, 2), {a, b}).decision, Decision::No);
}

TEST(Solvable, PointsAndEmptySets) {
  const std::size_t n = 2;
  Poly X = x(n, 0), Y = x(n, 1), one = Poly::constant(n, 1);
  EXPECT_EQ(solvable({X * Y - one, X}), Decision::No);
  EXPECT_EQ(solvable({X * X - one, Y - X}), Decision::Yes);
}
