#include <gtest/gtest.h>

#include <fstream>

#include "qsg/genconf.hpp"
#include "qsg/io.hpp"

using namespace qsg;

namespace {

std::vector<std::string> issues_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const SchemaError& e) {
    return e.issues();
  }
  return {};
}

bool mentions(const std::vector<std::string>& issues, const std::string& ptr) {
  for (const auto& s : issues)
    if (s.rfind(ptr + ":", 0) == 0) return true;
  return false;
}

}  // namespace

TEST(RationalJson, AcceptsStringsAndIntegers) {
  EXPECT_EQ(rational_from_json(json("3/6")), Rational(1, 2));
  EXPECT_EQ(rational_from_json(json(-4)), Rational(-4));
  EXPECT_EQ(rational_from_json(json("7")), Rational(7));
  EXPECT_EQ(rational_to_json(Rational(-2, 4)), json("-1/2"));
}

TEST(RationalJson, RejectsFloatsAndDecimals) {
  EXPECT_THROW(rational_from_json(json(0.5)), SchemaError);
  EXPECT_THROW(rational_from_json(json("0.5")), SchemaError);
  EXPECT_THROW(rational_from_json(json("1/0")), SchemaError);
  EXPECT_THROW(rational_from_json(json(true)), SchemaError);
}

TEST(QuadFormJson, MonomialMapSplitsCrossTerms) {
  json j = {{"n", 3}, {"monomials", {{"x1*x2", "1"}, {"x3^2", "-2/3"}}}};
  QuadForm Q = quadform_from_json(j);
  EXPECT_EQ(Q.matrix()(0, 1), Rational(1, 2));
  EXPECT_EQ(Q.matrix()(1, 0), Rational(1, 2));
  EXPECT_EQ(Q.matrix()(2, 2), Rational(-2, 3));
  EXPECT_EQ(Q.eval(Vec<Rational>{Rational(2), Rational(3), Rational(3)}), Rational(0));
}

TEST(QuadFormJson, BareMonomialMapUsesHint) {
  QuadForm Q = quadform_from_json(json{{"x1*x1", 1}, {"x2*x1", 2}}, "", 2);
  EXPECT_EQ(Q.matrix()(0, 0), Rational(1));
  EXPECT_EQ(Q.matrix()(0, 1), Rational(1));
}

TEST(QuadFormJson, AsymmetricMatrixReportsEntry) {
  json j = {{"n", 2}, {"matrix", json::array({json::array({"1", "2"}), json::array({"3", "1"})})}};
  auto is = issues_of([&] { quadform_from_json(j, "/forms/4"); });
  EXPECT_TRUE(mentions(is, "/forms/4/matrix/0/1"));
}

TEST(QuadFormJson, MatrixRoundTrip) {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 20; ++t) {
    QuadForm Q = random_quadric(rng, 5, 3);
    json j = quadform_to_json(Q);
    EXPECT_EQ(quadform_from_json(j), Q);
    EXPECT_EQ(quadform_to_json(quadform_from_json(j)).dump(), j.dump());
  }
}

TEST(ConfigJson, RoundTripFromGenerator) {
  Configuration c = gen_case_iii_template(2, 6, 4);
  c.delta = Rational(1, 4);
  c.seed = 17;
  json j = config_to_json(c);
  Configuration d = config_from_json(j);
  ASSERT_EQ(d.size(), c.size());
  for (std::size_t i = 0; i < c.size(); ++i) EXPECT_EQ(d[i], c[i]);
  EXPECT_EQ(d.delta, c.delta);
  EXPECT_EQ(d.seed, 17u);
  EXPECT_EQ(config_to_json(d).dump(), j.dump());
}

TEST(ConfigJson, CollectsEveryError) {
  json j = {{"n", 3},
            {"forms", {{{"x1*x2", "1/2"}, {"x3^2", 0.25}}, {{"n", 2}, {"matrix", json::array({json::array({"1", "0"}), json::array({"0", "1"})})}}}},
            {"delta", "1/3.0"}};
  auto is = issues_of([&] { config_from_json(j); });
  EXPECT_TRUE(mentions(is, "/forms/0/x3^2"));
  EXPECT_TRUE(mentions(is, "/forms/1/n"));
  EXPECT_TRUE(mentions(is, "/delta"));
}

TEST(ConfigJson, MonomialKeysOutOfRange) {
  json j = {{"n", 2}, {"forms", {{{"x3*x1", "1"}}}}};
  auto is = issues_of([&] { config_from_json(j); });
  EXPECT_TRUE(mentions(is, "/forms/0/x3*x1"));
}

TEST(ConfigJson, PointerEscapesSlash) {
  json j = {{"n", 2}, {"forms", {{{"x1/x2", "1"}}}}};
  auto is = issues_of([&] { config_from_json(j); });
  EXPECT_TRUE(mentions(is, "/forms/0/x1~1x2"));
}

TEST(ConfigJson, InvariantViolationIsSchemaError) {
  QuadForm A = QuadForm::from_monomials(4, {{{0, 1}, Rational(1)}, {{2, 3}, Rational(1)}});
  Configuration c;
  c.n = 4;
  c.forms = {A, A * Rational(2)};
  EXPECT_THROW(config_from_json(config_to_json(c)), SchemaError);
}

TEST(TripleJson, RoundTrip) {
  Configuration c = gen_case_iii_template(1, 5, 3);
  Triple t{5, c[0], c[1], c[2]};
  Triple u = triple_from_json(triple_to_json(t));
  EXPECT_EQ(u.n, 5u);
  EXPECT_EQ(u.A, t.A);
  EXPECT_EQ(u.C, t.C);
  EXPECT_TRUE(mentions(issues_of([] { triple_from_json(json{{"A", {{"x1^2", 1}}}}); }), "/B"));
}

TEST(PointSetJson, RoundTripAndArity) {
  PointSet p = PointSet::make(3, {{Rational(1), Rational(0), Rational(1, 2)}, {Rational(0), Rational(1), Rational(-1)}});
  json j = pointset_to_json(p);
  PointSet q = pointset_from_json(j);
  EXPECT_EQ(q.points(), p.points());
  EXPECT_EQ(pointset_to_json(q).dump(), j.dump());
  json bad = {{"dim", 2}, {"points", json::array({json::array({"1", "2"}), json::array({"1"})})}};
  EXPECT_TRUE(mentions(issues_of([&] { pointset_from_json(bad); }), "/points/1"));
}

TEST(ReadFile, MissingAndUnparsable) {
  EXPECT_THROW(read_json_file("/nonexistent/q.json"), SchemaError);
  const std::string path = testing::TempDir() + "qsg_io_bad.json";
  std::ofstream(path) << "{\"n\": 3,";
  EXPECT_THROW(read_json_file(path), SchemaError);
}
