#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <sys/wait.h>

#include "qsg/genconf.hpp"
#include "qsg/io.hpp"

using namespace qsg;

namespace {

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + QSG_CLI_PATH + " " + args + " 2>/dev/null";
  CliRun r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, got);
  const int st = pclose(p);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string tmp(const std::string& name) { return testing::TempDir() + "qsg_cli_" + name; }

std::string write(const std::string& name, const json& j) {
  const std::string path = tmp(name);
  std::ofstream(path) << j.dump();
  return path;
}

QuadForm form(std::size_t n, const std::map<std::pair<std::size_t, std::size_t>, Rational>& mono) {
  return QuadForm::from_monomials(n, mono);
}

const QuadForm A4 = form(4, {{{0, 1}, Rational(1)}, {{2, 3}, Rational(1)}});

}  // namespace

TEST(Cli, GenThenVerifyPencil) {
  CliRun g = run("gen --template case-i --k 3 --n 5 --seed 1");
  ASSERT_EQ(g.code, 0);
  const std::string path = write("pencil.json", json::parse(g.out));
  CliRun v = run("verify-psg " + path);
  EXPECT_EQ(v.code, 0);
  json j = json::parse(v.out);
  EXPECT_EQ(j["delta_pairwise"], "1/1");
  EXPECT_EQ(j["delta_actual"], "2/3");
  EXPECT_EQ(run("verify-psg " + path + " --delta 3/4").code, 2);
}

TEST(Cli, EmittedJsonReparsesEqual) {
  CliRun g = run("gen --template case-iii --k 1 --n 5 --seed 3");
  ASSERT_EQ(g.code, 0);
  json j = json::parse(g.out);
  EXPECT_EQ(config_to_json(config_from_json(j)), j);
}

TEST(Cli, Deterministic) {
  EXPECT_EQ(run("gen --template case-ii --k 2 --n 7 --seed 4 --closed").out,
            run("gen --template case-ii --k 2 --n 7 --seed 4 --closed").out);
}

TEST(Cli, RadicalCaseTwoTriple) {
  Triple t{4, A4, A4 + form(4, {{{0, 0}, Rational(1)}}), A4 + form(4, {{{0, 2}, Rational(1)}})};
  CliRun r = run("radical " + write("triple.json", triple_to_json(t)));
  ASSERT_EQ(r.code, 0);
  json j = json::parse(r.out);
  EXPECT_EQ(j["result"], "yes");
  EXPECT_EQ(j["method"], "square-fastpath");
}

TEST(Cli, RadicalNegativeTriple) {
  Triple t{4, A4, A4 + form(4, {{{0, 0}, Rational(1)}}), form(4, {{{1, 1}, Rational(1)}})};
  CliRun r = run("radical " + write("triple_no.json", triple_to_json(t)));
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(json::parse(r.out)["result"], "no");
}

TEST(Cli, DecomposeCaseTwoTemplate) {
  CliRun g = run("gen --template case-ii --k 3 --n 7 --seed 9 --closed");
  ASSERT_EQ(g.code, 0);
  json cfg = json::parse(g.out);
  const std::string path = write("c2.json", cfg);
  const std::string trace = tmp("trace.json");
  CliRun d = run("decompose " + path + " --delta " + cfg["delta"].get<std::string>() + " --trace " + trace);
  ASSERT_EQ(d.code, 0);
  json cert = json::parse(d.out);
  EXPECT_EQ(cert["status"], "ok");
  EXPECT_TRUE(cert["validated"].get<bool>());
  std::ifstream in(trace);
  EXPECT_TRUE(json::parse(in).is_array());

  CliRun dot = run("graph " + path + " --format dot --certificate " + write("cert.json", cert));
  EXPECT_EQ(dot.code, 0);
  EXPECT_NE(dot.out.find("fillcolor"), std::string::npos);
}

TEST(Cli, DecomposeBelowDeltaIsNotPsg) {
  CliRun g = run("gen --template case-i --k 3 --n 5 --seed 1");
  EXPECT_EQ(run("decompose " + write("p2.json", json::parse(g.out)) + " --delta 1/1").code, 2);
}

TEST(Cli, FloatDeltaIsMalformed) {
  CliRun g = run("gen --template case-i --k 3 --n 5 --seed 1");
  const std::string path = write("p3.json", json::parse(g.out));
  EXPECT_EQ(run("decompose " + path + " --delta 0.5").code, 1);
  EXPECT_EQ(run("verify-psg " + path + " --delta 1/0").code, 1);
}

TEST(Cli, SchemaErrorsListPointers) {
  json bad = {{"n", 3}, {"forms", {{{"x1*x2", 0.5}}}}};
  CliRun r = run("verify-psg " + write("bad.json", bad));
  EXPECT_EQ(r.code, 1);
  json j = json::parse(r.out);
  ASSERT_FALSE(j["errors"].empty());
  EXPECT_EQ(j["errors"][0].get<std::string>().rfind("/forms/0/x1*x2:", 0), 0u);
  EXPECT_EQ(run("verify-psg /nonexistent.json").code, 1);
  EXPECT_EQ(run("bogus-command").code, 1);
}

TEST(Cli, ClassifyPair) {
  CliRun g = run("gen --template case-iii --k 1 --n 5 --seed 3");
  const std::string path = write("iii.json", json::parse(g.out));
  CliRun r = run("classify " + path + " --pair 0 1");
  ASSERT_EQ(r.code, 0);
  json j = json::parse(r.out);
  EXPECT_EQ(j["third"], 2);
  EXPECT_TRUE(j["classification"]["case_iii"].get<bool>());
  EXPECT_EQ(run("classify " + path + " --pair 0 7").code, 1);
}

TEST(Cli, LinearSg) {
  // three collinear points on a line through the origin-free chart plus its closure
  PointSet p = PointSet::make(3, {{Rational(1), Rational(0), Rational(0)},
                                  {Rational(0), Rational(1), Rational(0)},
                                  {Rational(1), Rational(1), Rational(0)}});
  const std::string path = write("pts.json", pointset_to_json(p));
  CliRun r = run("linear-sg " + path);
  ASSERT_EQ(r.code, 0);
  json j = json::parse(r.out);
  EXPECT_EQ(j["delta"], "1/1");
  EXPECT_TRUE(j["dsw_check"].get<bool>());
  EXPECT_EQ(run("linear-sg " + path + " --mode affine").code, 2);
}

TEST(Cli, GraphCsv) {
  CliRun g = run("gen --template case-i --k 3 --n 5 --seed 1");
  CliRun r = run("graph " + write("p4.json", json::parse(g.out)) + " --format csv");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "i,j,cases,witnesses\n0,1,\"i\",2\n0,2,\"i\",1\n1,2,\"i\",0\n");
}

TEST(Cli, BudgetEnvironmentIsValidated) {
  CliRun g = run("gen --template case-i --k 3 --n 5 --seed 1");
  const std::string path = write("p5.json", json::parse(g.out));
  EXPECT_EQ(run("verify-psg " + path, "QSG_BUDGET_MS=abc").code, 1);
  EXPECT_EQ(run("verify-psg " + path, "QSG_BUDGET_MS=5000").code, 0);
}
