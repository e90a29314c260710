#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "qsg/genconf.hpp"
#include "qsg/io.hpp"
#include "qsg/pipeline.hpp"

using namespace qsg;

namespace {

enum Exit { kOk = 0, kMalformed = 1, kNotPsg = 2, kAssertion = 3, kResource = 4 };

// Raised for malformed command-line values (as opposed to malformed files).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

void write_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write " + path);
  out << j.dump(2) << "\n";
}

Rational delta_arg(const std::string& s) {
  try {
    return parse_rational(s);
  } catch (const std::invalid_argument& e) {
    throw UsageError("--delta: " + std::string(e.what()));
  }
}

RadicalOptions radical_options() {
  RadicalOptions r;
  if (const char* ms = std::getenv("QSG_BUDGET_MS")) {
    char* end = nullptr;
    const double v = std::strtod(ms, &end);
    if (end == ms || *end != '\0' || !(v > 0)) throw UsageError("QSG_BUDGET_MS must be a positive number");
    r.budget.max_seconds = v / 1000.0;
  }
  return r;
}

PsgOptions psg_options() {
  PsgOptions p;
  p.radical = radical_options();
  return p;
}

std::size_t member_arg(const Configuration& c, std::size_t i, const char* what) {
  if (i >= c.size())
    throw UsageError(std::string(what) + " index " + std::to_string(i) + " is out of range for m = " +
                     std::to_string(c.size()));
  return i;
}

std::string cases_label(const PairInfo& p) {
  std::string s;
  for (auto [on, name] : {std::pair{p.case_i, "i"}, {p.case_ii, "ii"}, {p.case_iii, "iii"}})
    if (on) s += (s.empty() ? "" : ",") + std::string(name);
  return s;
}

int cmd_verify(const std::string& file, const std::optional<std::string>& delta_s) {
  const Configuration c = config_from_json(read_json_file(file));
  PsgResult r = verify_psg(c, psg_options());
  json out = r.to_json();
  out.erase("graph");
  // the same minimum degree over m - 1 partners, reported alongside, never substituted
  if (c.size() > 1) {
    std::size_t dmin = c.size();
    for (std::size_t i = 0; i < c.size(); ++i) dmin = std::min(dmin, r.graph.degree(i));
    out["delta_pairwise"] = to_string(Rational(dmin) / Rational(c.size() - 1));
  }
  const Rational want = delta_s ? delta_arg(*delta_s) : Rational(0);
  const bool ok = delta_s ? r.delta_actual >= want : r.delta_actual > 0;
  if (delta_s) out["delta_requested"] = to_string(want);
  out["psg"] = ok;
  emit(out);
  return ok ? kOk : kNotPsg;
}

int cmd_classify(const std::string& file, const std::vector<std::size_t>& pair, const std::optional<std::size_t>& third) {
  const Configuration c = config_from_json(read_json_file(file));
  const std::size_t i = member_arg(c, pair[0], "--pair"), j = member_arg(c, pair[1], "--pair");
  if (i == j) throw UsageError("--pair needs two distinct members");
  const RadicalOptions ro = radical_options();
  std::vector<std::size_t> witnesses;
  bool undecided = false;
  if (third) {
    const std::size_t k = member_arg(c, *third, "--third");
    if (k == i || k == j) throw UsageError("--third must differ from the pair");
    const Decision d = radical_membership(c[k], c[i], c[j], ro).decision;
    if (d == Decision::Yes) witnesses.push_back(k);
    undecided = d == Decision::Undecided;
  } else {
    for (std::size_t k = 0; k < c.size(); ++k) {
      if (k == i || k == j) continue;
      const Decision d = radical_membership(c[k], c[i], c[j], ro).decision;
      if (d == Decision::Yes) witnesses.push_back(k);
      undecided |= d == Decision::Undecided;
    }
  }
  json out{{"pair", {i, j}}, {"witnesses", witnesses}};
  if (witnesses.empty()) {
    out["psg"] = false;
    emit(out);
    return undecided ? kResource : kNotPsg;
  }
  out["psg"] = true;
  out["third"] = witnesses.front();
  out["classification"] = classify_triple(c[i], c[j], c[witnesses.front()], ro).to_json();
  emit(out);
  return kOk;
}

int cmd_radical(const std::string& file, unsigned kmax, const std::optional<std::size_t>& budget) {
  const Triple t = triple_from_json(read_json_file(file));
  RadicalOptions ro = radical_options();
  ro.kmax = kmax;
  if (budget) ro.budget.max_spolys = *budget;
  const RadicalResult r = radical_membership(t.C, t.A, t.B, ro);
  json out = r.to_json();
  emit(out);
  return r.decision == Decision::Undecided ? kResource : kOk;
}

int cmd_decompose(const std::string& file, const std::optional<std::string>& delta_s, unsigned long long seed,
                  const std::optional<std::string>& trace_path, const std::string& report_path) {
  const Configuration c = config_from_json(read_json_file(file));
  Rational delta = c.delta;
  if (delta_s) delta = delta_arg(*delta_s);
  if (delta == 0) throw UsageError("--delta is required when the configuration carries none");
  if (!(delta > 0) || delta > 1) throw UsageError("--delta must lie in (0, 1]");
  DecomposeOptions opt;
  opt.seed = seed;
  opt.psg = psg_options();
  const PsgResult psg = verify_psg(c, opt.psg);
  if (psg.delta_actual < delta) {
    emit(json{{"status", "not-psg"}, {"delta_actual", to_string(psg.delta_actual)}, {"delta_requested", to_string(delta)}});
    return kNotPsg;
  }
  try {
    Certificate cert = decompose(c, psg, delta, opt);
    if (trace_path) write_file(*trace_path, cert.trace);
    json out = cert.to_json();
    out.erase("trace");
    out["validated"] = cert.validate(c);
    emit(out);
    return kOk;
  } catch (const AssertionFailure& e) {
    const json rep = e.to_json();
    if (trace_path && rep["detail"].contains("state")) write_file(*trace_path, rep["detail"]["state"]["trace"]);
    write_file(report_path, rep);
    emit(json{{"status", "paper-assertion-failure"}, {"claim", e.claim()}, {"report", report_path}});
    return kAssertion;
  }
}

int cmd_gen(const std::string& tmpl, std::size_t k, std::size_t n, unsigned long long seed, bool closed, bool measure) {
  GenOptions o;
  o.closed = closed;
  o.radical = radical_options();
  Configuration c;
  if (tmpl == "case-i")
    c = gen_case_i_pencil(k, n, seed, o);
  else if (tmpl == "case-ii")
    c = gen_case_ii_template(k, n, seed, o);
  else
    c = gen_case_iii_template(k, n, seed, o);
  c.seed = seed;
  if (measure) c.delta = verify_psg(c, psg_options()).delta_actual;
  emit(config_to_json(c));
  return kOk;
}

int cmd_linear(const std::string& file, const std::optional<std::string>& delta_s, const std::string& mode_s) {
  const PointSet pts = pointset_from_json(read_json_file(file));
  const SgMode mode = mode_s == "affine" ? SgMode::Affine : SgMode::Span;
  const Rational actual = sg_delta(pts, mode);
  const Rational delta = delta_s ? delta_arg(*delta_s) : actual;
  const std::size_t dim = mode == SgMode::Affine ? affine_dimension(pts) : sg_dimension(pts);
  json out{{"m", pts.size()}, {"mode", mode_s}, {"delta", to_string(actual)}, {"dimension", dim}};
  const bool sg = delta > 0 && actual >= delta;
  if (delta_s) out["delta_requested"] = to_string(delta);
  out["sg"] = sg;
  if (delta > 0) {
    out["dsw_bound"] = to_string(Rational(12) / delta + 1);
    out["dsw_check"] = dsw_check(pts, delta, mode);
  }
  emit(out);
  if (sg && !out["dsw_check"].get<bool>()) return kAssertion;
  return sg ? kOk : kNotPsg;
}

int cmd_graph(const std::string& file, const std::string& format, const std::optional<std::string>& cert_path) {
  const Configuration c = config_from_json(read_json_file(file));
  const PsgResult r = verify_psg(c, psg_options());
  const NeighborGraph& g = r.graph;
  std::vector<std::string> color(c.size());
  if (cert_path) {
    const json cj = read_json_file(*cert_path);
    std::vector<std::size_t> J;
    if (!cj.contains("J") || !cj["J"].is_array()) throw SchemaError({"/J: expected an array of member indices"});
    for (std::size_t i = 0; i < cj["J"].size(); ++i) {
      if (!cj["J"][i].is_number_unsigned() || cj["J"][i].get<std::size_t>() >= c.size())
        throw SchemaError({"/J/" + std::to_string(i) + ": not a member index"});
      J.push_back(cj["J"][i].get<std::size_t>());
    }
    if (!cj.contains("V")) throw SchemaError({"/V: missing"});
    const Subspace V = subspace_from_json(cj["V"], c.n, "/V");
    const FourSets s = partition_four(c, g, J, V, false);
    for (auto [part, col] : {std::pair{&s.C_V, "lightblue"}, {&s.C_ideal, "orange"}, {&s.J_V, "palegreen"},
                             {&s.J_ideal, "salmon"}})
      for (std::size_t i : *part) color[i] = col;
  }
  std::ostringstream os;
  if (format == "dot") {
    os << "graph qsg {\n";
    for (std::size_t i = 0; i < c.size(); ++i) {
      os << "  " << i << " [label=\"" << i << "\"";
      if (!color[i].empty()) os << ", style=filled, fillcolor=" << color[i];
      os << "];\n";
    }
    for (std::size_t i = 0; i < c.size(); ++i)
      for (std::size_t j = i + 1; j < c.size(); ++j)
        if (g.edge(i, j)) os << "  " << i << " -- " << j << " [label=\"" << cases_label(g.pair(i, j)) << "\"];\n";
    os << "}\n";
  } else {
    os << "i,j,cases,witnesses\n";
    for (std::size_t i = 0; i < c.size(); ++i)
      for (std::size_t j = i + 1; j < c.size(); ++j) {
        if (!g.edge(i, j)) continue;
        std::string w;
        for (std::size_t k : g.pair(i, j).witnesses) w += (w.empty() ? "" : ";") + std::to_string(k);
        os << i << "," << j << ",\"" << cases_label(g.pair(i, j)) << "\"," << w << "\n";
      }
  }
  std::cout << os.str();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact tools for configurations of quadratic forms"};
  app.require_subcommand(1);

  std::string file, format = "dot", mode = "span", tmpl, report = "qsg-failure-report.json";
  std::optional<std::string> delta, trace, cert;
  std::vector<std::size_t> pair;
  std::optional<std::size_t> third, budget;
  unsigned kmax = 3;
  unsigned long long seed = 0;
  std::size_t k = 0, n = 0;
  bool closed = false, no_measure = false;

  auto* verify = app.add_subcommand("verify-psg", "exact delta_actual and per-member neighbor counts");
  verify->add_option("config", file, "configuration JSON")->required();
  verify->add_option("--delta", delta, "required fraction p/q");

  auto* classify = app.add_subcommand("classify", "structure cases of a pair and its third member");
  classify->add_option("config", file, "configuration JSON")->required();
  classify->add_option("--pair", pair, "two member indices")->required()->expected(2);
  classify->add_option("--third", third, "third member index");

  auto* radical = app.add_subcommand("radical", "is C in the radical of <A, B>");
  radical->add_option("triple", file, "triple JSON")->required();
  radical->add_option("--kmax", kmax, "largest power tried by the degree ladder");
  radical->add_option("--budget", budget, "S-polynomial cap for the Groebner route");

  auto* dec = app.add_subcommand("decompose", "certificate (J, V) bounding the linear dimension");
  dec->add_option("config", file, "configuration JSON")->required();
  dec->add_option("--delta", delta, "fraction p/q");
  dec->add_option("--seed", seed, "random seed");
  dec->add_option("--trace", trace, "write the per-iteration trace here");
  dec->add_option("--report", report, "where a failure report is written");

  auto* gen = app.add_subcommand("gen", "planted configuration");
  gen->add_option("--template", tmpl, "family")->required()->check(CLI::IsMember({"case-i", "case-ii", "case-iii"}));
  gen->add_option("--k", k, "family size parameter")->required();
  gen->add_option("--n", n, "number of variables")->required();
  gen->add_option("--seed", seed, "random seed");
  gen->add_flag("--closed", closed, "second witness per template triple");
  gen->add_flag("--no-measure", no_measure, "skip measuring delta_actual");

  auto* lin = app.add_subcommand("linear-sg", "robust Sylvester-Gallai check on a point set");
  lin->add_option("points", file, "point set JSON")->required();
  lin->add_option("--delta", delta, "fraction p/q");
  lin->add_option("--mode", mode, "span or affine")->check(CLI::IsMember({"span", "affine"}));

  auto* graph = app.add_subcommand("graph", "neighbor graph export");
  graph->add_option("config", file, "configuration JSON")->required();
  graph->add_option("--format", format, "dot or csv")->check(CLI::IsMember({"dot", "csv"}));
  graph->add_option("--certificate", cert, "certificate JSON used to color the four sets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kMalformed;
  }

  try {
    if (*verify) return cmd_verify(file, delta);
    if (*classify) return cmd_classify(file, pair, third);
    if (*radical) return cmd_radical(file, kmax, budget);
    if (*dec) return cmd_decompose(file, delta, seed, trace, report);
    if (*gen) return cmd_gen(tmpl, k, n, seed, closed, !no_measure);
    if (*lin) return cmd_linear(file, delta, mode);
    if (*graph) return cmd_graph(file, format, cert);
  } catch (const SchemaError& e) {
    std::cerr << e.what() << "\n";
    emit(e.to_json());
    return kMalformed;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kMalformed;
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kMalformed;
  } catch (const AssertionFailure& e) {
    emit(e.to_json());
    return kAssertion;
  } catch (const ResourceExhausted& e) {
    std::cerr << "resource cap: " << e.what() << "\n";
    emit(json{{"status", "resource-exhausted"}, {"message", e.what()}});
    return kResource;
  } catch (const GenericityViolation& e) {
    emit(json{{"status", "genericity-violation"}, {"message", e.what()}});
    return kAssertion;
  }
  return kMalformed;
}
