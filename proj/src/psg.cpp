#include "qsg/psg.hpp"

#include <algorithm>
#include <set>

#include "qsg/linsg.hpp"

namespace qsg {

void Configuration::validate() const {
  std::set<std::string> keys;
  for (std::size_t i = 0; i < forms.size(); ++i) {
    const QuadForm& Q = forms[i];
    if (Q.n() != n)
      throw PreconditionError("member " + std::to_string(i) + " has " + std::to_string(Q.n()) + " variables, expected " +
                              std::to_string(n));
    if (!Q.irreducible()) throw PreconditionError("member " + std::to_string(i) + " is reducible (rank < 3)");
    if (!keys.insert(Q.canonical().key()).second)
      throw PreconditionError("member " + std::to_string(i) + " is proportional to an earlier member");
  }
  if (sgn(delta) < 0 || delta > 1) throw PreconditionError("delta must lie in [0, 1]");
}

Configuration Configuration::dedup(std::size_t n, const std::vector<QuadForm>& forms) {
  Configuration c;
  c.n = n;
  std::set<std::string> keys;
  for (const auto& Q : forms)
    if (keys.insert(Q.canonical().key()).second) c.forms.push_back(Q);
  return c;
}

std::size_t linear_dimension(const std::vector<QuadForm>& forms) {
  if (forms.empty()) return 0;
  SpanBuilder<Rational> s(QuadForm::coeff_dim(forms[0].n()));
  for (const auto& Q : forms) s.add(Q.coeff_vector());
  return s.dim();
}

std::size_t NeighborGraph::index(std::size_t i, std::size_t j) const {
  if (i == j || i >= m_ || j >= m_) throw std::out_of_range("neighbor graph pair");
  if (i > j) std::swap(i, j);
  // pairs (i, j), i < j, in row-major order
  return i * (2 * m_ - i - 1) / 2 + (j - i - 1);
}

bool NeighborGraph::edge(std::size_t i, std::size_t j, Case c) const {
  if (!edge(i, j)) return false;
  const PairInfo& p = pair(i, j);
  switch (c) {
    case Case::I: return p.case_i;
    case Case::II: return p.case_ii;
    case Case::III: return p.case_iii;
  }
  return false;
}

std::vector<std::size_t> NeighborGraph::neighbors(std::size_t i) const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < m_; ++j)
    if (edge(i, j)) out.push_back(j);
  return out;
}

std::vector<std::size_t> NeighborGraph::neighbors(std::size_t i, Case c) const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < m_; ++j)
    if (edge(i, j, c)) out.push_back(j);
  return out;
}

json NeighborGraph::to_json() const {
  json edges = json::array();
  for (std::size_t i = 0; i < m_; ++i)
    for (std::size_t j = i + 1; j < m_; ++j) {
      const PairInfo& p = pair(i, j);
      if (!p.psg) continue;
      json cases = json::array();
      if (p.case_i) cases.push_back("i");
      if (p.case_ii) cases.push_back("ii");
      if (p.case_iii) cases.push_back("iii");
      edges.push_back({{"i", i}, {"j", j}, {"witnesses", p.witnesses}, {"cases", cases}});
    }
  return json{{"m", m_}, {"edges", edges}};
}

json PsgResult::to_json() const {
  json deg = json::array();
  for (std::size_t i = 0; i < graph.size(); ++i) deg.push_back(graph.degree(i));
  return json{{"delta_actual", to_string(delta_actual)}, {"m", graph.size()}, {"degrees", deg},
              {"radical_calls", radical_calls}, {"graph", graph.to_json()}};
}

PsgResult verify_psg(const Configuration& config, const PsgOptions& opt) {
  config.validate();
  const std::size_t m = config.size();
  PsgResult out;
  out.graph = NeighborGraph(m);
  if (m == 0) return out;

  std::vector<Vec<Rational>> cv;
  for (const auto& Q : config.forms) cv.push_back(Q.coeff_vector());
  const SpecialLines planes = special_lines(PointSet::make(QuadForm::coeff_dim(config.n), cv), SgMode::Span);

  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a + 1; b < m; ++b) {
      const QuadForm& A = config[a];
      const QuadForm& B = config[b];
      PairInfo& p = out.graph.pair(a, b);
      std::vector<char> seen(m, 0);
      seen[a] = seen[b] = 1;
      if (int L = planes.line_of[a][b]; L >= 0)
        for (std::size_t c : planes.lines[static_cast<std::size_t>(L)])
          if (!seen[c]) {
            seen[c] = 1;
            p.span_witnesses.push_back(c);
          }
      p.witnesses = p.span_witnesses;
      p.case_ii = !squares_in_pencil(A, B).roots.empty();
      CaseIIIResult c3 = case_iii_decide(A, B, opt.radical.budget);
      if (c3.decision == Decision::Undecided)
        throw ResourceExhausted("verify_psg: case (iii) undecided for pair (" + std::to_string(a) + ", " +
                                std::to_string(b) + ")");
      p.case_iii = c3.decision == Decision::Yes;

      if (opt.exhaustive || p.case_ii || p.case_iii) {
        // in case (iii) without a square every third vanishes on Z(U), so lies in <U>
        const bool ideal_filter = !opt.exhaustive && !p.case_ii && c3.witness.has_value();
        for (std::size_t c = 0; c < m; ++c) {
          if (seen[c]) continue;
          if (ideal_filter && !in_ideal(config[c], *c3.witness)) continue;
          ++out.radical_calls;
          RadicalResult r = radical_membership(config[c], A, B, opt.radical);
          if (r.decision == Decision::Undecided)
            throw ResourceExhausted("verify_psg: membership of member " + std::to_string(c) + " in rad<" +
                                    std::to_string(a) + ", " + std::to_string(b) + "> undecided");
          if (r.decision == Decision::Yes) p.witnesses.push_back(c);
        }
      }
      std::sort(p.witnesses.begin(), p.witnesses.end());
      p.psg = !p.witnesses.empty();
      p.case_i = !p.span_witnesses.empty();
    }

  std::size_t dmin = m;
  for (std::size_t i = 0; i < m; ++i) dmin = std::min(dmin, out.graph.degree(i));
  out.delta_actual = Rational(static_cast<long>(dmin)) / static_cast<long>(m);
  return out;
}

}  // namespace qsg
