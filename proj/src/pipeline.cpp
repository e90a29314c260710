#include "qsg/pipeline.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "qsg/io.hpp"
#include "qsg/pencil.hpp"

namespace qsg {

namespace {

// count >= frac * m, exactly
bool reaches(std::size_t count, const Rational& frac, std::size_t m) { return Rational(count) >= frac * Rational(m); }

Rational ceil_rational(const Rational& q) {
  mpz_class c;
  mpz_cdiv_q(c.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return Rational(c);
}

// Q restricted to {V = 0} as a coefficient vector, with the kernel basis computed once.
class Restrictor {
 public:
  explicit Restrictor(const Subspace& V) {
    auto basis = V.annihilator_basis();
    k_ = basis.size();
    B_ = QMatrix(V.ambient(), k_);
    for (std::size_t c = 0; c < k_; ++c)
      for (std::size_t r = 0; r < V.ambient(); ++r) B_(r, c) = basis[c][r];
  }
  Vec<Rational> operator()(const QuadForm& Q) const {
    if (k_ == 0) return {};
    return Q.substitute(B_).coeff_vector();
  }
  std::size_t dim() const { return QuadForm::coeff_dim(k_); }

 private:
  std::size_t k_ = 0;
  QMatrix B_;
};

// Membership oracles for one (J, V).
class Cover {
 public:
  Cover(const Configuration& c, const std::vector<std::size_t>& J, const Subspace& V)
      : V_(V), R_(V), ring_(c.n), ideal_(R_.dim()) {
    ring_.add_ring2(V);
    for (std::size_t j : J) {
      ring_.add(c[j]);
      ideal_.add(R_(c[j]));
    }
  }
  bool in_ring(const QuadForm& Q) const { return in_ring2(Q, V_); }
  bool in_ideal(const QuadForm& Q) const { return is_zero_vec(R_(Q)); }
  bool in_J_ring(const QuadForm& Q) const { return ring_.contains(Q); }
  bool in_J_ideal(const QuadForm& Q) const { return ideal_.contains(R_(Q)); }

 private:
  Subspace V_;
  Restrictor R_;
  QuadSpan ring_;
  SpanBuilder<Rational> ideal_;
};

enum Label { kCV = 0, kCideal = 1, kJV = 2, kJideal = 3, kUncovered = 4 };

std::vector<int> labels(const Configuration& c, const std::vector<std::size_t>& J, const Subspace& V) {
  const Cover cov(c, J, V);
  std::vector<int> lab(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    const QuadForm& Q = c[i];
    if (cov.in_ring(Q))
      lab[i] = kCV;
    else if (cov.in_ideal(Q))
      lab[i] = kCideal;
    else if (cov.in_J_ring(Q))
      lab[i] = kJV;
    else if (cov.in_J_ideal(Q))
      lab[i] = kJideal;
    else
      lab[i] = kUncovered;
  }
  return lab;
}

FourSets sets_from(const std::vector<int>& lab) {
  FourSets s;
  for (std::size_t i = 0; i < lab.size(); ++i) {
    switch (lab[i]) {
      case kCV: s.C_V.push_back(i); break;
      case kCideal: s.C_ideal.push_back(i); break;
      case kJV: s.J_V.push_back(i); break;
      case kJideal: s.J_ideal.push_back(i); break;
      default: s.uncovered.push_back(i);
    }
  }
  return s;
}

bool is_J(int l) { return l == kJV || l == kJideal; }
bool is_C(int l) { return l == kCV || l == kCideal; }

std::size_t count_in(const std::vector<std::size_t>& xs, const std::vector<char>& mask) {
  std::size_t k = 0;
  for (std::size_t x : xs) k += mask[x] ? 1 : 0;
  return k;
}

bool contains_sorted(const std::vector<std::size_t>& xs, std::size_t x) {
  return std::binary_search(xs.begin(), xs.end(), x);
}

std::vector<Vec<Rational>> coeff_vectors(const Configuration& c, const std::vector<std::size_t>& idx) {
  std::vector<Vec<Rational>> out;
  for (std::size_t i : idx) out.push_back(c[i].coeff_vector());
  return out;
}

Subspace minimal_space_of(const Configuration& c, const std::vector<std::size_t>& idx) {
  Subspace S(c.n);
  for (std::size_t i : idx) S = S.sum(c[i].minimal_space());
  return S;
}

// P = a Q + (square with direction v)
struct SquareRep {
  Scalar a;
  Vec<Scalar> v;
};

std::vector<SquareRep> square_reps(const QuadForm& P, const QuadForm& Q) {
  std::vector<SquareRep> out, irrational;
  for (const auto& r : squares_in_pencil(P, Q).roots) {
    if (r.at_infinity() || r.alpha.is_zero() || r.v.empty()) continue;
    SquareRep s{-(r.beta / r.alpha), r.v};
    (r.is_rational() ? out : irrational).push_back(s);
  }
  out.insert(out.end(), irrational.begin(), irrational.end());
  return out;
}

}  // namespace

void TraceLog::add(const std::string& stage, std::size_t step, json data) {
  if (!data.is_object()) data = json{{"value", data}};
  data["stage"] = stage;
  data["step"] = step;
  records_.push_back(std::move(data));
}

json Partition123::to_json() const { return json{{"Q1", Q1}, {"Q2", Q2}, {"Q3", Q3}}; }

json FourSets::to_json() const {
  return json{{"C_V", C_V}, {"C_ideal", C_ideal}, {"J_V", J_V}, {"J_ideal", J_ideal}, {"uncovered", uncovered}};
}

Partition123 partition_123(const NeighborGraph& g, const Rational& delta) {
  const std::size_t m = g.size();
  const Rational thr = delta / 100;
  Partition123 p;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      if (!g.edge(i, j)) continue;
      const PairInfo& e = g.pair(i, j);
      require(e.case_i || e.case_ii || e.case_iii, "structure-cases", "an edge satisfies none of the three cases",
              {{"pair", {i, j}}, {"witnesses", e.witnesses}});
    }
  for (std::size_t i = 0; i < m; ++i) {
    const bool in1 = reaches(g.neighbors(i, Case::I).size(), thr, m);
    const bool in2 = reaches(g.neighbors(i, Case::II).size(), thr, m);
    const bool in3 = reaches(g.neighbors(i, Case::III).size(), thr, m);
    if (in2) p.Q2.push_back(i);
    if (in3) p.Q3.push_back(i);
    if (in1 && !in2 && !in3) p.Q1.push_back(i);
    if (reaches(g.degree(i), delta, m))
      require(in1 || in2 || in3, "partition-coverage", "a member with delta m neighbors fell in no part",
              {{"member", i}, {"degree", g.degree(i)}});
  }
  return p;
}

Q2Reduction reduce_q2(const Configuration& c, const NeighborGraph& g, const std::vector<std::size_t>& Q2,
                      const Rational& delta, TraceLog* trace) {
  const std::size_t m = c.size(), n = c.n;
  const Rational thr = delta / 100;
  Q2Reduction out;
  out.V = Subspace(n);
  std::vector<std::vector<std::size_t>> gam(m);
  for (std::size_t q : Q2) {
    gam[q] = g.neighbors(q, Case::II);
    if (!reaches(gam[q].size(), thr, m))
      throw PreconditionError("reduce_q2: member " + std::to_string(q) + " has too few case-(ii) neighbors");
  }

  // I: maximal subset in which each member has at most one neighbor shared with two other members
  std::vector<std::size_t> cnt(m, 0);
  auto violates = [&](std::size_t X, const std::vector<std::size_t>& cn) {
    std::size_t heavy = 0;
    for (std::size_t P : gam[X]) heavy += cn[P] >= 3 ? 1 : 0;
    return heavy > 1;
  };
  for (std::size_t q : Q2) {
    std::vector<std::size_t> trial = cnt;
    for (std::size_t P : gam[q]) ++trial[P];
    bool ok = !violates(q, trial);
    for (std::size_t X : out.I_initial)
      if (ok && violates(X, trial)) ok = false;
    if (!ok) continue;
    out.I_initial.push_back(q);
    cnt = std::move(trial);
  }

  // bucket replay
  std::vector<int> bucket(m, 0);
  for (std::size_t step = 0; step < out.I_initial.size(); ++step) {
    const std::size_t q = out.I_initial[step];
    std::size_t moved = 0;
    for (std::size_t P : gam[q])
      if (bucket[P] < 3) {
        ++bucket[P];
        ++moved;
      }
    require(moved + 1 >= gam[q].size(), "q2-bucket-move", "more than one neighbor already sat in the top bucket",
            {{"member", q}, {"neighbors", gam[q].size()}, {"moved", moved}});
    if (trace) trace->add("reduce_q2/bucket", step, {{"member", q}, {"moved", moved}});
  }
  require(Rational(out.I_initial.size()) * delta < 600, "q2-I-size", "|I| >= 600/delta",
          {{"I", out.I_initial.size()}, {"delta", to_string(delta)}});

  // the pairwise spaces V_{i,j}
  const auto& I = out.I_initial;
  Subspace Vp(n);
  for (std::size_t a = 0; a < I.size(); ++a)
    for (std::size_t b = a + 1; b < I.size(); ++b) {
      std::vector<std::size_t> common;
      std::set_intersection(gam[I[a]].begin(), gam[I[a]].end(), gam[I[b]].begin(), gam[I[b]].end(),
                            std::back_inserter(common));
      if (common.empty()) continue;
      ++out.pairs;
      struct Rep {
        SquareRep ri, rj;
      };
      std::vector<Rep> reps;
      for (std::size_t P : common) {
        auto ri = square_reps(c[P], c[I[a]]), rj = square_reps(c[P], c[I[b]]);
        require(!ri.empty() && !rj.empty(), "q2-square-rep", "a case-(ii) neighbor has no square representation",
                {{"P", P}, {"Qi", I[a]}, {"Qj", I[b]}});
        reps.push_back({ri.front(), rj.front()});
      }
      Subspace Vij(n);
      bool fallback = false;
      std::string branch;
      try {
        std::vector<Vec<Scalar>> gens{reps[0].ri.v, reps[0].rj.v};
        const Scalar beta0 = reps[0].rj.a / reps[0].ri.a;
        branch = "single-beta";
        for (std::size_t k = 1; k < reps.size(); ++k)
          if (reps[k].rj.a / reps[k].ri.a != beta0) {
            gens.push_back(reps[k].ri.v);
            gens.push_back(reps[k].rj.v);
            branch = "two-beta";
            break;
          }
        const ExtSubspace E = ExtSubspace::span(n, gens);
        for (std::size_t k = 0; k < reps.size(); ++k)
          require(E.contains(reps[k].ri.v) && E.contains(reps[k].rj.v), "q2-pair-span",
                  "a shared neighbor's square lies outside V_ij",
                  {{"P", common[k]}, {"Qi", I[a]}, {"Qj", I[b]}, {"branch", branch}});
        Vij = rational_closure(n, gens);
        const bool rational = std::all_of(gens.begin(), gens.end(), [](const Vec<Scalar>& v) {
          return std::all_of(v.begin(), v.end(), [](const Scalar& x) { return x.is_rational(); });
        });
        require(Vij.dim() <= (rational ? 4u : 8u), "q2-pair-dim", "V_ij is too large",
                {{"dim", Vij.dim()}, {"Qi", I[a]}, {"Qj", I[b]}, {"branch", branch}});
      } catch (const ExtensionConflict&) {
        // squares over different quadratic fields: use every direction
        fallback = true;
        ++out.extension_fallbacks;
        std::vector<Subspace> parts;
        for (const auto& r : reps) {
          Vij = Vij.sum(rational_closure(n, {r.ri.v}));
          Vij = Vij.sum(rational_closure(n, {r.rj.v}));
        }
        require(Vij.dim() <= 16, "q2-pair-dim", "V_ij is too large", {{"dim", Vij.dim()}, {"fallback", true}});
      }
      Vp = Vp.sum(Vij);
      if (trace)
        trace->add("reduce_q2/pair", out.pairs - 1,
                   {{"Qi", I[a]}, {"Qj", I[b]}, {"common", common.size()}, {"branch", branch},
                    {"dim_Vij", Vij.dim()}, {"extension_fallback", fallback}, {"dim_V", Vp.dim()}});
    }
  out.dim_V_pairs = Vp.dim();

  out.I = out.I_initial;
  CleanupReport rep = proximity_cleanup(c, out.I, Vp, Proximity::ProductModRing, true, "reduce_q2", trace);
  out.cleanup_steps = rep.steps;
  require(Vp.dim() <= out.dim_V_pairs + 4 * rep.grown, "q2-cleanup-dim", "cleanup grew V by more than 4 per step",
          {{"before", out.dim_V_pairs}, {"after", Vp.dim()}, {"steps", rep.grown}});
  out.V = Vp;

  QuadSpan S(n);
  S.add_ring2(out.V);
  for (std::size_t i : out.I) S.add(c[i]);
  for (std::size_t q : Q2)
    require(S.contains(c[q]), "q2-cover", "a member of Q2 is outside span(I, C[V']_2)",
            {{"member", q}, {"I", out.I}, {"dim_V", out.V.dim()}});
  return out;
}

Q3Reduction reduce_q3(const Configuration& c, const NeighborGraph& g, const std::vector<std::size_t>& Q3,
                      const Rational& delta, TraceLog* trace) {
  const std::size_t m = c.size(), n = c.n;
  Q3Reduction out;
  out.V = Subspace(n);
  for (std::size_t q : Q3)
    if (!reaches(g.neighbors(q, Case::III).size(), delta / 100, m))
      throw PreconditionError("reduce_q3: member " + std::to_string(q) + " has too few case-(iii) neighbors");
  for (;;) {
    std::size_t pick = m;
    for (std::size_t q : Q3)
      if (!in_ideal(c[q], out.V)) {
        pick = q;
        break;
      }
    if (pick == m) break;
    const Subspace MS = c[pick].minimal_space();
    require(MS.dim() <= 4, "q3-ms-dim", "a case-(iii) member has a minimal space above 4",
            {{"member", pick}, {"dim", MS.dim()}});
    out.V = out.V.sum(MS);
    out.chosen.push_back(pick);
    if (trace) trace->add("reduce_q3", out.chosen.size() - 1, {{"member", pick}, {"dim_V", out.V.dim()}});
  }
  for (std::size_t q : out.chosen) {
    const Subspace Mq = c[q].minimal_space();
    for (std::size_t P : g.neighbors(q, Case::III)) {
      const Subspace Mp = c[P].minimal_space();
      require(Mp.dim() <= 4 && Mq.intersection(Mp).dim() >= 2, "q3-ms-intersection",
              "a case-(iii) edge with small minimal-space overlap",
              {{"Q", q}, {"P", P}, {"dim_P", Mp.dim()}, {"dim_cap", Mq.intersection(Mp).dim()}});
    }
  }
  for (std::size_t P = 0; P < m; ++P) {
    std::size_t k = 0;
    for (std::size_t q : out.chosen) k += g.edge(P, q, Case::III) ? 1 : 0;
    require(k <= 3, "claim-3-case3", "a member shares case-(iii) edges with four chosen members",
            {{"P", P}, {"count", k}});
  }
  require(Rational(out.chosen.size()) * delta <= 300, "q3-steps", "more than 300/delta steps",
          {{"steps", out.chosen.size()}});
  require(Rational(out.V.dim()) * delta <= 1200, "q3-dim", "dim V'' > 1200/delta", {{"dim", out.V.dim()}});
  return out;
}

IdealCleanupReport ideal_cleanup(const Configuration& c, const NeighborGraph& g, std::vector<std::size_t>& J,
                                 Subspace& V, const std::string& stage, TraceLog* trace) {
  IdealCleanupReport rep;
  const std::size_t n = c.n;
  auto grow = [&](const Subspace& add, const char* kind, json rec, std::size_t cap) {
    const std::size_t before = V.dim();
    V = V.sum(add);
    require(V.dim() > before, "cleanup-progress", "an ideal repair did not grow V",
            {{"stage", stage}, {"kind", kind}, {"dim_V", before}});
    require(V.dim() - before <= cap, "cleanup-growth", "an ideal repair grew V past its cap",
            {{"stage", stage}, {"kind", kind}, {"growth", V.dim() - before}, {"cap", cap}});
    rep.growth_cap += cap;
    ++rep.grown;
    rec["kind"] = kind;
    rec["dim_V_before"] = before;
    rec["dim_V"] = V.dim();
    if (trace) trace->add(stage + "/ideal-cleanup", rep.steps, rec);
    ++rep.steps;
  };

  for (;;) {
    const std::vector<int> lab = labels(c, J, V);
    // (a) members of the J-sets that are within rank 2 of <V>
    bool done = false;
    for (std::size_t i = 0; i < c.size() && !done; ++i) {
      if (!is_J(lab[i]) || corner_rank(c[i], V) > 4) continue;
      grow(ideal_absorber(c[i], V), "low-corner", {{"member", i}}, 4);
      done = true;
    }
    if (done) continue;
    // (b) squares on case-(ii) edges leaving J_ideal
    for (std::size_t i = 0; i < c.size() && !done; ++i) {
      if (lab[i] != kJideal) continue;
      for (std::size_t j : g.neighbors(i, Case::II)) {
        if (!is_J(lab[j])) continue;
        for (const auto& r : squares_in_pencil(c[i], c[j]).roots) {
          if (r.v.empty()) continue;
          const Subspace L = rational_closure(n, {r.v});
          if (V.contains(L)) continue;
          grow(L, lab[j] == kJV ? "square-to-JV" : "square-in-J-ideal", {{"pair", {i, j}}}, 2);
          done = true;
          break;
        }
        if (done) break;
      }
    }
    if (done) continue;
    // (d) J dependent modulo <V>
    const Restrictor R(V);
    SpanBuilder<Rational> sb(R.dim());
    std::vector<Vec<Rational>> prev;
    std::vector<std::size_t> indep;
    for (std::size_t k = 0; k < J.size() && !done; ++k) {
      Vec<Rational> r = R(c[J[k]]);
      if (sb.add(r)) {
        prev.push_back(std::move(r));
        indep.push_back(J[k]);
        continue;
      }
      auto x = solve_in_row_space(prev, r);
      require(x.has_value(), "cleanup-dependency", "dependent J member has no decomposition", {{"member", J[k]}});
      QuadForm F = c[J[k]];
      for (std::size_t t = 0; t < indep.size(); ++t)
        if (!is_zero((*x)[t])) F = F - c[indep[t]] * (*x)[t];
      const std::size_t gone = J[k];
      if (!in_ring2(F, V)) grow(F.minimal_space(), "J-dependency", {{"removed_member", gone}}, V.dim());
      else if (trace) trace->add(stage + "/ideal-cleanup", rep.steps++, {{"kind", "J-redundant"}, {"removed_member", gone}});
      J.erase(J.begin() + static_cast<long>(k));
      ++rep.removed;
      done = true;
    }
    if (!done) break;
  }
  return rep;
}

std::vector<std::size_t> build_J(const Configuration& c, const NeighborGraph& g, const Partition123& parts,
                                 const std::vector<std::size_t>& I, Subspace& V, const Rational& delta,
                                 PipelineState* state, TraceLog* trace) {
  const std::size_t m = c.size(), n = c.n;
  {
    QuadSpan pre(n);
    pre.add_ring2(V);
    for (std::size_t i : I) pre.add(c[i]);
    for (std::size_t q : parts.Q2)
      require(pre.contains(c[q]), "j-pre-q2", "a member of Q2 is outside span(I, C[V]_2)", {{"member", q}});
    for (std::size_t q : parts.Q3)
      require(in_ideal(c[q], V), "j-pre-q3", "a member of Q3 is outside <V>", {{"member", q}});
  }
  std::vector<std::size_t> J = I;
  QuadSpan S(n);
  S.add_ring2(V);
  for (std::size_t j : J) S.add(c[j]);
  for (std::size_t i = 0; i < m; ++i)
    if (in_ideal(c[i], V)) S.add(c[i]);
  std::vector<char> inB(m, 0);
  auto refresh = [&] {
    std::size_t moved = 0;
    for (std::size_t i = 0; i < m; ++i)
      if (!inB[i] && S.contains(c[i])) {
        inB[i] = 1;
        ++moved;
      }
    return moved;
  };
  refresh();

  std::size_t admissions = 0;
  for (bool again = true; again;) {
    again = false;
    for (std::size_t P : parts.Q1) {
      if (inB[P]) continue;
      std::size_t partners = 0;
      for (std::size_t Q : g.neighbors(P, Case::I)) partners += inB[Q] ? 1 : 0;
      if (!(Rational(partners) * 300 >= delta * Rational(m))) continue;
      J.push_back(P);
      S.add(c[P]);
      const std::size_t moved = refresh();
      require(moved >= partners, "j-admission-move", "an admission moved fewer members than it had partners",
              {{"member", P}, {"partners", partners}, {"moved", moved}});
      if (trace) trace->add("build_J/admit", admissions, {{"member", P}, {"partners", partners}, {"moved", moved}});
      ++admissions;
      again = true;
      break;
    }
  }
  require(Rational(admissions) * delta <= 300, "j-admissions", "more than 300/delta admissions",
          {{"admissions", admissions}});

  std::vector<std::size_t> L;
  for (std::size_t i = 0; i < m; ++i)
    if (!inB[i]) L.push_back(i);
  std::vector<char> inL(m, 0);
  for (std::size_t i : L) inL[i] = 1;
  bool doubled_threshold = true;
  for (std::size_t P : L) {
    std::size_t gl = 0;
    for (std::size_t R : L) {
      if (R == P || !g.edge(P, R)) continue;
      const auto& w = g.pair(P, R).span_witnesses;
      if (count_in(w, inL) > 0) ++gl;
    }
    require(Rational(gl) * 300 > delta * Rational(m), "j-leftover-sg",
            "a leftover member has at most delta m / 300 leftover line partners", {{"member", P}, {"partners", gl}});
    if (!(Rational(gl) * 300 >= 2 * delta * Rational(m))) doubled_threshold = false;
  }
  Rational leftover_cap(0);
  std::size_t leftover_added = 0;
  if (!L.empty()) {
    const PointSet pts = PointSet::make(QuadForm::coeff_dim(n), coeff_vectors(c, L));
    const Rational sgd = L.size() >= 2 ? sg_delta(pts) : Rational(0);
    require(dsw_check(pts, sgd), "j-leftover-dsw", "the leftover set is too large for its SG fraction",
            {{"size", L.size()}, {"sg_delta", to_string(sgd)}});
    for (std::size_t P : L)
      if (S.add(c[P])) {
        J.push_back(P);
        ++leftover_added;
      }
    leftover_cap = sgd > 0 ? 12 / sgd + 1 : Rational(L.size());
    if (trace)
      trace->add("build_J/leftover", 0,
                 {{"size", L.size()}, {"added", leftover_added}, {"sg_delta", to_string(sgd)},
                  {"doubled_threshold_holds", doubled_threshold}});
  }

  IdealCleanupReport clean = ideal_cleanup(c, g, J, V, "build_J", trace);
  {
    const Cover cov(c, J, V);
    for (std::size_t i = 0; i < m; ++i)
      require(cov.in_J_ideal(c[i]), "j-cover", "a member is outside span(J, <V>)", {{"member", i}});
  }
  if (state) {
    state->J_bound += ceil_rational(Rational(300) / delta) + leftover_cap;
    state->V_bound += Rational(clean.growth_cap);
    state->stages["build_J"] = {{"admissions", admissions},
                                {"leftover", L.size()},
                                {"leftover_added", leftover_added},
                                {"leftover_doubled_threshold", doubled_threshold},
                                {"cleanup_steps", clean.steps},
                                {"cleanup_removed", clean.removed},
                                {"J", J.size()},
                                {"dim_V", V.dim()}};
  }
  return J;
}

FourSets partition_four(const Configuration& c, const NeighborGraph& g, const std::vector<std::size_t>& J,
                        const Subspace& V, bool check_claims, TraceLog* trace) {
  const std::vector<int> lab = labels(c, J, V);
  FourSets s = sets_from(lab);
  require(s.uncovered.empty(), "partition-cover", "members outside span(J, <V>)", {{"uncovered", s.uncovered}});
  if (trace)
    trace->add("partition_four", 0,
               {{"C_V", s.C_V.size()}, {"C_ideal", s.C_ideal.size()}, {"J_V", s.J_V.size()},
                {"J_ideal", s.J_ideal.size()}, {"dim_V", V.dim()}, {"J", J.size()}});
  if (!check_claims) return s;
  const std::size_t m = c.size();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      if (!g.edge(i, j)) continue;
      const bool item1 = (is_C(lab[i]) && is_J(lab[j])) || (is_J(lab[i]) && is_C(lab[j]));
      const bool item2 = (lab[i] == kJideal) != (lab[j] == kJideal);
      if (!item1 && !item2) continue;
      const PairInfo& e = g.pair(i, j);
      require(e.case_i && !e.case_ii && !e.case_iii, "obs-cross-case-1", "a cross edge is not purely case (i)",
              {{"pair", {i, j}}, {"labels", {lab[i], lab[j]}}, {"cases", {e.case_i, e.case_ii, e.case_iii}}});
    }
  // every witness of (P, Q1) of the required class is claimed by no other partner in the class
  auto unique_witness = [&](std::size_t P, const std::vector<std::size_t>& partners, bool span_only,
                            const std::vector<int>& target, const char* claim) {
    std::map<std::size_t, std::size_t> owner;
    for (std::size_t Q1 : partners) {
      const PairInfo& e = g.pair(P, Q1);
      const auto& w = span_only ? e.span_witnesses : e.witnesses;
      bool found = false;
      for (std::size_t W : w) {
        if (std::find(target.begin(), target.end(), lab[W]) == target.end()) continue;
        found = true;
        auto [it, fresh] = owner.emplace(W, Q1);
        require(fresh, claim, "a third member is shared by two partners",
                {{"P", P}, {"third", W}, {"partners", {it->second, Q1}}});
      }
      require(found, claim, "no third member of the required class", {{"P", P}, {"Q1", Q1}, {"witnesses", w}});
    }
  };
  for (std::size_t P : s.C_ideal) {
    std::vector<std::size_t> jv, cv;
    for (std::size_t Q : g.neighbors(P)) {
      if (lab[Q] == kJV) jv.push_back(Q);
      if (lab[Q] == kCV) cv.push_back(Q);
    }
    unique_witness(P, jv, true, {kJideal}, "c-unique-span");
    unique_witness(P, cv, false, {kCideal}, "c-unique-radical");
  }
  for (std::size_t P : s.J_ideal) {
    std::vector<std::size_t> part;
    for (std::size_t Q : g.neighbors(P))
      if (lab[Q] == kJV || lab[Q] == kCV) part.push_back(Q);
    unique_witness(P, part, true, {kJideal, kCideal}, "j-unique");
  }
  return s;
}

void decrease_C_ideal(const Configuration& c, const NeighborGraph& g, PipelineState& s, const Rational& delta,
                      std::mt19937_64& rng, TraceLog* trace) {
  const std::size_t m = c.size(), n = c.n;
  const FourSets& sets = s.sets;
  if (!(Rational(sets.C_ideal.size()) * 10 > delta * Rational(m))) return;
  const std::size_t Delta = s.V.dim();
  std::vector<char> inJ(m, 0), inCV(m, 0);
  for (std::size_t i : sets.J_V) inJ[i] = 1;
  for (std::size_t i : sets.J_ideal) inJ[i] = 1;
  for (std::size_t i : sets.C_V) inCV[i] = 1;
  std::vector<std::size_t> B1, B2;
  for (std::size_t P : sets.C_ideal)
    (reaches(count_in(g.neighbors(P), inJ), delta / 10, m) ? B1 : B2).push_back(P);
  json rec{{"B1", B1.size()}, {"B2", B2.size()}, {"dim_V", Delta}};

  Subspace add(n);
  Rational cap(Delta);
  if (!B2.empty()) {
    std::vector<QuadForm> forms;
    for (std::size_t P : B2) forms.push_back(c[P]);
    std::vector<Vec<Rational>> ells;
    auto accept = [&](const ProjectionMap& T) {
      GenericityReport r;
      ells.clear();
      try {
        for (const auto& F : forms) ells.push_back(z_cofactor(T, project(T, F)));
      } catch (const GenericityViolation& e) {
        r.violations.push_back(e.what());
        return r;
      }
      Vec<Rational> zf(T.out_vars(), Rational(0));
      zf[T.z()] = 1;
      for (std::size_t a = 0; a < ells.size(); ++a) {
        if (proportional(ells[a], zf)) r.violations.push_back("image proportional to z");
        for (std::size_t b = a + 1; b < ells.size(); ++b)
          if (proportional(ells[a], ells[b])) r.violations.push_back("images proportional");
      }
      return r;
    };
    const ProjectionMap T = sample_projection(s.V, rng, accept);
    accept(T);
    const std::size_t N = T.out_vars();
    Vec<Rational> zf(N, Rational(0));
    zf[T.z()] = 1;
    std::vector<Vec<Rational>> heavy{zf};
    for (std::size_t k = 0; k < B2.size(); ++k)
      if (Rational(count_in(g.neighbors(B2[k]), inCV)) * 10 > delta * Rational(m)) heavy.push_back(ells[k]);
    const Subspace W = Subspace::span(N, heavy);
    std::vector<Vec<Rational>> Kp, Wp{zf};
    for (const auto& l : ells) (W.contains(l) ? Wp : Kp).push_back(l);
    rec["W_dim"] = W.dim();
    rec["W_dim_within_20_over_delta"] = Rational(W.dim() - 1) * delta <= 20;
    if (!Kp.empty()) {
      std::vector<Vec<Rational>> all = Kp;
      all.insert(all.end(), Wp.begin(), Wp.end());
      const auto nb = sg_neighbors(PointSet::make(N, all));
      std::size_t lo = all.size();
      for (std::size_t k = 0; k < Kp.size(); ++k) lo = std::min(lo, nb[k].size());
      const Rational drel = Rational(lo) / Rational(all.size());
      rec["K"] = Kp.size();
      rec["delta_rel"] = to_string(drel);
      if (drel > 0) {
        const RobustModResult rr = robust_sg_mod_subspace(PointSet::make(N, Kp), W, PointSet::make(N, Wp), drel);
        rec["robust"] = rr.to_json();
      }
    }
    const LiftReport lift = lift_bound(forms, s.V, rng);
    require(lift.ok(), "z-map-lift", "dim MS(B2) exceeds (sigma + 1) dim V", lift.to_json());
    rec["lift"] = lift.to_json();
    const Subspace MS = minimal_space_of(c, B2);
    add = add.sum(MS);
    cap += Rational((lift.sigma + 1) * Delta);
  }

  std::vector<std::size_t> cur = B1;
  std::size_t round = 0;
  json rounds = json::array();
  while (Rational(cur.size()) * 10 > delta * Rational(m)) {
    std::vector<std::size_t> members = cur;
    for (std::size_t i = 0; i < m; ++i)
      if (inJ[i]) members.push_back(i);
    const std::size_t N = QuadForm::coeff_dim(n);
    std::vector<Vec<Rational>> raw = coeff_vectors(c, members), chart;
    Vec<Rational> h;
    for (int attempt = 0;; ++attempt) {
      if (attempt > 20) throw GenericityExhausted("no affine chart avoiding every point");
      h = sample_coefficients(rng, N);
      if (std::all_of(raw.begin(), raw.end(), [&](const Vec<Rational>& p) { return !is_zero(dot(h, p)); })) break;
    }
    for (const auto& p : raw) {
      const Rational inv = 1 / dot(h, p);
      Vec<Rational> q = p;
      for (auto& x : q) x *= inv;
      chart.push_back(std::move(q));
    }
    std::vector<std::size_t> bidx(cur.size());
    for (std::size_t k = 0; k < cur.size(); ++k) bidx[k] = k;
    CutResult cut;
    try {
      cut = fractional_cut(PointSet::make(N, chart), bidx, delta * delta / 100);
    } catch (const PreconditionError& e) {
      throw AssertionFailure("c-ideal-b1-edges", e.what(), {{"B1", cur.size()}, {"round", round}});
    }
    std::vector<std::size_t> taken;
    for (std::size_t k : cut.survivors)
      if (k < cur.size()) taken.push_back(cur[k]);
    require(!taken.empty(), "c-ideal-b1-progress", "a cut round extracted nothing", {{"round", round}});
    const std::size_t sdim = linear_dimension([&] {
      std::vector<QuadForm> f;
      for (std::size_t i : taken) f.push_back(c[i]);
      return f;
    }());
    add = add.sum(minimal_space_of(c, taken));
    cap += Rational(sdim * Delta);
    rounds.push_back({{"taken", taken.size()}, {"dim", sdim}, {"affine_dim", cut.affine_dim}});
    std::vector<std::size_t> rest;
    for (std::size_t i : cur)
      if (!std::binary_search(taken.begin(), taken.end(), i)) rest.push_back(i);
    cur = std::move(rest);
    ++round;
  }
  rec["b1_rounds"] = rounds;

  const Subspace newV = s.V.sum(add);
  require(newV.dim() > Delta, "c-ideal-growth", "shrinking C_ideal did not grow V", rec);
  require(Rational(newV.dim()) <= cap, "c-ideal-dim", "dim V' exceeds the assembled bound",
          {{"dim", newV.dim()}, {"bound", to_string(cap)}});
  s.V_bound += cap - Rational(Delta);
  s.V = newV;
  IdealCleanupReport clean = ideal_cleanup(c, g, s.J, s.V, "decrease_C_ideal", trace);
  s.V_bound += Rational(clean.growth_cap);
  s.ideal_clean = true;
  s.sets = partition_four(c, g, s.J, s.V, true, trace);
  rec["dim_V_after"] = s.V.dim();
  rec["C_ideal_after"] = s.sets.C_ideal.size();
  rec["C_ideal_within_delta_over_10"] = Rational(s.sets.C_ideal.size()) * 10 <= delta * Rational(m);
  if (trace) trace->add("decrease_C_ideal", s.iterations, rec);
}

void decrease_J_ideal(const Configuration& c, const NeighborGraph& g, PipelineState& s, const Rational& delta,
                      TraceLog* trace) {
  const std::size_t m = c.size(), n = c.n;
  const FourSets& sets = s.sets;
  if (sets.J_ideal.empty()) return;
  if (Rational(sets.C_ideal.size()) * 10 > delta * Rational(m))
    throw PreconditionError("decrease_J_ideal: |C_ideal| > delta m / 10");

  std::vector<std::size_t> T1, T1p;
  std::vector<std::vector<std::size_t>> g2(m);
  for (std::size_t q : sets.J_ideal) {
    g2[q] = g.neighbors(q, Case::II);
    if (reaches(g2[q].size(), delta / 10, m)) T1.push_back(q);
  }
  std::vector<char> used(m, 0);
  for (std::size_t q : T1) {
    if (count_in(g2[q], used) > 0) continue;
    T1p.push_back(q);
    for (std::size_t P : g2[q]) used[P] = 1;
  }
  require(Rational(T1p.size()) * delta <= 10, "j-ideal-T1-size", "more than 10/delta disjoint heavy members",
          {{"T1'", T1p.size()}});
  for (std::size_t q : T1) {
    if (contains_sorted(T1p, q)) continue;
    std::size_t rep = m;
    for (std::size_t r : T1p) {
      std::vector<std::size_t> cap;
      std::set_intersection(g2[q].begin(), g2[q].end(), g2[r].begin(), g2[r].end(), std::back_inserter(cap));
      if (!cap.empty()) {
        rep = r;
        break;
      }
    }
    QuadSpan sp(n);
    sp.add_ring2(s.V);
    if (rep < m) sp.add(c[rep]);
    require(rep < m && sp.contains(c[q]), "j-ideal-merge",
            "a heavy member is outside span(its representative, C[V]_2)", {{"member", q}, {"representative", rep}});
  }

  QuadSpan W(n);
  W.add_ring2(s.V);
  for (std::size_t j : s.J) W.add(c[j]);
  for (std::size_t q : T1p) W.add(c[q]);
  std::vector<std::size_t> T2, Wmem;
  for (std::size_t i = 0; i < m; ++i) {
    if (W.contains(c[i]))
      Wmem.push_back(i);
    else if (std::binary_search(sets.J_ideal.begin(), sets.J_ideal.end(), i) && !contains_sorted(T1, i))
      T2.push_back(i);
  }
  json rec{{"T1", T1.size()}, {"T1'", T1p.size()}, {"T2", T2.size()}};
  if (!T2.empty()) {
    std::vector<std::size_t> Tm = T2;
    Tm.insert(Tm.end(), Wmem.begin(), Wmem.end());
    const std::size_t outside = m - Tm.size();
    const std::size_t N = QuadForm::coeff_dim(n);
    const auto nb = sg_neighbors(PointSet::make(N, coeff_vectors(c, Tm)));
    std::size_t lo = Tm.size();
    for (std::size_t k = 0; k < T2.size(); ++k) {
      const std::size_t q = T2[k];
      const std::size_t c1 = g.neighbors(q, Case::I).size();
      require(g.neighbors(q, Case::III).empty(), "j-ideal-no-case3", "a light J_ideal member has a case-(iii) edge",
              {{"member", q}});
      require(Rational(c1) * 10 >= 9 * delta * Rational(m), "j-ideal-case1-count",
              "a light J_ideal member has fewer than 9 delta m / 10 case-(i) neighbors", {{"member", q}, {"count", c1}});
      require(nb[k].size() + 2 * outside >= c1, "edge-removal", "removing members lost more than two partners each",
              {{"member", q}, {"linear", nb[k].size()}, {"case_i", c1}, {"removed", outside}});
      require(Rational(nb[k].size()) * 10 >= 7 * delta * Rational(m), "j-ideal-linear-count",
              "a light J_ideal member keeps fewer than 7 delta m / 10 line partners",
              {{"member", q}, {"linear", nb[k].size()}});
      lo = std::min(lo, nb[k].size());
    }
    const Rational dp = Rational(lo) / Rational(Tm.size());
    std::vector<Vec<Rational>> wgens;
    for (std::size_t i = 0; i < s.V.dim(); ++i)
      for (std::size_t j = i; j < s.V.dim(); ++j)
        wgens.push_back(QuadForm::product(s.V.basis().row(i), s.V.basis().row(j)).coeff_vector());
    for (std::size_t j : s.J) wgens.push_back(c[j].coeff_vector());
    for (std::size_t q : T1p) wgens.push_back(c[q].coeff_vector());
    const RobustModResult rr = robust_sg_mod_subspace(PointSet::make(N, coeff_vectors(c, T2)),
                                                      Subspace::span(N, wgens),
                                                      PointSet::make(N, coeff_vectors(c, Wmem)), dp);
    rec["delta_rel"] = to_string(dp);
    rec["robust"] = rr.to_json();
    s.J_bound += rr.dim_bound;
  }
  s.J_bound += ceil_rational(Rational(10) / delta);

  QuadSpan JS(n);
  JS.add_ring2(s.V);
  for (std::size_t j : s.J) JS.add(c[j]);
  std::vector<std::size_t> order = T1p;
  for (std::size_t q : sets.J_ideal)
    if (!contains_sorted(T1p, q)) order.push_back(q);
  std::size_t added = 0;
  for (std::size_t q : order)
    if (JS.add(c[q])) {
      s.J.push_back(q);
      ++added;
    }
  rec["added"] = added;
  IdealCleanupReport clean = ideal_cleanup(c, g, s.J, s.V, "decrease_J_ideal", trace);
  s.V_bound += Rational(clean.growth_cap);
  s.ideal_clean = true;
  s.sets = partition_four(c, g, s.J, s.V, true, trace);
  rec["J"] = s.J.size();
  rec["dim_V_after"] = s.V.dim();
  rec["J_ideal_after"] = s.sets.J_ideal.size();
  if (trace) trace->add("decrease_J_ideal", s.iterations, rec);
}

bool Certificate::validate(const Configuration& c, std::string* why) const {
  auto fail = [&](const std::string& w) {
    if (why) *why = w;
    return false;
  };
  if (V.ambient() != c.n) return fail("V has the wrong ambient dimension");
  QuadSpan S(c.n);
  S.add_ring2(V);
  for (std::size_t j : J) {
    if (j >= c.size()) return fail("J index out of range");
    S.add(c[j]);
  }
  for (std::size_t i = 0; i < c.size(); ++i)
    if (!S.contains(c[i])) return fail("member " + std::to_string(i) + " is outside span(J, C[V]_2)");
  const std::size_t d = V.dim();
  if (bound != J.size() + d * (d + 1) / 2) return fail("bound does not match |J| + dim V (dim V + 1) / 2");
  if (independent_dim != linear_dimension(c.forms)) return fail("independent dimension is stale");
  if (independent_dim > bound) return fail("independent dimension exceeds the bound");
  if (Rational(bound) > assembled_bound) return fail("bound exceeds the assembled constant");
  return true;
}

json Certificate::to_json() const {
  return json{{"status", "ok"},
              {"delta", to_string(delta)},
              {"J", J},
              {"V", subspace_to_json(V)},
              {"dim_V", V.dim()},
              {"bound", bound},
              {"independent_dim", independent_dim},
              {"assembled_bound", to_string(assembled_bound)},
              {"stages", stages},
              {"trace", trace}};
}

Certificate finalize(const Configuration& c, const NeighborGraph& g, PipelineState& s, const Rational& delta,
                     TraceLog* trace) {
  const std::size_t m = c.size();
  s.sets = partition_four(c, g, s.J, s.V, true, trace);
  const FourSets& sets = s.sets;
  if (!sets.C_ideal.empty() || !sets.J_ideal.empty()) {
    std::vector<char> cv(m, 0), ci(m, 0), jv(m, 0), ji(m, 0);
    for (std::size_t i : sets.C_V) cv[i] = 1;
    for (std::size_t i : sets.C_ideal) ci[i] = 1;
    for (std::size_t i : sets.J_V) jv[i] = 1;
    for (std::size_t i : sets.J_ideal) ji[i] = 1;
    json counts = json::array();
    for (const auto* part : {&sets.C_ideal, &sets.J_ideal})
      for (std::size_t P : *part) {
        const auto nb = g.neighbors(P);
        counts.push_back({{"member", P},
                          {"degree", nb.size()},
                          {"C_V", count_in(nb, cv)},
                          {"C_ideal", count_in(nb, ci)},
                          {"J_V", count_in(nb, jv)},
                          {"J_ideal", count_in(nb, ji)}});
      }
    throw AssertionFailure("c-j-empty", "C_ideal or J_ideal is nonempty at the end",
                           {{"sets", sets.to_json()}, {"counts", counts}, {"delta", to_string(delta)}});
  }
  Certificate cert;
  cert.J = s.J;
  cert.V = s.V;
  const std::size_t d = s.V.dim();
  cert.bound = s.J.size() + d * (d + 1) / 2;
  cert.independent_dim = linear_dimension(c.forms);
  cert.delta = delta;
  cert.assembled_bound = s.J_bound + s.V_bound * (s.V_bound + 1) / 2;
  cert.stages = s.stages;
  cert.stages["final"] = {{"iterations", s.iterations},
                          {"J_bound", to_string(s.J_bound)},
                          {"V_bound", to_string(s.V_bound)},
                          {"sets", sets.to_json()}};
  if (trace) cert.trace = trace->to_json();
  std::string why;
  require(cert.validate(c, &why), "certificate", why, {{"bound", cert.bound}, {"dim", cert.independent_dim}});
  return cert;
}

Certificate decompose(const Configuration& c, const Rational& delta, const DecomposeOptions& opt) {
  c.validate();
  const PsgResult psg = verify_psg(c, opt.psg);
  return decompose(c, psg, delta, opt);
}

Certificate decompose(const Configuration& c, const PsgResult& psg, const Rational& delta,
                      const DecomposeOptions& opt) {
  if (!(delta > 0) || delta > 1) throw PreconditionError("delta must lie in (0, 1]");
  if (psg.graph.size() != c.size()) throw PreconditionError("neighbor graph does not match the configuration");
  if (psg.delta_actual < delta)
    throw PreconditionError("configuration is " + to_string(psg.delta_actual) + "-PSG, below the requested " +
                            to_string(delta));
  const NeighborGraph& g = psg.graph;
  const std::size_t m = c.size(), n = c.n;
  std::mt19937_64 rng(opt.seed);
  TraceLog trace;
  PipelineState s;
  s.V = Subspace(n);
  auto state_json = [&] {
    return json{{"J", s.J}, {"V", subspace_to_json(s.V)}, {"seed", opt.seed}, {"delta", to_string(delta)},
                {"iterations", s.iterations}, {"trace", trace.to_json()}};
  };
  try {
    const Partition123 parts = partition_123(g, delta);
    trace.add("partition_123", 0, {{"Q1", parts.Q1.size()}, {"Q2", parts.Q2.size()}, {"Q3", parts.Q3.size()}});
    const Q2Reduction q2 = reduce_q2(c, g, parts.Q2, delta, &trace);
    const Q3Reduction q3 = reduce_q3(c, g, parts.Q3, delta, &trace);
    s.V = q2.V.sum(q3.V);
    s.J_bound = ceil_rational(Rational(600) / delta);
    s.V_bound = Rational(8 * q2.pairs + 4 * q2.cleanup_steps) + ceil_rational(Rational(1200) / delta);
    s.stages["partition_123"] = parts.to_json();
    s.stages["reduce_q2"] = {{"I_initial", q2.I_initial}, {"I", q2.I}, {"pairs", q2.pairs},
                             {"dim_V_pairs", q2.dim_V_pairs}, {"dim_V", q2.V.dim()},
                             {"cleanup_steps", q2.cleanup_steps}, {"extension_fallbacks", q2.extension_fallbacks}};
    s.stages["reduce_q3"] = {{"chosen", q3.chosen}, {"dim_V", q3.V.dim()}};
    s.J = build_J(c, g, parts, q2.I, s.V, delta, &s, &trace);
    s.sets = partition_four(c, g, s.J, s.V, true, &trace);

    auto potential = [&] {
      return (n - s.V.dim()) * (m + 1) + s.sets.J_ideal.size();
    };
    for (;;) {
      const bool c_large = Rational(s.sets.C_ideal.size()) * 10 > delta * Rational(m);
      if (!c_large && s.sets.J_ideal.empty()) break;
      if (s.iterations >= opt.max_iterations)
        throw ResourceExhausted("decompose: iteration cap of " + std::to_string(opt.max_iterations) + " reached");
      const std::size_t before = potential();
      if (c_large)
        decrease_C_ideal(c, g, s, delta, rng, &trace);
      else
        decrease_J_ideal(c, g, s, delta, &trace);
      const std::size_t after = potential();
      require(after < before, "monotone-progress", "an iteration did not decrease the potential",
              {{"before", before}, {"after", after}, {"iteration", s.iterations}});
      trace.add("driver", s.iterations, {{"potential", after}, {"dim_V", s.V.dim()}, {"J", s.J.size()}});
      ++s.iterations;
    }
    s.stages["scale"] = {{"description", "(1/delta)^16"},
                         {"value", to_string(Rational(mpz_class(1)) / [&] {
                            Rational p(1);
                            for (int i = 0; i < 16; ++i) p *= delta;
                            return p;
                          }())}};
    return finalize(c, g, s, delta, &trace);
  } catch (const AssertionFailure& e) {
    json d = e.detail();
    d["state"] = state_json();
    throw AssertionFailure(e.claim(), std::string(e.what()).substr(e.claim().size() + 2), d);
  }
}

}  // namespace qsg
