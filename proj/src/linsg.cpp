#include "qsg/linsg.hpp"

#include <map>
#include <set>

namespace qsg {

namespace {

json idx_json(const std::vector<std::size_t>& v) { return json(v); }

void check_delta(const Rational& delta) {
  if (sgn(delta) <= 0 || delta > 1) throw PreconditionError("delta must lie in (0, 1]");
}

std::size_t rank_of(const std::vector<Vec<Rational>>& rows, std::size_t n) {
  SpanBuilder<Rational> sb(n);
  for (const auto& r : rows) sb.add(r);
  return sb.dim();
}

}  // namespace

PointSet PointSet::make(std::size_t dim, const std::vector<Vec<Rational>>& pts, bool dedup, bool by_ratio) {
  PointSet s(dim);
  std::set<Vec<Rational>> exact, ratio;
  for (const auto& p : pts) {
    if (p.size() != dim) throw std::invalid_argument("point dimension mismatch");
    bool zero = is_zero_vec(p);
    Vec<Rational> key = zero ? p : normalize_leading(p);
    if (exact.count(p)) {
      if (dedup) continue;
      throw PreconditionError("duplicate point");
    }
    if (zero || ratio.count(key)) {
      if (dedup && by_ratio) continue;
      s.independent_ = false;
    }
    exact.insert(p);
    ratio.insert(key);
    s.pts_.push_back(p);
  }
  return s;
}

PointSet PointSet::subset(const std::vector<std::size_t>& idx) const {
  std::vector<Vec<Rational>> v;
  for (std::size_t i : idx) v.push_back(pts_.at(i));
  return make(dim_, v);
}

SpecialLines special_lines(const PointSet& pts, SgMode mode) {
  const std::size_t m = pts.size(), n = pts.dim();
  if (mode == SgMode::Span && !pts.pairwise_independent())
    throw PreconditionError("duplicate/proportional points in span mode");
  const std::size_t w = mode == SgMode::Span ? n : n + 1;
  auto lift = [&](std::size_t i) {
    if (mode == SgMode::Span) return pts[i];
    Vec<Rational> v(w);
    v[0] = 1;
    for (std::size_t k = 0; k < n; ++k) v[k + 1] = pts[i][k];
    return v;
  };
  std::map<Vec<Rational>, std::size_t> ids;
  std::vector<std::set<std::size_t>> members;
  std::vector<std::vector<std::size_t>> pair_line(m, std::vector<std::size_t>(m, 0));
  for (std::size_t i = 0; i < m; ++i) {
    Vec<Rational> a = lift(i);
    for (std::size_t j = i + 1; j < m; ++j) {
      Rref<Rational> rr = rref(Matrix<Rational>::from_rows({a, lift(j)}, w), false);
      Vec<Rational> key;
      key.reserve(2 * w);
      for (std::size_t r = 0; r < 2; ++r)
        for (std::size_t c = 0; c < w; ++c) key.push_back(rr.R(r, c));
      auto [it, fresh] = ids.emplace(std::move(key), members.size());
      if (fresh) members.emplace_back();
      members[it->second].insert(i);
      members[it->second].insert(j);
      pair_line[i][j] = pair_line[j][i] = it->second;
    }
  }
  SpecialLines out;
  std::vector<int> remap(members.size(), -1);
  for (std::size_t l = 0; l < members.size(); ++l)
    if (members[l].size() >= 3) {
      remap[l] = static_cast<int>(out.lines.size());
      out.lines.emplace_back(members[l].begin(), members[l].end());
    }
  out.line_of.assign(m, std::vector<int>(m, -1));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (i != j) out.line_of[i][j] = remap[pair_line[i][j]];
  return out;
}

std::vector<std::vector<std::size_t>> sg_neighbors(const PointSet& pts, SgMode mode) {
  SpecialLines sl = special_lines(pts, mode);
  std::vector<std::vector<std::size_t>> g(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < pts.size(); ++j)
      if (sl.line_of[i][j] >= 0) g[i].push_back(j);
  return g;
}

Rational sg_delta(const PointSet& pts, SgMode mode) {
  const std::size_t m = pts.size();
  if (m < 3) throw PreconditionError("sg_delta needs at least 3 points");
  auto g = sg_neighbors(pts, mode);
  std::size_t lo = m;
  for (const auto& gi : g) lo = std::min(lo, gi.size());
  return Rational(lo) / Rational(m - 1);
}

std::size_t sg_dimension(const PointSet& pts) { return rank_of(pts.points(), pts.dim()); }

std::size_t affine_dimension(const PointSet& pts) {
  if (pts.size() <= 1) return 0;
  std::vector<Vec<Rational>> d;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    Vec<Rational> v(pts.dim());
    for (std::size_t k = 0; k < pts.dim(); ++k) v[k] = pts[i][k] - pts[0][k];
    d.push_back(v);
  }
  return rank_of(d, pts.dim());
}

bool dsw_check(const PointSet& pts, const Rational& delta, SgMode mode) {
  check_delta(delta);
  if (pts.size() < 3 || sg_delta(pts, mode) < delta) return true;
  std::size_t d = mode == SgMode::Span ? sg_dimension(pts) : affine_dimension(pts);
  return Rational(d) <= 12 / delta + 1;
}

json RobustModResult::to_json() const {
  json st = json::array();
  for (const auto& s : steps)
    st.push_back({{"pivot", s.pivot}, {"w_neighbors", s.w_neighbors}, {"K_before", s.K_before}, {"moved", s.moved}});
  return {{"dim_W", dim_W},
          {"dim_W_final", dim_W_final},
          {"dim_K_final", dim_K_final},
          {"dim_T", dim_T},
          {"absorbed", idx_json(absorbed)},
          {"K_final", idx_json(K_final)},
          {"steps", st},
          {"step_bound", to_string(step_bound)},
          {"dim_bound", to_string(dim_bound)},
          {"dim_bound_check", dim_bound_check}};
}

RobustModResult robust_sg_mod_subspace(const PointSet& K, const Subspace& W, const PointSet& Wpoints,
                                       const Rational& delta) {
  check_delta(delta);
  const std::size_t n = K.dim(), k = K.size();
  if (W.ambient() != n || Wpoints.dim() != n) throw std::invalid_argument("ambient mismatch");
  std::vector<Vec<Rational>> all = K.points();
  for (const auto& w : Wpoints.points()) all.push_back(w);
  PointSet T = PointSet::make(n, all);
  if (!T.pairwise_independent()) throw PreconditionError("points of K and W must be pairwise independent");
  for (const auto& p : K.points())
    if (W.contains(p)) throw PreconditionError("K meets W");
  for (const auto& w : Wpoints.points())
    if (!W.contains(w)) throw PreconditionError("a W point lies outside W");
  const std::size_t t = T.size();
  const Rational tT(t);
  SpecialLines sl = special_lines(T, SgMode::Span);
  std::vector<std::vector<std::size_t>> gamma(t);
  for (std::size_t i = 0; i < t; ++i)
    for (std::size_t j = 0; j < t; ++j)
      if (sl.line_of[i][j] >= 0) gamma[i].push_back(j);
  for (std::size_t i = 0; i < k; ++i)
    if (Rational(gamma[i].size()) < delta * tT)
      throw PreconditionError("K point " + std::to_string(i) + " fails the relaxed neighbor count");

  RobustModResult res;
  res.dim_W = W.dim();
  res.step_bound = 10 / delta;
  res.dim_bound = (Rational(res.dim_W) + 10 / delta) + (15 / delta + 1);
  std::vector<bool> inW(t);
  for (std::size_t i = 0; i < t; ++i) inW[i] = i >= k;
  Subspace cur = W;
  const Rational thresh = delta * tT / 10;
  for (;;) {
    std::size_t pivot = t, wn = 0;
    for (std::size_t i = 0; i < k && pivot == t; ++i) {
      if (inW[i]) continue;
      std::size_t c = 0;
      for (std::size_t j : gamma[i]) c += inW[j];
      if (Rational(c) >= thresh) {
        pivot = i;
        wn = c;
      }
    }
    if (pivot == t) break;
    AbsorptionStep st;
    st.pivot = pivot;
    st.w_neighbors = wn;
    for (std::size_t i = 0; i < t; ++i) st.K_before += !inW[i];
    // each W-neighbor spans with the pivot a K point of its own
    std::set<std::size_t> thirds;
    std::map<int, std::size_t> w_per_line;
    for (std::size_t w : gamma[pivot]) {
      if (!inW[w]) continue;
      int l = sl.line_of[pivot][w];
      require(++w_per_line[l] == 1, "sg-mod-unique", "two W points on one special line through a K point",
              {{"pivot", pivot}, {"line", sl.lines[l]}});
      bool found = false;
      for (std::size_t q : sl.lines[l])
        if (q != pivot && q != w && !inW[q]) {
          thirds.insert(q);
          found = true;
        }
      require(found, "sg-mod-unique", "span of a K point and a W point has no third K point", {{"pivot", pivot}});
    }
    require(thirds.size() >= wn, "sg-mod-unique", "spanned K points are not distinct", {{"pivot", pivot}});
    cur = cur.add(T[pivot]);
    for (std::size_t i = 0; i < t; ++i)
      if (!inW[i] && cur.contains(T[i])) {
        inW[i] = true;
        ++st.moved;
      }
    require(st.moved >= wn + 1 && Rational(st.moved) >= delta * Rational(st.K_before) / 10, "sg-mod-progress",
            "an absorption moved fewer than 0.1 delta |K| points",
            {{"pivot", pivot}, {"moved", st.moved}, {"K_before", st.K_before}});
    res.absorbed.push_back(pivot);
    res.steps.push_back(st);
    require(Rational(res.steps.size()) <= res.step_bound, "sg-mod-steps", "absorption ran past 10/delta steps",
            {{"steps", res.steps.size()}});
  }
  res.W_final = cur;
  res.dim_W_final = cur.dim();
  require(Rational(res.dim_W_final) <= Rational(res.dim_W) + 10 / delta, "sg-mod-dimW",
          "dim W grew past r + 10/delta", {{"dim_W_final", res.dim_W_final}});
  for (std::size_t i = 0; i < k; ++i)
    if (!inW[i]) res.K_final.push_back(i);
  std::vector<bool> inK(t);
  for (std::size_t i : res.K_final) inK[i] = true;
  for (std::size_t p : res.K_final) {
    std::size_t good = 0;
    for (std::size_t q : gamma[p]) {
      if (!inK[q]) continue;
      for (std::size_t r : sl.lines[sl.line_of[p][q]])
        if (r != p && r != q && inK[r]) {
          ++good;
          break;
        }
    }
    require(Rational(good) >= delta * tT * Rational(4, 5), "sg-mod-restricted",
            "a remaining K point has fewer than 0.8 delta |T| neighbors inside K", {{"point", p}, {"count", good}});
  }
  std::vector<Vec<Rational>> kp;
  for (std::size_t i : res.K_final) kp.push_back(T[i]);
  res.dim_K_final = rank_of(kp, n);
  require(Rational(res.dim_K_final) <= 15 / delta + 1, "sg-mod-dimK", "remaining K spans more than 15/delta + 1",
          {{"dim_K_final", res.dim_K_final}});
  res.dim_T = sg_dimension(T);
  res.dim_bound_check = Rational(res.dim_T) <= res.dim_bound && res.dim_T <= res.dim_W_final + res.dim_K_final;
  require(res.dim_bound_check, "sg-mod-dimT", "dim span T exceeds (r + 10/delta) + (15/delta + 1)", res.to_json());
  return res;
}

json CutResult::to_json() const {
  json st = json::array();
  for (const auto& s : steps)
    st.push_back({{"removed", s.removed},
                  {"degree", s.degree},
                  {"avg_before", to_string(s.avg_before)},
                  {"avg_after", to_string(s.avg_after)}});
  return {{"survivors", idx_json(survivors)},
          {"remaining", idx_json(remaining)},
          {"steps", st},
          {"cross_pairs", cross_pairs},
          {"affine_dim", affine_dim},
          {"observed_fraction", to_string(observed_fraction)},
          {"dim_check", dim_check}};
}

CutResult fractional_cut(const PointSet& pts, const std::vector<std::size_t>& B, const Rational& delta) {
  check_delta(delta);
  const std::size_t m = pts.size();
  std::vector<bool> inB(m);
  for (std::size_t b : B) {
    if (b >= m || inB[b]) throw std::invalid_argument("B must list distinct point indices");
    inB[b] = true;
  }
  SpecialLines sl = special_lines(pts, SgMode::Affine);
  std::vector<std::size_t> live_on(sl.lines.size());
  std::vector<std::vector<std::size_t>> lines_at(m);
  for (std::size_t l = 0; l < sl.lines.size(); ++l) {
    live_on[l] = sl.lines[l].size();
    for (std::size_t p : sl.lines[l]) lines_at[p].push_back(l);
  }
  std::vector<bool> live(m, true);
  std::size_t nlive = m;
  auto degrees = [&] {
    std::vector<std::size_t> d(m, 0);
    for (std::size_t v = 0; v < m; ++v) {
      if (!live[v]) continue;
      for (std::size_t u = 0; u < m; ++u) {
        int l = sl.line_of[v][u];
        if (live[u] && inB[u] != inB[v] && l >= 0 && live_on[l] >= 3) ++d[v];
      }
    }
    return d;
  };
  auto total = [&](const std::vector<std::size_t>& d) {
    std::size_t s = 0;
    for (std::size_t x : d) s += x;
    return s;
  };

  CutResult res;
  std::vector<std::size_t> deg = degrees();
  std::size_t sum = total(deg);
  for (std::size_t v = 0; v < m; ++v)
    if (inB[v]) res.cross_pairs += deg[v];
  const Rational mm(m);
  if (Rational(res.cross_pairs) < delta * mm * mm)
    throw PreconditionError("fewer than delta m^2 cross pairs lie on special lines");
  const Rational thresh = delta * mm / 2;
  for (;;) {
    std::size_t v = m;
    for (std::size_t i = 0; i < m && v == m; ++i)
      if (live[i] && Rational(deg[i]) < thresh) v = i;
    if (v == m) break;
    CutStep st;
    st.removed = v;
    st.degree = deg[v];
    st.avg_before = Rational(sum) / Rational(nlive);
    live[v] = false;
    --nlive;
    for (std::size_t l : lines_at[v]) --live_on[l];
    std::vector<std::size_t> nd = degrees();
    std::size_t nsum = total(nd);
    require(sum - nsum <= 4 * st.degree, "cut-edge-loss", "a removal cost more than 4 |Gamma(v)| degree",
            {{"removed", v}, {"loss", sum - nsum}, {"degree", st.degree}});
    require(nlive > 0, "cut-average", "removal emptied the point set", {{"removed", v}});
    st.avg_after = Rational(nsum) / Rational(nlive);
    require(st.avg_after >= st.avg_before, "cut-average", "average degree dropped after a removal",
            {{"removed", v}, {"before", to_string(st.avg_before)}, {"after", to_string(st.avg_after)}});
    deg = std::move(nd);
    sum = nsum;
    res.steps.push_back(st);
  }
  std::vector<Vec<Rational>> bp;
  for (std::size_t i = 0; i < m; ++i) {
    if (!live[i]) continue;
    res.remaining.push_back(i);
    if (inB[i]) {
      res.survivors.push_back(i);
      bp.push_back(pts[i]);
    }
  }
  res.observed_fraction = Rational(res.survivors.size()) / mm;
  res.affine_dim = affine_dimension(PointSet::make(pts.dim(), bp));
  require(Rational(res.survivors.size()) >= delta * mm / 6, "cut-size", "fewer than (delta/6) m survivors in B",
          res.to_json());
  res.dim_check = Rational(res.affine_dim) <= 24 / delta + 1;
  require(res.dim_check, "cut-dim", "surviving B has affine dimension above 24/delta + 1", res.to_json());
  return res;
}

}  // namespace qsg
