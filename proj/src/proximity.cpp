#include <algorithm>

#include "qsg/pencil.hpp"
#include "qsg/pipeline.hpp"

namespace qsg {

namespace {

constexpr std::size_t kMinorCap = 3000;

// Coordinates y = Bm x: V's basis forms first, then unit forms at V's non-pivot columns.
struct Adapted {
  std::size_t n = 0, d = 0;
  std::vector<std::size_t> cols;  // complement coordinates
  QMatrix Binv;

  explicit Adapted(const Subspace& V) : n(V.ambient()), d(V.dim()) {
    std::vector<char> piv(n, 0);
    for (std::size_t p : V.pivots()) piv[p] = 1;
    QMatrix Bm(n, n);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < n; ++j) Bm(i, j) = V.basis()(i, j);
    std::size_t r = d;
    for (std::size_t j = 0; j < n; ++j)
      if (!piv[j]) {
        cols.push_back(j);
        Bm(r++, j) = 1;
      }
    Binv = *inverse(Bm);
  }

  QMatrix transformed(const QuadForm& F) const { return Binv.transpose() * F.matrix() * Binv; }

  // rows of the complement block: (n - d) x n
  QMatrix bottom(const QuadForm& F) const {
    QMatrix N = transformed(F);
    std::vector<std::size_t> rows, all(n);
    for (std::size_t i = d; i < n; ++i) rows.push_back(i);
    for (std::size_t j = 0; j < n; ++j) all[j] = j;
    return N.submatrix(rows, all);
  }

  QMatrix corner(const QuadForm& F) const {
    QMatrix N = transformed(F);
    std::vector<std::size_t> rows;
    for (std::size_t i = d; i < n; ++i) rows.push_back(i);
    return N.submatrix(rows, rows);
  }

  template <class T>
  Vec<T> lift(const Vec<T>& w) const {
    Vec<T> x(n, T(0));
    for (std::size_t j = 0; j < cols.size(); ++j) x[cols[j]] = w[j];
    return x;
  }
};

template <class T>
Matrix<T> tail_block(const Matrix<T>& bottom, std::size_t d) {
  Matrix<T> D(bottom.rows(), bottom.rows());
  for (std::size_t i = 0; i < bottom.rows(); ++i)
    for (std::size_t j = 0; j < bottom.rows(); ++j) D(i, j) = bottom(i, d + j);
  return D;
}

std::size_t threshold(Proximity kind) { return kind == Proximity::ProductModRing ? 2 : 4; }

// Evaluates the proximity condition on the complement rows X of a combination; fills the forms to add.
template <class T>
bool close_enough(const Matrix<T>& X, const Adapted& ad, Proximity kind, bool* trivial,
                  std::vector<Vec<T>>* gens) {
  gens->clear();
  if (kind == Proximity::RankTwoModIdeal) {
    // X is the complement corner here
    const std::size_t rD = rank(X);
    if (rD > 4) return false;
    *trivial = rD == 0;
    for (std::size_t i = 0; i < X.rows(); ++i) gens->push_back(ad.lift(X.row(i)));
    return true;
  }
  const std::size_t rho = rank(X), rD = rank(tail_block(X, ad.d));
  if (2 * rho - rD > threshold(kind)) return false;
  *trivial = rho == 0;
  for (std::size_t j = 0; j < X.cols(); ++j) gens->push_back(ad.lift(X.col(j)));
  return true;
}

}  // namespace

std::size_t corner_rank(const QuadForm& Q, const Subspace& V) {
  if (V.dim() == V.ambient()) return 0;
  return rank(Adapted(V).corner(Q));
}

Subspace ideal_absorber(const QuadForm& Q, const Subspace& V) {
  const std::size_t n = V.ambient();
  if (V.dim() == n) return Subspace(n);
  const Adapted ad(V);
  QMatrix D = ad.corner(Q);
  std::vector<Vec<Rational>> gens;
  for (std::size_t i = 0; i < D.rows(); ++i) gens.push_back(ad.lift(D.row(i)));
  return Subspace::span(n, gens);
}

json CloseCombination::to_json() const {
  json c = json::array();
  for (const auto& s : coefficients) c.push_back(s.str());
  return json{{"members", members}, {"coefficients", c}, {"removed", removed},
              {"new_forms", new_forms.dim()}, {"trivial", trivial}};
}

ProximitySearch find_close_combination(const std::vector<QuadForm>& forms, const Subspace& V, Proximity kind) {
  ProximitySearch out;
  if (forms.empty()) return out;
  const Adapted ad(V);
  const std::size_t n = ad.n;
  if (ad.d == n) {
    CloseCombination hit;
    hit.members = {0};
    hit.coefficients = {Scalar(1)};
    hit.new_forms = Subspace(n);
    hit.trivial = true;
    out.hit = hit;
    return out;
  }
  const bool ideal = kind == Proximity::RankTwoModIdeal;
  std::vector<QMatrix> X;
  for (const auto& F : forms) X.push_back(ideal ? ad.corner(F) : ad.bottom(F));

  for (std::size_t i = 0; i < forms.size(); ++i) {
    bool trivial = false;
    std::vector<Vec<Rational>> gens;
    if (!close_enough(X[i], ad, kind, &trivial, &gens)) continue;
    CloseCombination hit;
    hit.members = {i};
    hit.coefficients = {Scalar(1)};
    hit.removed = i;
    hit.trivial = trivial;
    hit.new_forms = Subspace::span(n, gens);
    out.hit = hit;
    return out;
  }

  const std::size_t k = threshold(kind);
  for (std::size_t a = 0; a < forms.size(); ++a)
    for (std::size_t b = a + 1; b < forms.size(); ++b) {
      PencilLocus L = pencil_rank_locus(X[a], X[b], k, kMinorCap);
      std::vector<std::pair<Scalar, Scalar>> cands;
      if (L.whole_pencil) {
        for (long t = 1; t <= static_cast<long>(k) + 2; ++t) cands.emplace_back(Scalar(Rational(t)), Scalar(1));
      } else {
        if (L.overflow) ++out.unresolved_pairs;
        for (const auto& r : L.roots)
          if (!r.at_infinity() && !r.alpha.is_zero()) cands.emplace_back(r.alpha, r.beta);
      }
      for (const auto& [al, be] : cands) {
        SMatrix Xs = pencil_element(X[a], X[b], al, be);
        bool trivial = false;
        std::vector<Vec<Scalar>> gens;
        if (!close_enough(Xs, ad, kind, &trivial, &gens)) continue;
        CloseCombination hit;
        hit.members = {a, b};
        hit.coefficients = {al, be};
        hit.removed = a;
        hit.trivial = trivial;
        hit.new_forms = rational_closure(n, gens);
        out.hit = hit;
        return out;
      }
    }
  return out;
}

CleanupReport proximity_cleanup(const Configuration& c, std::vector<std::size_t>& members, Subspace& V, Proximity kind,
                                bool remove_on_growth, const std::string& stage, TraceLog* trace) {
  CleanupReport rep;
  for (;;) {
    std::vector<QuadForm> forms;
    for (std::size_t i : members) forms.push_back(c[i]);
    ProximitySearch s = find_close_combination(forms, V, kind);
    rep.unresolved_pairs += s.unresolved_pairs;
    if (!s.hit) break;
    const CloseCombination& h = *s.hit;
    const std::size_t before = V.dim();
    json rec = h.to_json();
    rec["dim_V_before"] = before;
    if (!h.trivial) {
      V = V.sum(h.new_forms);
      require(V.dim() > before, "cleanup-progress", "absorbing a close combination did not grow V",
              {{"stage", stage}, {"dim_V", before}});
      ++rep.grown;
    }
    const std::size_t gone = members[h.removed];
    if (h.trivial || remove_on_growth) {
      members.erase(members.begin() + static_cast<long>(h.removed));
      ++rep.removed;
      rec["removed_member"] = gone;
    }
    rec["dim_V"] = V.dim();
    if (trace) trace->add(stage + "/cleanup", rep.steps, rec);
    ++rep.steps;
  }
  return rep;
}

}  // namespace qsg
