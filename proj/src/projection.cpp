#include "qsg/projection.hpp"

namespace qsg {

ProjectionMap::ProjectionMap(Subspace V, Vec<Rational> a) : V_(std::move(V)), a_(std::move(a)) {
  if (a_.size() != V_.dim()) throw std::invalid_argument("projection needs one coefficient per basis vector of V");
  const std::size_t n = V_.ambient(), d = V_.dim();
  u_ = V_.dim() == 0 ? QMatrix::identity(n).row_list() : rref(V_.basis(), true).kernel;
  const std::size_t out = n - d + 1;
  QMatrix B(n, n), Tm(n, out);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < n; ++j) B(i, j) = V_.basis()(i, j);
    Tm(i, out - 1) = a_[i];
  }
  for (std::size_t k = 0; k < u_.size(); ++k) {
    for (std::size_t j = 0; j < n; ++j) B(d + k, j) = u_[k][j];
    Tm(d + k, k) = 1;
  }
  // x_k = sum_i c_{ki} (basis form i) with c = B^{-1} in the row convention
  auto Binv = inverse(B);
  if (!Binv) throw std::logic_error("V plus its complement is not a basis");
  L_ = *Binv * Tm;
}

QuadForm ProjectionMap::apply(const QuadForm& Q) const {
  if (Q.n() != in_vars()) throw std::invalid_argument("ambient mismatch in projection");
  return Q.substitute(L_);
}

json ProjectionMap::to_json() const {
  json a = json::array();
  for (const auto& x : a_) a.push_back(to_string(x));
  return {{"dimV", V_.dim()}, {"a", a}, {"out_vars", out_vars()}};
}

Vec<Rational> z_cofactor(const ProjectionMap& T, const QuadForm& image) {
  const std::size_t z = T.z(), m = T.out_vars();
  const QMatrix& M = image.matrix();
  // z*l has matrix entries M(z, j) = l_j / 2 for j != z and M(z, z) = l_z
  Vec<Rational> l(m);
  for (std::size_t j = 0; j < m; ++j) l[j] = (j == z) ? M(z, z) : Rational(2 * M(z, j));
  return l;
}

QuadForm project(const ProjectionMap& T, const QuadForm& Q) {
  QuadForm img = T.apply(Q);
  const long delta = static_cast<long>(T.V().dim());
  if (Q.irreducible())
    require(static_cast<long>(img.rank_s()) >= static_cast<long>(Q.rank_s()) - delta, "z-map-rank",
            "rank_s(T(Q)) < rank_s(Q) - dim V", {{"Q", Q.str()}, {"image", img.str()}});
  const bool ideal = in_ideal(Q, T.V());
  if (!ideal) return img;
  const std::size_t z = T.z(), m = T.out_vars();
  // every member of <V> maps into <z>
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (i != z && j != z)
        require(sgn(img.matrix()(i, j)) == 0, "z-map-ideal", "image of an ideal member is not divisible by z",
                {{"Q", Q.str()}, {"image", img.str()}});
  Vec<Rational> l = z_cofactor(T, img);
  bool only_z = true;
  for (std::size_t j = 0; j < m; ++j)
    if (j != z && sgn(l[j]) != 0) only_z = false;
  if (in_ring2(Q, T.V())) {
    require(only_z, "z-map-ring", "image of a C[V]_2 member is not a multiple of z^2",
            {{"Q", Q.str()}, {"image", img.str()}});
  } else if (only_z) {
    throw GenericityViolation("ideal member " + Q.str() + " mapped into span(z^2)");
  }
  return img;
}

std::vector<Vec<Scalar>> common_linear_factors(const QuadForm& F, const QuadForm& G, bool* unavailable) {
  if (unavailable) *unavailable = false;
  std::vector<Vec<Scalar>> out;
  auto factors = [&](const QuadForm& Q, std::vector<Vec<Scalar>>& fs) -> bool {
    if (Q.rank() > 2) return false;
    Factorization f = factor_quadratic(Q.matrix());
    if (!f.available) {
      if (unavailable) *unavailable = true;
      return false;
    }
    fs.push_back(normalize_leading(f.f));
    fs.push_back(normalize_leading(f.g));
    return true;
  };
  if (F.is_zero() || G.is_zero()) return out;
  std::vector<Vec<Scalar>> fF, fG;
  bool redF = factors(F, fF), redG = factors(G, fG);
  if (!redF || !redG) {
    // an irreducible quadratic only shares a factor with a multiple of itself
    if (F.proportional_to(G) && !redF && !redG && !(unavailable && *unavailable)) {
      Vec<Scalar> none;
      out.push_back(none);
    }
    return out;
  }
  for (const auto& a : fF)
    for (const auto& b : fG)
      if (a == b) {
        bool seen = false;
        for (const auto& c : out) seen = seen || c == a;
        if (!seen) out.push_back(a);
      }
  return out;
}

GenericityReport genericity_check(const ProjectionMap& T, const QuadForm& F, const QuadForm& G) {
  if (F.n() != T.in_vars() || G.n() != T.in_vars()) throw std::invalid_argument("ambient mismatch");
  if (F.is_zero() || G.is_zero() || F.proportional_to(G))
    throw PreconditionError("genericity_check needs linearly independent F, G");
  GenericityReport rep;
  for (const auto& x : T.a())
    if (sgn(x) == 0) {
      rep.violations.push_back("degenerate coefficient vector: a has a zero entry");
      break;
    }
  QuadForm TF = T.apply(F), TG = T.apply(G);
  if (TF.is_zero() || TG.is_zero()) {
    rep.violations.push_back("an image vanished");
    return rep;
  }
  bool unavailable = false;
  bool coprime = common_linear_factors(F, G, &unavailable).empty() && !unavailable;
  if (coprime) {
    bool un2 = false;
    auto common = common_linear_factors(TF, TG, &un2);
    for (const auto& c : common) {
      bool in_z = !c.empty();
      for (std::size_t j = 0; j < c.size(); ++j)
        if (j != T.z() && !c[j].is_zero()) in_z = false;
      if (!in_z) {
        rep.violations.push_back("images share a factor outside C[z]");
        break;
      }
    }
    if (un2) rep.violations.push_back("image factorization unavailable at supported precision");
  }
  if (F.irreducible() && G.irreducible() && !in_ring2(F, T.V()) && !in_ring2(G, T.V()) && TF.proportional_to(TG))
    rep.violations.push_back("images are linearly dependent");
  return rep;
}

Vec<Rational> sample_coefficients(std::mt19937_64& rng, std::size_t count) {
  Vec<Rational> a(count);
  for (auto& x : a) x = static_cast<long>(rng() % 65536 + 1);
  return a;
}

ProjectionMap sample_projection(const Subspace& V, std::mt19937_64& rng,
                                const std::function<GenericityReport(const ProjectionMap&)>& accept, int retries) {
  std::string last;
  for (int t = 0; t <= retries; ++t) {
    ProjectionMap T(V, sample_coefficients(rng, V.dim()));
    GenericityReport r = accept(T);
    if (r.ok()) return T;
    last = r.violations.front();
  }
  throw GenericityExhausted("genericity-exhausted after " + std::to_string(retries + 1) + " draws: " + last);
}

json LiftReport::to_json() const {
  return json{{"Delta", Delta}, {"sigma", sigma}, {"exact_dim", exact_dim}, {"image_dims", image_dims},
              {"bound", (sigma + 1) * Delta}, {"ok", ok()}};
}

LiftReport lift_bound(const std::vector<QuadForm>& set, const Subspace& V, std::mt19937_64& rng) {
  LiftReport rep;
  rep.Delta = V.dim();
  const std::size_t n = V.ambient();
  Subspace all(n);
  for (const auto& Q : set) all = all.sum(Q.minimal_space());
  rep.exact_dim = all.dim();
  if (rep.Delta == 0) {
    rep.sigma = rep.exact_dim;
    rep.image_dims = {rep.exact_dim};
    return rep;
  }
  std::vector<Vec<Rational>> as;
  for (int draw = 0; as.size() < rep.Delta; ++draw) {
    if (draw > 20 * static_cast<int>(rep.Delta)) throw GenericityExhausted("lift_bound: no independent coefficient vectors");
    Vec<Rational> a = sample_coefficients(rng, rep.Delta);
    std::vector<Vec<Rational>> trial = as;
    trial.push_back(a);
    if (Subspace::span(rep.Delta, trial).dim() == trial.size()) as = trial;
  }
  for (const auto& a : as) {
    ProjectionMap T(V, a);
    Subspace img(T.out_vars());
    for (const auto& Q : set) img = img.sum(T.apply(Q).minimal_space());
    rep.image_dims.push_back(img.dim());
    rep.sigma = std::max(rep.sigma, img.dim());
  }
  return rep;
}

}  // namespace qsg
