#include "qsg/quadform.hpp"

#include <sstream>

#include "qsg/assertion.hpp"

namespace qsg {

QuadForm::QuadForm(QMatrix M) : M_(std::move(M)) {
  if (M_.rows() != M_.cols()) throw std::invalid_argument("quadratic form matrix must be square");
  if (!M_.is_symmetric()) throw std::invalid_argument("quadratic form matrix must be symmetric");
}

QuadForm QuadForm::from_monomials(std::size_t n, const std::map<std::pair<std::size_t, std::size_t>, Rational>& mono) {
  QMatrix M(n, n);
  for (const auto& [ij, c] : mono) {
    auto [i, j] = ij;
    if (i >= n || j >= n) throw std::invalid_argument("monomial variable index out of range");
    if (i == j)
      M(i, i) += c;
    else {
      M(i, j) += c / 2;
      M(j, i) += c / 2;
    }
  }
  return QuadForm(M);
}

QuadForm QuadForm::product(const Vec<Rational>& a, const Vec<Rational>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("ambient mismatch in product");
  const std::size_t n = a.size();
  QMatrix M(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) M(i, j) = (a[i] * b[j] + a[j] * b[i]) / 2;
  return QuadForm(M);
}

QuadForm QuadForm::from_coeff_vector(std::size_t n, const Vec<Rational>& c) {
  if (c.size() != coeff_dim(n)) throw std::invalid_argument("coefficient vector length mismatch");
  QMatrix M(n, n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j, ++k) {
      if (i == j)
        M(i, i) = c[k];
      else
        M(i, j) = M(j, i) = c[k] / 2;
    }
  return QuadForm(M);
}

Rational QuadForm::coeff(std::size_t i, std::size_t j) const { return i == j ? M_(i, i) : Rational(2 * M_(i, j)); }

Vec<Rational> QuadForm::coeff_vector() const {
  const std::size_t n = this->n();
  Vec<Rational> c;
  c.reserve(coeff_dim(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) c.push_back(coeff(i, j));
  return c;
}

Rational QuadForm::eval(const Vec<Rational>& x) const {
  if (x.size() != n()) throw std::invalid_argument("ambient mismatch in eval");
  Rational s = 0;
  for (std::size_t i = 0; i < n(); ++i)
    for (std::size_t j = 0; j < n(); ++j) s += M_(i, j) * x[i] * x[j];
  return s;
}

Scalar QuadForm::eval(const Vec<Scalar>& x) const {
  if (x.size() != n()) throw std::invalid_argument("ambient mismatch in eval");
  Scalar s;
  for (std::size_t i = 0; i < n(); ++i) {
    if (x[i].is_zero()) continue;
    Scalar row;
    for (std::size_t j = 0; j < n(); ++j)
      if (sgn(M_(i, j)) != 0) row += Scalar(M_(i, j)) * x[j];
    s += row * x[i];
  }
  return s;
}

QuadForm QuadForm::substitute(const QMatrix& G) const {
  if (G.rows() != n()) throw std::invalid_argument("ambient mismatch in substitution");
  return QuadForm(G.transpose() * M_ * G);
}

Rational QuadForm::canonical_scale() const {
  for (std::size_t i = 0; i < n(); ++i)
    for (std::size_t j = 0; j < n(); ++j)
      if (sgn(M_(i, j)) != 0) return Rational(1) / M_(i, j);
  return Rational(1);
}

QuadForm QuadForm::canonical() const {
  QuadForm c(M_ * canonical_scale());
  c.name = name;
  return c;
}

std::string QuadForm::key() const {
  QuadForm c = canonical();
  std::string s = std::to_string(n()) + ":";
  for (std::size_t i = 0; i < n(); ++i)
    for (std::size_t j = i; j < n(); ++j) {
      const Rational& x = c.M_(i, j);
      if (sgn(x) == 0) continue;
      s += std::to_string(i) + "," + std::to_string(j) + "=" + x.get_str() + ";";
    }
  return s;
}

std::string QuadForm::str() const {
  std::ostringstream os;
  bool first = true;
  for (std::size_t i = 0; i < n(); ++i)
    for (std::size_t j = i; j < n(); ++j) {
      Rational c = coeff(i, j);
      if (sgn(c) == 0) continue;
      std::string mono = "x" + std::to_string(i + 1) + (i == j ? "^2" : "*x" + std::to_string(j + 1));
      if (!first) os << (sgn(c) < 0 ? " - " : " + ");
      else if (sgn(c) < 0) os << "-";
      Rational a = abs(c);
      if (a != 1) os << a.get_str() << "*";
      os << mono;
      first = false;
    }
  if (first) os << "0";
  return os.str();
}

QuadForm restrict(const QuadForm& Q, const Subspace& V, std::vector<Vec<Rational>>& basis) {
  if (Q.n() != V.ambient()) throw std::invalid_argument("ambient mismatch in restrict");
  basis = V.annihilator_basis();
  const std::size_t n = Q.n(), k = basis.size();
  QMatrix B(n, k);
  for (std::size_t c = 0; c < k; ++c)
    for (std::size_t r = 0; r < n; ++r) B(r, c) = basis[c][r];
  QuadForm R = Q.substitute(B);
  long lhs = static_cast<long>(R.rank_s());
  long rhs = static_cast<long>(Q.rank_s()) - static_cast<long>(V.dim());
  require(lhs >= rhs, "restriction-rank", "rank_s(Q|_{V=0}) < rank_s(Q) - dim V",
          {{"Q", Q.str()}, {"dimV", V.dim()}, {"restricted_rank_s", lhs}});
  return R;
}

QuadForm restrict(const QuadForm& Q, const Subspace& V) {
  std::vector<Vec<Rational>> b;
  return restrict(Q, V, b);
}

bool in_ideal(const QuadForm& Q, const Subspace& V) { return restrict(Q, V).is_zero(); }

bool in_ring2(const QuadForm& Q, const Subspace& V) {
  if (Q.n() != V.ambient()) throw std::invalid_argument("ambient mismatch in in_ring2");
  return V.contains(Q.minimal_space());
}

SMatrix product_matrix(const Vec<Scalar>& a, const Vec<Scalar>& b) {
  const std::size_t n = a.size();
  SMatrix M(n, n);
  const Scalar half(Rational(1, 2));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) M(i, j) = (a[i] * b[j] + a[j] * b[i]) * half;
  return M;
}

Factorization factor_quadratic(const SMatrix& M) {
  Factorization out;
  const std::size_t n = M.rows();
  Rref<Scalar> rr = rref(M, false);
  if (rr.rank > 2) throw std::invalid_argument("factor_quadratic needs rank <= 2");
  out.f.assign(n, Scalar(0));
  out.g.assign(n, Scalar(0));
  out.available = true;
  if (rr.rank == 0) return out;
  if (rr.rank == 1) {
    for (std::size_t i = 0; i < n; ++i)
      if (!M(i, i).is_zero()) {
        Scalar c = M(i, i);
        for (std::size_t j = 0; j < n; ++j) {
          out.f[j] = M(i, j) / c;
          out.g[j] = M(i, j);
        }
        return out;
      }
    throw std::logic_error("rank-1 symmetric matrix without nonzero diagonal");
  }
  Vec<Scalar> r1 = rr.R.row(0), r2 = rr.R.row(1);
  std::size_t p1 = rr.pivots[0], p2 = rr.pivots[1];
  Scalar a = M(p1, p1), b = M(p1, p2), c = M(p2, p2);
  if (a.is_zero()) {
    // t (2b s + c t)
    for (std::size_t j = 0; j < n; ++j) {
      out.f[j] = r2[j];
      out.g[j] = Scalar(2) * b * r1[j] + c * r2[j];
    }
    return out;
  }
  Scalar disc = b * b - a * c;
  if (!disc.is_rational()) {
    out.available = false;
    return out;
  }
  Scalar s;
  try {
    long ctx = Scalar::join(a.d(), Scalar::join(b.d(), c.d()));
    s = sqrt_scalar(disc.a(), ctx);
  } catch (const ExtensionConflict&) {
    out.available = false;
    return out;
  }
  Scalar l1 = (-b + s) / a, l2 = (-b - s) / a;
  for (std::size_t j = 0; j < n; ++j) {
    out.f[j] = r1[j] - l1 * r2[j];
    out.g[j] = a * (r1[j] - l2 * r2[j]);
  }
  return out;
}

Factorization factor_quadratic(const QMatrix& M) { return factor_quadratic(to_scalar(M)); }

SMatrix restrict_matrix(const SMatrix& M, const std::vector<Vec<Scalar>>& kb) {
  const std::size_t n = M.rows(), k = kb.size();
  SMatrix B(n, k);
  for (std::size_t c = 0; c < k; ++c)
    for (std::size_t r = 0; r < n; ++r) B(r, c) = kb[c][r];
  return B.transpose() * M * B;
}

void QuadSpan::add_ring2(const Subspace& V) {
  auto rows = V.basis_rows();
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = i; j < rows.size(); ++j) add(QuadForm::product(rows[i], rows[j]));
}

}  // namespace qsg
