#pragma once

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "qsg/assertion.hpp"
#include "qsg/quadform.hpp"

namespace qsg {

class GenericityViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GenericityExhausted : public ResourceExhausted {
 public:
  using ResourceExhausted::ResourceExhausted;
};

// The substitution v_i -> a_i z, u_j -> y_j, where v is V's RREF basis and u the basis of
// V's orthogonal complement.  Output variables are y_1..y_{n-dim V} followed by z.
class ProjectionMap {
 public:
  ProjectionMap(Subspace V, Vec<Rational> a);

  const Subspace& V() const { return V_; }
  const Vec<Rational>& a() const { return a_; }
  const std::vector<Vec<Rational>>& complement() const { return u_; }
  std::size_t in_vars() const { return V_.ambient(); }
  std::size_t out_vars() const { return L_.cols(); }
  std::size_t z() const { return out_vars() - 1; }
  // row k is the image of x_k
  const QMatrix& linear_map() const { return L_; }

  Vec<Rational> apply(const Vec<Rational>& form) const { return vec_mul(form, L_); }
  QuadForm apply(const QuadForm& Q) const;
  json to_json() const;

 private:
  Subspace V_;
  Vec<Rational> a_;
  std::vector<Vec<Rational>> u_;
  QMatrix L_;
};

// image with the always-true conclusions asserted; throws GenericityViolation when an
// ideal member is sent to a multiple of z^2
QuadForm project(const ProjectionMap& T, const QuadForm& Q);
// for Q in <V>: the linear form l with T(Q) = z*l
Vec<Rational> z_cofactor(const ProjectionMap& T, const QuadForm& image);

struct GenericityReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};
GenericityReport genericity_check(const ProjectionMap& T, const QuadForm& F, const QuadForm& G);

// coordinates drawn uniformly from [1, 2^16]
Vec<Rational> sample_coefficients(std::mt19937_64& rng, std::size_t count);

// Draw maps until `accept` passes; at most 1 + retries draws.
ProjectionMap sample_projection(const Subspace& V, std::mt19937_64& rng,
                                const std::function<GenericityReport(const ProjectionMap&)>& accept,
                                int retries = 5);

// Common linear factors (up to scaling) of two quadratics over Q or one extension.
// Sets *unavailable when a needed factorization leaves the supported precision.
std::vector<Vec<Scalar>> common_linear_factors(const QuadForm& F, const QuadForm& G, bool* unavailable = nullptr);

// dim MS(set) against (sigma + 1) dim V, sigma the largest image MS dimension over dim V independent maps
struct LiftReport {
  std::size_t Delta = 0, sigma = 0, exact_dim = 0;
  std::vector<std::size_t> image_dims;
  bool ok() const { return exact_dim <= (sigma + 1) * Delta; }
  json to_json() const;
};
LiftReport lift_bound(const std::vector<QuadForm>& set, const Subspace& V, std::mt19937_64& rng);

}  // namespace qsg
