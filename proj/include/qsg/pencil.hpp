#pragma once

#include <optional>
#include <vector>

#include "qsg/quadform.hpp"
#include "qsg/upoly.hpp"

namespace qsg {

// A point (alpha:beta) of the pencil alpha*A + beta*B, normalized to beta = 1, or (1:0).
struct PencilRoot {
  Scalar alpha, beta;
  std::size_t rank = 0;
  // filled when rank == 1: alpha*M_A + beta*M_B = c * v v^T with v_i = 1 at the first nonzero diagonal
  Vec<Scalar> v;
  Scalar c;
  // sqrt(c) * v when sqrt(c) lives in the root's extension context
  std::optional<Vec<Scalar>> ell;

  bool at_infinity() const { return beta.is_zero(); }
  bool is_rational() const { return alpha.is_rational() && beta.is_rational(); }
};

struct PencilLocus {
  std::vector<PencilRoot> roots;
  bool whole_pencil = false;
  bool overflow = false;  // an irreducible factor of degree > 2 of the minor gcd was left unresolved
  UPoly unresolved;
  std::size_t minors_examined = 0;
};

// All (alpha:beta) with rank(alpha*A + beta*B) <= k for rectangular rational A, B of equal shape.
// max_minors > 0 caps the minors examined; hitting the cap reports overflow.
PencilLocus pencil_rank_locus(const QMatrix& A, const QMatrix& B, std::size_t k, std::size_t max_minors = 0);

// rank of alpha*A + beta*B over the root's context
std::size_t rank_at(const QMatrix& A, const QMatrix& B, const Scalar& alpha, const Scalar& beta);
SMatrix pencil_element(const QMatrix& A, const QMatrix& B, const Scalar& alpha, const Scalar& beta);

struct SquaresResult {
  std::vector<PencilRoot> roots;
  bool whole_pencil_degenerate = false;
};
SquaresResult squares_in_pencil(const QuadForm& A, const QuadForm& B);

// rank(alpha*M_A + beta*M_B) <= 2r, including cancellation points of rank 0
PencilLocus low_rank_locus(const QuadForm& A, const QuadForm& B, std::size_t r);

struct SpanSpace {
  Subspace V;
  bool whole_pencil = false;  // the reduced pencil is low rank everywhere
  std::size_t points = 0;     // low-rank points used when not whole
  bool overflow = false;
};
// V with dim <= 8r such that every alpha*Q + beta*Q' + P (P in C[U]_2) with rank_s <= r has MS inside V + U.
SpanSpace low_rank_span_space(const QuadForm& Q, const QuadForm& Qp, std::size_t r, const Subspace& U,
                              std::size_t validation_samples = 200, unsigned long long seed = 1);

// rational closure of a space over one quadratic extension (span of rational and irrational parts)
Subspace rational_closure(std::size_t n, const std::vector<Vec<Scalar>>& gens);

}  // namespace qsg
