#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qsg/assertion.hpp"
#include "qsg/groebner.hpp"
#include "qsg/pencil.hpp"

namespace qsg {

using gb::Decision;

struct RadicalOptions {
  gb::Budget budget;
  unsigned kmax = 3;
  std::size_t ladder_max_unknowns = 800;
  std::size_t sampler_lines = 24;
  unsigned long long seed = 0;
  // run the Groebner oracle after every fast-path answer and fail hard on disagreement
  bool crosscheck = false;
};

struct RadicalResult {
  Decision decision = Decision::Undecided;
  std::string method;  // span, square-fastpath, square-path, kernel-point, sampler, ideal-point, ladder, groebner
  json witness = json::object();
  std::size_t spolys = 0;
  json to_json() const;
};

// C = alpha A + beta B
std::optional<std::pair<Rational, Rational>> case_i(const QuadForm& A, const QuadForm& B, const QuadForm& C);

struct CaseIIIResult {
  Decision decision = Decision::Undecided;
  std::optional<Subspace> witness;          // rational U with A, B in <U>, dim U = 2
  bool witness_beyond_extension = false;    // exists over C, no rational witness found
  std::string route;
  json to_json() const;
};
CaseIIIResult case_iii_decide(const QuadForm& A, const QuadForm& B, const gb::Budget& budget = {});
// the pivot-pattern search for U inside a given space S, any A, B
CaseIIIResult case_iii_search(const Subspace& S, const QuadForm& A, const QuadForm& B, const gb::Budget& budget = {});

// C in rad<A, B>
RadicalResult radical_membership(const QuadForm& C, const QuadForm& A, const QuadForm& B,
                                 const RadicalOptions& opt = {});
// the authoritative route alone, on the forms restricted to MS(A)+MS(B)+MS(C)
RadicalResult radical_groebner(const QuadForm& C, const QuadForm& A, const QuadForm& B, const gb::Budget& budget = {});

// C^k in <A, B> for some k <= kmax, by a linear solve in the degree-2k slice
bool degree_ladder(const QuadForm& C, const QuadForm& A, const QuadForm& B, unsigned kmax,
                   std::size_t max_unknowns, unsigned* k_found = nullptr);

struct PairClassification {
  bool case_i = false;
  std::optional<std::pair<Rational, Rational>> span_coeffs;
  bool case_ii = false;
  std::vector<PencilRoot> squares;
  bool case_iii = false;
  CaseIIIResult case_iii_detail;
  bool exclusive_i() const { return case_i && !case_ii && !case_iii; }
  bool exclusive_ii() const { return case_ii && !case_i && !case_iii; }
  bool exclusive_iii() const { return case_iii && !case_i && !case_ii; }
  json to_json() const;
};
// requires C in rad<A, B>; asserts that one of the three cases holds
PairClassification classify_triple(const QuadForm& A, const QuadForm& B, const QuadForm& C,
                                   const RadicalOptions& opt = {});

struct CaseIIIDecomposition {
  Vec<Rational> v1, v2, ell, u;
  Rational alpha, beta;
  // sP * P = v1 ell + v2^2, sQ * Q = v1 u - v2^2, sT * T = v2 (ell + u) + alpha sP P + beta sQ Q
  Rational sP, sQ, sT;
  json to_json() const;
};
bool verify_decomposition(const CaseIIIDecomposition& d, const QuadForm& P, const QuadForm& Q, const QuadForm& T);
CaseIIIDecomposition case3_strong_decompose(const QuadForm& P, const QuadForm& Q, const QuadForm& T,
                                            const RadicalOptions& opt = {});

struct UniqueTReport {
  bool holds = true;
  bool distinct = true;
  bool T_outside = true, Tp_outside = true;
  json failure;  // paper-assertion-failure record when !holds
};
// check_hypotheses = false skips the precondition checks so broken inputs reach the assertion
UniqueTReport unique_T_check(const QuadForm& P, const QuadForm& Q, const QuadForm& Qp, const QuadForm& T,
                             const QuadForm& Tp, bool check_hypotheses = true, const RadicalOptions& opt = {});

// F = f * g for a given linear factor f
std::optional<Vec<Rational>> divide_by_linear(const QuadForm& F, const Vec<Rational>& f);

}  // namespace qsg
