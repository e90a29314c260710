#pragma once

#include <string>
#include <vector>

#include "qsg/radical.hpp"

namespace qsg {

// A finite set of irreducible, pairwise independent quadratics in n variables.
struct Configuration {
  std::size_t n = 0;
  std::vector<QuadForm> forms;
  Rational delta;  // 0 when not given
  unsigned long long seed = 0;

  std::size_t size() const { return forms.size(); }
  const QuadForm& operator[](std::size_t i) const { return forms[i]; }
  // throws PreconditionError naming the first offending member
  void validate() const;
  // drops members proportional to an earlier one
  static Configuration dedup(std::size_t n, const std::vector<QuadForm>& forms);
};

// rank of the coefficient matrix
std::size_t linear_dimension(const std::vector<QuadForm>& forms);

struct PairInfo {
  bool psg = false;
  std::vector<std::size_t> witnesses;       // every third member in the radical, ascending
  std::vector<std::size_t> span_witnesses;  // those in the span of the pair
  bool case_i = false, case_ii = false, case_iii = false;
};

enum class Case { I, II, III };

class NeighborGraph {
 public:
  explicit NeighborGraph(std::size_t m = 0) : m_(m), pairs_(m * (m > 0 ? m - 1 : 0) / 2) {}
  std::size_t size() const { return m_; }
  const PairInfo& pair(std::size_t i, std::size_t j) const { return pairs_[index(i, j)]; }
  PairInfo& pair(std::size_t i, std::size_t j) { return pairs_[index(i, j)]; }
  bool edge(std::size_t i, std::size_t j) const { return i != j && pair(i, j).psg; }
  bool edge(std::size_t i, std::size_t j, Case c) const;

  std::vector<std::size_t> neighbors(std::size_t i) const;
  std::vector<std::size_t> neighbors(std::size_t i, Case c) const;
  std::size_t degree(std::size_t i) const { return neighbors(i).size(); }
  json to_json() const;

 private:
  std::size_t index(std::size_t i, std::size_t j) const;
  std::size_t m_;
  std::vector<PairInfo> pairs_;
};

struct PsgOptions {
  RadicalOptions radical;
  // also test pairs that fall in none of the three structural cases, member by member
  bool exhaustive = false;
};

struct PsgResult {
  Rational delta_actual;  // min |Gamma(Q)| / m
  NeighborGraph graph;
  std::size_t radical_calls = 0;
  json to_json() const;
};

PsgResult verify_psg(const Configuration& config, const PsgOptions& opt = {});

}  // namespace qsg
