#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qsg/linsg.hpp"
#include "qsg/projection.hpp"
#include "qsg/psg.hpp"

namespace qsg {

// One JSON record per loop iteration: {stage, step, ...}.
class TraceLog {
 public:
  void add(const std::string& stage, std::size_t step, json data = json::object());
  const std::vector<json>& records() const { return records_; }
  json to_json() const { return records_; }

 private:
  std::vector<json> records_;
};

struct Partition123 {
  std::vector<std::size_t> Q1, Q2, Q3;
  json to_json() const;
};
// thresholds are (delta/100) m case-(t) neighbors; Q1 loses members of Q2 and Q3
Partition123 partition_123(const NeighborGraph& g, const Rational& delta);

struct Q2Reduction {
  std::vector<std::size_t> I;  // after cleanup
  std::vector<std::size_t> I_initial;
  Subspace V;                  // V' after cleanup
  std::size_t pairs = 0;        // pairs of I with a common case-(ii) neighbor
  std::size_t dim_V_pairs = 0;  // dim of the sum of the V_{i,j}
  std::size_t cleanup_steps = 0;
  std::size_t extension_fallbacks = 0;
};
Q2Reduction reduce_q2(const Configuration& c, const NeighborGraph& g, const std::vector<std::size_t>& Q2,
                      const Rational& delta, TraceLog* trace = nullptr);

struct Q3Reduction {
  Subspace V;
  std::vector<std::size_t> chosen;  // members whose minimal spaces were added, in order
};
Q3Reduction reduce_q3(const Configuration& c, const NeighborGraph& g, const std::vector<std::size_t>& Q3,
                      const Rational& delta, TraceLog* trace = nullptr);

// How a combination F of forms may sit next to a subspace V:
//   ProductModRing: F = G + l1 l2 with G in C[V]_2
//   RankTwoModRing: F = G + L with G in C[V]_2, rank_s(L) <= 2
//   RankTwoModIdeal: F = G + L with G in <V>, rank_s(L) <= 2
enum class Proximity { ProductModRing, RankTwoModRing, RankTwoModIdeal };

struct CloseCombination {
  std::vector<std::size_t> members;  // positions in the searched list, ascending
  std::vector<Scalar> coefficients;
  std::size_t removed = 0;      // first member with a nonzero coefficient
  Subspace new_forms;           // rational forms whose addition to V absorbs F
  bool trivial = false;         // F already lies in C[V]_2 (resp. <V>)
  json to_json() const;
};
struct ProximitySearch {
  std::optional<CloseCombination> hit;
  std::size_t unresolved_pairs = 0;  // pencils whose low-rank locus could not be resolved
};
// single members first, then pairs in lexicographic order
ProximitySearch find_close_combination(const std::vector<QuadForm>& forms, const Subspace& V, Proximity kind);

// Removes members (and grows V) until no single or pairwise combination is close to V.
struct CleanupReport {
  std::size_t steps = 0, removed = 0, grown = 0, unresolved_pairs = 0;
};
CleanupReport proximity_cleanup(const Configuration& c, std::vector<std::size_t>& members, Subspace& V, Proximity kind,
                                bool remove_on_growth, const std::string& stage, TraceLog* trace);

// rank of Q on {V = 0}; twice rank_s of Q modulo <V>, up to one
std::size_t corner_rank(const QuadForm& Q, const Subspace& V);
// rational forms U with Q in <V + U>, dim U = corner_rank(Q, V)
Subspace ideal_absorber(const QuadForm& Q, const Subspace& V);

// Grows V (and drops redundant J members) until
//   every member of span(J, <V>) \ <V> has corner rank > 4,
//   no case-(ii) edge leaves J_ideal with its square outside V,
//   J is linearly independent modulo <V>.
struct IdealCleanupReport {
  std::size_t steps = 0, grown = 0, removed = 0;
  // per-step caps on the growth of V, summed
  std::size_t growth_cap = 0;
};
IdealCleanupReport ideal_cleanup(const Configuration& c, const NeighborGraph& g, std::vector<std::size_t>& J,
                                 Subspace& V, const std::string& stage, TraceLog* trace);

struct FourSets {
  std::vector<std::size_t> C_V, C_ideal, J_V, J_ideal;
  std::vector<std::size_t> uncovered;  // outside span(J, <V>)
  json to_json() const;
};
// check_claims asserts the cross-edge and uniqueness properties on the graph
FourSets partition_four(const Configuration& c, const NeighborGraph& g, const std::vector<std::size_t>& J,
                        const Subspace& V, bool check_claims, TraceLog* trace = nullptr);

struct PipelineState {
  std::vector<std::size_t> J;
  Subspace V;
  FourSets sets;
  // J has been cleaned against <V> since V last changed (the cross-edge claims apply)
  bool ideal_clean = true;
  // bounds assembled from each stage's asserted inequality
  Rational V_bound, J_bound;
  std::size_t iterations = 0;
  json stages = json::object();
};

std::vector<std::size_t> build_J(const Configuration& c, const NeighborGraph& g, const Partition123& parts,
                                 const std::vector<std::size_t>& I, Subspace& V, const Rational& delta,
                                 PipelineState* state = nullptr, TraceLog* trace = nullptr);
void decrease_C_ideal(const Configuration& c, const NeighborGraph& g, PipelineState& s, const Rational& delta,
                      std::mt19937_64& rng, TraceLog* trace = nullptr);
void decrease_J_ideal(const Configuration& c, const NeighborGraph& g, PipelineState& s, const Rational& delta,
                      TraceLog* trace = nullptr);

struct Certificate {
  std::vector<std::size_t> J;
  Subspace V;
  std::size_t bound = 0;            // |J| + dim V (dim V + 1) / 2
  std::size_t independent_dim = 0;  // rank of the coefficient matrix
  Rational delta;
  Rational assembled_bound;  // from the per-stage bounds along this run
  json trace = json::array();
  json stages = json::object();

  // every member in span(J, C[V]_2), and independent_dim <= bound
  bool validate(const Configuration& c, std::string* why = nullptr) const;
  json to_json() const;
};
Certificate finalize(const Configuration& c, const NeighborGraph& g, PipelineState& s, const Rational& delta,
                     TraceLog* trace = nullptr);

struct DecomposeOptions {
  unsigned long long seed = 0;
  PsgOptions psg;
  std::size_t max_iterations = 200;
};
// throws PreconditionError if the configuration is not delta-PSG, AssertionFailure on a failed step
Certificate decompose(const Configuration& c, const Rational& delta, const DecomposeOptions& opt = {});
Certificate decompose(const Configuration& c, const PsgResult& psg, const Rational& delta,
                      const DecomposeOptions& opt = {});

}  // namespace qsg
