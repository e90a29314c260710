#pragma once

#include <vector>

#include "qsg/assertion.hpp"
#include "qsg/subspace.hpp"

namespace qsg {

enum class SgMode { Span, Affine };

// Distinct rational points; span-mode work additionally needs pairwise linear independence.
class PointSet {
 public:
  explicit PointSet(std::size_t dim = 0) : dim_(dim) {}
  // dedup drops later copies (proportional copies when by_ratio) instead of throwing
  static PointSet make(std::size_t dim, const std::vector<Vec<Rational>>& pts, bool dedup = false,
                       bool by_ratio = true);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return pts_.size(); }
  const Vec<Rational>& operator[](std::size_t i) const { return pts_[i]; }
  const std::vector<Vec<Rational>>& points() const { return pts_; }
  bool pairwise_independent() const { return independent_; }
  PointSet subset(const std::vector<std::size_t>& idx) const;

 private:
  std::size_t dim_;
  std::vector<Vec<Rational>> pts_;
  bool independent_ = true;
};

struct SpecialLines {
  std::vector<std::vector<std::size_t>> lines;  // point indices, only lines holding >= 3 points
  std::vector<std::vector<int>> line_of;        // line index of a pair, -1 when ordinary
};
// span mode: lines are 2-dimensional spans; affine mode: ordinary affine lines
SpecialLines special_lines(const PointSet& pts, SgMode mode = SgMode::Span);
// Gamma(i): the j whose line with i carries a third point
std::vector<std::vector<std::size_t>> sg_neighbors(const PointSet& pts, SgMode mode = SgMode::Span);

// min_i |Gamma(i)| / (m - 1)
Rational sg_delta(const PointSet& pts, SgMode mode = SgMode::Span);
std::size_t sg_dimension(const PointSet& pts);
std::size_t affine_dimension(const PointSet& pts);
// dim <= 12/delta + 1 whenever sg_delta(pts) >= delta; vacuously true otherwise
bool dsw_check(const PointSet& pts, const Rational& delta, SgMode mode = SgMode::Span);

struct AbsorptionStep {
  std::size_t pivot = 0;  // index into T = K followed by Wpoints
  std::size_t w_neighbors = 0;
  std::size_t K_before = 0;
  std::size_t moved = 0;
};

struct RobustModResult {
  Subspace W_final;
  std::vector<std::size_t> absorbed;  // pivots, as indices into K
  std::vector<std::size_t> K_final;   // indices into K
  std::vector<AbsorptionStep> steps;
  std::size_t dim_W = 0, dim_W_final = 0, dim_K_final = 0, dim_T = 0;
  Rational step_bound, dim_bound;
  bool dim_bound_check = true;
  json to_json() const;
};
RobustModResult robust_sg_mod_subspace(const PointSet& K, const Subspace& W, const PointSet& Wpoints,
                                       const Rational& delta);

struct CutStep {
  std::size_t removed = 0;
  std::size_t degree = 0;
  Rational avg_before, avg_after;
};

struct CutResult {
  std::vector<std::size_t> survivors;  // B', indices into the point set
  std::vector<std::size_t> remaining;  // every point left at the end
  std::vector<CutStep> steps;
  std::size_t cross_pairs = 0;
  std::size_t affine_dim = 0;
  Rational observed_fraction;  // |B'| / m
  bool dim_check = true;
  json to_json() const;
};
// points are affine; B lists indices of the distinguished subset
CutResult fractional_cut(const PointSet& pts, const std::vector<std::size_t>& B, const Rational& delta);

}  // namespace qsg
