#pragma once

#include <string>
#include <vector>

#include "qsg/linsg.hpp"
#include "qsg/psg.hpp"

namespace qsg {

// Malformed input; each issue is "<json pointer>: <message>".
class SchemaError : public std::runtime_error {
 public:
  explicit SchemaError(std::vector<std::string> issues);
  const std::vector<std::string>& issues() const { return issues_; }
  json to_json() const;

 private:
  std::vector<std::string> issues_;
};

// "p/q" strings or integers; floats are rejected
json rational_to_json(const Rational& q);
Rational rational_from_json(const json& j, const std::string& pointer = "");

// {"n": int, "matrix": [[...]]} (symmetric), or {"n": int, "monomials": {"x1*x2": "p/q", "x3^2": "1"}}.
// A monomial map splits off-diagonal coefficients evenly across the two matrix entries.
json quadform_to_json(const QuadForm& Q);
QuadForm quadform_from_json(const json& j, const std::string& pointer = "", std::size_t n_hint = 0);

// {"n": int, "forms": [...], "delta": "p/q", "seed": int}; delta and seed optional
json config_to_json(const Configuration& c);
Configuration config_from_json(const json& j);

// C tested against rad<A, B>
struct Triple {
  std::size_t n = 0;
  QuadForm A, B, C;
};
json triple_to_json(const Triple& t);
Triple triple_from_json(const json& j);

// {"dim": int, "points": [["p/q", ...], ...]}
json pointset_to_json(const PointSet& p);
PointSet pointset_from_json(const json& j);

json vector_to_json(const Vec<Rational>& v);
// basis rows
json subspace_to_json(const Subspace& V);
Subspace subspace_from_json(const json& j, std::size_t n, const std::string& pointer = "");

// reads and parses a file; unreadable or unparsable input raises SchemaError at "/"
json read_json_file(const std::string& path);

}  // namespace qsg
