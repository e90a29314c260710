#pragma once

#include <stdexcept>
#include <string>

#include "json.hpp"

namespace qsg {

using json = nlohmann::json;

// A runtime-checked step of the underlying argument did not hold on concrete data.
class AssertionFailure : public std::runtime_error {
 public:
  AssertionFailure(std::string claim, const std::string& what, json detail = json::object())
      : std::runtime_error(claim + ": " + what), claim_(std::move(claim)), detail_(std::move(detail)) {}
  const std::string& claim() const { return claim_; }
  const json& detail() const { return detail_; }
  json to_json() const {
    return json{{"status", "paper-assertion-failure"}, {"claim", claim_}, {"message", what()}, {"detail", detail_}};
  }

 private:
  std::string claim_;
  json detail_;
};

// Caller-side precondition violation.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A step that has a fixed resource allowance ran out of it.
class ResourceExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& claim, const std::string& what, const json& detail = json::object()) {
  if (!cond) throw AssertionFailure(claim, what, detail);
}

}  // namespace qsg
