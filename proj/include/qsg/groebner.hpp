#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "qsg/quadform.hpp"

namespace qsg::gb {

constexpr std::size_t MAXV = 32;

enum class Order { Grevlex, Lex };

struct Mono {
  std::array<std::uint8_t, MAXV> e{};
  std::uint16_t deg = 0;

  static Mono var(std::size_t i, unsigned power = 1);
  Mono operator*(const Mono& o) const;
  bool divides(const Mono& o) const;
  Mono operator/(const Mono& o) const;  // requires o.divides(*this)
  static Mono lcm(const Mono& a, const Mono& b);
  bool coprime(const Mono& o) const;
  bool operator==(const Mono& o) const { return deg == o.deg && e == o.e; }
};

// >0 when a > b in the order
int compare(const Mono& a, const Mono& b, Order ord);

struct Term {
  Mono m;
  Rational c;
};

// Polynomial over Q with terms sorted descending in its order.
class Poly {
 public:
  Poly() = default;
  Poly(std::size_t nvars, Order ord = Order::Grevlex);

  static Poly constant(std::size_t nvars, const Rational& c, Order ord = Order::Grevlex);
  static Poly variable(std::size_t nvars, std::size_t i, Order ord = Order::Grevlex);
  static Poly monomial(std::size_t nvars, const Mono& m, const Rational& c, Order ord = Order::Grevlex);
  // x^T M x on the first Q.n() variables of an nvars-variable ring
  static Poly from_quadform(const QuadForm& Q, std::size_t nvars, Order ord = Order::Grevlex);
  static Poly from_linear(const Vec<Rational>& l, std::size_t nvars, Order ord = Order::Grevlex);

  std::size_t nvars() const { return n_; }
  Order order() const { return ord_; }
  bool is_zero() const { return t_.empty(); }
  bool is_constant() const { return t_.size() == 1 && t_[0].m.deg == 0; }
  const std::vector<Term>& terms() const { return t_; }
  const Term& lead() const { return t_.front(); }
  int degree() const;
  bool homogeneous() const;

  Poly operator+(const Poly& o) const;
  Poly operator-(const Poly& o) const;
  Poly operator*(const Poly& o) const;
  Poly operator*(const Rational& s) const;
  Poly operator-() const { return *this * Rational(-1); }
  Poly mul_term(const Mono& m, const Rational& c) const;
  Poly monic() const;
  Poly pow(unsigned k) const;
  bool operator==(const Poly& o) const;

  std::string str() const;

 private:
  friend Poly sub_mul_term(const Poly&, const Poly&, const Mono&, const Rational&);
  friend Poly normal_form(const Poly&, const std::vector<Poly>&);
  std::size_t n_ = 0;
  Order ord_ = Order::Grevlex;
  std::vector<Term> t_;
};

Poly with_order(const Poly& p, Order ord);
// p with variable i replaced by a constant
Poly substitute(const Poly& p, std::size_t i, const Rational& value);
// true if only variable i occurs; fills the dense coefficients (low degree first)
bool univariate_in(const Poly& p, std::size_t i, std::vector<Rational>* coeffs = nullptr);

// a - c * m * b
Poly sub_mul_term(const Poly& a, const Poly& b, const Mono& m, const Rational& c);

struct Budget {
  std::size_t max_spolys = 20000;
  double max_seconds = 60.0;
};

enum class Status { Complete, Exhausted };

struct GbResult {
  Status status = Status::Complete;
  std::vector<Poly> basis;  // reduced and monic when complete
  std::size_t spolys = 0;
  std::size_t pairs_skipped = 0;
  double seconds = 0;
  bool complete() const { return status == Status::Complete; }
};

// Buchberger with the Gebauer-Moller criteria; pairs chosen by degree of lcm, then order, then index.
GbResult buchberger(const std::vector<Poly>& gens, const Budget& budget = {});

Poly normal_form(const Poly& f, const std::vector<Poly>& basis);
bool ideal_membership(const Poly& f, const std::vector<Poly>& basis);
bool is_proper(const std::vector<Poly>& basis);
// every S-polynomial of the basis reduces to zero
bool is_groebner_basis(const std::vector<Poly>& basis);

enum class Decision { Yes, No, Undecided };
std::string to_string(Decision d);

struct RabinowitschResult {
  Decision decision = Decision::Undecided;
  std::size_t spolys = 0;
  double seconds = 0;
};
// C in rad<gens> iff 1 in <gens, 1 - t C> with t a fresh last variable
RabinowitschResult rabinowitsch(const Poly& C, const std::vector<Poly>& gens, const Budget& budget = {});
RabinowitschResult rabinowitsch(const QuadForm& C, const QuadForm& A, const QuadForm& B, const Budget& budget = {});

// properness of the ideal over C, or Undecided on budget exhaustion
Decision solvable(const std::vector<Poly>& gens, const Budget& budget = {});

}  // namespace qsg::gb
