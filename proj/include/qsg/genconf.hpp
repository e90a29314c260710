#pragma once

#include <random>
#include <vector>

#include "qsg/psg.hpp"

namespace qsg {

class GenerationExhausted : public ResourceExhausted {
 public:
  using ResourceExhausted::ResourceExhausted;
};

struct GenOptions {
  int retries = 50;
  long coeff_bound = 3;  // coefficients drawn from [-bound, bound]
  // template families also emit a second witness per triple, so no member is isolated
  bool closed = false;
  RadicalOptions radical;
};

Vec<Rational> random_linear_form(std::mt19937_64& rng, std::size_t n, long bound = 3);
// symmetric matrix with entries in [-bound, bound] of rank >= min_rank
QuadForm random_quadric(std::mt19937_64& rng, std::size_t n, std::size_t min_rank, long bound = 3);

// {v1 l_i + v2^2} u {v1 u_j - v2^2} u {v2 (l_i + u_j) + P_i - Q_j}; needs n >= k + 4
// closed: also v2 (l_i + u_j) + 2 P_i - Q_j
Configuration gen_case_iii_template(std::size_t k, std::size_t n, unsigned long long seed, const GenOptions& opt = {});
// {A} u {A + l_i^2} u {A + l_i c_i} around a rank >= 6 anchor; needs n >= 6
// closed: also A + 2 l_i c_i
Configuration gen_case_ii_template(std::size_t k, std::size_t n, unsigned long long seed, const GenOptions& opt = {});
// {A + jB : j = 0..k-1}; needs k >= 1, n >= 3
Configuration gen_case_i_pencil(std::size_t k, std::size_t n, unsigned long long seed, const GenOptions& opt = {});

struct MixResult {
  Configuration config;
  Rational delta_actual;
  std::vector<std::size_t> sizes;  // member count contributed by each input, then the noise count
};
// union of same-ambient configurations plus `noise` random quadrics; delta measured by verify_psg
MixResult mix(const std::vector<Configuration>& parts, std::size_t noise, unsigned long long seed,
              const GenOptions& opt = {});

}  // namespace qsg
