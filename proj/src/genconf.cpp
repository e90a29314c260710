#include "qsg/genconf.hpp"

#include <set>

namespace qsg {

namespace {

bool valid(const Configuration& c) {
  try {
    c.validate();
    return true;
  } catch (const PreconditionError&) {
    return false;
  }
}

bool in_radical(const QuadForm& C, const QuadForm& A, const QuadForm& B, const GenOptions& opt) {
  return radical_membership(C, A, B, opt.radical).decision == Decision::Yes;
}

[[noreturn]] void exhausted(const std::string& what, const GenOptions& opt) {
  throw GenerationExhausted(what + ": no valid draw in " + std::to_string(opt.retries) + " attempts");
}

}  // namespace

Vec<Rational> random_linear_form(std::mt19937_64& rng, std::size_t n, long bound) {
  std::uniform_int_distribution<long> d(-bound, bound);
  Vec<Rational> v(n, 0);
  while (is_zero_vec(v))
    for (auto& x : v) x = d(rng);
  return v;
}

QuadForm random_quadric(std::mt19937_64& rng, std::size_t n, std::size_t min_rank, long bound) {
  if (min_rank > n) throw PreconditionError("random_quadric: rank " + std::to_string(min_rank) + " exceeds n");
  std::uniform_int_distribution<long> d(-bound, bound);
  for (;;) {
    QMatrix M(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) M(i, j) = M(j, i) = d(rng);
    QuadForm Q(M);
    if (Q.rank() >= min_rank) return Q;
  }
}

Configuration gen_case_iii_template(std::size_t k, std::size_t n, unsigned long long seed, const GenOptions& opt) {
  if (k < 1) throw PreconditionError("gen_case_iii_template needs k >= 1");
  if (n < k + 4) throw PreconditionError("gen_case_iii_template needs n >= k + 4");
  std::mt19937_64 rng(seed);
  for (int attempt = 0; attempt < opt.retries; ++attempt) {
    Vec<Rational> v1 = random_linear_form(rng, n, opt.coeff_bound), v2 = random_linear_form(rng, n, opt.coeff_bound);
    if (Subspace::span(n, {v1, v2}).dim() < 2) continue;
    std::vector<Vec<Rational>> ls, us;
    for (std::size_t i = 0; i < k; ++i) ls.push_back(random_linear_form(rng, n, opt.coeff_bound));
    for (std::size_t j = 0; j < k; ++j) us.push_back(random_linear_form(rng, n, opt.coeff_bound));
    const QuadForm v2sq = QuadForm::square(v2);
    std::vector<QuadForm> P, Q;
    for (const auto& l : ls) P.push_back(QuadForm::product(v1, l) + v2sq);
    for (const auto& u : us) Q.push_back(QuadForm::product(v1, u) - v2sq);
    Configuration c;
    c.n = n;
    c.seed = seed;
    for (std::size_t i = 0; i < k; ++i) {
      P[i].name = "P" + std::to_string(i + 1);
      c.forms.push_back(P[i]);
    }
    for (std::size_t j = 0; j < k; ++j) {
      Q[j].name = "Q" + std::to_string(j + 1);
      c.forms.push_back(Q[j]);
    }
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) {
        Vec<Rational> s(n);
        for (std::size_t t = 0; t < n; ++t) s[t] = ls[i][t] + us[j][t];
        QuadForm T = QuadForm::product(v2, s) + P[i] - Q[j];
        T.name = "T" + std::to_string(i + 1) + std::to_string(j + 1);
        c.forms.push_back(T);
      }
    if (opt.closed)
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
          QuadForm T = c[2 * k + i * k + j] + P[i];
          T.name = "T'" + std::to_string(i + 1) + std::to_string(j + 1);
          c.forms.push_back(T);
        }
    if (!valid(c)) continue;
    bool ok = true;
    for (std::size_t t = 2 * k; t < c.size() && ok; ++t) {
      const std::size_t ij = (t - 2 * k) % (k * k);
      ok = in_radical(c[t], P[ij / k], Q[ij % k], opt);
    }
    if (ok) return c;
  }
  exhausted("gen_case_iii_template", opt);
}

Configuration gen_case_ii_template(std::size_t k, std::size_t n, unsigned long long seed, const GenOptions& opt) {
  if (k < 1) throw PreconditionError("gen_case_ii_template needs k >= 1");
  if (n < 6) throw PreconditionError("gen_case_ii_template needs n >= 6 for a rank-6 anchor");
  std::mt19937_64 rng(seed);
  for (int attempt = 0; attempt < opt.retries; ++attempt) {
    QuadForm A = random_quadric(rng, n, 6, opt.coeff_bound);
    A.name = "A";
    Configuration c;
    c.n = n;
    c.seed = seed;
    c.forms.push_back(A);
    std::vector<std::pair<QuadForm, QuadForm>> pairs;
    for (std::size_t i = 0; i < k; ++i) {
      Vec<Rational> l = random_linear_form(rng, n, opt.coeff_bound), ci = random_linear_form(rng, n, opt.coeff_bound);
      QuadForm S = A + QuadForm::square(l), C = A + QuadForm::product(l, ci);
      S.name = "S" + std::to_string(i + 1);
      C.name = "C" + std::to_string(i + 1);
      c.forms.push_back(S);
      c.forms.push_back(C);
      pairs.emplace_back(S, C);
      if (opt.closed) {
        QuadForm C2 = C + QuadForm::product(l, ci);
        C2.name = "C'" + std::to_string(i + 1);
        c.forms.push_back(C2);
        pairs.emplace_back(S, C2);
      }
    }
    if (!valid(c)) continue;
    bool ok = true;
    for (const auto& [S, C] : pairs) ok = ok && in_radical(C, A, S, opt);
    if (ok) return c;
  }
  exhausted("gen_case_ii_template", opt);
}

Configuration gen_case_i_pencil(std::size_t k, std::size_t n, unsigned long long seed, const GenOptions& opt) {
  if (k < 1) throw PreconditionError("gen_case_i_pencil needs k >= 1");
  if (n < 3) throw PreconditionError("gen_case_i_pencil needs n >= 3");
  std::mt19937_64 rng(seed);
  for (int attempt = 0; attempt < opt.retries; ++attempt) {
    QuadForm A = random_quadric(rng, n, 3, opt.coeff_bound), B = random_quadric(rng, n, 3, opt.coeff_bound);
    Configuration c;
    c.n = n;
    c.seed = seed;
    for (std::size_t j = 0; j < k; ++j) {
      QuadForm Q = A + B * Rational(static_cast<long>(j));
      Q.name = "A+" + std::to_string(j) + "B";
      c.forms.push_back(Q);
    }
    if (valid(c)) return c;
  }
  exhausted("gen_case_i_pencil", opt);
}

MixResult mix(const std::vector<Configuration>& parts, std::size_t noise, unsigned long long seed,
              const GenOptions& opt) {
  if (parts.empty() && noise == 0) throw PreconditionError("mix needs at least one part or noise member");
  const std::size_t n = parts.empty() ? 3 : parts.front().n;
  MixResult out;
  out.config.n = n;
  out.config.seed = seed;
  std::set<std::string> keys;
  auto push = [&](const QuadForm& Q) {
    if (!Q.irreducible() || !keys.insert(Q.canonical().key()).second) return false;
    out.config.forms.push_back(Q);
    return true;
  };
  for (std::size_t p = 0; p < parts.size(); ++p) {
    if (parts[p].n != n) throw PreconditionError("mix: parts live in different ambient spaces");
    std::size_t added = 0;
    for (QuadForm Q : parts[p].forms) {
      Q.name = "p" + std::to_string(p) + ":" + Q.name;
      added += push(Q);
    }
    out.sizes.push_back(added);
  }
  std::mt19937_64 rng(seed);
  std::size_t added = 0;
  for (int attempt = 0; added < noise; ++attempt) {
    if (attempt >= opt.retries * static_cast<int>(noise + 1)) exhausted("mix noise", opt);
    QuadForm Q = random_quadric(rng, n, std::min<std::size_t>(n, 3), opt.coeff_bound);
    Q.name = "noise" + std::to_string(added + 1);
    added += push(Q);
  }
  out.sizes.push_back(added);
  out.delta_actual = verify_psg(out.config, PsgOptions{opt.radical, false}).delta_actual;
  return out;
}

}  // namespace qsg
