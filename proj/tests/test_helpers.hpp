#pragma once

// Shared fixtures and independent oracles for the unit tests.

#include <set>
#include <string>
#include <vector>

#include "gbsel/groebner.hpp"
#include "gbsel/ideal_gen.hpp"

namespace gbsel::testing {

inline Polynomial P(const std::string& text, int nvars, std::uint32_t p = kDefaultPrime) {
  return parse_polynomial(text, nvars, PrimeField(p));
}

inline std::vector<Polynomial> Ps(std::initializer_list<const char*> texts, int nvars,
                                  std::uint32_t p = kDefaultPrime) {
  std::vector<Polynomial> out;
  for (const char* t : texts) out.push_back(P(t, nvars, p));
  return out;
}

/// x^3 + y^2, x^2 y - 1 in two variables.
inline std::vector<Polynomial> circle_example() { return Ps({"x0^3 + x1^2", "x0^2*x1 - 1"}, 2); }

/// Textbook division written directly from the definition: at every step scan
/// all divisors, take the grevlex-smallest leading monomial (lowest index on
/// ties), and record the quotient. Independent of ReducerIndex.
struct DivisionTrace {
  std::vector<Polynomial> quotients;
  Polynomial remainder;
  long steps = 0;
};

inline DivisionTrace oracle_divide(const Polynomial& h, const std::vector<Polynomial>& G) {
  const PrimeField F = h.field();
  DivisionTrace tr;
  tr.quotients.assign(G.size(), Polynomial(h.nvars(), F));
  tr.remainder = Polynomial(h.nvars(), F);
  Polynomial p = h;
  while (!p.is_zero()) {
    const Term lt = p.lead_term();
    int best = -1;
    for (std::size_t k = 0; k < G.size(); ++k) {
      if (G[k].is_zero()) continue;
      bool div = true;
      for (int v = 0; v < h.nvars(); ++v)
        if (G[k].lead_monomial()[v] > lt.monomial[v]) div = false;
      if (!div) continue;
      if (best < 0 || grevlex_cmp(G[k].lead_monomial(), G[static_cast<std::size_t>(best)].lead_monomial()) < 0)
        best = static_cast<int>(k);
    }
    Polynomial lead_only = Polynomial::monomial(F, lt.coeff, lt.monomial);
    if (best < 0) {
      tr.remainder = tr.remainder + lead_only;
      p = p - lead_only;
      continue;
    }
    const Polynomial& g = G[static_cast<std::size_t>(best)];
    std::vector<int> q(static_cast<std::size_t>(h.nvars()));
    for (int v = 0; v < h.nvars(); ++v) q[static_cast<std::size_t>(v)] = lt.monomial[v] - g.lead_monomial()[v];
    Polynomial qt = Polynomial::monomial(F, F.div(lt.coeff, g.lead_coeff()), Monomial(std::span<const int>(q)));
    tr.quotients[static_cast<std::size_t>(best)] = tr.quotients[static_cast<std::size_t>(best)] + qt;
    p = p - qt * g;
    ++tr.steps;
  }
  return tr;
}

/// Σ q_k g_k + r, re-multiplied from a division trace.
inline Polynomial recombine(const DivisionTrace& tr, const std::vector<Polynomial>& G) {
  Polynomial acc = tr.remainder;
  for (std::size_t k = 0; k < G.size(); ++k) acc = acc + tr.quotients[k] * G[k];
  return acc;
}

/// Buchberger's criterion checked exhaustively over all pairs.
inline bool is_groebner_basis(const std::vector<Polynomial>& G) {
  for (std::size_t i = 0; i < G.size(); ++i)
    for (std::size_t j = i + 1; j < G.size(); ++j)
      if (!reduce(s_polynomial(G[i], G[j]), G).remainder.is_zero()) return false;
  return true;
}

inline std::set<std::string> as_string_set(const std::vector<Polynomial>& G) {
  std::set<std::string> s;
  for (const Polynomial& g : G) s.insert(to_string(g));
  return s;
}

}  // namespace gbsel::testing
