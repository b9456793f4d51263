#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "gbsel/polynomial.hpp"

namespace gbsel {

/// S(f, g) = (x^γ / LT(f)) f - (x^γ / LT(g)) g with x^γ = lcm(LM f, LM g).
inline Polynomial s_polynomial(const Polynomial& f, const Polynomial& g) {
  if (f.is_zero() || g.is_zero()) throw std::invalid_argument("S-polynomial of zero polynomial");
  check_compatible(f, g);
  const PrimeField& F = f.field();
  const Monomial gamma = lcm(f.lead_monomial(), g.lead_monomial());
  Polynomial left = mul_term(f, F.inv(f.lead_coeff()), quotient(gamma, f.lead_monomial()));
  return sub_scaled(left, F.inv(g.lead_coeff()), quotient(gamma, g.lead_monomial()), g);
}

/// Sugar of S(f, g) given the sugars of f and g.
inline int s_polynomial_sugar(const Monomial& lead_f, int sugar_f, const Monomial& lead_g,
                              int sugar_g) {
  const int gamma = lcm(lead_f, lead_g).degree();
  return std::max(sugar_f + gamma - lead_f.degree(), sugar_g + gamma - lead_g.degree());
}

struct ReductionResult {
  Polynomial remainder;
  /// Number of subtraction steps h <- h - (LT(h)/LT(g)) g executed.
  long additions = 0;
  /// Sugar of the remainder; -1 when sugars were not tracked.
  int sugar = -1;
};

/// Divisor lookup table for a generator list: indices sorted ascending by
/// leading monomial in grevlex, ties by index, so the first divisor found is
/// the grevlex-smallest one.
class ReducerIndex {
 public:
  ReducerIndex() = default;
  explicit ReducerIndex(std::span<const Polynomial> G) {
    for (std::size_t i = 0; i < G.size(); ++i) add(G[i], static_cast<int>(i));
  }

  /// Register generator `index`. Zero polynomials are ignored.
  void add(const Polynomial& g, int index) {
    if (g.is_zero()) return;
    Entry e{index, g.lead_monomial(), g.lead_monomial().support()};
    auto pos = std::upper_bound(entries_.begin(), entries_.end(), e, [](const Entry& a, const Entry& b) {
      auto c = grevlex_cmp(a.lead, b.lead);
      return c < 0 || (c == 0 && a.index < b.index);
    });
    entries_.insert(pos, std::move(e));
  }

  /// Index of the preferred divisor of `m`, or -1.
  int find_divisor(const Monomial& m) const {
    const std::uint32_t supp = m.support();
    for (const Entry& e : entries_) {
      if (e.lead.degree() > m.degree()) continue;
      if ((e.support & ~supp) != 0) continue;
      if (divides(e.lead, m)) return e.index;
    }
    return -1;
  }

  bool empty() const noexcept { return entries_.empty(); }

 private:
  struct Entry {
    int index;
    Monomial lead;
    std::uint32_t support;
  };
  std::vector<Entry> entries_;
};

namespace detail {

/// out = h[head..] - c*m*f, written into `out`.
inline void sub_scaled_into(const std::vector<Term>& h, std::size_t head, FieldElement c,
                            const Monomial& m, const Polynomial& f, std::vector<Term>& out) {
  const PrimeField& F = f.field();
  out.clear();
  out.reserve(h.size() - head + f.size());
  const FieldElement nc = F.neg(c);
  auto hit = h.begin() + static_cast<std::ptrdiff_t>(head);
  auto fit = f.terms().begin();
  const auto fend = f.terms().end();
  while (hit != h.end() && fit != fend) {
    Monomial fm = fit->monomial * m;
    auto ord = grevlex_cmp(hit->monomial, fm);
    if (ord > 0) {
      out.push_back(*hit++);
    } else if (ord < 0) {
      out.push_back({F.mul(nc, fit->coeff), fm});
      ++fit;
    } else {
      FieldElement s = F.add(hit->coeff, F.mul(nc, fit->coeff));
      if (!s.is_zero()) out.push_back({s, hit->monomial});
      ++hit;
      ++fit;
    }
  }
  out.insert(out.end(), hit, h.end());
  for (; fit != fend; ++fit) out.push_back({F.mul(nc, fit->coeff), fit->monomial * m});
}

}  // namespace detail

/// Full (lead and tail) reduction of `h` by `G` using the divisor order of
/// `index`. When `sugars` is non-empty it holds one sugar per generator and
/// the result carries the propagated sugar of the remainder.
inline ReductionResult reduce(const Polynomial& h, std::span<const Polynomial> G,
                              const ReducerIndex& index, int h_sugar = -1,
                              std::span<const int> sugars = {}) {
  ReductionResult res;
  res.sugar = h_sugar;
  const bool track = !sugars.empty();
  const PrimeField& F = h.field();
  std::vector<Term> work = h.terms();
  std::vector<Term> scratch;
  std::vector<Term> rem;
  std::size_t head = 0;
  while (head < work.size()) {
    const Term& lt = work[head];
    int k = index.find_divisor(lt.monomial);
    if (k < 0) {
      rem.push_back(lt);
      ++head;
      continue;
    }
    const Polynomial& g = G[static_cast<std::size_t>(k)];
    check_compatible(h, g);
    const Monomial m = quotient(lt.monomial, g.lead_monomial());
    const FieldElement c = F.div(lt.coeff, g.lead_coeff());
    detail::sub_scaled_into(work, head, c, m, g, scratch);
    std::swap(work, scratch);
    head = 0;
    ++res.additions;
    if (track) res.sugar = std::max(res.sugar, m.degree() + sugars[static_cast<std::size_t>(k)]);
  }
  res.remainder = Polynomial::from_terms(h.nvars(), F, std::move(rem));
#ifdef GBSEL_CHECK_INVARIANTS
  for (const Term& t : res.remainder.terms())
    if (index.find_divisor(t.monomial) >= 0)
      throw std::logic_error("reduce postcondition violated: remainder term is reducible");
#endif
  return res;
}

inline ReductionResult reduce(const Polynomial& h, std::span<const Polynomial> G) {
  return reduce(h, G, ReducerIndex(G));
}

}  // namespace gbsel
