#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "gbsel/random.hpp"
#include "gbsel/reduction.hpp"

namespace gbsel {

/// A critical pair (G[i], G[j]) with i < j and cached metadata.
struct SPair {
  static constexpr int kUnknownDegree = std::numeric_limits<int>::min();

  int i = 0;
  int j = 0;
  Monomial lcm;
  int degree = 0;
  int sugar = 0;
  /// Monotone over a run; orders the pair set.
  std::uint64_t seq = 0;
  /// Degree of the S-polynomial itself, filled in on first use (-1 for a
  /// zero S-polynomial).
  mutable int spoly_degree = kUnknownDegree;
};

enum class UpdateRule {
  /// Gebauer–Möller pair elimination; each lcm class keeps its earliest pair.
  gebauer_moller,
  /// Gebauer–Möller keeping the latest pair of each lcm class instead.
  gebauer_moller_latest,
  /// P ∪ {(g, r) : g ∈ G}; kept for differential testing.
  naive,
};

/// What happened when one pair was processed.
struct PairOutcome {
  SPair pair;
  /// 1 for the subtraction forming the S-polynomial plus every reduction step.
  long additions = 0;
  bool zero_remainder = false;
  std::size_t pairs_before = 0;
};

/// Generator list, live pair set and bookkeeping for one Buchberger run.
/// Generators are never mutated once appended, so pair metadata stays valid.
class BuchbergerState {
 public:
  BuchbergerState() = default;
  BuchbergerState(int nvars, PrimeField field, UpdateRule rule = UpdateRule::gebauer_moller)
      : nvars_(nvars), field_(field), rule_(rule) {}

  /// Initial state: generators inserted one at a time through the update
  /// rule, so pair elimination also applies to the input pairs. Sugar of an
  /// input generator is its total degree.
  static BuchbergerState from_generators(std::span<const Polynomial> F,
                                         UpdateRule rule = UpdateRule::gebauer_moller) {
    if (F.empty()) throw std::invalid_argument("ideal must have at least one generator");
    BuchbergerState s(F.front().nvars(), F.front().field(), rule);
    for (const Polynomial& f : F) {
      if (f.is_zero()) throw std::invalid_argument("input generators must be nonzero");
      check_compatible(F.front(), f);
      s.add_generator(f, f.degree());
    }
    return s;
  }

  /// State with a caller-chosen pair set (indices into G). No elimination is
  /// applied to the given pairs.
  static BuchbergerState with_pairs(std::vector<Polynomial> G,
                                    std::span<const std::pair<int, int>> pairs,
                                    UpdateRule rule = UpdateRule::gebauer_moller) {
    if (G.empty()) throw std::invalid_argument("generator list must be non-empty");
    BuchbergerState s(G.front().nvars(), G.front().field(), rule);
    for (Polynomial& g : G) {
      if (g.is_zero()) throw std::invalid_argument("generators must be nonzero");
      check_compatible(G.front(), g);
      const int sugar = g.degree();
      s.append(std::move(g), sugar);
    }
    for (auto [i, j] : pairs) {
      if (i < 0 || j < 0 || i == j || i >= s.generator_count() || j >= s.generator_count())
        throw std::out_of_range("pair index out of range");
      s.pairs_.push_back(s.make_pair(std::min(i, j), std::max(i, j)));
    }
    return s;
  }

  int nvars() const noexcept { return nvars_; }
  const PrimeField& field() const noexcept { return field_; }
  UpdateRule rule() const noexcept { return rule_; }
  const std::vector<Polynomial>& generators() const noexcept { return G_; }
  int generator_count() const noexcept { return static_cast<int>(G_.size()); }
  const std::vector<int>& sugars() const noexcept { return sugar_; }
  /// Live pairs in insertion order.
  const std::vector<SPair>& pairs() const noexcept { return pairs_; }
  bool done() const noexcept { return pairs_.empty(); }

  long additions() const noexcept { return additions_; }
  long pairs_processed() const noexcept { return processed_; }
  long zero_reductions() const noexcept { return zero_reductions_; }
  const std::vector<long>& per_pair_additions() const noexcept { return per_pair_; }

  /// Update the pair set for a new generator `r`, then append it to G.
  void add_generator(Polynomial r, int sugar) {
    if (r.is_zero()) throw std::invalid_argument("cannot add a zero generator");
    check_ring(r);
    std::vector<int> partners =
        rule_ == UpdateRule::naive ? all_partners() : gebauer_moller_partners(r.lead_monomial());
    append(std::move(r), sugar);
    const int m = generator_count() - 1;
    for (int k : partners) pairs_.push_back(make_pair(k, m));
  }

  /// Degree of S(G[i], G[j]), computed once per pair.
  int spoly_degree(const SPair& p) const {
    if (p.spoly_degree == SPair::kUnknownDegree)
      p.spoly_degree = s_polynomial(gen(p.i), gen(p.j)).degree();
    return p.spoly_degree;
  }

  /// Remove the pair at position `pos` of pairs(), reduce its S-polynomial
  /// against G and add a nonzero remainder as a new generator.
  PairOutcome process(std::size_t pos) {
    if (pos >= pairs_.size()) throw InvalidAction("pair position out of range");
    PairOutcome out;
    out.pairs_before = pairs_.size();
    out.pair = pairs_[pos];
    pairs_.erase(pairs_.begin() + static_cast<std::ptrdiff_t>(pos));
    Polynomial s = s_polynomial(gen(out.pair.i), gen(out.pair.j));
    ReductionResult red = reduce(s, G_, index_, out.pair.sugar, sugar_);
    out.additions = 1 + red.additions;
    out.zero_remainder = red.remainder.is_zero();
    additions_ += out.additions;
    ++processed_;
    per_pair_.push_back(out.additions);
    if (out.zero_remainder)
      ++zero_reductions_;
    else
      add_generator(std::move(red.remainder), red.sugar);
    return out;
  }

 private:
  const Polynomial& gen(int k) const { return G_[static_cast<std::size_t>(k)]; }

  void check_ring(const Polynomial& r) const {
    if (r.nvars() != nvars_ || !(r.field() == field_))
      throw DimensionError("generator does not live in the state's ring");
  }

  SPair make_pair(int i, int j) {
    const Monomial& a = gen(i).lead_monomial();
    const Monomial& b = gen(j).lead_monomial();
    SPair p;
    p.i = i;
    p.j = j;
    p.lcm = lcm(a, b);
    p.degree = p.lcm.degree();
    p.sugar = s_polynomial_sugar(a, sugar_[static_cast<std::size_t>(i)], b,
                                 sugar_[static_cast<std::size_t>(j)]);
    p.seq = next_seq_++;
    return p;
  }

  void append(Polynomial r, int sugar) {
    G_.push_back(std::move(r));
    sugar_.push_back(sugar);
    index_.add(G_.back(), generator_count() - 1);
  }

  std::vector<int> all_partners() const {
    std::vector<int> ks(G_.size());
    for (std::size_t k = 0; k < ks.size(); ++k) ks[k] = static_cast<int>(k);
    return ks;
  }

  // Gebauer–Möller: drops old pairs via criterion B, then keeps at most one
  // new pair per minimal lcm class and discards classes containing a pair
  // with coprime leading monomials. Returns the surviving partner indices
  // in increasing order.
  std::vector<int> gebauer_moller_partners(const Monomial& lr) {
    std::erase_if(pairs_, [&](const SPair& p) {
      if (!divides(lr, p.lcm)) return false;
      return p.lcm != lcm(gen(p.i).lead_monomial(), lr) && p.lcm != lcm(gen(p.j).lead_monomial(), lr);
    });

    struct Candidate {
      Monomial lcm;
      int k;
    };
    std::vector<Candidate> cand;
    cand.reserve(G_.size());
    for (int k = 0; k < generator_count(); ++k) cand.push_back({lcm(gen(k).lead_monomial(), lr), k});
    std::stable_sort(cand.begin(), cand.end(), [](const Candidate& a, const Candidate& b) {
      return grevlex_cmp(a.lcm, b.lcm) < 0;
    });

    std::vector<Monomial> minimal;
    std::vector<int> partners;
    for (std::size_t a = 0; a < cand.size();) {
      std::size_t b = a;
      while (b < cand.size() && cand[b].lcm == cand[a].lcm) ++b;
      const Monomial& gamma = cand[a].lcm;
      // Candidates are sorted ascending, so any proper divisor of gamma
      // among the lcms has already been seen.
      const bool dominated = std::any_of(minimal.begin(), minimal.end(),
                                         [&](const Monomial& q) { return divides(q, gamma); });
      if (!dominated) {
        minimal.push_back(gamma);
        const bool has_coprime = std::any_of(cand.begin() + static_cast<std::ptrdiff_t>(a),
                                             cand.begin() + static_cast<std::ptrdiff_t>(b),
                                             [&](const Candidate& c) { return coprime(gen(c.k).lead_monomial(), lr); });
        if (!has_coprime)
          partners.push_back(rule_ == UpdateRule::gebauer_moller_latest ? cand[b - 1].k : cand[a].k);
      }
      a = b;
    }
    std::sort(partners.begin(), partners.end());
    return partners;
  }

  std::vector<Polynomial> G_;
  std::vector<int> sugar_;
  std::vector<SPair> pairs_;
  ReducerIndex index_;
  std::uint64_t next_seq_ = 0;
  long additions_ = 0;
  long processed_ = 0;
  long zero_reductions_ = 0;
  std::vector<long> per_pair_;
  int nvars_ = 0;
  PrimeField field_{};
  UpdateRule rule_ = UpdateRule::gebauer_moller;
};

// ---------------------------------------------------------------------------
// Selection strategies

enum class Strategy { first, degree, normal, sugar, random, true_degree };

inline constexpr Strategy kAllStrategies[] = {Strategy::first,  Strategy::degree, Strategy::normal,
                                              Strategy::sugar,  Strategy::random, Strategy::true_degree};

inline std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::first: return "first";
    case Strategy::degree: return "degree";
    case Strategy::normal: return "normal";
    case Strategy::sugar: return "sugar";
    case Strategy::random: return "random";
    case Strategy::true_degree: return "truedegree";
  }
  return "?";
}

inline Strategy parse_strategy(std::string_view name) {
  std::string s(name);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  std::erase(s, '_');
  std::erase(s, '-');
  for (Strategy k : kAllStrategies)
    if (to_string(k) == s) return k;
  throw std::invalid_argument("unknown strategy '" + std::string(name) + "'");
}

namespace detail {

// Tie-break shared by every deterministic strategy: minimal j, then minimal i.
inline int first_cmp(const SPair& a, const SPair& b) {
  if (a.j != b.j) return a.j < b.j ? -1 : 1;
  if (a.i != b.i) return a.i < b.i ? -1 : 1;
  return 0;
}

template <class Less>
std::size_t argmin(const std::vector<SPair>& P, Less less) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < P.size(); ++k)
    if (less(P[k], P[best])) best = k;
  return best;
}

}  // namespace detail

/// Position in state.pairs() of the pair chosen by `strategy`. `rng` is only
/// consumed by Strategy::random.
inline std::size_t select(const BuchbergerState& state, Strategy strategy, Rng& rng) {
  const auto& P = state.pairs();
  if (P.empty()) throw InvalidState("select on an empty pair set");
  using detail::first_cmp;
  switch (strategy) {
    case Strategy::first:
      return detail::argmin(P, [](const SPair& a, const SPair& b) { return first_cmp(a, b) < 0; });
    case Strategy::degree:
      return detail::argmin(P, [](const SPair& a, const SPair& b) {
        if (a.degree != b.degree) return a.degree < b.degree;
        return first_cmp(a, b) < 0;
      });
    case Strategy::normal:
      return detail::argmin(P, [](const SPair& a, const SPair& b) {
        auto c = grevlex_cmp(a.lcm, b.lcm);
        if (c != 0) return c < 0;
        return first_cmp(a, b) < 0;
      });
    case Strategy::sugar:
      return detail::argmin(P, [](const SPair& a, const SPair& b) {
        if (a.sugar != b.sugar) return a.sugar < b.sugar;
        auto c = grevlex_cmp(a.lcm, b.lcm);
        if (c != 0) return c < 0;
        return first_cmp(a, b) < 0;
      });
    case Strategy::random:
      return rng.index(P.size());
    case Strategy::true_degree:
      return detail::argmin(P, [&](const SPair& a, const SPair& b) {
        const int da = state.spoly_degree(a), db = state.spoly_degree(b);
        if (da != db) return da < db;
        return first_cmp(a, b) < 0;
      });
  }
  throw std::invalid_argument("unknown strategy");
}

/// Callable selector wrapping a built-in strategy and its private RNG.
class StrategySelector {
 public:
  explicit StrategySelector(Strategy s, std::uint64_t seed = 0) : strategy_(s), rng_(seed, 0x5e1ec7) {}
  std::size_t operator()(const BuchbergerState& state) { return select(state, strategy_, rng_); }
  Strategy strategy() const noexcept { return strategy_; }

 private:
  Strategy strategy_;
  Rng rng_;
};

// ---------------------------------------------------------------------------
// Reduced bases and invariants

/// Fully interreduce G: repeatedly replace each generator by its normal form
/// with respect to the others (dropping zeros) until nothing changes, then
/// make every generator monic and sort ascending by leading monomial.
///
/// For a Gröbner basis this yields the unique minimal reduced Gröbner basis:
/// no monomial of g_i is divisible by LT(g_j) for j != i.
inline std::vector<Polynomial> reduce_basis(std::span<const Polynomial> G) {
  std::vector<Polynomial> work;
  for (const Polynomial& g : G)
    if (!g.is_zero()) work.push_back(g);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t k = 0; k < work.size();) {
      std::vector<Polynomial> others;
      others.reserve(work.size() - 1);
      for (std::size_t o = 0; o < work.size(); ++o)
        if (o != k) others.push_back(work[o]);
      ReductionResult red = reduce(work[k], others);
      if (red.additions == 0) {
        ++k;
        continue;
      }
      changed = true;
      if (red.remainder.is_zero()) {
        work.erase(work.begin() + static_cast<std::ptrdiff_t>(k));
      } else {
        work[k] = std::move(red.remainder);
        ++k;
      }
    }
  }
  for (Polynomial& g : work) g = g.monic();
  std::sort(work.begin(), work.end(), [](const Polynomial& a, const Polynomial& b) {
    return grevlex_cmp(a.lead_monomial(), b.lead_monomial()) < 0;
  });
  return work;
}

/// Krull dimension of R/I read off the leading monomials of a Gröbner basis
/// of I: the largest set S of variables such that no leading monomial is
/// supported inside S. Returns -1 for the unit ideal.
inline int dimension(std::span<const Monomial> leads, int nvars) {
  if (nvars < 0 || nvars > kMaxVars) throw DimensionError("bad variable count");
  std::vector<std::uint32_t> supports;
  for (const Monomial& m : leads) {
    if (m.nvars() != nvars) throw DimensionError("leading monomial has wrong variable count");
    if (m.is_one()) return -1;
    supports.push_back(m.support());
  }
  int best = 0;
  const std::uint32_t full = nvars == 32 ? ~0u : (1u << nvars) - 1;
  for (std::uint32_t S = 0;; ++S) {
    const int size = std::popcount(S);
    if (size > best) {
      const bool free = std::none_of(supports.begin(), supports.end(),
                                     [&](std::uint32_t s) { return (s & ~S) == 0; });
      if (free) best = size;
    }
    if (S == full) break;
  }
  return best;
}

inline int dimension_of_basis(std::span<const Polynomial> G) {
  if (G.empty()) throw std::invalid_argument("empty basis");
  std::vector<Monomial> leads;
  for (const Polynomial& g : G) leads.push_back(g.lead_monomial());
  return dimension(leads, G.front().nvars());
}

inline int max_degree(std::span<const Polynomial> G) {
  int d = 0;
  for (const Polynomial& g : G) d = std::max(d, g.degree());
  return d;
}

// ---------------------------------------------------------------------------
// Full runs

struct RunLimits {
  /// Stop after this many processed pairs; 0 disables the cap.
  long max_steps = 0;
  /// Compute basis_size / deg_max / dimension from the reduced basis.
  bool compute_invariants = true;
  UpdateRule rule = UpdateRule::gebauer_moller;
};

struct RunStats {
  long additions = 0;
  long pairs_processed = 0;
  long zero_reductions = 0;
  /// Size of the reduced minimal basis (raw generator count if invariants
  /// were not computed).
  long basis_size = 0;
  int deg_max = 0;
  int dimension = 0;
  bool truncated = false;
  /// Generators in the raw output of the run.
  long generators = 0;
  std::vector<long> per_pair_additions;
};

struct BuchbergerResult {
  std::vector<Polynomial> basis;
  RunStats stats;
};

/// Drive `state` to completion (or the step cap) with `selector`, a
/// callable `std::size_t(const BuchbergerState&)` returning a pair position.
template <class Selector>
RunStats run_to_completion(BuchbergerState& state, Selector&& selector, const RunLimits& limits = {}) {
  RunStats stats;
  long steps = 0;
  while (!state.done()) {
    if (limits.max_steps > 0 && steps >= limits.max_steps) {
      stats.truncated = true;
      break;
    }
    state.process(selector(static_cast<const BuchbergerState&>(state)));
    ++steps;
  }
  stats.additions = state.additions();
  stats.pairs_processed = state.pairs_processed();
  stats.zero_reductions = state.zero_reductions();
  stats.generators = state.generator_count();
  stats.per_pair_additions = state.per_pair_additions();
  if (limits.compute_invariants && !stats.truncated) {
    auto reduced = reduce_basis(state.generators());
    stats.basis_size = static_cast<long>(reduced.size());
    stats.deg_max = max_degree(reduced);
    stats.dimension = dimension_of_basis(reduced);
  } else {
    stats.basis_size = state.generator_count();
    stats.deg_max = max_degree(state.generators());
    stats.dimension = 0;
  }
  return stats;
}

template <class Selector>
BuchbergerResult buchberger(std::span<const Polynomial> F, Selector&& selector, const RunLimits& limits = {}) {
  BuchbergerState state = BuchbergerState::from_generators(F, limits.rule);
  RunStats stats = run_to_completion(state, selector, limits);
  return {state.generators(), std::move(stats)};
}

inline BuchbergerResult buchberger(std::span<const Polynomial> F, Strategy strategy, std::uint64_t seed = 0,
                                   const RunLimits& limits = {}) {
  return buchberger(F, StrategySelector(strategy, seed), limits);
}

}  // namespace gbsel
