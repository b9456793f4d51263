#pragma once

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gbsel/polynomial.hpp"
#include "gbsel/random.hpp"

namespace gbsel {

enum class Flavor { weighted, uniform };

inline std::string to_string(Flavor f) { return f == Flavor::weighted ? "weighted" : "uniform"; }

/// A distribution on s-tuples of binomials of degree <= d in n variables,
/// optionally with Poisson(λ) extra terms per generator.
struct DistributionSpec {
  int n = 3;
  int d = 20;
  int s = 10;
  Flavor flavor = Flavor::weighted;
  /// Poisson parameter for extra terms; absent means pure binomials.
  std::optional<double> extra_terms_lambda;
  std::uint32_t p = kDefaultPrime;

  void validate() const {
    if (n < 1 || n > kMaxVars) throw std::invalid_argument("spec: n must be in [1, " + std::to_string(kMaxVars) + "]");
    if (d < 1) throw std::invalid_argument("spec: d must be >= 1");
    if (s < 1) throw std::invalid_argument("spec: s must be >= 1");
    if (extra_terms_lambda && !(*extra_terms_lambda >= 0.0))
      throw std::invalid_argument("spec: lambda must be non-negative");
    (void)PrimeField(p);
  }

  PrimeField field() const { return PrimeField(p); }

  friend bool operator==(const DistributionSpec&, const DistributionSpec&) = default;
};

/// "n-d-s flavor", e.g. "3-20-10 weighted"; λ and a non-default prime are
/// appended as "lambda=0.5" and "p=101".
inline std::string to_string(const DistributionSpec& spec) {
  std::ostringstream os;
  os << spec.n << '-' << spec.d << '-' << spec.s << ' ' << to_string(spec.flavor);
  if (spec.extra_terms_lambda) {
    os.precision(17);
    os << " lambda=" << *spec.extra_terms_lambda;
  }
  if (spec.p != kDefaultPrime) os << " p=" << spec.p;
  return os.str();
}

inline DistributionSpec parse_spec(const std::string& text) {
  std::istringstream is(text);
  std::string nds;
  if (!(is >> nds)) throw ParseError("empty distribution spec");
  DistributionSpec spec;
  {
    char dash1 = 0, dash2 = 0;
    std::istringstream ns(nds);
    if (!(ns >> spec.n >> dash1 >> spec.d >> dash2 >> spec.s) || dash1 != '-' || dash2 != '-' || !ns.eof())
      throw ParseError("distribution spec must start with n-d-s, got '" + nds + "'");
  }
  std::string word;
  bool have_flavor = false;
  while (is >> word) {
    if (word == "weighted" || word == "uniform") {
      spec.flavor = word == "weighted" ? Flavor::weighted : Flavor::uniform;
      have_flavor = true;
    } else if (word.rfind("lambda=", 0) == 0) {
      try {
        std::size_t used = 0;
        spec.extra_terms_lambda = std::stod(word.substr(7), &used);
        if (used != word.size() - 7) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw ParseError("bad lambda in spec: '" + word + "'");
      }
    } else if (word.rfind("p=", 0) == 0) {
      try {
        spec.p = static_cast<std::uint32_t>(std::stoul(word.substr(2)));
      } catch (const std::exception&) {
        throw ParseError("bad prime in spec: '" + word + "'");
      }
    } else if (word.front() == '(' && word.back() == ')') {
      // "(weighted)" as in "3-20-10 (weighted)"
      std::string inner = word.substr(1, word.size() - 2);
      if (inner != "weighted" && inner != "uniform") throw ParseError("unknown flavor '" + word + "'");
      spec.flavor = inner == "weighted" ? Flavor::weighted : Flavor::uniform;
      have_flavor = true;
    } else {
      throw ParseError("unexpected token in spec: '" + word + "'");
    }
  }
  if (!have_flavor) throw ParseError("distribution spec needs a flavor (weighted or uniform)");
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
  return spec;
}

struct IdealSample {
  std::vector<Polynomial> generators;
  DistributionSpec spec;
  std::uint64_t seed = 0;
};

// ---------------------------------------------------------------------------
// Monomial sampling

/// C(n, k) as uint64; throws on overflow.
inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > std::numeric_limits<std::uint64_t>::max()) throw std::overflow_error("binomial coefficient overflow");
  }
  return static_cast<std::uint64_t>(r);
}

/// Number of monomials of exact degree t in n variables, C(t+n-1, n-1).
inline std::uint64_t monomial_count(int n, int t) {
  return binomial(static_cast<std::uint64_t>(t + n - 1), static_cast<std::uint64_t>(n - 1));
}

/// The rank-th monomial of degree t in n variables (stars and bars), with
/// ranks ordered lexicographically by exponent of x0 descending, then x1, ...
inline Monomial unrank_monomial(int n, int t, std::uint64_t rank) {
  if (rank >= monomial_count(n, t)) throw std::out_of_range("monomial rank out of range");
  std::vector<int> e(static_cast<std::size_t>(n), 0);
  int remaining = t;
  for (int i = 0; i < n - 1; ++i) {
    // Try exponent a for x_i from `remaining` down to 0; completions of the
    // rest number monomial_count(n - i - 1, remaining - a).
    for (int a = remaining; a >= 0; --a) {
      std::uint64_t block = monomial_count(n - i - 1, remaining - a);
      if (rank < block) {
        e[static_cast<std::size_t>(i)] = a;
        remaining -= a;
        break;
      }
      rank -= block;
    }
  }
  e[static_cast<std::size_t>(n - 1)] = remaining;
  return Monomial(std::span<const int>(e));
}

/// Random monomial of degree 1..d. weighted: degree uniform on {1..d},
/// then uniform within that degree. uniform: uniform over all monomials of
/// degree 1..d.
inline Monomial random_monomial(Flavor flavor, int n, int d, Rng& rng) {
  if (d < 1) throw std::invalid_argument("random_monomial: d must be >= 1");
  int t = 0;
  if (flavor == Flavor::weighted) {
    t = static_cast<int>(rng.uniform_int(1, static_cast<std::uint64_t>(d)));
    return unrank_monomial(n, t, rng.uniform_int(0, monomial_count(n, t) - 1));
  }
  // C(d+n, n) - 1 monomials of degree 1..d.
  const std::uint64_t total = binomial(static_cast<std::uint64_t>(d + n), static_cast<std::uint64_t>(n)) - 1;
  std::uint64_t rank = rng.uniform_int(0, total - 1);
  for (t = 1; t <= d; ++t) {
    const std::uint64_t c = monomial_count(n, t);
    if (rank < c) return unrank_monomial(n, t, rank);
    rank -= c;
  }
  throw std::logic_error("random_monomial: rank past end");
}

inline FieldElement random_nonzero(const PrimeField& F, Rng& rng) {
  return FieldElement(static_cast<std::uint32_t>(rng.uniform_int(1, F.characteristic() - 1)));
}

/// c1*m1 + c2*m2 with m1 != m2 (m2 resampled on collision).
inline Polynomial random_binomial(const DistributionSpec& spec, Rng& rng) {
  const PrimeField F = spec.field();
  Monomial m1 = random_monomial(spec.flavor, spec.n, spec.d, rng);
  Monomial m2 = random_monomial(spec.flavor, spec.n, spec.d, rng);
  int guard = 0;
  while (m2 == m1) {
    if (++guard > 1000000) throw std::runtime_error("random_binomial: cannot draw two distinct monomials");
    m2 = random_monomial(spec.flavor, spec.n, spec.d, rng);
  }
  FieldElement c1 = random_nonzero(F, rng);
  FieldElement c2 = random_nonzero(F, rng);
  return Polynomial::from_terms(spec.n, F, {{c1, m1}, {c2, m2}});
}

namespace detail {

inline IdealSample sample_generators(const DistributionSpec& spec, std::uint64_t seed, double lambda) {
  spec.validate();
  Rng rng(seed);
  IdealSample out{{}, spec, seed};
  const PrimeField F = spec.field();
  while (static_cast<int>(out.generators.size()) < spec.s) {
    Polynomial g = random_binomial(spec, rng);
    // Poisson(0) consumes no randomness, so lambda = 0 reproduces the pure
    // binomial stream exactly.
    const int extra = rng.poisson(lambda);
    if (extra > 0) {
      std::vector<Term> terms = g.terms();
      for (int e = 0; e < extra; ++e) {
        Monomial m = random_monomial(spec.flavor, spec.n, spec.d, rng);
        terms.push_back({random_nonzero(F, rng), m});
      }
      g = Polynomial::from_terms(spec.n, F, std::move(terms));
      if (g.is_zero()) continue;  // all terms cancelled; generators must be nonzero
    }
    out.generators.push_back(std::move(g));
  }
  return out;
}

}  // namespace detail

/// s random binomials drawn from Rng(seed). Any lambda in `spec` is ignored.
inline IdealSample random_binomial_ideal(const DistributionSpec& spec, std::uint64_t seed) {
  return detail::sample_generators(spec, seed, 0.0);
}

/// Non-binomial toy model: each generator is a binomial plus k ~ Poisson(λ)
/// extra terms from the same monomial distribution with fresh nonzero
/// coefficients; coinciding monomials merge by coefficient addition.
inline IdealSample random_nonbinomial_ideal(const DistributionSpec& spec, std::uint64_t seed) {
  if (!spec.extra_terms_lambda || !(*spec.extra_terms_lambda > 0.0))
    throw std::invalid_argument("non-binomial sampler needs lambda > 0");
  return detail::sample_generators(spec, seed, *spec.extra_terms_lambda);
}

/// Sample from `spec`, adding extra terms when it carries a positive λ.
inline IdealSample sample_ideal(const DistributionSpec& spec, std::uint64_t seed) {
  return detail::sample_generators(spec, seed, spec.extra_terms_lambda.value_or(0.0));
}

}  // namespace gbsel
