#include <catch_amalgamated.hpp>

#include <map>
#include <numeric>

#include "gbsel/groebner.hpp"
#include "gbsel/ideal_gen.hpp"
#include "test_helpers.hpp"

using namespace gbsel;
using gbsel::testing::as_string_set;
using gbsel::testing::is_groebner_basis;
using gbsel::testing::P;
using gbsel::testing::Ps;

namespace {

std::vector<std::pair<int, int>> all_pairs(int m) {
  std::vector<std::pair<int, int>> out;
  for (int j = 1; j < m; ++j)
    for (int i = 0; i < j; ++i) out.emplace_back(i, j);
  return out;
}

std::size_t pick(const BuchbergerState& st, Strategy s) {
  Rng rng(0);
  return select(st, s, rng);
}

}  // namespace

TEST_CASE("Buchberger on x^3 + y^2, x^2 y - 1", "[groebner]") {
  auto F = gbsel::testing::circle_example();
  for (Strategy s : kAllStrategies) {
    BuchbergerResult res = buchberger(F, s, 1);
    REQUIRE(is_groebner_basis(res.basis));
    // y^3 + x is the only new generator
    REQUIRE(res.basis.size() == 3);
    CHECK(res.basis[2].monic() == P("x1^3 + x0", 2));
    CHECK_FALSE(res.stats.truncated);
    CHECK(res.stats.per_pair_additions.size() == static_cast<std::size_t>(res.stats.pairs_processed));
    CHECK(std::accumulate(res.stats.per_pair_additions.begin(), res.stats.per_pair_additions.end(), 0L) ==
          res.stats.additions);
  }
  // LM(f1) = x^3 and LM(r) = y^3 are coprime, so only two pairs are processed.
  BuchbergerResult res = buchberger(F, Strategy::first);
  CHECK(res.stats.pairs_processed == 2);
}

TEST_CASE("single generator needs no work", "[groebner]") {
  std::vector<Polynomial> F{P("x0^2*x1 + 3*x2", 3)};
  BuchbergerResult res = buchberger(F, Strategy::degree);
  CHECK(res.basis == F);
  CHECK(res.stats.additions == 0);
  CHECK(res.stats.pairs_processed == 0);
  CHECK(res.stats.basis_size == 1);
  CHECK(res.stats.deg_max == 3);
  CHECK(res.stats.dimension == 2);
}

TEST_CASE("initial generators are validated", "[groebner]") {
  CHECK_THROWS_AS(buchberger(std::vector<Polynomial>{}, Strategy::first), std::invalid_argument);
  CHECK_THROWS_AS(buchberger(std::vector<Polynomial>{Polynomial(2)}, Strategy::first), std::invalid_argument);
  CHECK_THROWS(buchberger(std::vector<Polynomial>{P("x0", 1), P("x0", 2)}, Strategy::first));
}

TEST_CASE("select: minimal lcm degree", "[select]") {
  // lcm degrees in insertion order: (1,2)->4, (0,1)->3, (0,2)->5
  auto G = Ps({"x0^2", "x0*x1", "x1^3"}, 2);
  std::vector<std::pair<int, int>> pairs{{1, 2}, {0, 1}, {0, 2}};
  auto st = BuchbergerState::with_pairs(G, pairs);
  REQUIRE(st.pairs()[0].degree == 4);
  REQUIRE(st.pairs()[1].degree == 3);
  REQUIRE(st.pairs()[2].degree == 5);
  CHECK(pick(st, Strategy::degree) == 1);
  CHECK(pick(st, Strategy::normal) == 1);
  // First: minimal j, then minimal i -> (0,1)
  CHECK(pick(st, Strategy::first) == 1);
}

TEST_CASE("select: a single pair is chosen by every strategy", "[select]") {
  auto G = Ps({"x0^2 + x1", "x0*x1 + 1"}, 2);
  std::vector<std::pair<int, int>> pairs{{0, 1}};
  auto st = BuchbergerState::with_pairs(G, pairs);
  for (Strategy s : kAllStrategies) CHECK(pick(st, s) == 0);
}

TEST_CASE("select: Degree and Normal disagree on equal-degree lcms", "[select]") {
  // (0,1): lcm x0 x1 x2, (0,2): x0 x1 x2^2, (1,2): x0 x2^2
  auto G = Ps({"x0*x1", "x0*x2", "x2^2"}, 3);
  auto st = BuchbergerState::with_pairs(G, all_pairs(3));
  const auto& Pv = st.pairs();

  // Enumerate to find the expected choices independently.
  std::size_t exp_degree = 0, exp_normal = 0;
  for (std::size_t k = 1; k < Pv.size(); ++k) {
    auto key_d = [&](std::size_t q) { return std::tuple(Pv[q].lcm.degree(), Pv[q].j, Pv[q].i); };
    if (key_d(k) < key_d(exp_degree)) exp_degree = k;
    auto c = grevlex_cmp(Pv[k].lcm, Pv[exp_normal].lcm);
    if (c < 0 || (c == 0 && std::pair(Pv[k].j, Pv[k].i) < std::pair(Pv[exp_normal].j, Pv[exp_normal].i)))
      exp_normal = k;
  }
  CHECK(pick(st, Strategy::degree) == exp_degree);
  CHECK(pick(st, Strategy::normal) == exp_normal);
  CHECK(Pv[exp_degree].i == 0);
  CHECK(Pv[exp_degree].j == 1);
  CHECK(Pv[exp_normal].i == 1);
  CHECK(Pv[exp_normal].j == 2);
}

TEST_CASE("select: sugar breaks ties by Normal, TrueDegree looks at the S-polynomial", "[select]") {
  auto G = Ps({"x1^3 + x0^2", "x0*x1 + 1", "x0^2 + x1"}, 2);
  auto st = BuchbergerState::with_pairs(G, all_pairs(3));
  const auto& Pv = st.pairs();
  std::size_t exp_sugar = 0, exp_true = 0;
  for (std::size_t k = 1; k < Pv.size(); ++k) {
    auto c = grevlex_cmp(Pv[k].lcm, Pv[exp_sugar].lcm);
    if (Pv[k].sugar < Pv[exp_sugar].sugar || (Pv[k].sugar == Pv[exp_sugar].sugar && c < 0)) exp_sugar = k;
    const int dk = s_polynomial(G[static_cast<std::size_t>(Pv[k].i)], G[static_cast<std::size_t>(Pv[k].j)]).degree();
    const int db = s_polynomial(G[static_cast<std::size_t>(Pv[exp_true].i)], G[static_cast<std::size_t>(Pv[exp_true].j)]).degree();
    if (dk < db) exp_true = k;
  }
  CHECK(pick(st, Strategy::sugar) == exp_sugar);
  CHECK(pick(st, Strategy::true_degree) == exp_true);
}

TEST_CASE("select: Random is uniform and seeded", "[select]") {
  auto G = Ps({"x0*x1", "x0*x2", "x2^2", "x1^2"}, 3);
  auto st = BuchbergerState::with_pairs(G, all_pairs(4));
  const std::size_t p = st.pairs().size();
  Rng rng(99);
  std::vector<int> counts(p, 0);
  const int draws = 60000;
  for (int k = 0; k < draws; ++k) counts[select(st, Strategy::random, rng)]++;
  const double expect = double(draws) / double(p);
  for (int c : counts) CHECK(std::abs(c - expect) < 5 * std::sqrt(expect));

  Rng a(5), b(5);
  for (int k = 0; k < 100; ++k) CHECK(select(st, Strategy::random, a) == select(st, Strategy::random, b));
}

TEST_CASE("select on an empty pair set is an error", "[select]") {
  auto st = BuchbergerState::from_generators(Ps({"x0"}, 1));
  Rng rng(0);
  CHECK_THROWS_AS(select(st, Strategy::first, rng), InvalidState);
}

TEST_CASE("update: coprime leading monomials create no pair", "[update]") {
  auto st = BuchbergerState::from_generators(Ps({"x0^2 + x2", "x1^3 + x2"}, 3));
  CHECK(st.pairs().empty());
}

TEST_CASE("update: naive mode adds one pair per generator", "[update]") {
  auto G = Ps({"x0^2 + x2", "x1^3 + x2", "x0*x1 + 1"}, 3);
  BuchbergerState st(3, PrimeField{}, UpdateRule::naive);
  for (std::size_t m = 0; m < G.size(); ++m) {
    const std::size_t before = st.pairs().size();
    st.add_generator(G[m], G[m].degree());
    CHECK(st.pairs().size() == before + m);
  }
}

TEST_CASE("update: chain criterion removes a redundant old pair", "[update]") {
  auto G = Ps({"x0^2*x2", "x1^2*x2"}, 3);
  auto st = BuchbergerState::from_generators(G);
  REQUIRE(st.pairs().size() == 1);
  Polynomial r = P("x0*x1*x2", 3);
  st.add_generator(r, r.degree());
  // (0,1) with lcm x0^2 x1^2 x2 is dropped; (0,2) and (1,2) survive.
  REQUIRE(st.pairs().size() == 2);
  for (const SPair& p : st.pairs()) CHECK(p.j == 2);

  std::vector<Polynomial> F{G[0], G[1], r};
  auto gm = buchberger(F, Strategy::first);
  auto naive = buchberger(F, Strategy::first, 0, RunLimits{0, true, UpdateRule::naive});
  CHECK(reduce_basis(gm.basis) == reduce_basis(naive.basis));
  CHECK(gm.stats.pairs_processed <= naive.stats.pairs_processed);
}

TEST_CASE("update: one pair per lcm class", "[update]") {
  // r = x1: lcm(x0*x1, x1) = lcm(x0, x1) = x0*x1 and x0, x1 are coprime,
  // so the whole class is dropped.
  auto st = BuchbergerState::from_generators(Ps({"x0 + 1", "x0*x1 + 2", "x1 + 3"}, 2));
  for (const SPair& p : st.pairs()) CHECK(p.j != 2);
  // Duplicate lcms without coprimality keep the lowest index.
  auto st2 = BuchbergerState::from_generators(Ps({"x0*x1 + 1", "x0*x1^2 + 1", "x0^2*x1 + 1"}, 2));
  std::map<int, int> count_j;
  for (const SPair& p : st2.pairs()) count_j[p.j]++;
  CHECK(count_j[2] == 1);
}

TEST_CASE("update: lcm class representative", "[update]") {
  // lcm(x0^2, x0*x1) = lcm(x0^2*x1, x0*x1) = x0^2*x1: one class, no coprime member.
  const auto F = Ps({"x0^2 + 1", "x0^2*x1 + 1", "x0*x1 + 1"}, 2);
  auto partner_of_new = [&](UpdateRule rule) {
    std::vector<int> out;
    for (const SPair& p : BuchbergerState::from_generators(F, rule).pairs())
      if (p.j == 2) out.push_back(p.i);
    return out;
  };
  CHECK(partner_of_new(UpdateRule::gebauer_moller) == std::vector<int>{0});
  CHECK(partner_of_new(UpdateRule::gebauer_moller_latest) == std::vector<int>{1});
}

TEST_CASE("reduce_basis", "[groebner]") {
  CHECK(reduce_basis(Ps({"x0", "2*x0 + x1"}, 2)) == Ps({"x1", "x0"}, 2));
  auto F = gbsel::testing::circle_example();
  auto G = reduce_basis(buchberger(F, Strategy::degree).basis);
  CHECK(reduce_basis(G) == G);
  CHECK(reduce_basis(buchberger(F, Strategy::first).basis) == G);
  for (const Polynomial& g : G) {
    CHECK(g.lead_coeff().value() == 1);
    for (const Polynomial& h : G)
      if (!(h == g))
        for (const Term& t : g.terms()) CHECK_FALSE(divides(h.lead_monomial(), t.monomial));
  }
}

TEST_CASE("dimension of monomial ideals", "[invariants]") {
  CHECK(dimension(std::vector<Monomial>{Monomial{1, 0, 0}}, 3) == 2);
  CHECK(dimension(std::vector<Monomial>{Monomial{1, 1, 0}}, 3) == 2);
  CHECK(dimension(std::vector<Monomial>{Monomial{1, 0, 0}, Monomial{0, 1, 0}, Monomial{0, 0, 1}}, 3) == 0);
  CHECK(dimension(std::vector<Monomial>{Monomial{0, 0, 0}}, 3) == -1);
  CHECK(dimension(std::vector<Monomial>{}, 4) == 4);
  CHECK(dimension(std::vector<Monomial>{Monomial{2, 0, 0}, Monomial{0, 3, 1}}, 3) == 1);
}

TEST_CASE("sugar bookkeeping", "[sugar]") {
  auto st = BuchbergerState::from_generators(gbsel::testing::circle_example());
  REQUIRE(st.pairs().size() == 1);
  CHECK(st.pairs()[0].sugar == 4);

  // Homogeneous inputs: pair sugar equals the lcm degree.
  auto hom = BuchbergerState::from_generators(Ps({"x0^2 + x1*x2", "x0*x1 + x2^2", "x1^2 + x0*x2"}, 3));
  for (const SPair& p : hom.pairs()) CHECK(p.sugar == p.degree);

  // Sugar of generators never drops below the pair that produced them.
  auto sample = random_binomial_ideal(parse_spec("3-6-6 weighted"), 3);
  auto s = BuchbergerState::from_generators(sample.generators);
  StrategySelector sel(Strategy::sugar);
  while (!s.done()) {
    const std::size_t pos = sel(s);
    const int pair_sugar = s.pairs()[pos].sugar;
    const int before = s.generator_count();
    s.process(pos);
    if (s.generator_count() > before) CHECK(s.sugars().back() >= pair_sugar);
  }
}

TEST_CASE("step cap truncates", "[groebner]") {
  auto sample = random_binomial_ideal(parse_spec("3-10-8 weighted"), 1);
  RunLimits limits;
  limits.max_steps = 3;
  auto res = buchberger(sample.generators, Strategy::first, 0, limits);
  CHECK(res.stats.truncated);
  CHECK(res.stats.pairs_processed == 3);
}

TEST_CASE("all strategies reach the same reduced basis", "[groebner][property]") {
  for (const char* spec_text : {"3-5-5 weighted", "3-5-5 uniform", "2-8-4 weighted", "4-3-4 uniform"}) {
    const DistributionSpec spec = parse_spec(spec_text);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      auto sample = random_binomial_ideal(spec, seed);
      std::vector<Polynomial> reference;
      for (Strategy s : kAllStrategies) {
        auto res = buchberger(sample.generators, s, seed);
        auto reduced = reduce_basis(res.basis);
        if (reference.empty())
          reference = reduced;
        else
          REQUIRE(reduced == reference);
      }
      INFO(spec_text << " seed " << seed);
      REQUIRE(is_groebner_basis(reference));
    }
  }
}

TEST_CASE("computed bases satisfy Buchberger's criterion", "[groebner][property]") {
  const DistributionSpec spec = parse_spec("3-4-4 uniform");
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    auto sample = random_binomial_ideal(spec, seed);
    auto res = buchberger(sample.generators, Strategy::normal);
    REQUIRE(is_groebner_basis(res.basis));
  }
}

TEST_CASE("Gebauer–Möller agrees with naive update", "[update][property]") {
  const DistributionSpec spec = parse_spec("3-4-5 weighted");
  RunLimits naive, latest;
  naive.rule = UpdateRule::naive;
  latest.rule = UpdateRule::gebauer_moller_latest;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto sample = random_binomial_ideal(spec, seed);
    auto gm = buchberger(sample.generators, Strategy::degree);
    auto nv = buchberger(sample.generators, Strategy::degree, 0, naive);
    auto gl = buchberger(sample.generators, Strategy::degree, 0, latest);
    REQUIRE(reduce_basis(gm.basis) == reduce_basis(nv.basis));
    REQUIRE(reduce_basis(gl.basis) == reduce_basis(nv.basis));
    REQUIRE(gm.stats.pairs_processed <= nv.stats.pairs_processed);
  }
}

TEST_CASE("ideal members reduce to zero", "[groebner][property]") {
  const DistributionSpec spec = parse_spec("3-5-4 weighted");
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto sample = random_binomial_ideal(spec, seed);
    auto G = buchberger(sample.generators, Strategy::degree).basis;
    Rng rng(seed);
    Polynomial h(3);
    for (const Polynomial& f : sample.generators) {
      Monomial m = random_monomial(Flavor::weighted, 3, 3, rng);
      h = h + mul_term(f, random_nonzero(PrimeField{}, rng), m);
    }
    REQUIRE(reduce(h, G).remainder.is_zero());
  }
}

TEST_CASE("deg_max respects the generic bound", "[invariants][property]") {
  // Dense random polynomials of degree d are generic with high probability.
  struct Case {
    int n, d, s;
  };
  for (Case c : {Case{2, 3, 2}, Case{3, 2, 3}, Case{2, 4, 3}}) {
    const PrimeField F;
    Rng rng(static_cast<std::uint64_t>(c.n * 100 + c.d * 10 + c.s));
    int within = 0;
    const int samples = 200;
    for (int k = 0; k < samples; ++k) {
      std::vector<Polynomial> gens;
      for (int g = 0; g < c.s; ++g) {
        std::vector<Term> terms;
        for (int t = 0; t <= c.d; ++t)
          for (std::uint64_t r = 0; r < monomial_count(c.n, t); ++r)
            terms.push_back({random_nonzero(F, rng), unrank_monomial(c.n, t, r)});
        gens.push_back(Polynomial::from_terms(c.n, F, std::move(terms)));
      }
      auto res = buchberger(gens, Strategy::degree);
      if (res.stats.deg_max <= (c.n + 1) * (c.d - 1) + 1) ++within;
    }
    INFO("n=" << c.n << " d=" << c.d << " s=" << c.s);
    CHECK(within >= samples * 99 / 100);
  }
}
