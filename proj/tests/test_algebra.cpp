#include <catch_amalgamated.hpp>

#include <random>

#include "gbsel/polynomial.hpp"
#include "gbsel/reduction.hpp"
#include "test_helpers.hpp"

using namespace gbsel;
using gbsel::testing::P;

namespace {

Monomial random_mono(std::mt19937_64& gen, int n, int maxe) {
  std::uniform_int_distribution<int> d(0, maxe);
  std::vector<int> e(static_cast<std::size_t>(n));
  for (int& x : e) x = d(gen);
  return Monomial(std::span<const int>(e));
}

Polynomial random_poly(std::mt19937_64& gen, int n, int terms, int maxe, const PrimeField& F) {
  std::uniform_int_distribution<std::uint32_t> c(1, F.characteristic() - 1);
  std::vector<Term> ts;
  for (int k = 0; k < terms; ++k) ts.push_back({FieldElement(c(gen)), random_mono(gen, n, maxe)});
  return Polynomial::from_terms(n, F, std::move(ts));
}

}  // namespace

TEST_CASE("grevlex orders the documented examples", "[monomial]") {
  CHECK(grevlex_cmp(Monomial{1, 0, 0}, Monomial{0, 1, 0}) > 0);
  CHECK(grevlex_cmp(Monomial{0, 3, 0}, Monomial{1, 1, 0}) > 0);
  CHECK(grevlex_cmp(Monomial{2, 0, 0}, Monomial{2, 0, 0}) == 0);
  CHECK(grevlex_cmp(Monomial{0, 2, 0}, Monomial{1, 0, 1}) > 0);
  CHECK(grevlex_cmp(Monomial{0, 1, 0}, Monomial{0, 0, 1}) > 0);
  CHECK_THROWS_AS(grevlex_cmp(Monomial{1, 0}, Monomial{1, 0, 0}), DimensionError);
}

TEST_CASE("grevlex is a monomial order", "[monomial][property]") {
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 10000; ++trial) {
    const int n = 1 + static_cast<int>(gen() % 5);
    Monomial a = random_mono(gen, n, 4), b = random_mono(gen, n, 4), c = random_mono(gen, n, 4);
    auto ab = grevlex_cmp(a, b), ba = grevlex_cmp(b, a);
    REQUIRE((ab < 0) == (ba > 0));
    REQUIRE((ab == 0) == (a == b));
    if (ab < 0 && grevlex_cmp(b, c) < 0) REQUIRE(grevlex_cmp(a, c) < 0);
    if (ab > 0) REQUIRE(grevlex_cmp(a * c, b * c) > 0);
    REQUIRE(grevlex_cmp(a * c, a) >= 0);
  }
}

TEST_CASE("monomial arithmetic", "[monomial]") {
  CHECK(lcm(Monomial{3, 0}, Monomial{2, 1}) == Monomial{3, 1});
  CHECK(divides(Monomial{0, 0}, Monomial{5, 7}));
  CHECK_FALSE(divides(Monomial{1, 0}, Monomial{0, 7}));
  CHECK(gcd(Monomial{2, 0, 1}, Monomial{0, 3, 1}) == Monomial{0, 0, 1});
  CHECK(quotient(Monomial{3, 1}, Monomial{2, 1}) == Monomial{1, 0});
  CHECK((Monomial{1, 2} * Monomial{3, 0}) == Monomial{4, 2});
  CHECK((Monomial{1, 2, 3}).degree() == 6);
  CHECK_THROWS_AS(quotient(Monomial{1, 0}, Monomial{0, 1}), DivisibilityError);
  CHECK_THROWS_AS(lcm(Monomial{1}, Monomial{1, 0}), DimensionError);
  CHECK(coprime(Monomial{2, 0, 0}, Monomial{0, 3, 1}));
  CHECK_FALSE(coprime(Monomial{2, 1, 0}, Monomial{0, 3, 1}));
}

TEST_CASE("field arithmetic mod 32003", "[field]") {
  const PrimeField F;
  CHECK(F.add(FieldElement(32002), FieldElement(1)).value() == 0);
  CHECK(F.inv(FieldElement(1)).value() == 1);
  CHECK(F.inv(FieldElement(2)).value() == 16002);
  CHECK(F.neg(FieldElement(5)).value() == 31998);
  CHECK(F.sub(FieldElement(3), FieldElement(5)).value() == 32001);
  CHECK(F.from_int(-1).value() == 32002);
  CHECK_THROWS_AS(F.inv(FieldElement(0)), DivisionByZero);
  CHECK_THROWS(PrimeField(32004));
  CHECK_THROWS(PrimeField(1));
}

TEST_CASE("field axioms hold on a 100-element subset", "[field][property]") {
  const PrimeField F;
  std::vector<FieldElement> xs;
  for (std::uint32_t v = 0; v < 50; ++v) xs.emplace_back(v);
  for (std::uint32_t v = 0; v < 50; ++v) xs.emplace_back(31953 + v);
  const FieldElement zero(0), one(1);
  for (FieldElement a : xs) {
    REQUIRE(F.add(a, zero) == a);
    REQUIRE(F.mul(a, one) == a);
    REQUIRE(F.add(a, F.neg(a)) == zero);
    if (!a.is_zero()) REQUIRE(F.mul(a, F.inv(a)) == one);
    for (FieldElement b : xs) {
      REQUIRE(F.add(a, b) == F.add(b, a));
      REQUIRE(F.mul(a, b) == F.mul(b, a));
      REQUIRE(F.sub(F.add(a, b), b) == a);
      for (FieldElement c : xs) {
        REQUIRE(F.add(F.add(a, b), c) == F.add(a, F.add(b, c)));
        REQUIRE(F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c)));
        REQUIRE(F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c)));
      }
    }
  }
}

TEST_CASE("polynomials normalize their terms", "[polynomial]") {
  Polynomial f = P("x1^2 + x0^3 + 2*x1^2 - 3*x1^2", 2);
  CHECK(to_string(f) == "x0^3");
  CHECK(P("x0 - x0", 2).is_zero());
  Polynomial g = P("1 + x0*x1 + x1^3", 2);
  REQUIRE(g.size() == 3);
  CHECK(g.lead_monomial() == Monomial{0, 3});
  CHECK(g.degree() == 3);
  CHECK_THROWS_AS(Polynomial(2).lead_term(), InvalidState);
}

TEST_CASE("sub_scaled", "[polynomial]") {
  const PrimeField F;
  Polynomial f = P("x0^3 + x1^2", 2);
  CHECK(sub_scaled(f, FieldElement(1), Monomial(2), f).is_zero());

  Polynomial r = P("x0^3*x1 + x1^3", 2);
  Polynomial g = P("x0^2*x1 - 1", 2);
  CHECK(sub_scaled(r, FieldElement(1), Monomial{1, 0}, g) == P("x1^3 + x0", 2));

  Polynomial zero(2);
  Polynomial expected = P("-5*x0^4*x1^2 + 5*x0^2*x1", 2);
  CHECK(sub_scaled(zero, FieldElement(5), Monomial{2, 1}, g) == expected);
  CHECK_THROWS_AS(sub_scaled(zero, FieldElement(1), Monomial{1}, g), DimensionError);
}

TEST_CASE("S-polynomials", "[reduction]") {
  auto F = gbsel::testing::circle_example();
  CHECK(s_polynomial(F[0], F[1]) == P("x1^3 + x0", 2));
  CHECK(s_polynomial(F[0], F[0]).is_zero());
  CHECK(s_polynomial(P("x0^2", 2), P("x1^2", 2)).is_zero());
  // x^2 + y, y^2 + x: y^2 (x^2 + y) - x^2 (y^2 + x) = y^3 - x^3
  CHECK(s_polynomial(P("x0^2 + x1", 2), P("x1^2 + x0", 2)) == P("x1^3 - x0^3", 2));
  CHECK_THROWS_AS(s_polynomial(Polynomial(2), F[0]), std::invalid_argument);
}

TEST_CASE("S-polynomial leading terms cancel", "[reduction][property]") {
  std::mt19937_64 gen(11);
  const PrimeField F;
  for (int trial = 0; trial < 2000; ++trial) {
    const int n = 1 + static_cast<int>(gen() % 4);
    Polynomial f = random_poly(gen, n, 1 + static_cast<int>(gen() % 4), 4, F);
    Polynomial g = random_poly(gen, n, 1 + static_cast<int>(gen() % 4), 4, F);
    if (f.is_zero() || g.is_zero()) continue;
    Polynomial s = s_polynomial(f, g);
    if (!s.is_zero()) REQUIRE(grevlex_cmp(s.lead_monomial(), lcm(f.lead_monomial(), g.lead_monomial())) < 0);
  }
}

TEST_CASE("reduce: documented examples", "[reduction]") {
  auto G = gbsel::testing::circle_example();
  ReductionResult r1 = reduce(P("x1^3 + x0", 2), G);
  CHECK(r1.remainder == P("x1^3 + x0", 2));
  CHECK(r1.additions == 0);

  ReductionResult r2 = reduce(G[0], std::vector<Polynomial>{G[0]});
  CHECK(r2.remainder.is_zero());
  CHECK(r2.additions == 1);

  // x^3 y: both leads divide; x^2 y is grevlex-smaller than x^3, so
  // x^3 y - x (x^2 y - 1) = x, which is irreducible.
  Polynomial h = P("x0^3*x1", 2);
  ReductionResult r3 = reduce(h, G);
  auto tr = gbsel::testing::oracle_divide(h, G);
  CHECK(r3.remainder == tr.remainder);
  CHECK(r3.additions == tr.steps);
  CHECK(r3.remainder == P("x0", 2));
  CHECK(r3.additions == 1);

  ReductionResult r4 = reduce(h, std::vector<Polynomial>{});
  CHECK(r4.remainder == h);
  CHECK(r4.additions == 0);
}

TEST_CASE("reduce agrees with the division oracle and stays in the ideal", "[reduction][property]") {
  std::mt19937_64 gen(23);
  const PrimeField F(101);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + static_cast<int>(gen() % 3);
    std::vector<Polynomial> G;
    const int s = 1 + static_cast<int>(gen() % 4);
    for (int k = 0; k < s; ++k) {
      Polynomial g = random_poly(gen, n, 1 + static_cast<int>(gen() % 3), 3, F);
      if (!g.is_zero()) G.push_back(std::move(g));
    }
    Polynomial h = random_poly(gen, n, 1 + static_cast<int>(gen() % 6), 5, F);
    ReductionResult res = reduce(h, G);
    auto tr = gbsel::testing::oracle_divide(h, G);
    REQUIRE(res.remainder == tr.remainder);
    REQUIRE(res.additions == tr.steps);
    // h - r = Σ q_k g_k
    REQUIRE(gbsel::testing::recombine(tr, G) == h);
    for (const Term& t : res.remainder.terms())
      for (const Polynomial& g : G) REQUIRE_FALSE(divides(g.lead_monomial(), t.monomial));
  }
}

TEST_CASE("sugar propagates through reduction", "[reduction]") {
  auto G = gbsel::testing::circle_example();
  const std::vector<int> sugars{3, 3};
  // x^3 y reduces by x * (x^2 y - 1): sugar max(4, 1 + 3) = 4
  ReductionResult r = reduce(P("x0^3*x1", 2), G, ReducerIndex(G), 4, sugars);
  CHECK(r.sugar == 4);
  ReductionResult r2 = reduce(P("x0^5*x1", 2), G, ReducerIndex(G), 2, sugars);
  CHECK(r2.sugar >= 2);
  CHECK(r2.sugar == 3 + 3);
}

TEST_CASE("polynomial text round-trips", "[polynomial][io]") {
  std::mt19937_64 gen(5);
  const PrimeField F;
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + static_cast<int>(gen() % 6);
    Polynomial f = random_poly(gen, n, static_cast<int>(gen() % 5), 6, F);
    REQUIRE(parse_polynomial(to_string(f), n, F) == f);
  }
  CHECK(to_string(P("3*x0^2*x2 + x1 + 7", 3)) == "3*x0^2*x2+x1+7");
  CHECK(to_string(P("-1", 1)) == "32002");
  CHECK(infer_nvars("x0^2 + x4*x1") == 5);
}

TEST_CASE("polynomial parse errors carry positions", "[polynomial][io]") {
  try {
    parse_polynomial("x0^2 + x7", 3, PrimeField{}, 4);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 4);
    CHECK(e.column() == 8);
  }
  CHECK_THROWS_AS(parse_polynomial("x0 ** 2", 2), ParseError);
  CHECK_THROWS_AS(parse_polynomial("", 2), ParseError);
  CHECK_THROWS_AS(parse_polynomial("x0 x1", 2), ParseError);
  CHECK_THROWS_AS(parse_polynomial("y^2", 2), ParseError);
  CHECK_THROWS_AS(parse_polynomial("x0^", 2), ParseError);
}
