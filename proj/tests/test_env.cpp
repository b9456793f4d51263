#include <catch_amalgamated.hpp>

#include <sstream>

#include "gbsel/env.hpp"
#include "test_helpers.hpp"

using namespace gbsel;
using gbsel::testing::P;
using gbsel::testing::Ps;

namespace {

BuchbergerState example_state() {
  auto G = Ps({"x0*x1^6 + 9*x1^2*x2^4", "x2^4 + 13*x2", "x0*x1^3 + 91*x0*x1^2"}, 3);
  std::vector<std::pair<int, int>> pairs{{0, 1}, {0, 2}, {1, 2}};
  return BuchbergerState::with_pairs(G, pairs);
}

std::vector<int> row(const Observation& o, int r) { return {o.row(r), o.row(r) + o.cols}; }

}  // namespace

TEST_CASE("observation matrix of the worked example", "[env]") {
  const Observation obs = encode_observation(example_state(), ObservationMode::full);
  REQUIRE(obs.rows == 3);
  REQUIRE(obs.cols == 12);
  CHECK(row(obs, 0) == std::vector<int>{1, 6, 0, 0, 2, 4, 0, 0, 4, 0, 0, 1});
  CHECK(row(obs, 1) == std::vector<int>{1, 6, 0, 0, 2, 4, 1, 3, 0, 1, 2, 0});
  CHECK(row(obs, 2) == std::vector<int>{0, 0, 4, 0, 0, 1, 1, 3, 0, 1, 2, 0});
  CHECK(obs.pairs == std::vector<std::pair<int, int>>{{0, 1}, {0, 2}, {1, 2}});

  const Observation lead = encode_observation(example_state(), ObservationMode::lead_only);
  REQUIRE(lead.cols == 6);
  CHECK(row(lead, 0) == std::vector<int>{1, 6, 0, 0, 0, 4});
  CHECK(row(lead, 1) == std::vector<int>{1, 6, 0, 1, 3, 0});
  CHECK(row(lead, 2) == std::vector<int>{0, 0, 4, 1, 3, 0});
}

TEST_CASE("monomial generators are zero-padded", "[env]") {
  auto G = Ps({"x0^2*x1", "x1*x2 + x0"}, 3);
  std::vector<std::pair<int, int>> pairs{{0, 1}};
  const Observation obs = encode_observation(BuchbergerState::with_pairs(G, pairs), ObservationMode::full);
  CHECK(row(obs, 0) == std::vector<int>{2, 1, 0, 0, 0, 0, 0, 1, 1, 1, 0, 0});
}

TEST_CASE("reset on explicit ideals", "[env]") {
  BuchbergerEnv env;
  Observation obs = env.reset(gbsel::testing::circle_example());
  CHECK(obs.rows == 1);
  CHECK(obs.cols == 8);
  CHECK_FALSE(env.done());

  Observation single = env.reset(Ps({"x0^2 + x1"}, 2));
  CHECK(single.rows == 0);
  CHECK(env.done());
  CHECK_THROWS_AS(env.step(0), InvalidState);
  CHECK_THROWS_AS(env.reset(std::vector<Polynomial>{}), std::invalid_argument);

  BuchbergerEnv fresh;
  CHECK_THROWS_AS(fresh.step(0), InvalidState);
  CHECK_THROWS_AS(fresh.reset(), InvalidState);
}

TEST_CASE("reset from a sampler", "[env]") {
  BuchbergerEnv env(IdealSampler(parse_spec("3-20-10 weighted"), 0));
  for (int k = 0; k < 20; ++k) {
    Observation obs = env.reset();
    CHECK(obs.rows >= 1);
    CHECK(obs.rows <= 45);
    CHECK(obs.cols == 12);
  }
  // s = 1 never has pairs
  BuchbergerEnv hopeless(IdealSampler(parse_spec("2-3-1 weighted"), 0));
  CHECK_THROWS(hopeless.reset());
}

TEST_CASE("step rewards", "[env]") {
  BuchbergerEnv env;
  env.reset(gbsel::testing::circle_example());
  StepResult r = env.step(0);
  CHECK(r.reward == -1);
  CHECK(r.info.basis_size == 3);
  CHECK_FALSE(r.info.zero_remainder);
  CHECK(env.state().generators().back() == P("x1^3 + x0", 2));
  CHECK_THROWS_AS(env.step(5), InvalidAction);

  // S(f, g) = x1^2 - x0 is already in G: one subtraction to form it, one to
  // cancel it.
  auto G = Ps({"x0^2 + x1", "x0*x1 + 1", "x1^2 - x0"}, 2);
  std::vector<std::pair<int, int>> pairs{{0, 1}};
  env.reset(BuchbergerState::with_pairs(G, pairs));
  StepResult z = env.step(0);
  CHECK(z.reward == -2);
  CHECK(z.info.zero_remainder);
  CHECK(z.info.basis_size == 3);
  CHECK(z.done);
  CHECK(z.observation.rows == 0);
}

TEST_CASE("episode returns equal batch-run additions", "[env][property]") {
  const DistributionSpec spec = parse_spec("3-20-10 weighted");
  for (Strategy s : kAllStrategies) {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
      auto sample = random_binomial_ideal(spec, seed);
      BuchbergerEnv env(EnvConfig{ObservationMode::full, 0});
      env.reset(sample.generators);
      StrategySelector sel(s, seed);
      long total = 0;
      while (!env.done()) {
        REQUIRE(env.observation().rows == static_cast<int>(env.state().pairs().size()));
        total += env.step(sel(env.state())).reward;
      }
      auto res = buchberger(sample.generators, s, seed);
      REQUIRE(total == -res.stats.additions);
      REQUIRE(env.total_reward() == total);
    }
  }
}

TEST_CASE("step cap truncates the episode", "[env]") {
  BuchbergerEnv env(IdealSampler(parse_spec("3-20-10 weighted"), 5), EnvConfig{ObservationMode::full, 2});
  env.reset();
  env.step(0);
  StepResult r = env.step(0);
  CHECK(r.done);
  CHECK(r.info.truncated);
  CHECK(env.truncated());
  CHECK_FALSE(env.state().done());
}

TEST_CASE("clone is independent", "[env]") {
  BuchbergerEnv env(IdealSampler(parse_spec("3-10-6 weighted"), 1));
  env.reset();
  BuchbergerEnv copy = env.clone();
  const Observation before = copy.observation();
  env.step(0);
  CHECK(copy.observation() == before);
  CHECK(copy.steps() == 0);

  BuchbergerEnv a = copy.clone();
  std::vector<long> ra, rb;
  while (!a.done()) ra.push_back(a.step(0).reward);
  while (!copy.done()) rb.push_back(copy.step(0).reward);
  CHECK(ra == rb);
  CHECK(a.clone().done());
}

TEST_CASE("replay is bit-exact", "[env]") {
  auto run = [](std::uint64_t seed) {
    BuchbergerEnv env(IdealSampler(parse_spec("3-20-10 weighted"), seed));
    env.reset();
    Rng rng(seed, 3);
    std::vector<Observation> obs;
    std::vector<long> rewards;
    while (!env.done()) {
      StepResult r = env.step(rng.index(env.state().pairs().size()));
      obs.push_back(r.observation);
      rewards.push_back(r.reward);
    }
    return std::pair(obs, rewards);
  };
  CHECK(run(9) == run(9));
}

TEST_CASE("trace serializes as JSON lines", "[env]") {
  BuchbergerEnv env(EnvConfig{ObservationMode::full, 500, UpdateRule::gebauer_moller, true});
  env.reset(gbsel::testing::circle_example());
  while (!env.done()) env.step(0);
  std::ostringstream os;
  write_trace_jsonl(os, env.trace());
  CHECK(os.str() ==
        "{\"pair\":[0,1],\"reward\":-1,\"p_before\":1,\"basis_size\":3}\n"
        "{\"pair\":[1,2],\"reward\":-2,\"p_before\":1,\"basis_size\":3}\n");
}

TEST_CASE("observation mode names", "[env]") {
  CHECK(parse_observation_mode("full") == ObservationMode::full);
  CHECK(parse_observation_mode(to_string(ObservationMode::lead_only)) == ObservationMode::lead_only);
  CHECK_THROWS(parse_observation_mode("both"));
}
