#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gbsel/env.hpp"
#include "gbsel/parallel.hpp"
#include "gbsel/policy.hpp"
#include "json.hpp"

namespace gbsel {

enum class ValueKind { degree_rollout, pairs_left, none };

inline std::string to_string(ValueKind v) {
  switch (v) {
    case ValueKind::degree_rollout: return "degree_rollout";
    case ValueKind::pairs_left: return "pairs_left";
    case ValueKind::none: return "none";
  }
  return "?";
}

inline ValueKind parse_value_kind(const std::string& s) {
  for (ValueKind v : {ValueKind::degree_rollout, ValueKind::pairs_left, ValueKind::none})
    if (s == to_string(v)) return v;
  throw std::invalid_argument("unknown value kind '" + s + "'");
}

struct TrainerConfig {
  double gamma = 0.99;
  double lam = 0.97;
  double clip = 0.2;
  double learning_rate = 1e-4;
  int episodes_per_epoch = 100;
  int max_updates_per_epoch = 80;
  double kl_limit = 0.01;
  int epochs = 100;
  long max_episode_length = 500;
  ValueKind value_kind = ValueKind::degree_rollout;
  ObservationMode observation_mode = ObservationMode::full;
  /// One spec is chosen uniformly per epoch.
  std::vector<std::string> distributions{"3-20-10 weighted"};
  std::uint64_t seed = 0;
  int hidden = 128;
  double output_gain = 0.01;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  /// Hard limit on steps of one Degree rollout; exceeding it is an error.
  long rollout_cap = 20000;
  bool normalize_advantages = true;
  int workers = 1;
  int checkpoint_every = 100;
  int smoothing_window = 20;

  /// Throws std::invalid_argument naming the first bad field.
  void validate() const {
    auto need = [](bool ok, const char* field, const char* what) {
      if (!ok) throw std::invalid_argument(std::string("config field '") + field + "' " + what);
    };
    need(gamma > 0 && gamma <= 1, "gamma", "must be in (0, 1]");
    need(lam >= 0 && lam <= 1, "lam", "must be in [0, 1]");
    need(clip > 0, "clip", "must be positive");
    need(learning_rate >= 0, "learning_rate", "must be non-negative");
    need(episodes_per_epoch > 0, "episodes_per_epoch", "must be positive");
    need(max_updates_per_epoch >= 0, "max_updates_per_epoch", "must be non-negative");
    need(kl_limit >= 0, "kl_limit", "must be non-negative");
    need(epochs >= 0, "epochs", "must be non-negative");
    need(max_episode_length >= 0, "max_episode_length", "must be non-negative");
    need(!distributions.empty(), "distributions", "must list at least one spec");
    need(hidden > 0, "hidden", "must be positive");
    need(output_gain > 0, "output_gain", "must be positive");
    need(rollout_cap > 0, "rollout_cap", "must be positive");
    need(workers > 0, "workers", "must be positive");
    need(checkpoint_every >= 0, "checkpoint_every", "must be non-negative");
    need(smoothing_window > 0, "smoothing_window", "must be positive");
    int n = -1;
    for (const std::string& d : distributions) {
      DistributionSpec spec;
      try {
        spec = parse_spec(d);
      } catch (const ParseError& e) {
        throw std::invalid_argument(std::string("config field 'distributions': ") + e.what());
      }
      if (n >= 0 && spec.n != n) throw std::invalid_argument("config field 'distributions' mixes variable counts");
      n = spec.n;
    }
  }

  std::vector<DistributionSpec> specs() const {
    std::vector<DistributionSpec> out;
    for (const std::string& d : distributions) out.push_back(parse_spec(d));
    return out;
  }
  int nvars() const { return parse_spec(distributions.front()).n; }
};

inline nlohmann::json config_to_json(const TrainerConfig& c) {
  return {{"gamma", c.gamma},
          {"lam", c.lam},
          {"clip", c.clip},
          {"learning_rate", c.learning_rate},
          {"episodes_per_epoch", c.episodes_per_epoch},
          {"max_updates_per_epoch", c.max_updates_per_epoch},
          {"kl_limit", c.kl_limit},
          {"epochs", c.epochs},
          {"max_episode_length", c.max_episode_length},
          {"value_kind", to_string(c.value_kind)},
          {"observation_mode", to_string(c.observation_mode)},
          {"distributions", c.distributions},
          {"seed", c.seed},
          {"hidden", c.hidden},
          {"output_gain", c.output_gain},
          {"adam_beta1", c.adam_beta1},
          {"adam_beta2", c.adam_beta2},
          {"adam_epsilon", c.adam_epsilon},
          {"rollout_cap", c.rollout_cap},
          {"normalize_advantages", c.normalize_advantages},
          {"workers", c.workers},
          {"checkpoint_every", c.checkpoint_every},
          {"smoothing_window", c.smoothing_window}};
}

/// Overlay the keys of `j` onto `base`. Unknown keys and wrongly typed values
/// are rejected by name.
inline TrainerConfig config_from_json(const nlohmann::json& j, TrainerConfig base = {}) {
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  const nlohmann::json known = config_to_json(base);
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw std::invalid_argument("unknown config field '" + key + "'");
  }
  auto get = [&](const char* key, auto& field) {
    if (!j.contains(key)) return;
    try {
      using T = std::decay_t<decltype(field)>;
      if constexpr (std::is_same_v<T, ValueKind>)
        field = parse_value_kind(j.at(key).get<std::string>());
      else if constexpr (std::is_same_v<T, ObservationMode>)
        field = parse_observation_mode(j.at(key).get<std::string>());
      else if constexpr (std::is_same_v<T, std::vector<std::string>>)
        field = j.at(key).is_string() ? std::vector<std::string>{j.at(key).get<std::string>()}
                                      : j.at(key).get<std::vector<std::string>>();
      else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
        if (!j.at(key).is_number_integer()) throw std::invalid_argument("expected an integer");
        field = j.at(key).get<T>();
      } else
        field = j.at(key).get<T>();
    } catch (const std::exception& e) {
      throw std::invalid_argument(std::string("config field '") + key + "': " + e.what());
    }
  };
  TrainerConfig c = base;
  get("gamma", c.gamma);
  get("lam", c.lam);
  get("clip", c.clip);
  get("learning_rate", c.learning_rate);
  get("episodes_per_epoch", c.episodes_per_epoch);
  get("max_updates_per_epoch", c.max_updates_per_epoch);
  get("kl_limit", c.kl_limit);
  get("epochs", c.epochs);
  get("max_episode_length", c.max_episode_length);
  get("value_kind", c.value_kind);
  get("observation_mode", c.observation_mode);
  get("distributions", c.distributions);
  get("seed", c.seed);
  get("hidden", c.hidden);
  get("output_gain", c.output_gain);
  get("adam_beta1", c.adam_beta1);
  get("adam_beta2", c.adam_beta2);
  get("adam_epsilon", c.adam_epsilon);
  get("rollout_cap", c.rollout_cap);
  get("normalize_advantages", c.normalize_advantages);
  get("workers", c.workers);
  get("checkpoint_every", c.checkpoint_every);
  get("smoothing_window", c.smoothing_window);
  c.validate();
  return c;
}

/// Fresh model for a config: initialized weights and Adam constants.
inline PolicyModel make_model(const TrainerConfig& c) {
  PolicyModel m;
  m.nvars = c.nvars();
  m.mode = c.observation_mode;
  m.params = init_policy(observation_width(m.nvars, m.mode), c.hidden, c.seed, c.output_gain);
  m.adam.beta1 = c.adam_beta1;
  m.adam.beta2 = c.adam_beta2;
  m.adam.epsilon = c.adam_epsilon;
  return m;
}

// ---------------------------------------------------------------------------
// Values and advantages

/// Discounted return of finishing `state` with Degree selection.
inline double degree_rollout_value(const BuchbergerState& state, double gamma, long cap) {
  BuchbergerState s = state;
  Rng unused(0);
  double value = 0.0, discount = 1.0;
  long steps = 0;
  while (!s.done()) {
    if (++steps > cap)
      throw std::runtime_error("Degree rollout exceeded rollout_cap=" + std::to_string(cap) + " steps");
    value -= discount * double(s.process(select(s, Strategy::degree, unused)).additions);
    discount *= gamma;
  }
  return value;
}

inline double value_estimate(const BuchbergerState& state, ValueKind kind, double gamma, long cap = 20000) {
  if (state.done()) return 0.0;
  switch (kind) {
    case ValueKind::degree_rollout: return degree_rollout_value(state, gamma, cap);
    case ValueKind::pairs_left: return -double(state.pairs().size());
    case ValueKind::none: return 0.0;
  }
  return 0.0;
}

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;
};

/// δ_t = r_t + γ V(s_{t+1}) - V(s_t) with V(s_T) = last_value;
/// A_t = Σ_l (γλ)^l δ_{t+l}; returns = A + V.
inline GaeResult gae(std::span<const double> rewards, std::span<const double> values, double last_value,
                     double gamma, double lam) {
  if (rewards.size() != values.size()) throw std::invalid_argument("gae: rewards and values differ in length");
  GaeResult out;
  const std::size_t T = rewards.size();
  out.advantages.assign(T, 0.0);
  out.returns.assign(T, 0.0);
  double next_value = last_value, acc = 0.0;
  for (std::size_t t = T; t-- > 0;) {
    const double delta = rewards[t] + gamma * next_value - values[t];
    acc = delta + gamma * lam * acc;
    out.advantages[t] = acc;
    out.returns[t] = acc + values[t];
    next_value = values[t];
  }
  return out;
}

/// Shift and scale to mean 0, standard deviation 1 (population).
inline void normalize(std::vector<double>& a) {
  if (a.empty()) return;
  double mean = 0.0;
  for (double x : a) mean += x;
  mean /= double(a.size());
  double var = 0.0;
  for (double x : a) var += (x - mean) * (x - mean);
  const double sd = std::sqrt(var / double(a.size()));
  for (double& x : a) x = sd > 0 ? (x - mean) / sd : x - mean;
}

// ---------------------------------------------------------------------------
// Episodes

struct Episode {
  std::vector<Observation> observations;
  std::vector<int> actions;
  std::vector<double> logp;
  std::vector<double> rewards;
  std::vector<double> values;
  double bootstrap = 0.0;
  bool truncated = false;
  long additions = 0;
};

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(seed ^ splitmix64(a + 0x9e3779b97f4a7c15ULL)) + b);
}

/// Run one episode from the env's current state with the policy, recording
/// what PPO needs. `values` selects the critic; pass ValueKind::none to skip.
inline Episode run_policy_episode(BuchbergerEnv& env, const PolicyParams& params, Rng& rng, bool greedy,
                                  ValueKind values, double gamma, long rollout_cap) {
  Episode ep;
  Observation obs = env.observation();
  while (!env.done()) {
    const Eigen::VectorXd logp = policy_log_probs(params, obs);
    const std::size_t a = greedy ? greedy_action(logp) : sample_action(logp, rng);
    if (values != ValueKind::none) ep.values.push_back(value_estimate(env.state(), values, gamma, rollout_cap));
    else ep.values.push_back(0.0);
    StepResult r = env.step(a);
    ep.actions.push_back(static_cast<int>(a));
    ep.logp.push_back(logp[static_cast<Eigen::Index>(a)]);
    ep.rewards.push_back(double(r.reward));
    ep.additions -= r.reward;
    ep.observations.push_back(std::move(obs));
    obs = std::move(r.observation);
  }
  ep.truncated = env.truncated();
  if (ep.truncated && values != ValueKind::none)
    ep.bootstrap = value_estimate(env.state(), values, gamma, rollout_cap);
  return ep;
}

struct EpochReport {
  long epoch = 0;
  std::string distribution;
  double mean_additions = 0.0;
  double std_additions = 0.0;
  double mean_length = 0.0;
  int truncated = 0;
  int updates = 0;
  double kl = 0.0;
  double wall_seconds = 0.0;
};

inline nlohmann::json report_to_json(const EpochReport& r) {
  return {{"epoch", r.epoch},
          {"mean_additions", r.mean_additions},
          {"std_additions", r.std_additions},
          {"updates", r.updates},
          {"kl", r.kl},
          {"wall_seconds", r.wall_seconds},
          {"distribution", r.distribution},
          {"mean_length", r.mean_length},
          {"truncated", r.truncated}};
}

inline std::pair<double, double> mean_std(std::span<const double> xs) {
  if (xs.empty()) return {0.0, 0.0};
  double m = 0.0;
  for (double x : xs) m += x;
  m /= double(xs.size());
  double v = 0.0;
  for (double x : xs) v += (x - m) * (x - m);
  return {m, std::sqrt(v / double(xs.size()))};
}

/// Environment for episode k of an epoch; the default samples the epoch's
/// distribution with a seed derived from (config.seed, epoch, k).
using EnvFactory = std::function<BuchbergerEnv(const DistributionSpec&, long epoch, int episode)>;

inline EnvFactory default_env_factory(const TrainerConfig& c) {
  return [c](const DistributionSpec& spec, long epoch, int k) {
    EnvConfig ec;
    ec.mode = c.observation_mode;
    ec.max_episode_length = c.max_episode_length;
    BuchbergerEnv env(IdealSampler(spec, derive_seed(c.seed ^ 0x1dea, std::uint64_t(epoch), std::uint64_t(k))), ec);
    env.reset();
    return env;
  };
}

/// One PPO epoch: collect episodes, estimate advantages, then up to
/// max_updates_per_epoch full-batch Adam steps with KL early stopping.
inline EpochReport train_epoch(const TrainerConfig& c, PolicyModel& model, long epoch,
                               const EnvFactory& factory = nullptr) {
  const auto t_start = std::chrono::steady_clock::now();
  const EnvFactory make_env = factory ? factory : default_env_factory(c);
  const std::vector<DistributionSpec> specs = c.specs();
  Rng pick(derive_seed(c.seed, std::uint64_t(epoch), 0x5bec), 0);
  const DistributionSpec& spec = specs[pick.index(specs.size())];
  model.check_compatible(spec.n, c.observation_mode);

  std::vector<Episode> episodes(static_cast<std::size_t>(c.episodes_per_epoch));
  parallel_for(episodes.size(), c.workers, [&](std::size_t k) {
    BuchbergerEnv env = make_env(spec, epoch, static_cast<int>(k));
    Rng rng(derive_seed(c.seed, std::uint64_t(epoch), k), 0xac7);
    episodes[k] = run_policy_episode(env, model.params, rng, false, c.value_kind, c.gamma, c.rollout_cap);
  });

  EpochReport rep;
  rep.epoch = epoch;
  rep.distribution = to_string(spec);
  std::vector<double> adds, lens, advantages;
  for (const Episode& ep : episodes) {
    adds.push_back(double(ep.additions));
    lens.push_back(double(ep.actions.size()));
    rep.truncated += ep.truncated ? 1 : 0;
    GaeResult g = gae(ep.rewards, ep.values, ep.bootstrap, c.gamma, c.lam);
    advantages.insert(advantages.end(), g.advantages.begin(), g.advantages.end());
  }
  std::tie(rep.mean_additions, rep.std_additions) = mean_std(adds);
  rep.mean_length = mean_std(lens).first;
  if (c.normalize_advantages) normalize(advantages);

  PolicyBatch batch;
  std::size_t t = 0;
  for (Episode& ep : episodes)
    for (std::size_t s = 0; s < ep.actions.size(); ++s, ++t)
      batch.add(ep.observations[s], ep.actions[s], advantages[t], ep.logp[s]);
  episodes.clear();
  batch.finalize();

  SurrogateWorkspace ws;
  for (int u = 0; u < c.max_updates_per_epoch && batch.steps() > 0; ++u) {
    SurrogateResult s = ppo_surrogate(model.params, batch, c.clip, true, &ws);
    if (!std::isfinite(s.objective) || !std::isfinite(s.kl) || !s.gradient.allFinite()) {
      std::ostringstream os;
      os << "non-finite PPO loss at epoch " << epoch << " update " << u << ": objective=" << s.objective
         << " kl=" << s.kl << " |theta|=" << model.params.theta().norm();
      throw std::runtime_error(os.str());
    }
    rep.kl = s.kl;
    // The sampled estimate can dip below zero; either sign means drift.
    if (std::abs(s.kl) > c.kl_limit) break;
    model.adam.step(model.params, s.gradient, c.learning_rate);
    ++rep.updates;
  }
  model.epoch = epoch + 1;
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return rep;
}

// ---------------------------------------------------------------------------
// Evaluation

struct EvalReport {
  double mean = 0.0;
  double stddev = 0.0;
  std::vector<long> additions;
  int truncated = 0;
};

/// Run the policy on ideals sample_ideal(spec, seed + k), k < episodes: the
/// same ideals a benchmark with this seed uses. Ideals without pairs cost 0.
inline EvalReport evaluate(const PolicyModel& model, const DistributionSpec& spec, long episodes, std::uint64_t seed,
                           bool greedy = false, long max_episode_length = 0, int workers = 1) {
  model.check_compatible(spec.n, model.mode);
  EvalReport rep;
  rep.additions.assign(static_cast<std::size_t>(std::max(0L, episodes)), 0);
  std::vector<char> trunc(rep.additions.size(), 0);
  parallel_for(rep.additions.size(), workers, [&](std::size_t k) {
    EnvConfig ec;
    ec.mode = model.mode;
    ec.max_episode_length = max_episode_length;
    BuchbergerEnv env(ec);
    env.reset(sample_ideal(spec, seed + k).generators);
    Rng rng(seed + k, 0xe7a1);
    Episode ep = run_policy_episode(env, model.params, rng, greedy, ValueKind::none, 1.0, 1);
    rep.additions[k] = ep.additions;
    trunc[k] = ep.truncated;
  });
  std::vector<double> xs(rep.additions.begin(), rep.additions.end());
  std::tie(rep.mean, rep.stddev) = mean_std(xs);
  for (char c : trunc) rep.truncated += c;
  return rep;
}

/// Trailing moving average with the given window (shorter at the start).
inline std::vector<double> smooth(std::span<const double> xs, int window) {
  std::vector<double> out(xs.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    acc += xs[k];
    if (k >= static_cast<std::size_t>(window)) acc -= xs[k - static_cast<std::size_t>(window)];
    out[k] = acc / double(std::min<std::size_t>(k + 1, static_cast<std::size_t>(window)));
  }
  return out;
}

}  // namespace gbsel
