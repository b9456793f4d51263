#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "gbsel/groebner.hpp"
#include "gbsel/ideal_gen.hpp"

namespace gbsel {

enum class ObservationMode { full, lead_only };

inline std::string to_string(ObservationMode m) { return m == ObservationMode::full ? "full" : "lead_only"; }

inline ObservationMode parse_observation_mode(const std::string& s) {
  if (s == "full") return ObservationMode::full;
  if (s == "lead_only" || s == "lead-only") return ObservationMode::lead_only;
  throw std::invalid_argument("unknown observation mode '" + s + "'");
}

/// Row width for n variables.
inline int observation_width(int nvars, ObservationMode mode) {
  return mode == ObservationMode::full ? 4 * nvars : 2 * nvars;
}

/// p × w grid of exponents, one row per live pair in insertion order.
struct Observation {
  int rows = 0;
  int cols = 0;
  std::vector<int> data;
  /// (i, j) generator indices behind each row.
  std::vector<std::pair<int, int>> pairs;

  const int* row(int r) const { return data.data() + static_cast<std::ptrdiff_t>(r) * cols; }
  int at(int r, int c) const { return row(r)[c]; }
  friend bool operator==(const Observation&, const Observation&) = default;
};

namespace detail {

/// Exponents of the first `terms` terms of g, zero-padded for monomials.
inline void write_blocks(const Polynomial& g, int terms, int* out) {
  const int n = g.nvars();
  for (int t = 0; t < terms; ++t) {
    int* block = out + t * n;
    if (static_cast<std::size_t>(t) < g.size()) {
      const Monomial& m = g.terms()[static_cast<std::size_t>(t)].monomial;
      for (int v = 0; v < n; ++v) block[v] = m[v];
    } else {
      for (int v = 0; v < n; ++v) block[v] = 0;
    }
  }
}

}  // namespace detail

inline Observation encode_observation(const BuchbergerState& state, ObservationMode mode) {
  const int n = state.nvars();
  const int terms = mode == ObservationMode::full ? 2 : 1;
  Observation obs;
  obs.rows = static_cast<int>(state.pairs().size());
  obs.cols = observation_width(n, mode);
  obs.data.assign(static_cast<std::size_t>(obs.rows) * static_cast<std::size_t>(obs.cols), 0);
  obs.pairs.reserve(state.pairs().size());
  int r = 0;
  for (const SPair& p : state.pairs()) {
    int* row = obs.data.data() + static_cast<std::ptrdiff_t>(r) * obs.cols;
    detail::write_blocks(state.generators()[static_cast<std::size_t>(p.i)], terms, row);
    detail::write_blocks(state.generators()[static_cast<std::size_t>(p.j)], terms, row + terms * n);
    obs.pairs.emplace_back(p.i, p.j);
    ++r;
  }
  return obs;
}

struct StepInfo {
  std::pair<int, int> pair{0, 0};
  long additions = 0;
  bool zero_remainder = false;
  std::size_t p_before = 0;
  int basis_size = 0;
  bool truncated = false;
};

struct StepResult {
  Observation observation;
  long reward = 0;
  bool done = false;
  StepInfo info;
};

/// One trace line: {pair: [i,j], reward, p_before, basis_size}.
struct TraceRecord {
  std::pair<int, int> pair;
  long reward = 0;
  std::size_t p_before = 0;
  int basis_size = 0;
};

struct EnvConfig {
  ObservationMode mode = ObservationMode::full;
  /// Steps before an episode is cut off and flagged truncated; 0 disables.
  long max_episode_length = 500;
  UpdateRule rule = UpdateRule::gebauer_moller;
  bool record_trace = false;
};

/// Ideals drawn from a distribution with per-draw seeds base_seed + k.
class IdealSampler {
 public:
  IdealSampler(DistributionSpec spec, std::uint64_t base_seed) : spec_(std::move(spec)), base_(base_seed) {
    spec_.validate();
  }
  IdealSample next() { return sample_ideal(spec_, base_ + draws_++); }
  const DistributionSpec& spec() const noexcept { return spec_; }
  std::uint64_t draws() const noexcept { return draws_; }

 private:
  DistributionSpec spec_;
  std::uint64_t base_;
  std::uint64_t draws_ = 0;
};

/// Buchberger's algorithm as an episodic environment. Actions are row
/// indices of the current observation; rewards are minus the additions
/// spent on the chosen pair. Copying the environment clones its state.
class BuchbergerEnv {
 public:
  explicit BuchbergerEnv(EnvConfig config = {}) : config_(config) {}
  BuchbergerEnv(IdealSampler sampler, EnvConfig config = {}) : config_(config), sampler_(std::move(sampler)) {}

  /// Start an episode on a fresh sample, skipping ideals with no pairs.
  Observation reset() {
    if (!sampler_) throw InvalidState("reset() without a sampler; pass an ideal");
    for (int attempt = 0; attempt < 100000; ++attempt) {
      IdealSample s = sampler_->next();
      start(BuchbergerState::from_generators(s.generators, config_.rule));
      if (!state_.done()) return observation();
    }
    throw std::runtime_error("sampler keeps producing ideals with no pairs");
  }

  /// Start an episode on `F`. With no pairs the episode is already done.
  Observation reset(std::span<const Polynomial> F) {
    if (F.empty()) throw std::invalid_argument("cannot reset on an empty ideal");
    start(BuchbergerState::from_generators(F, config_.rule));
    return observation();
  }

  /// Start from an explicit state (used to pose hand-built pair sets).
  Observation reset(BuchbergerState state) {
    start(std::move(state));
    return observation();
  }

  StepResult step(std::size_t action) {
    if (!started_) throw InvalidState("step before reset");
    if (done_) throw InvalidState("step after episode end");
    if (action >= state_.pairs().size()) throw InvalidAction("action out of range");
    const PairOutcome out = state_.process(action);
    ++steps_;
    StepResult res;
    res.reward = -out.additions;
    total_reward_ += res.reward;
    res.info.pair = {out.pair.i, out.pair.j};
    res.info.additions = out.additions;
    res.info.zero_remainder = out.zero_remainder;
    res.info.p_before = out.pairs_before;
    res.info.basis_size = state_.generator_count();
    if (state_.done()) {
      done_ = true;
    } else if (config_.max_episode_length > 0 && steps_ >= config_.max_episode_length) {
      done_ = true;
      truncated_ = true;
    }
    res.info.truncated = truncated_;
    res.done = done_;
    res.observation = observation();
    if (config_.record_trace) trace_.push_back({res.info.pair, res.reward, res.info.p_before, res.info.basis_size});
    return res;
  }

  Observation observation() const { return encode_observation(state_, config_.mode); }
  const BuchbergerState& state() const noexcept { return state_; }
  const EnvConfig& config() const noexcept { return config_; }
  bool done() const noexcept { return done_; }
  bool truncated() const noexcept { return truncated_; }
  long steps() const noexcept { return steps_; }
  long total_reward() const noexcept { return total_reward_; }
  int width() const noexcept { return observation_width(state_.nvars(), config_.mode); }
  const std::vector<TraceRecord>& trace() const noexcept { return trace_; }

  BuchbergerEnv clone() const { return *this; }

 private:
  void start(BuchbergerState s) {
    state_ = std::move(s);
    started_ = true;
    done_ = state_.done();
    truncated_ = false;
    steps_ = 0;
    total_reward_ = 0;
    trace_.clear();
  }

  EnvConfig config_;
  std::optional<IdealSampler> sampler_;
  BuchbergerState state_;
  bool started_ = false;
  bool done_ = true;
  bool truncated_ = false;
  long steps_ = 0;
  long total_reward_ = 0;
  std::vector<TraceRecord> trace_;
};

inline void write_trace_jsonl(std::ostream& os, const std::vector<TraceRecord>& trace) {
  for (const TraceRecord& t : trace)
    os << "{\"pair\":[" << t.pair.first << ',' << t.pair.second << "],\"reward\":" << t.reward
       << ",\"p_before\":" << t.p_before << ",\"basis_size\":" << t.basis_size << "}\n";
}

}  // namespace gbsel
