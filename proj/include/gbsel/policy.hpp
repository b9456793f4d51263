#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <fstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "gbsel/env.hpp"
#include "gbsel/errors.hpp"
#include "gbsel/random.hpp"
#include "json.hpp"

namespace gbsel {

/// Row-wise MLP: score(row) = W2 · relu(W1 row + b1) + b2. All weights live
/// in one flat vector theta laid out as [W1 (column-major h × w), b1, W2, b2]
/// so optimizers and gradient checks work on a single array.
class PolicyParams {
 public:
  PolicyParams() = default;
  PolicyParams(int width, int hidden)
      : w_(width), h_(hidden), theta_(Eigen::VectorXd::Zero(size_for(width, hidden))) {
    if (width < 1 || hidden < 1) throw std::invalid_argument("policy dimensions must be positive");
  }

  static Eigen::Index size_for(int w, int h) { return Eigen::Index(h) * w + 2 * Eigen::Index(h) + 1; }

  int width() const noexcept { return w_; }
  int hidden() const noexcept { return h_; }
  Eigen::Index size() const noexcept { return theta_.size(); }

  Eigen::VectorXd& theta() noexcept { return theta_; }
  const Eigen::VectorXd& theta() const noexcept { return theta_; }

  Eigen::Map<Eigen::MatrixXd> W1() { return {theta_.data(), h_, w_}; }
  Eigen::Map<const Eigen::MatrixXd> W1() const { return {theta_.data(), h_, w_}; }
  auto b1() { return theta_.segment(Eigen::Index(h_) * w_, h_); }
  auto b1() const { return theta_.segment(Eigen::Index(h_) * w_, h_); }
  auto W2() { return theta_.segment(Eigen::Index(h_) * w_ + h_, h_); }
  auto W2() const { return theta_.segment(Eigen::Index(h_) * w_ + h_, h_); }
  double& b2() { return theta_[theta_.size() - 1]; }
  double b2() const { return theta_[theta_.size() - 1]; }

  bool same_shape(const PolicyParams& o) const { return w_ == o.w_ && h_ == o.h_; }
  friend bool operator==(const PolicyParams& a, const PolicyParams& b) {
    return a.same_shape(b) && a.theta_ == b.theta_;
  }

 private:
  int w_ = 0;
  int h_ = 0;
  Eigen::VectorXd theta_;
};

/// Glorot-uniform first layer, output layer scaled by `output_gain` so the
/// initial softmax is close to uniform, zero biases.
inline PolicyParams init_policy(int width, int hidden, std::uint64_t seed, double output_gain = 0.01) {
  PolicyParams p(width, hidden);
  Rng rng(seed, 0x1417);
  const double a1 = std::sqrt(6.0 / (width + hidden));
  auto W1 = p.W1();
  for (Eigen::Index c = 0; c < W1.cols(); ++c)
    for (Eigen::Index r = 0; r < W1.rows(); ++r) W1(r, c) = a1 * (2.0 * rng.uniform01() - 1.0);
  const double a2 = output_gain * std::sqrt(6.0 / (hidden + 1));
  for (Eigen::Index k = 0; k < hidden; ++k) p.W2()[k] = a2 * (2.0 * rng.uniform01() - 1.0);
  return p;
}

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline RowMatrix to_matrix(const Observation& obs) {
  RowMatrix X(obs.rows, obs.cols);
  for (int r = 0; r < obs.rows; ++r)
    for (int c = 0; c < obs.cols; ++c) X(r, c) = obs.at(r, c);
  return X;
}

/// Preference score of every row.
inline Eigen::VectorXd policy_scores(const PolicyParams& p, const RowMatrix& X) {
  if (X.cols() != p.width())
    throw DimensionError("observation width " + std::to_string(X.cols()) + " does not match policy width " +
                         std::to_string(p.width()));
  Eigen::MatrixXd H = (X * p.W1().transpose()).rowwise() + p.b1().transpose();
  H = H.cwiseMax(0.0);
  return (H * p.W2()).array() + p.b2();
}

/// log softmax of a score vector.
inline Eigen::VectorXd log_softmax(const Eigen::VectorXd& s) {
  const double m = s.maxCoeff();
  const double lse = m + std::log((s.array() - m).exp().sum());
  return s.array() - lse;
}

inline Eigen::VectorXd policy_log_probs(const PolicyParams& p, const Observation& obs) {
  if (obs.rows == 0) throw InvalidState("policy on an empty observation");
  return log_softmax(policy_scores(p, to_matrix(obs)));
}

inline Eigen::VectorXd policy_probs(const PolicyParams& p, const Observation& obs) {
  return policy_log_probs(p, obs).array().exp();
}

/// Sample a row from exp(logp) by inversion.
inline std::size_t sample_action(const Eigen::VectorXd& logp, Rng& rng) {
  const double u = rng.uniform01();
  double acc = 0.0;
  for (Eigen::Index k = 0; k < logp.size(); ++k) {
    acc += std::exp(logp[k]);
    if (u < acc) return static_cast<std::size_t>(k);
  }
  return static_cast<std::size_t>(logp.size() - 1);
}

inline std::size_t greedy_action(const Eigen::VectorXd& logp) {
  Eigen::Index best = 0;
  logp.maxCoeff(&best);
  return static_cast<std::size_t>(best);
}

/// Steps of experience for batched evaluation. Identical rows are stored
/// once in X; step t owns slots [offsets[t], offsets[t+1]) of row_index.
struct PolicyBatch {
  RowMatrix X;
  std::vector<Eigen::Index> row_index;
  std::vector<Eigen::Index> offsets{0};
  std::vector<int> actions;
  std::vector<double> advantages;
  std::vector<double> old_logp;

  std::size_t steps() const noexcept { return actions.size(); }
  Eigen::Index unique_rows() const noexcept { return static_cast<Eigen::Index>(unique_.size()); }

  void add(const Observation& obs, int action, double advantage, double logp) {
    if (obs.rows == 0) throw std::invalid_argument("empty observation in batch");
    if (cols_ == 0) cols_ = obs.cols;
    if (obs.cols != cols_) throw DimensionError("mixed observation widths in batch");
    if (action < 0 || action >= obs.rows) throw InvalidAction("batch action out of range");
    for (int r = 0; r < obs.rows; ++r) {
      std::vector<int> key(obs.row(r), obs.row(r) + obs.cols);
      auto [it, fresh] = lookup_.try_emplace(std::move(key), static_cast<Eigen::Index>(unique_.size()));
      if (fresh) unique_.push_back(&it->first);
      row_index.push_back(it->second);
    }
    actions.push_back(action);
    advantages.push_back(advantage);
    old_logp.push_back(logp);
    offsets.push_back(offsets.back() + obs.rows);
  }

  /// Build X from the distinct rows; call after the last add().
  void finalize() {
    X.resize(unique_rows(), cols_);
    for (Eigen::Index u = 0; u < X.rows(); ++u)
      for (int c = 0; c < cols_; ++c) X(u, c) = (*unique_[static_cast<std::size_t>(u)])[static_cast<std::size_t>(c)];
  }

 private:
  struct RowHash {
    std::size_t operator()(const std::vector<int>& v) const noexcept {
      std::uint64_t h = 0x51ed270b;
      for (int x : v) h = splitmix64(h ^ static_cast<std::uint64_t>(x));
      return static_cast<std::size_t>(h);
    }
  };
  int cols_ = 0;
  std::unordered_map<std::vector<int>, Eigen::Index, RowHash> lookup_;
  std::vector<const std::vector<int>*> unique_;
};

struct SurrogateResult {
  /// mean_t min(ρA, clip(ρ, 1-ε, 1+ε) A)
  double objective = 0.0;
  /// mean_t (old_logp - new_logp)
  double kl = 0.0;
  std::vector<double> new_logp;
  /// d objective / d theta (empty unless requested).
  Eigen::VectorXd gradient;
};

/// Scratch matrices reused across surrogate evaluations on one batch.
struct SurrogateWorkspace {
  Eigen::MatrixXd pre, H, dH;
  Eigen::VectorXd scores, dscore;
};

/// Clipped PPO surrogate over a batch and, optionally, its analytic gradient.
inline SurrogateResult ppo_surrogate(const PolicyParams& p, const PolicyBatch& b, double clip_eps,
                                     bool want_gradient = true, SurrogateWorkspace* workspace = nullptr) {
  SurrogateWorkspace local;
  SurrogateWorkspace& ws = workspace ? *workspace : local;
  if (b.X.rows() != b.unique_rows()) throw std::logic_error("PolicyBatch not finalized");
  if (b.steps() > 0 && b.X.cols() != p.width()) throw DimensionError("batch width does not match policy");
  SurrogateResult res;
  res.new_logp.resize(b.steps());
  const double inv_n = b.steps() ? 1.0 / double(b.steps()) : 0.0;

  Eigen::MatrixXd& pre = ws.pre;
  Eigen::MatrixXd& H = ws.H;
  Eigen::VectorXd& scores = ws.scores;
  pre.resize(b.X.rows(), p.hidden());
  pre.noalias() = b.X * p.W1().transpose();
  pre.rowwise() += p.b1().transpose();
  H = pre.cwiseMax(0.0);
  scores.resize(b.X.rows());
  scores.noalias() = H * p.W2();
  scores.array() += p.b2();
  // d objective / d score, accumulated per distinct row.
  Eigen::VectorXd& dscore = ws.dscore;
  dscore.setZero(b.X.rows());
  Eigen::VectorXd s;

  for (std::size_t t = 0; t < b.steps(); ++t) {
    const Eigen::Index a = b.offsets[t];
    const Eigen::Index len = b.offsets[t + 1] - a;
    s.resize(len);
    for (Eigen::Index k = 0; k < len; ++k) s[k] = scores[b.row_index[static_cast<std::size_t>(a + k)]];
    const Eigen::VectorXd lp = log_softmax(s);
    const double logp = lp[b.actions[t]];
    res.new_logp[t] = logp;
    res.kl += (b.old_logp[t] - logp) * inv_n;
    const double A = b.advantages[t];
    const double rho = std::exp(logp - b.old_logp[t]);
    const double clipped = std::clamp(rho, 1.0 - clip_eps, 1.0 + clip_eps);
    res.objective += std::min(rho * A, clipped * A) * inv_n;
    if (!want_gradient) continue;
    // The unclipped branch is active unless the ratio has left the trust
    // region in the direction that A rewards.
    const bool active = A >= 0 ? rho <= 1.0 + clip_eps : rho >= 1.0 - clip_eps;
    if (!active || A == 0.0) continue;
    const double coef = rho * A * inv_n;
    // d logp[a] / d s = onehot(a) - softmax(s)
    for (Eigen::Index k = 0; k < len; ++k)
      dscore[b.row_index[static_cast<std::size_t>(a + k)]] -= coef * std::exp(lp[k]);
    dscore[b.row_index[static_cast<std::size_t>(a + b.actions[t])]] += coef;
  }
  if (want_gradient) {
    PolicyParams g(p.width(), p.hidden());
    g.W2() = H.transpose() * dscore;
    g.b2() = dscore.sum();
    Eigen::MatrixXd& dH = ws.dH;
    dH.resize(b.X.rows(), p.hidden());
    dH.noalias() = dscore * p.W2().transpose();
    dH.array() *= (pre.array() > 0.0).cast<double>();
    g.W1() = dH.transpose() * b.X;
    g.b1() = dH.colwise().sum().transpose();
    res.gradient = std::move(g.theta());
  }
  return res;
}

/// Adam on the flat parameter vector, ascending the objective.
struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  long t = 0;

  void step(PolicyParams& p, const Eigen::VectorXd& grad, double lr) {
    if (m.size() != p.size()) {
      m = Eigen::VectorXd::Zero(p.size());
      v = Eigen::VectorXd::Zero(p.size());
    }
    ++t;
    m = beta1 * m + (1 - beta1) * grad;
    v = beta2 * v + (1 - beta2) * grad.cwiseAbs2();
    const double c1 = 1 - std::pow(beta1, double(t));
    const double c2 = 1 - std::pow(beta2, double(t));
    p.theta().array() += lr * (m.array() / c1) / ((v.array() / c2).sqrt() + epsilon);
  }
  friend bool operator==(const AdamState&, const AdamState&) = default;
};

// ---------------------------------------------------------------------------
// Persistence

inline constexpr int kModelFormatVersion = 1;

/// A policy plus what it was trained for.
struct PolicyModel {
  int nvars = 0;
  ObservationMode mode = ObservationMode::full;
  PolicyParams params;
  AdamState adam;
  /// Epochs completed when saved.
  long epoch = 0;

  /// Throws FormatError if this model cannot drive an env with n variables
  /// in the given mode.
  void check_compatible(int n, ObservationMode m) const {
    if (n != nvars)
      throw FormatError("model is for n=" + std::to_string(nvars) + ", environment has n=" + std::to_string(n));
    if (m != mode)
      throw FormatError("model observation mode is " + to_string(mode) + ", environment uses " + to_string(m));
    if (params.width() != observation_width(n, m)) throw FormatError("model width does not match environment");
  }
};

namespace detail {

inline nlohmann::json vec_json(const Eigen::Ref<const Eigen::VectorXd>& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

inline Eigen::VectorXd json_vec(const nlohmann::json& j, Eigen::Index expect, const char* what) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != expect)
    throw FormatError(std::string("model field '") + what + "' has wrong length");
  Eigen::VectorXd v(expect);
  for (Eigen::Index k = 0; k < expect; ++k) v[k] = j[static_cast<std::size_t>(k)].get<double>();
  return v;
}

}  // namespace detail

inline nlohmann::json model_to_json(const PolicyModel& m) {
  const PolicyParams& p = m.params;
  nlohmann::json W1 = nlohmann::json::array();
  for (int r = 0; r < p.hidden(); ++r) W1.push_back(detail::vec_json(p.W1().row(r).transpose()));
  nlohmann::json j;
  j["header"] = {{"format_version", kModelFormatVersion},
                 {"n", m.nvars},
                 {"observation_mode", to_string(m.mode)},
                 {"h", p.hidden()},
                 {"w", p.width()}};
  j["epoch"] = m.epoch;
  j["W1"] = std::move(W1);
  j["b1"] = detail::vec_json(p.b1());
  j["W2"] = detail::vec_json(p.W2());
  j["b2"] = p.b2();
  nlohmann::json adam = {{"beta1", m.adam.beta1}, {"beta2", m.adam.beta2}, {"epsilon", m.adam.epsilon},
                         {"t", m.adam.t}};
  adam["m"] = detail::vec_json(m.adam.m);
  adam["v"] = detail::vec_json(m.adam.v);
  j["adam"] = std::move(adam);
  return j;
}

inline PolicyModel model_from_json(const nlohmann::json& j) {
  try {
    const auto& hdr = j.at("header");
    if (hdr.at("format_version").get<int>() != kModelFormatVersion)
      throw FormatError("unsupported model format version " + hdr.at("format_version").dump());
    PolicyModel m;
    m.nvars = hdr.at("n").get<int>();
    m.mode = parse_observation_mode(hdr.at("observation_mode").get<std::string>());
    const int h = hdr.at("h").get<int>();
    const int w = hdr.at("w").get<int>();
    if (m.nvars < 1 || m.nvars > kMaxVars) throw FormatError("model header has invalid n");
    if (w != observation_width(m.nvars, m.mode)) throw FormatError("model header width disagrees with n and mode");
    if (h < 1) throw FormatError("model header has invalid h");
    m.params = PolicyParams(w, h);
    const auto& W1 = j.at("W1");
    if (!W1.is_array() || static_cast<int>(W1.size()) != h) throw FormatError("model field 'W1' has wrong shape");
    for (int r = 0; r < h; ++r) m.params.W1().row(r) = detail::json_vec(W1[static_cast<std::size_t>(r)], w, "W1").transpose();
    m.params.b1() = detail::json_vec(j.at("b1"), h, "b1");
    m.params.W2() = detail::json_vec(j.at("W2"), h, "W2");
    m.params.b2() = j.at("b2").get<double>();
    m.epoch = j.value("epoch", 0L);
    if (j.contains("adam")) {
      const auto& a = j["adam"];
      m.adam.beta1 = a.at("beta1").get<double>();
      m.adam.beta2 = a.at("beta2").get<double>();
      m.adam.epsilon = a.at("epsilon").get<double>();
      m.adam.t = a.at("t").get<long>();
      if (!a.at("m").empty()) {
        m.adam.m = detail::json_vec(a.at("m"), m.params.size(), "adam.m");
        m.adam.v = detail::json_vec(a.at("v"), m.params.size(), "adam.v");
      }
    }
    if (!m.params.theta().allFinite()) throw FormatError("model contains non-finite weights");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed model file: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("malformed model file: ") + e.what());
  }
}

inline void save_model(const PolicyModel& m, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw FormatError("cannot write model file '" + path + "'");
  os << model_to_json(m).dump() << '\n';
  if (!os) throw FormatError("error writing model file '" + path + "'");
}

inline PolicyModel load_model(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw FormatError("cannot open model file '" + path + "'");
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("model file '" + path + "' is not valid JSON: " + e.what());
  }
  return model_from_json(j);
}

/// Load and check against the environment the model will drive.
inline PolicyModel load_model(const std::string& path, int nvars, ObservationMode mode) {
  PolicyModel m = load_model(path);
  m.check_compatible(nvars, mode);
  return m;
}

}  // namespace gbsel
