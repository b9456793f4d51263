// gbsel: Groebner bases, pair-selection benchmarks and PPO training.
//
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "gbsel/benchmark.hpp"
#include "gbsel/io.hpp"
#include "gbsel/ppo.hpp"

using namespace gbsel;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

/// Failure in the user's data rather than in how the command was invoked.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<Strategy> parse_strategy_list(const std::string& text) {
  if (text == "all") return {std::begin(kAllStrategies), std::end(kAllStrategies)};
  std::vector<Strategy> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) out.push_back(parse_strategy(item));
  if (out.empty()) throw std::invalid_argument("empty strategy list");
  return out;
}

/// Open `path` for writing, or stdout for "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path != "-") {
      file_.open(path);
      if (!file_) throw DataError("cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::string fmt(double x, int precision = 2) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << x;
  return os.str();
}

json summary_json(const Summary& s) {
  return {{"count", s.count}, {"mean", s.mean}, {"std", s.stddev}, {"min", s.min}, {"p25", s.p25},
          {"median", s.median}, {"p75", s.p75}, {"p95", s.p95}, {"max", s.max}};
}

// ---------------------------------------------------------------------------

struct GbArgs {
  std::string input;
  std::string strategy = "degree";
  std::uint64_t seed = 0;
  int nvars = 0;
  std::uint32_t prime = kDefaultPrime;
  std::string format = "text";
  bool raw = false;
  std::string trace;
};

int cmd_gb(const GbArgs& a) {
  const Strategy strategy = parse_strategy(a.strategy);
  IdealFile ideal = read_ideal_file(a.input, a.nvars, PrimeField(a.prime));
  std::vector<TraceRecord> trace;
  BuchbergerResult res;
  if (!a.trace.empty()) {
    EnvConfig ec;
    ec.max_episode_length = 0;
    ec.record_trace = true;
    BuchbergerEnv env(ec);
    env.reset(ideal.generators);
    StrategySelector sel(strategy, a.seed);
    while (!env.done()) env.step(sel(env.state()));
    BuchbergerState st = env.state();
    res.stats = run_to_completion(st, sel);
    res.basis = st.generators();
    Output out(a.trace);
    write_trace_jsonl(out.stream(), env.trace());
  } else {
    res = buchberger(ideal.generators, strategy, a.seed);
  }
  const std::vector<Polynomial> basis = a.raw ? res.basis : reduce_basis(res.basis);
  json stats = stats_to_json(res.stats);
  stats["strategy"] = to_string(strategy);
  if (a.format == "json") {
    json gens = json::array();
    for (const Polynomial& g : basis) gens.push_back(to_string(g));
    std::cout << json{{"basis", gens}, {"stats", stats}}.dump(2) << '\n';
  } else {
    for (const Polynomial& g : basis) std::cout << to_string(g) << '\n';
    std::cout << "# stats " << stats.dump() << '\n';
  }
  return 0;
}

struct SampleArgs {
  std::string spec;
  std::uint64_t seed = 0;
  std::string out = "-";
  std::string format = "json";
};

int cmd_sample(const SampleArgs& a) {
  const IdealSample s = sample_ideal(parse_spec(a.spec), a.seed);
  Output out(a.out);
  if (a.format == "text") {
    out.stream() << "# " << to_string(s.spec) << " seed " << s.seed << '\n';
    for (const Polynomial& g : s.generators) out.stream() << to_string(g) << '\n';
  } else {
    out.stream() << ideal_to_json(s).dump(2) << '\n';
  }
  return 0;
}

struct BenchArgs {
  std::string spec;
  std::string strategies = "all";
  long samples = 1000;
  std::uint64_t seed = 0;
  int workers = 1;
  std::string csv;
  std::string json_out;
  bool no_invariants = false;
  std::string update = "gm";
};

int cmd_benchmark(const BenchArgs& a) {
  BenchmarkConfig cfg;
  cfg.spec = parse_spec(a.spec);
  cfg.strategies = parse_strategy_list(a.strategies);
  cfg.samples = a.samples;
  cfg.seed = a.seed;
  cfg.workers = a.workers;
  cfg.compute_invariants = !a.no_invariants;
  cfg.rule = a.update == "naive"       ? UpdateRule::naive
             : a.update == "gm-latest" ? UpdateRule::gebauer_moller_latest
                                       : UpdateRule::gebauer_moller;
  const BenchmarkResult r = run_benchmark(cfg);

  json report = {{"spec", to_string(cfg.spec)}, {"samples", cfg.samples}, {"seed", cfg.seed}, {"update", a.update}};
  json rows = json::array();
  std::cout << "# " << to_string(cfg.spec) << ", " << cfg.samples << " samples, seed " << cfg.seed << '\n';
  std::cout << std::left << std::setw(12) << "strategy" << "mean [std]\n";
  for (std::size_t s = 0; s < cfg.strategies.size(); ++s) {
    const Summary sum = r.additions(s);
    std::cout << std::left << std::setw(12) << to_string(cfg.strategies[s]) << fmt(sum.mean) << " ["
              << fmt(sum.stddev) << "]\n";
    json row = summary_json(sum);
    row["strategy"] = to_string(cfg.strategies[s]);
    rows.push_back(std::move(row));
  }
  report["strategies"] = std::move(rows);
  if (!a.csv.empty()) {
    Output out(a.csv);
    write_benchmark_csv(out.stream(), r);
  }
  if (!a.json_out.empty()) {
    Output out(a.json_out);
    out.stream() << report.dump(2) << '\n';
  }
  return 0;
}

struct StatsArgs {
  std::string spec;
  long samples = 1000;
  std::uint64_t seed = 0;
  int workers = 1;
  std::string grid_d;
  std::string grid_s;
  std::string out = "-";
};

std::vector<int> parse_range(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      out.push_back(std::stoi(item));
    } else {
      const int lo = std::stoi(item.substr(0, colon)), hi = std::stoi(item.substr(colon + 1));
      for (int v = lo; v <= hi; ++v) out.push_back(v);
    }
  }
  return out;
}

int cmd_stats(const StatsArgs& a) {
  const DistributionSpec spec = parse_spec(a.spec);
  Output out(a.out);
  if (!a.grid_d.empty() || !a.grid_s.empty()) {
    // Mean Degree additions per (d, s) cell.
    const std::vector<int> ds = a.grid_d.empty() ? std::vector<int>{spec.d} : parse_range(a.grid_d);
    const std::vector<int> ss = a.grid_s.empty() ? std::vector<int>{spec.s} : parse_range(a.grid_s);
    out.stream() << "d,s,samples,mean_additions,std_additions\n";
    for (int d : ds)
      for (int s : ss) {
        BenchmarkConfig cfg;
        cfg.spec = spec;
        cfg.spec.d = d;
        cfg.spec.s = s;
        cfg.strategies = {Strategy::degree};
        cfg.samples = a.samples;
        cfg.seed = a.seed;
        cfg.workers = a.workers;
        cfg.compute_invariants = false;
        const Summary sum = run_benchmark(cfg).additions(0);
        out.stream() << d << ',' << s << ',' << a.samples << ',' << fmt(sum.mean, 4) << ',' << fmt(sum.stddev, 4)
                     << '\n';
      }
    return 0;
  }
  const auto hist = dimension_histogram(spec, a.samples, a.seed, a.workers);
  json counts = json::object();
  for (const auto& [dim, count] : hist)
    if (dim >= 0) counts[std::to_string(dim)] = count;
  out.stream() << json{{"spec", to_string(spec)},
                       {"samples", a.samples},
                       {"seed", a.seed},
                       {"dimension_counts", counts},
                       {"unit_ideals", hist.at(-1)}}
                      .dump(2)
               << '\n';
  return 0;
}

struct TrainArgs {
  std::string config;
  std::vector<std::string> overrides;
  std::string out = "model.json";
  std::string log = "train_log.jsonl";
  std::string resume;
  int epochs = -1;
  bool zero_timing = false;
};

std::string checkpoint_path(const std::string& out, long epoch) {
  std::filesystem::path p(out);
  return (p.parent_path() / (p.stem().string() + ".epoch" + std::to_string(epoch) + p.extension().string())).string();
}

std::string best_path(const std::string& out) {
  std::filesystem::path p(out);
  return (p.parent_path() / (p.stem().string() + ".best" + p.extension().string())).string();
}

int cmd_train(const TrainArgs& a) {
  json j = json::object();
  if (!a.config.empty()) {
    std::ifstream is(a.config);
    if (!is) throw DataError("cannot open config '" + a.config + "'");
    try {
      is >> j;
    } catch (const json::exception& e) {
      throw DataError("config '" + a.config + "' is not valid JSON: " + e.what());
    }
  }
  for (const std::string& kv : a.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
    const std::string key = kv.substr(0, eq), value = kv.substr(eq + 1);
    json parsed = json::parse(value, nullptr, false);
    j[key] = parsed.is_discarded() ? json(value) : parsed;
  }
  if (a.epochs >= 0) j["epochs"] = a.epochs;
  TrainerConfig cfg;
  try {
    cfg = config_from_json(j);
  } catch (const std::invalid_argument& e) {
    throw DataError(e.what());
  }

  PolicyModel model = a.resume.empty() ? make_model(cfg) : load_model(a.resume);
  model.check_compatible(cfg.nvars(), cfg.observation_mode);
  {
    Output cfg_out(a.log + ".config.json");
    cfg_out.stream() << config_to_json(cfg).dump(2) << '\n';
  }
  std::ofstream log(a.log, a.resume.empty() ? std::ios::trunc : std::ios::app);
  if (!log) throw DataError("cannot write log '" + a.log + "'");

  // Best checkpoint by trailing smoothed mean additions.
  std::vector<double> history;
  double best = std::numeric_limits<double>::infinity();
  for (long epoch = model.epoch; epoch < cfg.epochs; ++epoch) {
    EpochReport r = train_epoch(cfg, model, epoch);
    if (a.zero_timing) r.wall_seconds = 0.0;
    log << report_to_json(r).dump() << '\n' << std::flush;
    std::cerr << "epoch " << epoch << " mean " << fmt(r.mean_additions) << " updates " << r.updates << " kl "
              << fmt(r.kl, 5) << '\n';
    history.push_back(r.mean_additions);
    if (static_cast<int>(history.size()) >= cfg.smoothing_window) {
      const double s = smooth(history, cfg.smoothing_window).back();
      if (s < best) {
        best = s;
        save_model(model, best_path(a.out));
      }
    }
    if (cfg.checkpoint_every > 0 && (epoch + 1) % cfg.checkpoint_every == 0)
      save_model(model, checkpoint_path(a.out, epoch + 1));
  }
  save_model(model, a.out);
  return 0;
}

struct EvalArgs {
  std::string model;
  std::string spec;
  long episodes = 1000;
  std::uint64_t seed = 0;
  bool greedy = false;
  bool baselines = false;
  std::string strategies = "all";
  std::string ratios;
  std::string csv;
  long max_steps = 0;
  int workers = 1;
};

int cmd_evaluate(const EvalArgs& a) {
  const DistributionSpec spec = parse_spec(a.spec);
  const PolicyModel model = load_model(a.model);
  model.check_compatible(spec.n, model.mode);
  const EvalReport agent = evaluate(model, spec, a.episodes, a.seed, a.greedy, a.max_steps, a.workers);

  std::cout << "# " << to_string(spec) << ", " << a.episodes << " episodes, seed " << a.seed << ", "
            << (a.greedy ? "greedy" : "sampled") << " actions\n";
  std::cout << std::left << std::setw(12) << "strategy" << "mean [std]\n";
  std::cout << std::left << std::setw(12) << "agent" << fmt(agent.mean) << " [" << fmt(agent.stddev) << "]\n";
  if (!a.baselines) return 0;

  BenchmarkConfig cfg;
  cfg.spec = spec;
  cfg.strategies = parse_strategy_list(a.strategies);
  cfg.samples = a.episodes;
  cfg.seed = a.seed;
  cfg.workers = a.workers;
  cfg.compute_invariants = false;
  const BenchmarkResult bench = run_benchmark(cfg);
  double best_mean = std::numeric_limits<double>::infinity();
  std::size_t best = 0;
  for (std::size_t s = 0; s < cfg.strategies.size(); ++s) {
    const Summary sum = bench.additions(s);
    std::cout << std::left << std::setw(12) << to_string(cfg.strategies[s]) << fmt(sum.mean) << " ["
              << fmt(sum.stddev) << "]\n";
    if (sum.mean < best_mean) {
      best_mean = sum.mean;
      best = s;
    }
  }
  std::cout << "improvement " << fmt(1.0 - agent.mean / best_mean, 4) << " over "
            << to_string(cfg.strategies[best]) << '\n';
  if (!a.ratios.empty()) {
    // Per-ideal log10(agent / best benchmark), best taken per ideal.
    Output out(a.ratios);
    out.stream() << "seed_index,agent,best_benchmark,log10_ratio\n";
    for (std::size_t k = 0; k < agent.additions.size(); ++k) {
      long b = std::numeric_limits<long>::max();
      for (std::size_t s = 0; s < cfg.strategies.size(); ++s) b = std::min(b, bench.stats[s][k].additions);
      const double ratio = (agent.additions[k] == 0 && b == 0) ? 0.0
                                                               : std::log10(double(std::max(1L, agent.additions[k])) /
                                                                            double(std::max(1L, b)));
      out.stream() << k << ',' << agent.additions[k] << ',' << b << ',' << fmt(ratio, 6) << '\n';
    }
  }
  if (!a.csv.empty()) {
    Output out(a.csv);
    out.stream() << "seed_index,strategy,additions\n";
    for (std::size_t k = 0; k < agent.additions.size(); ++k) {
      out.stream() << k << ",agent," << agent.additions[k] << '\n';
      for (std::size_t s = 0; s < cfg.strategies.size(); ++s)
        out.stream() << k << ',' << to_string(cfg.strategies[s]) << ',' << bench.stats[s][k].additions << '\n';
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Groebner basis pair selection: computation, benchmarks, training"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "gbsel 0.1.0");

  GbArgs gb;
  auto* gb_cmd = app.add_subcommand("gb", "Compute a reduced Groebner basis of an ideal file");
  gb_cmd->add_option("input", gb.input, "Ideal file: one polynomial per line, or JSON")->required();
  gb_cmd->add_option("-s,--strategy", gb.strategy, "Selection strategy")->capture_default_str();
  gb_cmd->add_option("--seed", gb.seed, "Seed for the random strategy")->capture_default_str();
  gb_cmd->add_option("-n,--nvars", gb.nvars, "Number of variables (default: inferred)");
  gb_cmd->add_option("-p,--prime", gb.prime, "Field characteristic")->capture_default_str();
  gb_cmd->add_option("--format", gb.format, "text or json")->check(CLI::IsMember({"text", "json"}));
  gb_cmd->add_flag("--raw", gb.raw, "Print the unreduced output of the run");
  gb_cmd->add_option("--trace", gb.trace, "Write a JSON-lines step trace here");

  SampleArgs sa;
  auto* sample_cmd = app.add_subcommand("sample", "Draw one ideal from a distribution");
  sample_cmd->add_option("spec", sa.spec, "Distribution, e.g. \"3-20-10 weighted\"")->required();
  sample_cmd->add_option("--seed", sa.seed)->capture_default_str();
  sample_cmd->add_option("-o,--out", sa.out, "Output path or -")->capture_default_str();
  sample_cmd->add_option("--format", sa.format, "json or text")->check(CLI::IsMember({"text", "json"}));

  BenchArgs ba;
  auto* bench_cmd = app.add_subcommand("benchmark", "Compare strategies on the same sampled ideals");
  bench_cmd->add_option("spec", ba.spec, "Distribution, e.g. \"3-20-10 weighted\"")->required();
  bench_cmd->add_option("--strategies", ba.strategies, "Comma list or 'all'")->capture_default_str();
  bench_cmd->add_option("--samples", ba.samples)->capture_default_str()->check(CLI::NonNegativeNumber);
  bench_cmd->add_option("--seed", ba.seed)->capture_default_str();
  bench_cmd->add_option("-j,--workers", ba.workers)->capture_default_str()->check(CLI::PositiveNumber);
  bench_cmd->add_option("--csv", ba.csv, "Per-sample CSV path or -");
  bench_cmd->add_option("--json", ba.json_out, "Summary JSON path or -");
  bench_cmd->add_flag("--no-invariants", ba.no_invariants, "Skip basis size, deg_max and dimension");
  bench_cmd->add_option("--update", ba.update, "Pair update: gm, gm-latest (keep the latest pair per lcm class) or naive")
      ->capture_default_str()
      ->check(CLI::IsMember({"gm", "gm-latest", "naive"}));

  StatsArgs st;
  auto* stats_cmd = app.add_subcommand("stats", "Dimension histogram or Degree difficulty grid");
  stats_cmd->add_option("spec", st.spec)->required();
  stats_cmd->add_option("--samples", st.samples)->capture_default_str()->check(CLI::NonNegativeNumber);
  stats_cmd->add_option("--seed", st.seed)->capture_default_str();
  stats_cmd->add_option("-j,--workers", st.workers)->capture_default_str()->check(CLI::PositiveNumber);
  stats_cmd->add_option("--grid-d", st.grid_d, "Degrees for grid mode, e.g. 1:20");
  stats_cmd->add_option("--grid-s", st.grid_s, "Generator counts for grid mode, e.g. 2:10,15");
  stats_cmd->add_option("-o,--out", st.out)->capture_default_str();

  TrainArgs ta;
  auto* train_cmd = app.add_subcommand("train", "Train a selection policy with PPO");
  train_cmd->add_option("-c,--config", ta.config, "JSON config; keys mirror the trainer fields");
  train_cmd->add_option("--set", ta.overrides, "Override a config field, key=value (repeatable)");
  train_cmd->add_option("--epochs", ta.epochs, "Shortcut for --set epochs=N");
  train_cmd->add_option("-o,--out", ta.out, "Final model path")->capture_default_str();
  train_cmd->add_option("--log", ta.log, "Epoch log (JSON lines)")->capture_default_str();
  train_cmd->add_option("--resume", ta.resume, "Continue from a saved model");
  train_cmd->add_flag("--zero-timing", ta.zero_timing, "Write wall_seconds as 0 for byte-stable logs");

  EvalArgs ea;
  auto* eval_cmd = app.add_subcommand("evaluate", "Evaluate a model, optionally against the baselines");
  eval_cmd->add_option("model", ea.model)->required();
  eval_cmd->add_option("spec", ea.spec)->required();
  eval_cmd->add_option("--episodes", ea.episodes)->capture_default_str()->check(CLI::NonNegativeNumber);
  eval_cmd->add_option("--seed", ea.seed)->capture_default_str();
  eval_cmd->add_flag("--greedy", ea.greedy, "Take the most likely pair instead of sampling");
  eval_cmd->add_flag("--baselines", ea.baselines, "Also run the benchmark strategies on the same ideals");
  eval_cmd->add_option("--strategies", ea.strategies)->capture_default_str();
  eval_cmd->add_option("--ratios", ea.ratios, "Per-ideal log10 agent/best ratios CSV (needs --baselines)");
  eval_cmd->add_option("--csv", ea.csv, "Per-ideal additions CSV (needs --baselines)");
  eval_cmd->add_option("--max-steps", ea.max_steps, "Episode step cap, 0 for none")->capture_default_str();
  eval_cmd->add_option("-j,--workers", ea.workers)->capture_default_str()->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*gb_cmd) return cmd_gb(gb);
    if (*sample_cmd) return cmd_sample(sa);
    if (*bench_cmd) return cmd_benchmark(ba);
    if (*stats_cmd) return cmd_stats(st);
    if (*train_cmd) return cmd_train(ta);
    if (*eval_cmd) return cmd_evaluate(ea);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
