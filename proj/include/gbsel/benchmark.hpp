#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "gbsel/groebner.hpp"
#include "gbsel/ideal_gen.hpp"
#include "gbsel/parallel.hpp"

namespace gbsel {

struct Summary {
  long count = 0;
  double mean = 0.0;
  /// Population standard deviation.
  double stddev = 0.0;
  double min = 0.0;
  double p25 = 0.0;
  double median = 0.0;
  double p75 = 0.0;
  double p95 = 0.0;
  double max = 0.0;
};

/// Linear-interpolated quantile of sorted data, q in [0, 1].
inline double quantile_sorted(const std::vector<double>& xs, double q) {
  if (xs.empty()) return 0.0;
  const double pos = q * double(xs.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (pos - double(lo)) * (xs[hi] - xs[lo]);
}

inline Summary summarize(std::vector<double> xs) {
  Summary s;
  s.count = static_cast<long>(xs.size());
  if (xs.empty()) return s;
  for (double x : xs) s.mean += x;
  s.mean /= double(xs.size());
  for (double x : xs) s.stddev += (x - s.mean) * (x - s.mean);
  s.stddev = std::sqrt(s.stddev / double(xs.size()));
  std::sort(xs.begin(), xs.end());
  s.min = xs.front();
  s.max = xs.back();
  s.p25 = quantile_sorted(xs, 0.25);
  s.median = quantile_sorted(xs, 0.5);
  s.p75 = quantile_sorted(xs, 0.75);
  s.p95 = quantile_sorted(xs, 0.95);
  return s;
}

struct BenchmarkConfig {
  DistributionSpec spec;
  std::vector<Strategy> strategies{std::begin(kAllStrategies), std::end(kAllStrategies)};
  long samples = 1000;
  std::uint64_t seed = 0;
  int workers = 1;
  /// Reduce each output basis to get size, deg_max and dimension.
  bool compute_invariants = true;
  UpdateRule rule = UpdateRule::gebauer_moller;
};

/// stats[s][k]: strategy s on ideal k = sample_ideal(spec, seed + k).
/// Random selection on ideal k is seeded with seed + k.
struct BenchmarkResult {
  BenchmarkConfig config;
  std::vector<std::vector<RunStats>> stats;

  Summary additions(std::size_t s) const {
    std::vector<double> xs;
    for (const RunStats& r : stats[s]) xs.push_back(double(r.additions));
    return summarize(std::move(xs));
  }
};

inline BenchmarkResult run_benchmark(const BenchmarkConfig& cfg) {
  cfg.spec.validate();
  BenchmarkResult res{cfg, {}};
  const std::size_t n = static_cast<std::size_t>(std::max(0L, cfg.samples));
  res.stats.assign(cfg.strategies.size(), std::vector<RunStats>(n));
  RunLimits limits;
  limits.compute_invariants = cfg.compute_invariants;
  limits.rule = cfg.rule;
  parallel_for(n, cfg.workers, [&](std::size_t k) {
    const IdealSample sample = sample_ideal(cfg.spec, cfg.seed + k);
    for (std::size_t s = 0; s < cfg.strategies.size(); ++s) {
      RunStats st = buchberger(sample.generators, cfg.strategies[s], cfg.seed + k, limits).stats;
      st.per_pair_additions.clear();
      res.stats[s][k] = std::move(st);
    }
  });
  return res;
}

/// seed_index,strategy,additions,basis_size,deg_max,dimension
inline void write_benchmark_csv(std::ostream& os, const BenchmarkResult& r) {
  os << "seed_index,strategy,additions,basis_size,deg_max,dimension\n";
  const std::size_t n = r.stats.empty() ? 0 : r.stats.front().size();
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t s = 0; s < r.config.strategies.size(); ++s) {
      const RunStats& st = r.stats[s][k];
      os << k << ',' << to_string(r.config.strategies[s]) << ',' << st.additions << ',' << st.basis_size << ','
         << st.deg_max << ',' << st.dimension << '\n';
    }
}

/// Counts of Krull dimension over a sample; key -1 marks the unit ideal.
inline std::map<int, long> dimension_histogram(const DistributionSpec& spec, long samples, std::uint64_t seed,
                                               int workers = 1) {
  std::vector<int> dims(static_cast<std::size_t>(std::max(0L, samples)));
  parallel_for(dims.size(), workers, [&](std::size_t k) {
    dims[k] = buchberger(sample_ideal(spec, seed + k).generators, Strategy::degree).stats.dimension;
  });
  std::map<int, long> hist;
  for (int d = -1; d <= spec.n; ++d) hist[d] = 0;
  for (int d : dims) hist[d]++;
  return hist;
}

}  // namespace gbsel
