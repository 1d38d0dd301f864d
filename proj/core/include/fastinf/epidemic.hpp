#pragma once

#include "fastinf/graph.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fastinf {

inline constexpr std::string_view kEngineVersion = "sir-discrete-1";
inline constexpr std::string_view kRngName = "splitmix64";

/// SplitMix64 (Steele, Lea & Flood). Small, fast, and statistically solid
/// enough for Bernoulli draws; each (seed node, run) gets its own stream.
class SplitMix64 {
public:
  using result_type = std::uint64_t;
  explicit SplitMix64(std::uint64_t state) noexcept : state_(state) {}
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

private:
  std::uint64_t state_;
};

/// Stream for run `run` of the process seeded at `seed_node`. Depends only
/// on its arguments, never on scheduling.
SplitMix64 derive_stream(std::uint64_t master_seed, NodeId seed_node, std::uint64_t run);

class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

struct SimulationConfig {
  double beta = 0.0;
  double mu = 1.0;
  std::uint32_t runs = 1000;
  std::uint32_t horizon = 30;
  std::uint64_t master_seed = 1;

  /// beta = ratio * lambda_c * mu; throws ConfigError if that exceeds 1.
  static SimulationConfig from_lambda_ratio(double ratio, double lambda_c, double mu = 1.0);

  /// Throws ConfigError when a field is out of range.
  void validate() const;
};

/// Outcome of one SIR realization.
struct RunTrace {
  /// ever_infected[t-1] = nodes infected or recovered after step t, for
  /// t = 1..steps. Constant once the run halts.
  std::vector<std::uint32_t> ever_infected;
  /// Final ever-infected count.
  std::uint32_t final_size = 0;
  /// Step at which the last infectious node recovered.
  std::uint32_t halting_step = 0;
};

/// Reusable per-thread scratch for simulate_run.
class SirWorkspace {
public:
  explicit SirWorkspace(std::size_t node_count);

private:
  friend RunTrace simulate_run(const Graph&, NodeId, const SimulationConfig&, SplitMix64&,
                               SirWorkspace&, std::uint32_t);
  std::vector<std::uint32_t> reached_stamp_;
  std::uint32_t stamp_ = 0;
  std::vector<NodeId> infectious_, next_;
};

/// One synchronous discrete-time SIR run from a single seed.
///
/// Each step every infectious node tries each susceptible neighbor with
/// probability beta (newly infected nodes become infectious next step),
/// then every node infectious at the start of the step recovers with
/// probability mu. Runs until no infectious node remains; the trace
/// records `record_steps` cumulative counts.
RunTrace simulate_run(const Graph& g, NodeId seed, const SimulationConfig& config, SplitMix64& rng,
                      SirWorkspace& workspace, std::uint32_t record_steps);
RunTrace simulate_run(const Graph& g, NodeId seed, const SimulationConfig& config, SplitMix64& rng);

/// Time-resolved influence of one seed node.
///
/// Totals are sums over runs of integer node counts, so the means are
/// reproducible bit for bit and re-derivable from a cache file.
struct InfluenceCurve {
  NodeId seed = 0;
  std::uint32_t node_count = 0;
  std::uint32_t runs = 0;
  std::vector<std::uint64_t> reached_total;     ///< per t = 1..T
  std::vector<std::uint64_t> reached_sq_total;  ///< per t, sum of squares
  std::uint64_t final_total = 0;
  std::uint64_t final_sq_total = 0;

  std::uint32_t horizon() const noexcept { return static_cast<std::uint32_t>(reached_total.size()); }
  /// q(t), t in 1..T.
  double q(std::uint32_t t) const;
  double q_inf() const;
  /// Standard error of the Monte Carlo mean of q(t) / q(inf).
  double q_stderr(std::uint32_t t) const;
  double q_inf_stderr() const;
  /// q(1..T) as a vector.
  std::vector<double> q_series() const;

  bool operator==(const InfluenceCurve&) const = default;
};

/// Time index standing for t = infinity (the halted process).
inline constexpr std::uint32_t kLateTime = std::numeric_limits<std::uint32_t>::max();

struct InfluenceSet {
  std::string fingerprint;
  SimulationConfig config;
  std::vector<InfluenceCurve> curves;

  /// q(t) of every curve, in curve order. Pass kLateTime for q(inf).
  std::vector<double> q_at(std::uint32_t t) const;
};

/// Content fingerprint of (graph, beta, mu, runs, horizon, seed, engine).
std::string influence_fingerprint(const Graph& g, const SimulationConfig& config);

/// Monte Carlo influence curves for the given seeds (all nodes if empty).
/// Seeds are distributed over `workers` threads; output is identical for any
/// worker count.
InfluenceSet influence_curves(const Graph& g, const SimulationConfig& config,
                              std::span<const NodeId> seeds = {}, unsigned workers = 0);

/// Exact expected influence for tiny graphs (N <= 12, mu = 1), obtained by
/// propagating the distribution over (frontier, reached) states.
struct ExactInfluence {
  std::vector<double> q;         ///< q(t), t = 1..T
  std::vector<double> q_var;     ///< Var of reached/N at t
  double q_inf = 0.0;
  double q_inf_var = 0.0;
};

inline constexpr std::size_t kExactMaxNodes = 12;

ExactInfluence exact_influence_small(const Graph& g, NodeId seed, double beta, double mu,
                                     std::uint32_t horizon);

/// On-disk cache of influence totals (CSV, one file per fingerprint).
class InfluenceCache {
public:
  explicit InfluenceCache(std::filesystem::path directory);

  std::optional<InfluenceSet> load(const std::string& fingerprint, const SimulationConfig& config) const;
  void store(const InfluenceSet& set) const;
  std::filesystem::path path_for(const std::string& fingerprint) const;

private:
  std::filesystem::path dir_;
};

/// Like influence_curves (all nodes) but consults and fills the cache.
/// `hit` reports whether the cache answered.
InfluenceSet cached_influence_curves(const Graph& g, const SimulationConfig& config,
                                     const InfluenceCache* cache, unsigned workers, bool* hit = nullptr);

/// Long-format CSV: node_label,t,q,stderr with t = "inf" for the late-time row.
void write_influence_csv(const Graph& g, const InfluenceSet& set, std::ostream& out);

}  // namespace fastinf
