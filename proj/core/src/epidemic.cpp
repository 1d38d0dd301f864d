#include "fastinf/epidemic.hpp"

#include "fastinf/io.hpp"
#include "fastinf/parallel.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace fastinf {

namespace {

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

SplitMix64 derive_stream(std::uint64_t master_seed, NodeId seed_node, std::uint64_t run) {
  std::uint64_t key = mix64(master_seed + 0x9E3779B97F4A7C15ULL);
  key = mix64(key ^ (static_cast<std::uint64_t>(seed_node) + 0xD1B54A32D192ED03ULL));
  key = mix64(key ^ (run + 0x8CB92BA72F3D8DD7ULL));
  return SplitMix64(key);
}

SimulationConfig SimulationConfig::from_lambda_ratio(double ratio, double lambda_c, double mu) {
  if (!(ratio > 0.0)) throw ConfigError("lambda ratio must be positive");
  SimulationConfig c;
  c.mu = mu;
  c.beta = ratio * lambda_c * mu;
  if (c.beta > 1.0)
    throw ConfigError("lambda ratio " + format_number(ratio) + " gives beta = " +
                      format_number(c.beta) + " > 1");
  c.validate();
  return c;
}

void SimulationConfig::validate() const {
  if (!(beta >= 0.0 && beta <= 1.0)) throw ConfigError("beta must lie in [0, 1]");
  if (!(mu >= 0.0 && mu <= 1.0)) throw ConfigError("mu must lie in [0, 1]");
  if (mu == 0.0 && beta > 0.0) throw ConfigError("mu = 0 never halts");
  if (runs < 1) throw ConfigError("runs must be >= 1");
  if (horizon < 1) throw ConfigError("horizon must be >= 1");
}

SirWorkspace::SirWorkspace(std::size_t node_count) : reached_stamp_(node_count, 0) {
  infectious_.reserve(node_count);
  next_.reserve(node_count);
}

RunTrace simulate_run(const Graph& g, NodeId seed, const SimulationConfig& config, SplitMix64& rng,
                      SirWorkspace& ws, std::uint32_t record_steps) {
  if (seed >= g.node_count()) throw std::out_of_range("simulate_run: seed out of range");
  if (++ws.stamp_ == 0) {
    std::fill(ws.reached_stamp_.begin(), ws.reached_stamp_.end(), 0u);
    ws.stamp_ = 1;
  }
  const std::uint32_t stamp = ws.stamp_;
  auto& reached = ws.reached_stamp_;
  auto& infectious = ws.infectious_;
  auto& next = ws.next_;

  RunTrace trace;
  trace.ever_infected.reserve(record_steps);
  infectious.clear();
  infectious.push_back(seed);
  reached[seed] = stamp;
  std::uint32_t count = 1;
  std::uint32_t step = 0;
  const double beta = config.beta;
  const double mu = config.mu;

  while (!infectious.empty()) {
    ++step;
    next.clear();
    for (NodeId v : infectious) {
      for (NodeId w : g.neighbors(v)) {
        if (reached[w] != stamp && rng.uniform() < beta) {
          reached[w] = stamp;
          next.push_back(w);
          ++count;
        }
      }
    }
    if (mu < 1.0) {
      for (NodeId v : infectious)
        if (!(rng.uniform() < mu)) next.push_back(v);
    }
    infectious.swap(next);
    if (step <= record_steps) trace.ever_infected.push_back(count);
  }
  trace.ever_infected.resize(record_steps, count);
  trace.final_size = count;
  trace.halting_step = step;
  return trace;
}

RunTrace simulate_run(const Graph& g, NodeId seed, const SimulationConfig& config, SplitMix64& rng) {
  SirWorkspace ws(g.node_count());
  return simulate_run(g, seed, config, rng, ws, config.horizon);
}

double InfluenceCurve::q(std::uint32_t t) const {
  if (t == kLateTime) return q_inf();
  if (t < 1 || t > horizon()) throw std::out_of_range("InfluenceCurve::q: t outside 1..T");
  return static_cast<double>(reached_total[t - 1]) /
         (static_cast<double>(runs) * static_cast<double>(node_count));
}

double InfluenceCurve::q_inf() const {
  return static_cast<double>(final_total) / (static_cast<double>(runs) * static_cast<double>(node_count));
}

namespace {

double mean_stderr(std::uint64_t total, std::uint64_t sq_total, std::uint32_t runs, std::uint32_t n) {
  if (runs < 2) return 0.0;
  const double r = runs;
  const double mean = static_cast<double>(total) / r;
  const double var = (static_cast<double>(sq_total) - r * mean * mean) / (r - 1.0);
  return std::sqrt(std::max(var, 0.0) / r) / static_cast<double>(n);
}

}  // namespace

double InfluenceCurve::q_stderr(std::uint32_t t) const {
  if (t == kLateTime) return q_inf_stderr();
  if (t < 1 || t > horizon()) throw std::out_of_range("InfluenceCurve::q_stderr: t outside 1..T");
  return mean_stderr(reached_total[t - 1], reached_sq_total[t - 1], runs, node_count);
}

double InfluenceCurve::q_inf_stderr() const {
  return mean_stderr(final_total, final_sq_total, runs, node_count);
}

std::vector<double> InfluenceCurve::q_series() const {
  std::vector<double> out;
  out.reserve(horizon());
  for (std::uint32_t t = 1; t <= horizon(); ++t) out.push_back(q(t));
  return out;
}

std::vector<double> InfluenceSet::q_at(std::uint32_t t) const {
  std::vector<double> out;
  out.reserve(curves.size());
  for (const auto& c : curves) out.push_back(c.q(t));
  return out;
}

std::string influence_fingerprint(const Graph& g, const SimulationConfig& c) {
  std::string canonical;
  canonical.reserve(32 + 16 * g.edge_count());
  canonical += kEngineVersion;
  canonical += '|';
  canonical += kRngName;
  canonical += "|n=" + std::to_string(g.node_count()) + "|edges=";
  for (auto [u, v] : g.edges()) {
    canonical += std::to_string(u);
    canonical += '-';
    canonical += std::to_string(v);
    canonical += ';';
  }
  canonical += "|beta=" + format_number(c.beta) + "|mu=" + format_number(c.mu) +
               "|runs=" + std::to_string(c.runs) + "|horizon=" + std::to_string(c.horizon) +
               "|seed=" + std::to_string(c.master_seed);
  return sha256_hex(canonical);
}

InfluenceSet influence_curves(const Graph& g, const SimulationConfig& config,
                              std::span<const NodeId> seeds, unsigned workers) {
  config.validate();
  const std::size_t n = g.node_count();
  std::vector<NodeId> all;
  if (seeds.empty()) {
    all.resize(n);
    for (NodeId v = 0; v < n; ++v) all[v] = v;
    seeds = all;
  }

  InfluenceSet set;
  set.config = config;
  set.fingerprint = influence_fingerprint(g, config);
  set.curves.resize(seeds.size());

  if (workers == 0) workers = default_workers();
  // Blocks only amortize workspace allocation; each seed's result depends on
  // (master_seed, seed, run) alone.
  const std::size_t blocks = std::min<std::size_t>(seeds.size(), std::size_t{workers} * 8);
  parallel_for(blocks, workers, [&](std::size_t b) {
    SirWorkspace ws(n);
    const std::size_t begin = b * seeds.size() / blocks;
    const std::size_t end = (b + 1) * seeds.size() / blocks;
    for (std::size_t i = begin; i < end; ++i) {
      InfluenceCurve& curve = set.curves[i];
      curve.seed = seeds[i];
      curve.node_count = static_cast<std::uint32_t>(n);
      curve.runs = config.runs;
      curve.reached_total.assign(config.horizon, 0);
      curve.reached_sq_total.assign(config.horizon, 0);
      for (std::uint32_t run = 0; run < config.runs; ++run) {
        auto rng = derive_stream(config.master_seed, seeds[i], run);
        auto trace = simulate_run(g, seeds[i], config, rng, ws, config.horizon);
        for (std::uint32_t t = 0; t < config.horizon; ++t) {
          const std::uint64_t c = trace.ever_infected[t];
          curve.reached_total[t] += c;
          curve.reached_sq_total[t] += c * c;
        }
        const std::uint64_t f = trace.final_size;
        curve.final_total += f;
        curve.final_sq_total += f * f;
      }
    }
  });
  return set;
}

ExactInfluence exact_influence_small(const Graph& g, NodeId seed, double beta, double mu,
                                     std::uint32_t horizon) {
  const std::size_t n = g.node_count();
  if (n > kExactMaxNodes)
    throw std::invalid_argument("exact_influence_small: N = " + std::to_string(n) + " exceeds " +
                                std::to_string(kExactMaxNodes));
  if (mu != 1.0) throw std::invalid_argument("exact_influence_small: requires mu = 1");
  if (!(beta >= 0.0 && beta <= 1.0)) throw std::invalid_argument("exact_influence_small: beta outside [0, 1]");
  if (seed >= n) throw std::out_of_range("exact_influence_small: seed out of range");

  using Mask = std::uint32_t;
  std::vector<Mask> adj(n, 0);
  for (NodeId v = 0; v < n; ++v)
    for (NodeId w : g.neighbors(v)) adj[v] |= Mask{1} << w;

  // State = (frontier, reached); frontier is the set infected last step.
  auto key = [](Mask frontier, Mask reached) {
    return static_cast<std::uint64_t>(frontier) << 32 | reached;
  };
  std::map<std::uint64_t, double> dist;
  dist[key(Mask{1} << seed, Mask{1} << seed)] = 1.0;

  ExactInfluence out;
  auto moments = [&](const std::map<std::uint64_t, double>& d) {
    double m1 = 0.0, m2 = 0.0;
    for (auto [k, p] : d) {
      const double frac = static_cast<double>(std::popcount(static_cast<Mask>(k))) / static_cast<double>(n);
      m1 += p * frac;
      m2 += p * frac * frac;
    }
    return std::pair{m1, m2 - m1 * m1};
  };

  std::vector<double> miss_pow(n + 1);
  for (std::size_t m = 0; m <= n; ++m) miss_pow[m] = std::pow(1.0 - beta, static_cast<double>(m));

  bool active = true;
  for (std::uint32_t t = 1; active || t <= horizon; ++t) {
    if (active) {
      std::map<std::uint64_t, double> next;
      active = false;
      for (auto [k, p] : dist) {
        const Mask frontier = static_cast<Mask>(k >> 32);
        const Mask reached = static_cast<Mask>(k);
        if (frontier == 0) {
          next[k] += p;
          continue;
        }
        std::vector<NodeId> cand;
        std::vector<double> pinf;
        for (NodeId v = 0; v < n; ++v) {
          if (reached >> v & 1) continue;
          const int hits = std::popcount(adj[v] & frontier);
          if (hits == 0) continue;
          cand.push_back(v);
          pinf.push_back(1.0 - miss_pow[static_cast<std::size_t>(hits)]);
        }
        const Mask subsets = Mask{1} << cand.size();
        for (Mask s = 0; s < subsets; ++s) {
          double prob = p;
          Mask infected = 0;
          for (std::size_t c = 0; c < cand.size(); ++c) {
            if (s >> c & 1) {
              prob *= pinf[c];
              infected |= Mask{1} << cand[c];
            } else {
              prob *= 1.0 - pinf[c];
            }
          }
          if (prob == 0.0) continue;
          next[key(infected, reached | infected)] += prob;
          if (infected != 0) active = true;
        }
      }
      dist.swap(next);
    }
    if (t <= horizon) {
      auto [m, v] = moments(dist);
      out.q.push_back(m);
      out.q_var.push_back(v);
    }
  }
  auto [m, v] = moments(dist);
  out.q_inf = m;
  out.q_inf_var = v;
  return out;
}

InfluenceCache::InfluenceCache(std::filesystem::path directory) : dir_(std::move(directory)) {}

std::filesystem::path InfluenceCache::path_for(const std::string& fingerprint) const {
  return dir_ / ("influence-" + fingerprint + ".csv");
}

namespace {

std::uint64_t parse_u64(const std::string& s) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw std::runtime_error("influence cache: bad integer '" + s + "'");
  return v;
}

}  // namespace

std::optional<InfluenceSet> InfluenceCache::load(const std::string& fingerprint,
                                                 const SimulationConfig& config) const {
  const auto path = path_for(fingerprint);
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::string line;
  if (!std::getline(in, line) || line != "# fastinf influence cache v1") return std::nullopt;
  if (!std::getline(in, line) || line != "fingerprint," + fingerprint) return std::nullopt;
  if (!std::getline(in, line)) return std::nullopt;
  auto meta = split_csv_record(line);
  if (meta.size() != 4 || meta[0] != "shape") return std::nullopt;
  const auto nodes = parse_u64(meta[1]);
  const auto runs = parse_u64(meta[2]);
  const auto horizon = parse_u64(meta[3]);
  if (runs != config.runs || horizon != config.horizon) return std::nullopt;

  InfluenceSet set;
  set.fingerprint = fingerprint;
  set.config = config;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = split_csv_record(line);
    if (f.size() != 3 + 2 * horizon) throw std::runtime_error("influence cache: malformed row in " + path.string());
    InfluenceCurve c;
    c.seed = static_cast<NodeId>(parse_u64(f[0]));
    c.node_count = static_cast<std::uint32_t>(nodes);
    c.runs = static_cast<std::uint32_t>(runs);
    c.final_total = parse_u64(f[1]);
    c.final_sq_total = parse_u64(f[2]);
    for (std::size_t t = 0; t < horizon; ++t) {
      c.reached_total.push_back(parse_u64(f[3 + t]));
      c.reached_sq_total.push_back(parse_u64(f[3 + horizon + t]));
    }
    set.curves.push_back(std::move(c));
  }
  if (set.curves.size() != nodes) return std::nullopt;
  return set;
}

void InfluenceCache::store(const InfluenceSet& set) const {
  std::ostringstream out;
  out << "# fastinf influence cache v1\n";
  out << "fingerprint," << set.fingerprint << '\n';
  const std::size_t nodes = set.curves.empty() ? 0 : set.curves.front().node_count;
  out << "shape," << nodes << ',' << set.config.runs << ',' << set.config.horizon << '\n';
  for (const auto& c : set.curves) {
    out << c.seed << ',' << c.final_total << ',' << c.final_sq_total;
    for (auto v : c.reached_total) out << ',' << v;
    for (auto v : c.reached_sq_total) out << ',' << v;
    out << '\n';
  }
  write_file_atomic(path_for(set.fingerprint), out.str());
}

InfluenceSet cached_influence_curves(const Graph& g, const SimulationConfig& config,
                                     const InfluenceCache* cache, unsigned workers, bool* hit) {
  config.validate();
  if (hit) *hit = false;
  if (cache) {
    const auto fp = influence_fingerprint(g, config);
    if (auto loaded = cache->load(fp, config)) {
      if (hit) *hit = true;
      return std::move(*loaded);
    }
  }
  auto set = influence_curves(g, config, {}, workers);
  if (cache) cache->store(set);
  return set;
}

void write_influence_csv(const Graph& g, const InfluenceSet& set, std::ostream& out) {
  out << "node_label,t,q,stderr\n";
  for (const auto& c : set.curves) {
    const std::string label = csv_field(g.label(c.seed));
    for (std::uint32_t t = 1; t <= c.horizon(); ++t)
      out << label << ',' << t << ',' << format_number(c.q(t)) << ',' << format_number(c.q_stderr(t)) << '\n';
    out << label << ",inf," << format_number(c.q_inf()) << ',' << format_number(c.q_inf_stderr()) << '\n';
  }
}

}  // namespace fastinf
