#include "fastinf/centrality.hpp"

#include "fastinf/io.hpp"
#include "fastinf/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>

namespace fastinf {

namespace {

constexpr std::array<std::string_view, 10> kMetricNames = {
    "degree", "social_capital", "h_index",     "local_rank", "dsc",
    "k_core", "eigenvector",    "betweenness", "closeness",  "clustering",
};

// Sources are grouped into a fixed number of blocks so that floating-point
// reductions happen in the same order whatever the worker count.
constexpr std::size_t kReductionBlocks = 16;

struct Block {
  std::size_t begin, end;
};

Block block_range(std::size_t block, std::size_t blocks, std::size_t n) {
  return {block * n / blocks, (block + 1) * n / blocks};
}

CentralityScores make_scores(Metric m, std::size_t n) {
  CentralityScores s;
  s.metric = m;
  s.scores.assign(n, 0.0);
  return s;
}

}  // namespace

std::string_view metric_name(Metric m) { return kMetricNames[static_cast<std::size_t>(m)]; }

Metric parse_metric(std::string_view name) {
  for (std::size_t i = 0; i < kMetricNames.size(); ++i)
    if (kMetricNames[i] == name) return static_cast<Metric>(i);
  throw std::invalid_argument("unknown metric '" + std::string(name) + "'");
}

std::string CentralityScores::parameter_string() const {
  std::string out;
  if (dsc) {
    out = "beta=" + format_number(dsc->beta) + ";mu=" + format_number(dsc->mu) +
          ";t=" + std::to_string(dsc->steps);
  }
  if (eigen) {
    out = "tol=" + format_number(eigen->tolerance) +
          ";max_iter=" + std::to_string(eigen->max_iterations) +
          ";iterations=" + std::to_string(iterations) + (converged ? "" : ";not_converged");
  }
  return out;
}

CentralityScores degree(const Graph& g) {
  auto s = make_scores(Metric::degree, g.node_count());
  for (NodeId v = 0; v < g.node_count(); ++v) s.scores[v] = static_cast<double>(g.degree(v));
  return s;
}

CentralityScores social_capital(const Graph& g) {
  auto s = make_scores(Metric::social_capital, g.node_count());
  for (NodeId v = 0; v < g.node_count(); ++v) {
    std::uint64_t total = g.degree(v);
    for (NodeId w : g.neighbors(v)) total += g.degree(w);
    s.scores[v] = static_cast<double>(total);
  }
  return s;
}

CentralityScores h_index(const Graph& g) {
  auto s = make_scores(Metric::h_index, g.node_count());
  std::vector<std::size_t> degrees;
  for (NodeId v = 0; v < g.node_count(); ++v) {
    degrees.clear();
    for (NodeId w : g.neighbors(v)) degrees.push_back(g.degree(w));
    std::sort(degrees.begin(), degrees.end(), std::greater<>());
    std::size_t h = 0;
    while (h < degrees.size() && degrees[h] >= h + 1) ++h;
    s.scores[v] = static_cast<double>(h);
  }
  return s;
}

CentralityScores local_rank(const Graph& g, unsigned workers) {
  const std::size_t n = g.node_count();
  auto s = make_scores(Metric::local_rank, n);

  std::vector<std::uint64_t> ball(n, 0);
  const std::size_t blocks = std::min(kReductionBlocks, std::max<std::size_t>(n, 1));
  parallel_for(blocks, workers, [&](std::size_t b) {
    auto [begin, end] = block_range(b, blocks, n);
    std::vector<std::uint32_t> stamp(n, 0);
    std::uint32_t mark = 0;
    for (std::size_t l = begin; l < end; ++l) {
      ++mark;
      stamp[l] = mark;
      std::uint64_t count = 0;
      for (NodeId j : g.neighbors(static_cast<NodeId>(l))) {
        if (stamp[j] != mark) {
          stamp[j] = mark;
          ++count;
        }
        for (NodeId u : g.neighbors(j)) {
          if (stamp[u] != mark) {
            stamp[u] = mark;
            ++count;
          }
        }
      }
      ball[l] = count;
    }
  });

  std::vector<std::uint64_t> second(n, 0);
  for (NodeId j = 0; j < n; ++j)
    for (NodeId l : g.neighbors(j)) second[j] += ball[l];
  for (NodeId i = 0; i < n; ++i) {
    std::uint64_t total = 0;
    for (NodeId j : g.neighbors(i)) total += second[j];
    s.scores[i] = static_cast<double>(total);
  }
  return s;
}

CentralityScores dynamics_sensitive(const Graph& g, const DscParams& p) {
  if (!(p.beta >= 0.0 && p.beta <= 1.0)) throw ParameterError("dsc: beta must lie in [0, 1]");
  if (!(p.mu >= 0.0 && p.mu <= 1.0)) throw ParameterError("dsc: mu must lie in [0, 1]");
  if (p.steps < 0) throw ParameterError("dsc: t must be non-negative");

  const std::size_t n = g.node_count();
  auto s = make_scores(Metric::dynamics_sensitive, n);
  s.dsc = p;
  // A is symmetric, so the transposes in s = (beta A sum H^m)^T e drop out.
  std::vector<double> term(n), next(n);
  for (NodeId v = 0; v < n; ++v) term[v] = p.beta * static_cast<double>(g.degree(v));
  s.scores = term;
  const double keep = 1.0 - p.mu;
  for (int step = 0; step < p.steps; ++step) {
    for (NodeId v = 0; v < n; ++v) {
      double acc = 0.0;
      for (NodeId w : g.neighbors(v)) acc += term[w];
      next[v] = p.beta * acc + keep * term[v];
    }
    term.swap(next);
    for (NodeId v = 0; v < n; ++v) s.scores[v] += term[v];
  }
  return s;
}

CentralityScores k_core(const Graph& g) {
  // Batagelj & Zaversnik bucket ordering.
  const std::size_t n = g.node_count();
  auto s = make_scores(Metric::k_core, n);
  if (n == 0) return s;
  std::vector<std::size_t> deg(n);
  std::size_t max_deg = 0;
  for (NodeId v = 0; v < n; ++v) {
    deg[v] = g.degree(v);
    max_deg = std::max(max_deg, deg[v]);
  }
  std::vector<std::size_t> bin(max_deg + 1, 0);
  for (auto d : deg) ++bin[d];
  std::size_t start = 0;
  for (auto& b : bin) {
    auto count = b;
    b = start;
    start += count;
  }
  std::vector<NodeId> order(n);
  std::vector<std::size_t> pos(n);
  for (NodeId v = 0; v < n; ++v) {
    pos[v] = bin[deg[v]]++;
    order[pos[v]] = v;
  }
  for (std::size_t d = max_deg; d > 0; --d) bin[d] = bin[d - 1];
  bin[0] = 0;

  for (std::size_t i = 0; i < n; ++i) {
    NodeId v = order[i];
    for (NodeId u : g.neighbors(v)) {
      if (deg[u] > deg[v]) {
        const std::size_t du = deg[u];
        const std::size_t pu = pos[u];
        const std::size_t pw = bin[du];
        const NodeId w = order[pw];
        if (u != w) {
          pos[u] = pw;
          order[pu] = w;
          pos[w] = pu;
          order[pw] = u;
        }
        ++bin[du];
        --deg[u];
      }
    }
  }
  for (NodeId v = 0; v < n; ++v) s.scores[v] = static_cast<double>(deg[v]);
  return s;
}

CentralityScores eigenvector(const Graph& g, const EigenvectorParams& p) {
  if (g.edge_count() == 0) throw std::domain_error("eigenvector: graph has no edges");
  if (!(p.tolerance > 0.0) || p.max_iterations < 1)
    throw ParameterError("eigenvector: tolerance must be > 0 and max_iterations >= 1");
  const std::size_t n = g.node_count();
  auto s = make_scores(Metric::eigenvector, n);
  s.eigen = p;
  s.converged = false;

  auto normalize = [](std::vector<double>& v) {
    double sq = 0.0;
    for (double x : v) sq += x * x;
    const double norm = std::sqrt(sq);
    for (double& x : v) x /= norm;
  };

  std::vector<double> x(n, 1.0), next(n);
  normalize(x);
  for (int it = 1; it <= p.max_iterations; ++it) {
    for (NodeId v = 0; v < n; ++v) {
      double acc = x[v];
      for (NodeId w : g.neighbors(v)) acc += x[w];
      next[v] = acc;
    }
    normalize(next);
    double diff = 0.0;
    for (std::size_t i = 0; i < n; ++i) diff = std::max(diff, std::abs(next[i] - x[i]));
    x.swap(next);
    s.iterations = it;
    if (diff < p.tolerance) {
      s.converged = true;
      break;
    }
  }
  s.scores = std::move(x);
  return s;
}

CentralityScores betweenness(const Graph& g, unsigned workers) {
  const std::size_t n = g.node_count();
  auto s = make_scores(Metric::betweenness, n);
  if (n == 0) return s;
  const std::size_t blocks = std::min(kReductionBlocks, n);
  std::vector<std::vector<double>> partial(blocks);

  parallel_for(blocks, workers, [&](std::size_t b) {
    auto [begin, end] = block_range(b, blocks, n);
    std::vector<double> acc(n, 0.0);
    std::vector<double> sigma(n), delta(n);
    std::vector<std::int64_t> dist(n, -1);
    std::vector<NodeId> queue;  // BFS order doubles as the stack
    queue.reserve(n);
    for (std::size_t src = begin; src < end; ++src) {
      queue.clear();
      queue.push_back(static_cast<NodeId>(src));
      dist[src] = 0;
      sigma[src] = 1.0;
      for (std::size_t head = 0; head < queue.size(); ++head) {
        NodeId v = queue[head];
        for (NodeId w : g.neighbors(v)) {
          if (dist[w] < 0) {
            dist[w] = dist[v] + 1;
            sigma[w] = 0.0;
            queue.push_back(w);
          }
          if (dist[w] == dist[v] + 1) sigma[w] += sigma[v];
        }
      }
      for (NodeId v : queue) delta[v] = 0.0;
      for (auto it = queue.rbegin(); it != queue.rend(); ++it) {
        NodeId w = *it;
        for (NodeId v : g.neighbors(w))
          if (dist[v] == dist[w] - 1) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
        if (w != src) acc[w] += delta[w];
      }
      for (NodeId v : queue) dist[v] = -1;
    }
    partial[b] = std::move(acc);
  });

  for (const auto& part : partial)
    for (std::size_t i = 0; i < n; ++i) s.scores[i] += part[i];
  // Every unordered pair was visited from both endpoints.
  for (double& x : s.scores) x *= 0.5;
  return s;
}

CentralityScores closeness(const Graph& g, unsigned workers) {
  const std::size_t n = g.node_count();
  auto s = make_scores(Metric::closeness, n);
  if (n <= 1) return s;
  const std::size_t blocks = std::min(kReductionBlocks, n);
  parallel_for(blocks, workers, [&](std::size_t b) {
    auto [begin, end] = block_range(b, blocks, n);
    std::vector<std::int64_t> dist(n, -1);
    std::vector<NodeId> queue;
    queue.reserve(n);
    for (std::size_t src = begin; src < end; ++src) {
      queue.clear();
      queue.push_back(static_cast<NodeId>(src));
      dist[src] = 0;
      std::uint64_t total = 0;
      for (std::size_t head = 0; head < queue.size(); ++head) {
        NodeId v = queue[head];
        total += static_cast<std::uint64_t>(dist[v]);
        for (NodeId w : g.neighbors(v)) {
          if (dist[w] < 0) {
            dist[w] = dist[v] + 1;
            queue.push_back(w);
          }
        }
      }
      const std::size_t reach = queue.size() - 1;  // |G_i| - 1
      if (reach > 0) {
        const double mean_distance = static_cast<double>(total) / static_cast<double>(reach);
        s.scores[src] = static_cast<double>(reach) / static_cast<double>(n - 1) / mean_distance;
      }
      for (NodeId v : queue) dist[v] = -1;
    }
  });
  return s;
}

CentralityScores clustering_coefficient(const Graph& g) {
  const std::size_t n = g.node_count();
  auto s = make_scores(Metric::clustering, n);
  std::vector<std::uint32_t> stamp(n, 0);
  std::uint32_t mark = 0;
  for (NodeId v = 0; v < n; ++v) {
    const std::size_t k = g.degree(v);
    if (k < 2) continue;
    ++mark;
    for (NodeId w : g.neighbors(v)) stamp[w] = mark;
    std::uint64_t links = 0;
    for (NodeId w : g.neighbors(v))
      for (NodeId u : g.neighbors(w))
        if (u > w && stamp[u] == mark) ++links;
    s.scores[v] = 2.0 * static_cast<double>(links) / (static_cast<double>(k) * static_cast<double>(k - 1));
  }
  return s;
}

CentralityScores compute_metric(const Graph& g, Metric m, const CentralityOptions& options) {
  switch (m) {
    case Metric::degree: return degree(g);
    case Metric::social_capital: return social_capital(g);
    case Metric::h_index: return h_index(g);
    case Metric::local_rank: return local_rank(g, options.workers);
    case Metric::dynamics_sensitive: {
      DscParams p;
      p.beta = options.dsc_beta ? *options.dsc_beta : epidemic_threshold(degree_stats(g));
      p.mu = options.dsc_mu;
      p.steps = options.dsc_steps;
      return dynamics_sensitive(g, p);
    }
    case Metric::k_core: return k_core(g);
    case Metric::eigenvector: return eigenvector(g, options.eigen);
    case Metric::betweenness: return betweenness(g, options.workers);
    case Metric::closeness: return closeness(g, options.workers);
    case Metric::clustering: return clustering_coefficient(g);
  }
  throw std::invalid_argument("compute_metric: unknown metric");
}

void write_scores_csv(const Graph& g, const std::vector<CentralityScores>& sets, std::ostream& out) {
  out << "node_label,metric,score,parameters\n";
  for (const auto& set : sets) {
    const std::string params = csv_field(set.parameter_string());
    const std::string_view name = metric_name(set.metric);
    for (NodeId v = 0; v < g.node_count(); ++v)
      out << csv_field(g.label(v)) << ',' << name << ',' << format_number(set.scores[v]) << ','
          << params << '\n';
  }
}

}  // namespace fastinf
