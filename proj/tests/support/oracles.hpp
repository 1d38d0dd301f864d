#pragma once

// Definitional (slow) reference implementations used only by tests. They
// work from the adjacency matrix and all-pairs distances, not from the
// library's BFS/bucket code paths.

#include "fastinf/graph.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

namespace fastinf::oracle {

inline constexpr int kUnreachable = std::numeric_limits<int>::max() / 4;

using Matrix = std::vector<std::vector<int>>;

inline Matrix adjacency(const Graph& g) {
  const std::size_t n = g.node_count();
  Matrix a(n, std::vector<int>(n, 0));
  for (auto [u, v] : g.edges()) a[u][v] = a[v][u] = 1;
  return a;
}

/// Floyd-Warshall.
inline Matrix distances(const Graph& g) {
  const std::size_t n = g.node_count();
  auto a = adjacency(g);
  Matrix d(n, std::vector<int>(n, kUnreachable));
  for (std::size_t i = 0; i < n; ++i) {
    d[i][i] = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (a[i][j]) d[i][j] = 1;
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
  return d;
}

inline std::vector<double> h_index(const Graph& g) {
  const std::size_t n = g.node_count();
  auto a = adjacency(g);
  std::vector<int> deg(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) deg[i] += a[i][j];
  std::vector<double> h(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (int cand = 1; cand <= deg[i]; ++cand) {
      int at_least = 0;
      for (std::size_t j = 0; j < n; ++j)
        if (a[i][j] && deg[j] >= cand) ++at_least;
      if (at_least >= cand) h[i] = cand;
    }
  }
  return h;
}

/// Coreness as the largest k such that the node survives in the k-core,
/// the k-core found by repeatedly deleting nodes of degree < k.
inline std::vector<double> k_core(const Graph& g) {
  const std::size_t n = g.node_count();
  auto a = adjacency(g);
  std::vector<double> core(n, 0.0);
  for (int k = 1;; ++k) {
    std::vector<bool> alive(n, true);
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t i = 0; i < n; ++i) {
        if (!alive[i]) continue;
        int d = 0;
        for (std::size_t j = 0; j < n; ++j)
          if (alive[j] && a[i][j]) ++d;
        if (d < k) {
          alive[i] = false;
          changed = true;
        }
      }
    }
    bool any = false;
    for (std::size_t i = 0; i < n; ++i)
      if (alive[i]) {
        core[i] = k;
        any = true;
      }
    if (!any) break;
  }
  return core;
}

/// Literal double sum over the adjacency matrix.
inline std::vector<double> local_rank(const Graph& g) {
  const std::size_t n = g.node_count();
  auto a = adjacency(g);
  auto d = distances(g);
  std::vector<long long> nl(n, 0);
  for (std::size_t l = 0; l < n; ++l)
    for (std::size_t u = 0; u < n; ++u)
      if (u != l && d[l][u] <= 2) ++nl[l];
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    long long total = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (!a[j][i]) continue;
      for (std::size_t l = 0; l < n; ++l)
        if (a[l][j]) total += nl[l];
    }
    out[i] = static_cast<double>(total);
  }
  return out;
}

inline std::vector<double> closeness(const Graph& g) {
  const std::size_t n = g.node_count();
  auto d = distances(g);
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    long long sum = 0, reach = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i && d[i][j] < kUnreachable) {
        sum += d[i][j];
        ++reach;
      }
    if (reach == 0) continue;
    const double mean = static_cast<double>(sum) / static_cast<double>(reach);
    out[i] = static_cast<double>(reach) / static_cast<double>(n - 1) / mean;
  }
  return out;
}

/// Enumerates every shortest s-t path explicitly (DFS along edges that
/// advance the distance by one) and counts the paths through each node.
/// Unordered pairs, each counted once.
inline std::vector<double> betweenness(const Graph& g) {
  const std::size_t n = g.node_count();
  auto a = adjacency(g);
  auto d = distances(g);
  std::vector<long double> out(n, 0.0L);
  std::vector<std::size_t> path;
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t t = s + 1; t < n; ++t) {
      if (d[s][t] >= kUnreachable || d[s][t] < 2) continue;
      long long total = 0;
      std::vector<long long> through(n, 0);
      std::function<void(std::size_t)> walk = [&](std::size_t v) {
        if (v == t) {
          ++total;
          for (std::size_t k = 1; k + 1 < path.size(); ++k) ++through[path[k]];
          return;
        }
        for (std::size_t w = 0; w < n; ++w) {
          if (a[v][w] && d[s][w] == d[s][v] + 1 && d[w][t] == d[v][t] - 1) {
            path.push_back(w);
            walk(w);
            path.pop_back();
          }
        }
      };
      path.assign(1, s);
      walk(s);
      for (std::size_t i = 0; i < n; ++i)
        if (through[i]) out[i] += static_cast<long double>(through[i]) / static_cast<long double>(total);
    }
  }
  return {out.begin(), out.end()};
}

/// For mu = 1, discrete SIR from one seed is bond percolation: each edge
/// transmits at most once, independently with probability beta, and a node
/// is reached at step t iff it lies within distance t of the seed in the
/// open-edge subgraph. Enumerates all 2^L edge states (keep L small).
struct PercolationInfluence {
  std::vector<double> q;  // t = 1..T
  double q_inf = 0.0;
};

inline PercolationInfluence percolation_influence(const Graph& g, NodeId seed, double beta, std::uint32_t horizon) {
  const std::size_t n = g.node_count();
  const auto edges = g.edges();
  const std::size_t m = edges.size();
  PercolationInfluence out;
  out.q.assign(horizon, 0.0);
  std::vector<int> dist(n);
  std::vector<std::vector<NodeId>> adj(n);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
    double p = 1.0;
    for (auto& row : adj) row.clear();
    for (std::size_t e = 0; e < m; ++e) {
      if (mask >> e & 1) {
        p *= beta;
        adj[edges[e].first].push_back(edges[e].second);
        adj[edges[e].second].push_back(edges[e].first);
      } else {
        p *= 1.0 - beta;
      }
    }
    if (p == 0.0) continue;
    std::fill(dist.begin(), dist.end(), -1);
    std::vector<NodeId> queue{seed};
    dist[seed] = 0;
    for (std::size_t h = 0; h < queue.size(); ++h)
      for (NodeId w : adj[queue[h]])
        if (dist[w] < 0) {
          dist[w] = dist[queue[h]] + 1;
          queue.push_back(w);
        }
    for (std::uint32_t t = 1; t <= horizon; ++t) {
      std::size_t within = 0;
      for (int x : dist)
        if (x >= 0 && x <= static_cast<int>(t)) ++within;
      out.q[t - 1] += p * static_cast<double>(within) / static_cast<double>(n);
    }
    out.q_inf += p * static_cast<double>(queue.size()) / static_cast<double>(n);
  }
  return out;
}

}  // namespace fastinf::oracle
