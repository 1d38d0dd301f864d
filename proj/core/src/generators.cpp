#include "fastinf/generators.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

namespace fastinf {

Graph erdos_renyi(std::size_t n, double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("erdos_renyi: p outside [0, 1]");
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(p);
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v)
      if (coin(rng)) edges.emplace_back(u, v);
  return Graph::from_edges(n, edges);
}

Graph barabasi_albert(std::size_t n, std::size_t m, std::uint64_t seed) {
  if (m < 1 || n <= m) throw std::invalid_argument("barabasi_albert: need 1 <= m < n");
  std::mt19937_64 rng(seed);
  std::vector<std::pair<NodeId, NodeId>> edges;
  std::vector<NodeId> endpoints;  // node repeated once per incident edge
  for (NodeId u = 0; u <= m; ++u)
    for (NodeId v = u + 1; v <= m; ++v) {
      edges.emplace_back(u, v);
      endpoints.push_back(u);
      endpoints.push_back(v);
    }
  std::vector<NodeId> chosen;
  for (auto v = static_cast<NodeId>(m + 1); v < n; ++v) {
    chosen.clear();
    std::uniform_int_distribution<std::size_t> pick(0, endpoints.size() - 1);
    while (chosen.size() < m) {
      const NodeId target = endpoints[pick(rng)];
      if (std::find(chosen.begin(), chosen.end(), target) == chosen.end()) chosen.push_back(target);
    }
    for (NodeId target : chosen) {
      edges.emplace_back(target, v);
      endpoints.push_back(target);
      endpoints.push_back(v);
    }
  }
  return Graph::from_edges(n, edges);
}

}  // namespace fastinf
