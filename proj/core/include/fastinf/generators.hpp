#pragma once

#include "fastinf/graph.hpp"

#include <cstdint>

namespace fastinf {

/// G(n, p) random graph.
Graph erdos_renyi(std::size_t n, double p, std::uint64_t seed);

/// Preferential attachment: each new node links to `m` distinct existing
/// nodes chosen proportionally to degree, starting from a clique on m + 1
/// nodes.
Graph barabasi_albert(std::size_t n, std::size_t m, std::uint64_t seed);

}  // namespace fastinf
