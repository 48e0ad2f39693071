#pragma once

// Deterministic and Erdos-Renyi test graphs.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "graphonlab/error.hpp"
#include "graphonlab/graph.hpp"
#include "graphonlab/rng.hpp"

namespace graphonlab::graphs {

/// G(n, p) by geometric skipping over the n(n-1)/2 pairs in row order.
inline SampledGraph erdos_renyi(std::size_t n, double p, std::uint64_t seed) {
  detail::require(p >= 0.0 && p <= 1.0, "erdos_renyi: p must lie in [0, 1]");
  std::vector<IndexEdge> edges;
  if (n < 2 || p == 0.0) return SampledGraph(n, edges);
  auto eng = rng::stream(seed, rng::Tag::generic, {n, 0x6572ULL});
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double log_q = std::log1p(-p);
  // Walk pairs (v, w) with w < v.
  std::int64_t v = 1, w = -1;
  const auto nn = static_cast<std::int64_t>(n);
  while (v < nn) {
    if (p == 1.0) {
      ++w;
    } else {
      const double r = unif(eng);
      const double skip = std::floor(std::log1p(-r) / log_q);
      w += 1 + static_cast<std::int64_t>(std::min(skip, 1e15));
    }
    while (w >= v && v < nn) {
      w -= v;
      ++v;
    }
    if (v < nn) edges.emplace_back(static_cast<VertexIndex>(w), static_cast<VertexIndex>(v));
  }
  return SampledGraph(n, std::move(edges));
}

inline SampledGraph complete_graph(std::size_t m) {
  std::vector<IndexEdge> e;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) e.emplace_back(i, j);
  return SampledGraph(m, std::move(e));
}

inline SampledGraph cycle_graph(std::size_t n) {
  detail::require(n >= 3, "cycle needs at least 3 vertices");
  std::vector<IndexEdge> e;
  for (std::size_t i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
  return SampledGraph(n, std::move(e));
}

inline SampledGraph path_graph(std::size_t n) {
  std::vector<IndexEdge> e;
  for (std::size_t i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return SampledGraph(n, std::move(e));
}

/// Star with centre 0 and k leaves.
inline SampledGraph star_graph(std::size_t k) {
  std::vector<IndexEdge> e;
  for (std::size_t i = 1; i <= k; ++i) e.emplace_back(0, i);
  return SampledGraph(k + 1, std::move(e));
}

/// Perfect matching on 2m vertices.
inline SampledGraph matching_graph(std::size_t m) {
  std::vector<IndexEdge> e;
  for (std::size_t i = 0; i < m; ++i) e.emplace_back(2 * i, 2 * i + 1);
  return SampledGraph(2 * m, std::move(e));
}

/// Clique on floor(n^{(1+alpha)/2}) vertices plus isolated vertices up to n.
inline SampledGraph clique_plus_isolated(std::size_t n, double alpha) {
  detail::require(alpha > 0.0 && alpha < 1.0, "clique_plus_isolated: alpha must lie in (0, 1)");
  const auto c = static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(n), (1.0 + alpha) / 2.0) + 1e-9));
  return complete_graph(std::min(c, n)).with_isolated(n - std::min(c, n));
}

/// G(n, n^{alpha - 1}): same edge scale as the clique family, no concentration.
inline SampledGraph er_example1(std::size_t n, double alpha, std::uint64_t seed) {
  detail::require(alpha > 0.0 && alpha < 1.0, "er_example1: alpha must lie in (0, 1)");
  return erdos_renyi(n, std::pow(static_cast<double>(n), alpha - 1.0), seed);
}

}  // namespace graphonlab::graphs
